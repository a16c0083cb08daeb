//! Two-photon Dicke model: exact diagonalization, mean-field and classical limits.

pub mod classical;
pub mod eigensolve;
pub mod hamiltonian;
pub mod meanfield;
pub mod model;
pub mod sweep;

pub use num_complex::Complex64;
