//! Parameter space, truncated product basis and parity labels of the
//! two-photon Dicke model
//!
//! ```text
//! H = ω a†a + ω0 Jz + (γ/N) (a†² + a²)(J+ + J-),   N = 2j
//! ```
//!
//! Spins are carried as the integer `two_j = 2j` and magnetic quantum numbers
//! as `m_twice = 2m`, so half-integer spins are exact and every parity
//! computation is integer arithmetic.

use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ModelError {
    #[error("field frequency omega must be positive and finite, got {0}")]
    Omega(f64),
    #[error("atomic frequency omega0 must be finite, got {0}")]
    Omega0(f64),
    #[error("coupling gamma must be non-negative and finite, got {0}")]
    Gamma(f64),
    #[error("2j must be at least 1, got {0}")]
    TwoJ(u32),
    #[error("spin j = {0} is not a positive multiple of 1/2")]
    Spin(f64),
    #[error("invalid numerical controls: {0}")]
    Controls(String),
}

/// Physical parameters (ħ = 1).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModelParams {
    pub omega: f64,
    pub omega0: f64,
    pub gamma: f64,
    /// Twice the collective spin; equals the number of atoms N.
    pub two_j: u32,
}

impl ModelParams {
    pub fn new(omega: f64, omega0: f64, gamma: f64, two_j: u32) -> Result<Self, ModelError> {
        let params = Self { omega, omega0, gamma, two_j };
        params.validate()?;
        Ok(params)
    }

    /// Builds parameters from a spin value `j` that must be a multiple of 1/2.
    pub fn with_spin(omega: f64, omega0: f64, gamma: f64, j: f64) -> Result<Self, ModelError> {
        Self::new(omega, omega0, gamma, two_j_from_spin(j)?)
    }

    pub fn validate(&self) -> Result<(), ModelError> {
        if !(self.omega.is_finite() && self.omega > 0.0) {
            return Err(ModelError::Omega(self.omega));
        }
        if !self.omega0.is_finite() {
            return Err(ModelError::Omega0(self.omega0));
        }
        if !(self.gamma.is_finite() && self.gamma >= 0.0) {
            return Err(ModelError::Gamma(self.gamma));
        }
        if self.two_j < 1 {
            return Err(ModelError::TwoJ(self.two_j));
        }
        Ok(())
    }

    pub fn j(&self) -> f64 {
        f64::from(self.two_j) / 2.0
    }

    /// Number of atoms N = 2j.
    pub fn atoms(&self) -> f64 {
        f64::from(self.two_j)
    }

    pub fn with_gamma(self, gamma: f64) -> Self {
        Self { gamma, ..self }
    }

    pub fn with_omega0(self, omega0: f64) -> Self {
        Self { omega0, ..self }
    }

    pub fn with_two_j(self, two_j: u32) -> Self {
        Self { two_j, ..self }
    }
}

/// Converts a spin value to `2j`, rejecting anything that is not a positive
/// half-integer multiple.
pub fn two_j_from_spin(j: f64) -> Result<u32, ModelError> {
    let twice = 2.0 * j;
    let rounded = twice.round();
    if !j.is_finite() || rounded < 1.0 || (twice - rounded).abs() > 1e-9 || rounded > f64::from(u32::MAX) {
        return Err(ModelError::Spin(j));
    }
    Ok(rounded as u32)
}

/// Numerical controls for exact diagonalization.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct NumericalControls {
    /// Initial Fock cutoff.
    pub n_max: usize,
    /// Hard maximum Fock cutoff.
    pub n_cap: usize,
    pub tol_abs: f64,
    pub tol_rel: f64,
    /// Eigensolver residual tolerance ‖Hv - λv‖.
    pub eig_tol: f64,
    /// Seed of the Lanczos start vector.
    pub seed: u64,
    /// Upper bound on stored matrix elements of one Hamiltonian.
    pub element_budget: usize,
    /// Matrix-vector product cap per eigensolve.
    pub max_iterations: usize,
}

impl Default for NumericalControls {
    fn default() -> Self {
        Self {
            n_max: 16,
            n_cap: 512,
            tol_abs: 1e-9,
            tol_rel: 1e-10,
            eig_tol: 1e-8,
            seed: 0x5eed_d1c3,
            element_budget: 50_000_000,
            max_iterations: 20_000,
        }
    }
}

impl NumericalControls {
    pub fn validate(&self) -> Result<(), ModelError> {
        if self.n_max < 4 {
            return Err(ModelError::Controls(format!("n_max must be >= 4, got {}", self.n_max)));
        }
        if self.n_cap < self.n_max {
            return Err(ModelError::Controls(format!(
                "n_cap ({}) must be >= n_max ({})",
                self.n_cap, self.n_max
            )));
        }
        for (name, value) in [("tol_abs", self.tol_abs), ("tol_rel", self.tol_rel), ("eig_tol", self.eig_tol)] {
            if !(value.is_finite() && value > 0.0) {
                return Err(ModelError::Controls(format!("{name} must be positive, got {value}")));
            }
        }
        if self.max_iterations == 0 {
            return Err(ModelError::Controls("max_iterations must be positive".into()));
        }
        Ok(())
    }

    /// Convergence threshold on the ground energy at energy scale `e0`.
    pub fn energy_tolerance(&self, e0: f64) -> f64 {
        self.tol_abs + self.tol_rel * e0.abs()
    }
}

/// Product-basis label |n⟩ ⊗ |j, m⟩.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct BasisIndex {
    pub n: u32,
    /// Twice the Jz eigenvalue, in -2j..=2j with step 2.
    pub m_twice: i32,
}

impl BasisIndex {
    pub fn new(n: u32, m_twice: i32) -> Self {
        Self { n, m_twice }
    }

    pub fn m(&self) -> f64 {
        f64::from(self.m_twice) / 2.0
    }

    pub fn is_valid(&self, two_j: u32, n_max: usize) -> bool {
        let tj = two_j as i32;
        (self.n as usize) <= n_max && self.m_twice.abs() <= tj && (self.m_twice + tj) % 2 == 0
    }
}

/// The truncated basis n = 0..=n_max, m = -j..=j in n-major order.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Basis {
    pub n_max: usize,
    pub two_j: u32,
}

impl Basis {
    pub fn new(n_max: usize, two_j: u32) -> Self {
        Self { n_max, two_j }
    }

    pub fn spin_dim(&self) -> usize {
        self.two_j as usize + 1
    }

    pub fn dim(&self) -> usize {
        (self.n_max + 1) * self.spin_dim()
    }

    pub fn index_of(&self, b: BasisIndex) -> usize {
        b.n as usize * self.spin_dim() + ((b.m_twice + self.two_j as i32) / 2) as usize
    }

    pub fn state(&self, index: usize) -> BasisIndex {
        let sd = self.spin_dim();
        let n = (index / sd) as u32;
        let m_twice = 2 * (index % sd) as i32 - self.two_j as i32;
        BasisIndex { n, m_twice }
    }

    pub fn iter(&self) -> impl Iterator<Item = BasisIndex> + '_ {
        (0..self.dim()).map(move |i| self.state(i))
    }
}

/// Eigenvalue of Π = exp(iπΛ), Λ = a†a/2 + Jz + j.
///
/// The derived ordering (+1, -1, +i, -i) is the tie-break order used when
/// sector minima are degenerate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum ParitySector {
    #[serde(rename = "+1")]
    Plus,
    #[serde(rename = "-1")]
    Minus,
    #[serde(rename = "+i")]
    PlusI,
    #[serde(rename = "-i")]
    MinusI,
}

impl ParitySector {
    pub const ALL: [ParitySector; 4] = [Self::Plus, Self::Minus, Self::PlusI, Self::MinusI];

    /// Sector of i^k.
    pub fn from_power_of_i(k: i64) -> Self {
        match k.rem_euclid(4) {
            0 => Self::Plus,
            1 => Self::PlusI,
            2 => Self::Minus,
            _ => Self::MinusI,
        }
    }

    pub fn value(self) -> Complex64 {
        match self {
            Self::Plus => Complex64::new(1.0, 0.0),
            Self::Minus => Complex64::new(-1.0, 0.0),
            Self::PlusI => Complex64::new(0.0, 1.0),
            Self::MinusI => Complex64::new(0.0, -1.0),
        }
    }

    pub fn position(self) -> usize {
        match self {
            Self::Plus => 0,
            Self::Minus => 1,
            Self::PlusI => 2,
            Self::MinusI => 3,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            Self::Plus => "+1",
            Self::Minus => "-1",
            Self::PlusI => "+i",
            Self::MinusI => "-i",
        }
    }
}

impl fmt::Display for ParitySector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Phase {
    Normal,
    Superradiant,
    CollapseRegime,
    Unphysical,
}

impl Phase {
    pub fn label(self) -> &'static str {
        match self {
            Self::Normal => "NP",
            Self::Superradiant => "SP",
            Self::CollapseRegime => "collapse",
            Self::Unphysical => "unphysical",
        }
    }
}

impl fmt::Display for Phase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

/// γc = √(ω |ω0| j / 2).
pub fn critical_coupling(params: &ModelParams) -> f64 {
    (params.omega * params.omega0.abs() * params.j() / 2.0).sqrt()
}

/// γsc = ω/2, where the spectrum collapses.
pub fn collapse_coupling(params: &ModelParams) -> f64 {
    params.omega / 2.0
}

/// Both SP radicands of the closed forms are positive: j²ω0² < γ².
pub fn sp_radicands_real(params: &ModelParams) -> bool {
    params.j() * params.omega0.abs() < params.gamma
}

pub fn classify_phase(params: &ModelParams) -> Phase {
    if params.gamma >= collapse_coupling(params) {
        return Phase::CollapseRegime;
    }
    // γ = γc belongs to the normal phase.
    if params.gamma > critical_coupling(params) {
        if sp_radicands_real(params) {
            Phase::Superradiant
        } else {
            Phase::Unphysical
        }
    } else {
        Phase::Normal
    }
}

/// i^n (-1)^(m+j), from 2Λ = n + 2m + 2j taken mod 4.
pub fn parity_label(b: BasisIndex, two_j: u32) -> ParitySector {
    ParitySector::from_power_of_i(i64::from(b.n) + i64::from(b.m_twice) + i64::from(two_j))
}
