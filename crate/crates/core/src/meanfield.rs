//! Closed-form mean-field layer: normal and superradiant ground-state
//! observables, and the Holstein-Primakoff/Bogoliubov variational energy.
//!
//! On the superradiant branch everything is written through
//!
//! ```text
//! ρ = √((1 - j²ω0²/γ²) / (1 - 4γ²/ω²)) = 2⟨a†a⟩ + 1 = cosh 2r_b
//! k = j ω0 ω / (2γ²)
//! ```
//!
//! so that E0 = -(ω/2)(1 - √((1-4γ²/ω²)(1-j²ω0²/γ²))), ⟨a†a⟩ = (ρ - 1)/2,
//! ⟨Jz⟩/j = -k/ρ and b0² = 1 - k/ρ.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::model::{classify_phase, ModelParams, Phase};

/// Radicands this far below zero are treated as boundary rounding.
pub const RADICAND_SLACK: f64 = 1e-14;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MeanFieldError {
    #[error("superradiant branch unphysical: {0}")]
    Unphysical(&'static str),
    #[error("coupling gamma = {gamma} is at or above the collapse value {collapse}")]
    Collapse { gamma: f64, collapse: f64 },
    #[error("hp_energy domain: |2γb√(2-b²)/ω| = {0} must be < 1 (spectral collapse)")]
    SqueezingDomain(f64),
    #[error("hp_energy domain: variational parameter |b| = {0} exceeds √2")]
    BlochDomain(f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MeanFieldObservables {
    pub e0: f64,
    pub photon_number: f64,
    pub jz_over_j: f64,
    pub phase: Phase,
}

impl MeanFieldObservables {
    /// 1 + ⟨Jz⟩/j.
    pub fn excitation(&self) -> f64 {
        1.0 + self.jz_over_j
    }

    /// E0 + j|ω0|.
    pub fn displaced_energy(&self, params: &ModelParams) -> f64 {
        self.e0 + params.j() * params.omega0.abs()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HPVariationalState {
    pub b: f64,
    pub r_b: f64,
    pub energy: f64,
}

fn guarded_sqrt(x: f64, what: &'static str) -> Result<f64, MeanFieldError> {
    if x >= 0.0 {
        Ok(x.sqrt())
    } else if x >= -RADICAND_SLACK {
        Ok(0.0)
    } else {
        Err(MeanFieldError::Unphysical(what))
    }
}

fn sgn(x: f64) -> f64 {
    if x > 0.0 {
        1.0
    } else if x < 0.0 {
        -1.0
    } else {
        0.0
    }
}

fn normal_branch(params: &ModelParams) -> MeanFieldObservables {
    MeanFieldObservables {
        e0: -params.j() * params.omega0.abs(),
        photon_number: 0.0,
        jz_over_j: -sgn(params.omega0),
        phase: Phase::Normal,
    }
}

/// SP-reduced values at ω0 = 0; j drops out entirely.
fn zero_frequency_branch(params: &ModelParams) -> Result<MeanFieldObservables, MeanFieldError> {
    let collapse = 1.0 - 4.0 * params.gamma * params.gamma / (params.omega * params.omega);
    let root = guarded_sqrt(collapse, "1 - 4γ²/ω² < 0")?;
    Ok(MeanFieldObservables {
        e0: -(params.omega / 2.0) * (1.0 - root),
        photon_number: 0.5 * (1.0 / root - 1.0),
        jz_over_j: 0.0,
        phase: Phase::Superradiant,
    })
}

/// Evaluates the superradiant closed forms without checking the phase.
/// Fails when a radicand is negative.
pub fn superradiant_branch(params: &ModelParams) -> Result<MeanFieldObservables, MeanFieldError> {
    if params.omega0 == 0.0 {
        return zero_frequency_branch(params);
    }
    let (omega, gamma) = (params.omega, params.gamma);
    let j = params.j();
    let collapse = 1.0 - 4.0 * gamma * gamma / (omega * omega);
    let size = 1.0 - (j * params.omega0 / gamma).powi(2);
    let collapse_root = guarded_sqrt(collapse, "1 - 4γ²/ω² < 0")?;
    let size_root = guarded_sqrt(size, "1 - j²ω0²/γ² < 0")?;
    if collapse_root == 0.0 {
        return Err(MeanFieldError::Unphysical("1 - 4γ²/ω² = 0 (spectral collapse)"));
    }
    let rho = size_root / collapse_root;
    let k = j * params.omega0 * omega / (2.0 * gamma * gamma);
    Ok(MeanFieldObservables {
        e0: -(omega / 2.0) * (1.0 - collapse_root * size_root),
        photon_number: 0.5 * (rho - 1.0),
        jz_over_j: -k / rho,
        phase: Phase::Superradiant,
    })
}

pub fn observables(params: &ModelParams) -> Result<MeanFieldObservables, MeanFieldError> {
    match classify_phase(params) {
        Phase::Normal => Ok(normal_branch(params)),
        Phase::Superradiant => superradiant_branch(params),
        Phase::CollapseRegime => {
            Err(MeanFieldError::Collapse { gamma: params.gamma, collapse: params.omega / 2.0 })
        }
        Phase::Unphysical => Err(MeanFieldError::Unphysical("γ > γc but j²ω0² ≥ γ²")),
    }
}

/// NP observables regardless of the coupling; the value reported outside the
/// superradiant wedge and in the thermodynamic limit.
pub fn normal_observables(params: &ModelParams) -> MeanFieldObservables {
    normal_branch(params)
}

/// Squeezing r_b = ½ artanh(2γb√(2-b²)/ω) and the argument of artanh.
fn squeezing(b: f64, params: &ModelParams) -> Result<(f64, f64), MeanFieldError> {
    let inner = 2.0 - b * b;
    if inner < 0.0 {
        return Err(MeanFieldError::BlochDomain(b.abs()));
    }
    let arg = params.gamma * 2.0 * b * inner.sqrt() / params.omega;
    if arg.abs() >= 1.0 {
        return Err(MeanFieldError::SqueezingDomain(arg.abs()));
    }
    Ok((0.5 * arg.atanh(), arg))
}

/// Variational energy E0(b) for real b (b* + b = 2b).
pub fn hp_energy(b: f64, params: &ModelParams) -> Result<f64, MeanFieldError> {
    let (_, arg) = squeezing(b, params)?;
    let (omega, gamma) = (params.omega, params.gamma);
    // cosh(2 r_b) = 1/√(1 - arg²), taken in closed form.
    let cosh2r = 1.0 / (1.0 - arg * arg).sqrt();
    let bracket = omega * omega - gamma * gamma * (2.0 * b).powi(2) * (2.0 - b * b);
    Ok(cosh2r / (2.0 * omega) * bracket + params.j() * params.omega0 * (b * b - 1.0) - omega / 2.0)
}

pub fn hp_state(b: f64, params: &ModelParams) -> Result<HPVariationalState, MeanFieldError> {
    let (r_b, _) = squeezing(b, params)?;
    Ok(HPVariationalState { b, r_b, energy: hp_energy(b, params)? })
}

/// Stationary b0: 0 on the normal branch, +√(1 - k/ρ) on the superradiant one.
/// For ω0 < 0 the normal branch is the inverted spin, b0 = √2.
pub fn hp_minimize(params: &ModelParams) -> Result<HPVariationalState, MeanFieldError> {
    let phase = classify_phase(params);
    let b = match phase {
        Phase::Normal if params.omega0 >= 0.0 => 0.0,
        // Fully inverted spin: b² = 2.
        Phase::Normal => 2f64.sqrt(),
        Phase::Superradiant => {
            let obs = superradiant_branch(params)?;
            guarded_sqrt(1.0 + obs.jz_over_j, "b0² < 0")?
        }
        Phase::CollapseRegime => {
            return Err(MeanFieldError::Collapse { gamma: params.gamma, collapse: params.omega / 2.0 })
        }
        Phase::Unphysical => return Err(MeanFieldError::Unphysical("γ > γc but j²ω0² ≥ γ²")),
    };
    hp_state(b, params)
}

/// Both SP radicands of the closed forms are non-negative.
pub fn in_sp_domain(params: &ModelParams) -> bool {
    let collapse = 1.0 - 4.0 * params.gamma * params.gamma / (params.omega * params.omega);
    let size = if params.omega0 == 0.0 { 1.0 } else { 1.0 - (params.j() * params.omega0 / params.gamma).powi(2) };
    params.gamma > 0.0 && collapse > 0.0 && size >= 0.0
}

/// Half-width in ω0 of the superradiant window at fixed (ω, γ, j):
/// γ > γc gives |ω0| < 2γ²/(ωj) and the radicands need |ω0| ≤ γ/j.
pub fn superradiant_half_width(params: &ModelParams) -> f64 {
    let critical = 2.0 * params.gamma * params.gamma / (params.omega * params.j());
    critical.min(sp_domain_half_width(params))
}

/// Half-width in ω0 of the domain where the SP closed forms are real: γ/j.
pub fn sp_domain_half_width(params: &ModelParams) -> f64 {
    params.gamma / params.j()
}
