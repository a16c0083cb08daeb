//! Classical limits of the model on the phase space x = (q, p; Q, P).
//!
//! Two trial states give two energy functions per spin:
//!
//! * squeezed vacuum ⊗ Bloch state,
//!   `h = Ω - 2γ q Q √((1/2j + (q²+p²)/4)(1 - (Q²+P²)/4))`
//! * Glauber ⊗ Bloch state,
//!   `h = Ω + γ (q² - p²) Q √(1 - (Q²+P²)/4)`
//!
//! with `Ω = (ω/2)(q²+p²) + (ω0/2)(Q²+P²) - ω0`.
//!
//! Both are evaluated over the complex numbers as well, because the
//! nontrivial stationary points are complex outside the superradiant
//! window. All square roots use the principal branch (`√` of a negative real
//! is `+i√|x|`), and `(-1)^(1/4) = e^{iπ/4}`. The one exception is the atomic
//! root `Z = √(1 - (Q²+P²)/4)`, whose sheet travels with each point so that
//! complex stationary points are stationary on the sheet they live on.

use std::ops::{Add, Div, Mul, Neg, Sub};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::model::{ModelError, ModelParams};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ClassicalError {
    #[error("point is not real; use the complex evaluation")]
    NotReal,
    #[error("Bloch constraint violated: Q² + P² = {0} > 4")]
    Bloch(f64),
    #[error("equations of motion are singular on the Bloch boundary Q² + P² = 4")]
    SingularBoundary,
    #[error("coherent stationary points need γ > 0 and γ ≠ ω/2 (got γ = {gamma}, ω/2 = {half})")]
    SingularCoupling { gamma: f64, half: f64 },
    #[error("limit correspondence needs 0 < γ < ω/2 and ω0 ≠ 0")]
    LimitDomain,
    #[error("j list must be non-empty and strictly ascending")]
    SpinList,
    #[error(transparent)]
    Model(#[from] ModelError),
}

/// Which root of `1 - (Q²+P²)/4` a point uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum Sheet {
    #[default]
    Principal,
    Negated,
}

impl Sheet {
    fn sign(self) -> f64 {
        match self {
            Self::Principal => 1.0,
            Self::Negated => -1.0,
        }
    }
}

const REAL_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ClassicalPoint {
    pub q: Complex64,
    pub p: Complex64,
    #[serde(rename = "Q")]
    pub big_q: Complex64,
    #[serde(rename = "P")]
    pub big_p: Complex64,
    #[serde(default)]
    pub sheet: Sheet,
}

impl ClassicalPoint {
    pub fn real(q: f64, p: f64, big_q: f64, big_p: f64) -> Self {
        Self {
            q: Complex64::new(q, 0.0),
            p: Complex64::new(p, 0.0),
            big_q: Complex64::new(big_q, 0.0),
            big_p: Complex64::new(big_p, 0.0),
            sheet: Sheet::Principal,
        }
    }

    pub fn origin() -> Self {
        Self::real(0.0, 0.0, 0.0, 0.0)
    }

    pub fn components(&self) -> [Complex64; 4] {
        [self.q, self.p, self.big_q, self.big_p]
    }

    /// Real parts, if every imaginary part is negligible.
    pub fn as_real(&self) -> Option<[f64; 4]> {
        let c = self.components();
        c.iter().all(|z| z.im.abs() <= REAL_TOL * z.re.abs().max(1.0)).then(|| c.map(|z| z.re))
    }

    /// Real and inside the Bloch disk Q² + P² ≤ 4, on the principal sheet.
    pub fn is_physical(&self) -> bool {
        matches!(self.as_real(), Some([_, _, bq, bp]) if bq * bq + bp * bp <= 4.0 && self.sheet == Sheet::Principal)
    }

    /// Euclidean distance in ℂ⁴.
    pub fn distance(&self, other: &Self) -> f64 {
        self.components().iter().zip(other.components()).map(|(a, b)| (a - b).norm_sqr()).sum::<f64>().sqrt()
    }

    fn real_checked(&self) -> Result<[f64; 4], ClassicalError> {
        let x = self.as_real().ok_or(ClassicalError::NotReal)?;
        if self.sheet != Sheet::Principal {
            return Err(ClassicalError::NotReal);
        }
        let bloch = x[2] * x[2] + x[3] * x[3];
        if bloch > 4.0 {
            return Err(ClassicalError::Bloch(bloch));
        }
        Ok(x)
    }
}

/// Principal square root; `√(-x ± 0i) = +i√x` regardless of the zero's sign.
pub fn csqrt(z: Complex64) -> Complex64 {
    if z.im == 0.0 {
        if z.re >= 0.0 {
            Complex64::new(z.re.sqrt(), 0.0)
        } else {
            Complex64::new(0.0, (-z.re).sqrt())
        }
    } else {
        z.sqrt()
    }
}

trait Scalar:
    Copy + Add<Output = Self> + Sub<Output = Self> + Mul<Output = Self> + Div<Output = Self> + Neg<Output = Self>
{
    fn lift(x: f64) -> Self;
    fn root(self) -> Self;
}

impl Scalar for f64 {
    fn lift(x: f64) -> Self {
        x
    }
    fn root(self) -> Self {
        self.sqrt()
    }
}

impl Scalar for Complex64 {
    fn lift(x: f64) -> Self {
        Complex64::new(x, 0.0)
    }
    fn root(self) -> Self {
        csqrt(self)
    }
}

struct Coords<T> {
    q: T,
    p: T,
    bq: T,
    bp: T,
    /// Atomic root on the point's sheet.
    z: T,
}

impl<T: Scalar> Coords<T> {
    fn new(x: [T; 4], sheet: Sheet) -> Self {
        let [q, p, bq, bp] = x;
        let z = (T::lift(1.0) - (bq * bq + bp * bp) * T::lift(0.25)).root() * T::lift(sheet.sign());
        Self { q, p, bq, bp, z }
    }

    fn omega_part(&self, params: &ModelParams) -> T {
        T::lift(params.omega / 2.0) * (self.q * self.q + self.p * self.p)
            + T::lift(params.omega0 / 2.0) * (self.bq * self.bq + self.bp * self.bp)
            - T::lift(params.omega0)
    }
}

fn bosonic_root<T: Scalar>(c: &Coords<T>, params: &ModelParams) -> T {
    (T::lift(1.0 / (2.0 * params.j())) + (c.q * c.q + c.p * c.p) * T::lift(0.25)).root()
}

fn squeezed_energy<T: Scalar>(c: &Coords<T>, params: &ModelParams) -> T {
    let s = bosonic_root(c, params);
    c.omega_part(params) - T::lift(2.0 * params.gamma) * c.q * c.bq * s * c.z
}

/// (∂h/∂q, ∂h/∂p, ∂h/∂Q, ∂h/∂P) of the squeezed energy.
fn squeezed_gradient<T: Scalar>(c: &Coords<T>, params: &ModelParams) -> [T; 4] {
    let (w, w0, g2) = (T::lift(params.omega), T::lift(params.omega0), T::lift(2.0 * params.gamma));
    let quarter = T::lift(0.25);
    let s = bosonic_root(c, params);
    let dq = w * c.q - g2 * c.bq * c.z * (s + c.q * c.q * quarter / s);
    let dp = w * c.p - g2 * c.q * c.bq * c.z * c.p * quarter / s;
    let dbq = w0 * c.bq - g2 * c.q * s * (c.z - c.bq * c.bq * quarter / c.z);
    let dbp = w0 * c.bp + g2 * c.q * c.bq * s * c.bp * quarter / c.z;
    [dq, dp, dbq, dbp]
}

fn coherent_energy<T: Scalar>(c: &Coords<T>, params: &ModelParams) -> T {
    c.omega_part(params) + T::lift(params.gamma) * (c.q * c.q - c.p * c.p) * c.bq * c.z
}

fn coherent_gradient<T: Scalar>(c: &Coords<T>, params: &ModelParams) -> [T; 4] {
    let (w, w0, g) = (T::lift(params.omega), T::lift(params.omega0), T::lift(params.gamma));
    let two = T::lift(2.0);
    let quarter = T::lift(0.25);
    let d = c.q * c.q - c.p * c.p;
    let dq = w * c.q + two * g * c.q * c.bq * c.z;
    let dp = w * c.p - two * g * c.p * c.bq * c.z;
    let dbq = w0 * c.bq + g * d * (c.z - c.bq * c.bq * quarter / c.z);
    let dbp = w0 * c.bp - g * d * c.bq * c.bp * quarter / c.z;
    [dq, dp, dbq, dbp]
}

/// Hamilton's equations (q̇, ṗ, Q̇, Ṗ) = (∂h/∂p, -∂h/∂q, ∂h/∂P, -∂h/∂Q).
fn hamilton<T: Scalar>(grad: [T; 4]) -> [T; 4] {
    let [dq, dp, dbq, dbp] = grad;
    [dp, -dq, dbp, -dbq]
}

fn real_coords(x: &ClassicalPoint, strict: bool) -> Result<Coords<f64>, ClassicalError> {
    let r = x.real_checked()?;
    if strict && r[2] * r[2] + r[3] * r[3] >= 4.0 {
        return Err(ClassicalError::SingularBoundary);
    }
    Ok(Coords::new(r, Sheet::Principal))
}

fn complex_coords(x: &ClassicalPoint) -> Coords<Complex64> {
    Coords::new(x.components(), x.sheet)
}

/// Squeezed-vacuum energy per spin at a real physical point.
pub fn h_squeezed(x: &ClassicalPoint, params: &ModelParams) -> Result<f64, ClassicalError> {
    Ok(squeezed_energy(&real_coords(x, false)?, params))
}

pub fn h_squeezed_complex(x: &ClassicalPoint, params: &ModelParams) -> Complex64 {
    squeezed_energy(&complex_coords(x), params)
}

pub fn eom_squeezed(x: &ClassicalPoint, params: &ModelParams) -> Result<[f64; 4], ClassicalError> {
    Ok(hamilton(squeezed_gradient(&real_coords(x, true)?, params)))
}

pub fn eom_squeezed_complex(x: &ClassicalPoint, params: &ModelParams) -> [Complex64; 4] {
    hamilton(squeezed_gradient(&complex_coords(x), params))
}

/// Glauber-coherent energy per spin at a real physical point.
pub fn h_coherent(y: &ClassicalPoint, params: &ModelParams) -> Result<f64, ClassicalError> {
    Ok(coherent_energy(&real_coords(y, false)?, params))
}

pub fn h_coherent_complex(y: &ClassicalPoint, params: &ModelParams) -> Complex64 {
    coherent_energy(&complex_coords(y), params)
}

pub fn eom_coherent(y: &ClassicalPoint, params: &ModelParams) -> Result<[f64; 4], ClassicalError> {
    Ok(hamilton(coherent_gradient(&real_coords(y, true)?, params)))
}

pub fn eom_coherent_complex(y: &ClassicalPoint, params: &ModelParams) -> [Complex64; 4] {
    hamilton(coherent_gradient(&complex_coords(y), params))
}

/// Largest component modulus of a complex EOM vector.
pub fn residual(eom: &[Complex64; 4]) -> f64 {
    eom.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StationaryPoint {
    pub point: ClassicalPoint,
    /// Real and inside the Bloch disk.
    pub real: bool,
}

impl StationaryPoint {
    fn new(point: ClassicalPoint) -> Self {
        Self { real: point.is_physical(), point }
    }
}

/// Trivial point plus the nontrivial pair.
///
/// `plus` has the principal roots of q² and Q²; `minus` is its image under
/// (q, Q) → (-q, -Q), which leaves both energies invariant. `q_sign_fold`
/// counts the extra q-sign images: 1 for the squeezed limit (the sign of q
/// is tied to that of Q), 2 for the coherent limit (h depends on q² only).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StationarySet {
    pub trivial: ClassicalPoint,
    pub plus: Option<StationaryPoint>,
    pub minus: Option<StationaryPoint>,
    pub q_sign_fold: u8,
}

/// Picks the atomic sheet on which Q·Z equals `target`.
fn sheet_for(big_q: Complex64, target: Complex64) -> Sheet {
    let z = csqrt(Complex64::new(1.0, 0.0) - big_q * big_q / 4.0);
    if (big_q * z - target).norm() <= (big_q * z + target).norm() {
        Sheet::Principal
    } else {
        Sheet::Negated
    }
}

fn mirror(x: &ClassicalPoint, sheet: Sheet) -> ClassicalPoint {
    ClassicalPoint { q: -x.q, p: x.p, big_q: -x.big_q, big_p: x.big_p, sheet }
}

/// ρ = √((1 - j²ω0²/γ²)/(1 - 4γ²/ω²)) = 2⟨a†a⟩ + 1. For a negative
/// radicand the imaginary part takes the sign of ω0, which keeps the
/// complex branch continuous with the coherent points as j → ∞.
fn photon_root(params: &ModelParams) -> Complex64 {
    let collapse = 1.0 - 4.0 * params.gamma * params.gamma / (params.omega * params.omega);
    let size = 1.0 - (params.j() * params.omega0 / params.gamma).powi(2);
    let ratio = size / collapse;
    if ratio >= 0.0 {
        Complex64::new(ratio.sqrt(), 0.0)
    } else {
        let sign = if params.omega0 < 0.0 { -1.0 } else { 1.0 };
        Complex64::new(0.0, sign * (-ratio).sqrt())
    }
}

pub fn stationary_squeezed(params: &ModelParams) -> StationarySet {
    let trivial = ClassicalPoint::origin();
    let collapse = 1.0 - 4.0 * params.gamma * params.gamma / (params.omega * params.omega);
    if params.gamma == 0.0 || collapse == 0.0 {
        return StationarySet { trivial, plus: None, minus: None, q_sign_fold: 1 };
    }
    let j = params.j();
    let rho = photon_root(params);
    let k = j * params.omega0 * params.omega / (2.0 * params.gamma * params.gamma);
    let q = csqrt((rho - 1.0) / j);
    let big_q = csqrt(2.0 - 2.0 * k / rho);
    let s = csqrt(Complex64::new(1.0 / (2.0 * j), 0.0) + q * q / 4.0);
    let target = j * params.omega * q * s / (params.gamma * rho);
    let zero = Complex64::new(0.0, 0.0);
    let plus = ClassicalPoint { q, p: zero, big_q, big_p: zero, sheet: sheet_for(big_q, target) };
    StationarySet {
        trivial,
        plus: Some(StationaryPoint::new(plus)),
        minus: Some(StationaryPoint::new(mirror(&plus, sheet_for(-big_q, -target)))),
        q_sign_fold: 1,
    }
}

pub fn stationary_coherent(params: &ModelParams) -> Result<StationarySet, ClassicalError> {
    let half = params.omega / 2.0;
    let collapse = 1.0 - 4.0 * params.gamma * params.gamma / (params.omega * params.omega);
    if params.gamma <= 0.0 || collapse == 0.0 {
        return Err(ClassicalError::SingularCoupling { gamma: params.gamma, half });
    }
    let collapse_root = csqrt(Complex64::new(collapse, 0.0));
    let eighth_turn = Complex64::from_polar(1.0, std::f64::consts::FRAC_PI_4);
    let q = eighth_turn * csqrt(Complex64::new(params.omega0 / params.gamma, 0.0)) / csqrt(collapse_root);
    let big_q = csqrt(2.0 + Complex64::i() * (params.omega / params.gamma) * collapse_root);
    let target = Complex64::new(-params.omega / (2.0 * params.gamma), 0.0);
    let zero = Complex64::new(0.0, 0.0);
    let plus = ClassicalPoint { q, p: zero, big_q, big_p: zero, sheet: sheet_for(big_q, target) };
    Ok(StationarySet {
        trivial: ClassicalPoint::origin(),
        plus: Some(StationaryPoint::new(plus)),
        minus: Some(StationaryPoint::new(mirror(&plus, sheet_for(-big_q, target)))),
        q_sign_fold: 2,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LimitRow {
    pub j: f64,
    /// ‖x₊(j) - y₊‖.
    pub plus: f64,
    /// ‖x₋(j) - y₋‖.
    pub minus: f64,
    /// ‖x₊(j) - y₋‖, the mismatched pairing.
    pub cross: f64,
    /// ‖x₀ - y₀‖.
    pub trivial: f64,
    /// |Δq| at leading order in 1/j: q_x² = q_y² - 1/j + O(1/j²).
    pub leading_order: f64,
}

/// Distances between squeezed and coherent stationary points along `spins`.
pub fn limit_correspondence(params: &ModelParams, spins: &[f64]) -> Result<Vec<LimitRow>, ClassicalError> {
    if !(params.gamma > 0.0 && params.gamma < params.omega / 2.0 && params.omega0 != 0.0) {
        return Err(ClassicalError::LimitDomain);
    }
    if spins.is_empty() || spins.windows(2).any(|w| w[0] >= w[1]) {
        return Err(ClassicalError::SpinList);
    }
    let coherent = stationary_coherent(params)?;
    let (y_plus, y_minus) = (coherent.plus.expect("γ > 0").point, coherent.minus.expect("γ > 0").point);
    spins
        .iter()
        .map(|&j| {
            let p = ModelParams::with_spin(params.omega, params.omega0, params.gamma, j)?;
            let squeezed = stationary_squeezed(&p);
            let x_plus = squeezed.plus.expect("γ > 0").point;
            let x_minus = squeezed.minus.expect("γ > 0").point;
            Ok(LimitRow {
                j,
                plus: x_plus.distance(&y_plus),
                minus: x_minus.distance(&y_minus),
                cross: x_plus.distance(&y_minus),
                trivial: squeezed.trivial.distance(&coherent.trivial),
                leading_order: 1.0 / (2.0 * j * y_plus.q.norm()),
            })
        })
        .collect()
}

/// Coherent energy with the atom eliminated (P = 0, Q at its minimum):
/// `(ω/2)(q²+p²) - √(ω0² + γ²(q²-p²)²)`, which is
/// `(ω/2)(q²+p²) - |ω0|√(1 + γ²(q²-p²)²/ω0²)` and tends to
/// `(ω/2)(q²+p²) - γ|q²-p²|` as ω0 → 0.
pub fn effective_surface(q: f64, p: f64, params: &ModelParams) -> f64 {
    let d = q * q - p * p;
    params.omega / 2.0 * (q * q + p * p) - (params.omega0 * params.omega0 + params.gamma * params.gamma * d * d).sqrt()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SurfaceBound {
    Bounded,
    /// `boundary` marks γ = ω/2, where the surface flattens to its asymptote.
    Unbounded { boundary: bool },
}

/// Along p = 0 the surface grows like (ω/2 - γ)q².
pub fn surface_boundedness(params: &ModelParams) -> SurfaceBound {
    let half = params.omega / 2.0;
    if params.gamma < half {
        SurfaceBound::Bounded
    } else {
        SurfaceBound::Unbounded { boundary: params.gamma == half }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SurfaceSample {
    pub q: f64,
    pub p: f64,
    pub h: f64,
}

/// Effective surface on a rectangular grid, q outer and p inner.
pub fn surface_grid(
    params: &ModelParams,
    q_range: (f64, f64),
    p_range: (f64, f64),
    q_points: usize,
    p_points: usize,
) -> Vec<SurfaceSample> {
    let axis = |(lo, hi): (f64, f64), n: usize| -> Vec<f64> {
        if n <= 1 {
            return vec![lo];
        }
        (0..n).map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64).collect()
    };
    let qs = axis(q_range, q_points);
    let ps = axis(p_range, p_points);
    qs.iter()
        .flat_map(|&q| ps.iter().map(move |&p| SurfaceSample { q, p, h: effective_surface(q, p, params) }))
        .collect()
}
