//! Parallel parameter sweeps over (ω0/ω, γ/ω) with analytic and numeric
//! columns, plus CSV/JSON writers shared by every tabular output.

use std::io::{self, Write};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};
use thiserror::Error;

use crate::classical::SurfaceSample;
use crate::eigensolve::{ground_state, GroundStateResult};
use crate::meanfield::{normal_observables, superradiant_branch, MeanFieldObservables};
use crate::model::{classify_phase, two_j_from_spin, ModelError, ModelParams, NumericalControls, Phase};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SweepError {
    #[error("axis {0}: need at least 2 points")]
    TooFewPoints(AxisParam),
    #[error("axis {0}: bounds must be finite with min < max")]
    Bounds(AxisParam),
    #[error("axis {0}: log spacing needs min > 0")]
    LogBounds(AxisParam),
    #[error("a sweep needs one or two axes over distinct parameters")]
    Axes,
    #[error("j list is empty and the thermodynamic limit is off")]
    NoSizes,
    #[error("numeric mode at γ = {gamma} ≥ ω/2 needs the collapse override")]
    NumericCollapse { gamma: f64 },
    #[error("worker pool: {0}")]
    Pool(String),
    #[error(transparent)]
    Model(#[from] ModelError),
}

/// Swept parameter; values are in units of ω.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AxisParam {
    Omega0,
    Gamma,
}

impl std::fmt::Display for AxisParam {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Self::Omega0 => "omega0",
            Self::Gamma => "gamma",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Spacing {
    #[default]
    Linear,
    Log,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Axis {
    pub param: AxisParam,
    pub min: f64,
    pub max: f64,
    pub points: usize,
    #[serde(default)]
    pub spacing: Spacing,
}

impl Axis {
    pub fn linear(param: AxisParam, min: f64, max: f64, points: usize) -> Self {
        Self { param, min, max, points, spacing: Spacing::Linear }
    }

    pub fn validate(&self) -> Result<(), SweepError> {
        if self.points < 2 {
            return Err(SweepError::TooFewPoints(self.param));
        }
        if !(self.min.is_finite() && self.max.is_finite() && self.min < self.max) {
            return Err(SweepError::Bounds(self.param));
        }
        if self.spacing == Spacing::Log && self.min <= 0.0 {
            return Err(SweepError::LogBounds(self.param));
        }
        Ok(())
    }

    /// Grid values, endpoints exact.
    pub fn values(&self) -> Vec<f64> {
        let last = (self.points - 1) as f64;
        (0..self.points)
            .map(|i| {
                if i == 0 {
                    return self.min;
                }
                if i + 1 == self.points {
                    return self.max;
                }
                let t = i as f64 / last;
                match self.spacing {
                    Spacing::Linear => self.min + (self.max - self.min) * t,
                    Spacing::Log => self.min * (self.max / self.min).powf(t),
                }
            })
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    #[default]
    Analytic,
    Numeric,
    Both,
}

impl Mode {
    fn analytic(self) -> bool {
        matches!(self, Self::Analytic | Self::Both)
    }

    fn numeric(self) -> bool {
        matches!(self, Self::Numeric | Self::Both)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    /// Outer axis first.
    pub axes: Vec<Axis>,
    pub omega: f64,
    /// Used when ω0 is not swept (absolute units).
    pub omega0: f64,
    /// Used when γ is not swept (absolute units).
    pub gamma: f64,
    pub j_list: Vec<f64>,
    /// Appends the j → ∞ panel, which is normal phase everywhere.
    #[serde(default)]
    pub thermodynamic_limit: bool,
    #[serde(default)]
    pub mode: Mode,
    /// Allows numeric rows at γ ≥ ω/2 (fixed cutoff, never converged).
    #[serde(default)]
    pub allow_collapse_numeric: bool,
}

/// Point counts when none are given.
pub const DEFAULT_ANALYTIC_POINTS: usize = 101;
pub const DEFAULT_NUMERIC_POINTS: usize = 41;

impl GridSpec {
    /// Phase-diagram window with γ outer and ω0 inner.
    pub fn phase_diagram(omega: f64, omega0: (f64, f64), gamma: (f64, f64), points: (usize, usize), j_list: Vec<f64>) -> Self {
        Self {
            axes: vec![
                Axis::linear(AxisParam::Gamma, gamma.0, gamma.1, points.0),
                Axis::linear(AxisParam::Omega0, omega0.0, omega0.1, points.1),
            ],
            omega,
            omega0: 0.0,
            gamma: 0.0,
            j_list,
            thermodynamic_limit: false,
            mode: Mode::Analytic,
            allow_collapse_numeric: false,
        }
    }

    pub fn validate(&self) -> Result<(), SweepError> {
        ModelParams { omega: self.omega, omega0: self.omega0, gamma: self.gamma, two_j: 1 }.validate()?;
        match self.axes.as_slice() {
            [a] => a.validate()?,
            [a, b] if a.param != b.param => {
                a.validate()?;
                b.validate()?;
            }
            _ => return Err(SweepError::Axes),
        }
        if self.j_list.is_empty() && !self.thermodynamic_limit {
            return Err(SweepError::NoSizes);
        }
        for &j in &self.j_list {
            two_j_from_spin(j)?;
        }
        if self.mode.numeric() && !self.allow_collapse_numeric {
            let top = self.points().into_iter().map(|(_, g)| g).fold(f64::NEG_INFINITY, f64::max);
            if top >= self.omega / 2.0 {
                return Err(SweepError::NumericCollapse { gamma: top });
            }
        }
        // Every grid point must be a valid parameter set.
        for (omega0, gamma) in self.points() {
            ModelParams { omega: self.omega, omega0, gamma, two_j: 1 }.validate()?;
        }
        Ok(())
    }

    /// (ω0, γ) in absolute units, row-major with the first axis outer.
    pub fn points(&self) -> Vec<(f64, f64)> {
        let place = |axis: &Axis, v: f64, point: &mut (f64, f64)| match axis.param {
            AxisParam::Omega0 => point.0 = v * self.omega,
            AxisParam::Gamma => point.1 = v * self.omega,
        };
        let base = (self.omega0, self.gamma);
        match self.axes.as_slice() {
            [a] => a
                .values()
                .into_iter()
                .map(|v| {
                    let mut p = base;
                    place(a, v, &mut p);
                    p
                })
                .collect(),
            [a, b] => {
                let inner = b.values();
                a.values()
                    .into_iter()
                    .flat_map(|va| {
                        inner.iter().map(move |&vb| {
                            let mut p = base;
                            place(a, va, &mut p);
                            place(b, vb, &mut p);
                            p
                        })
                    })
                    .collect()
            }
            _ => Vec::new(),
        }
    }

    /// Panels in output order: each finite j, then ∞ if requested.
    pub fn sizes(&self) -> Vec<f64> {
        let mut sizes = self.j_list.clone();
        if self.thermodynamic_limit {
            sizes.push(f64::INFINITY);
        }
        sizes
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub index: usize,
    /// Spin length; infinite on the thermodynamic-limit panel.
    pub j: f64,
    pub omega: f64,
    pub omega0: f64,
    pub gamma: f64,
    pub phase: Phase,
    /// None in numeric-only mode and in the collapse regime.
    pub analytic: Option<MeanFieldObservables>,
    /// γ > γc but the SP closed forms are not real; NP values are reported.
    pub unphysical_sp_branch: bool,
    pub numeric: Option<Result<GroundStateResult, String>>,
}

fn displaced(e0: f64, j: f64, omega0: f64) -> f64 {
    e0 + j * omega0.abs()
}

impl SweepRow {
    pub fn analytic_excitation(&self) -> f64 {
        self.analytic.map_or(f64::NAN, |a| a.excitation())
    }

    /// E0 + j|ω0|; zero on the thermodynamic-limit panel.
    pub fn analytic_displaced_energy(&self) -> f64 {
        match self.analytic {
            Some(_) if self.j.is_infinite() => 0.0,
            Some(a) => displaced(a.e0, self.j, self.omega0),
            None => f64::NAN,
        }
    }

    pub fn numeric_result(&self) -> Option<&GroundStateResult> {
        self.numeric.as_ref().and_then(|r| r.as_ref().ok())
    }

    pub fn numeric_excitation(&self) -> f64 {
        self.numeric_result().map_or(f64::NAN, |r| 1.0 + r.jz_over_j)
    }

    pub fn numeric_displaced_energy(&self) -> f64 {
        self.numeric_result().map_or(f64::NAN, |r| displaced(r.energy, self.j, self.omega0))
    }

    pub fn columns(&self) -> Vec<(&'static str, Cell)> {
        let a = self.analytic;
        let n = self.numeric_result();
        let af = |f: fn(&MeanFieldObservables) -> f64| Cell::Float(a.as_ref().map_or(f64::NAN, f));
        let nf = |f: fn(&GroundStateResult) -> f64| Cell::Float(n.map_or(f64::NAN, f));
        vec![
            ("index", Cell::Int(self.index as i64)),
            ("j", Cell::Float(self.j)),
            ("omega", Cell::Float(self.omega)),
            ("omega0", Cell::Float(self.omega0)),
            ("gamma", Cell::Float(self.gamma)),
            ("omega0_over_omega", Cell::Float(self.omega0 / self.omega)),
            ("gamma_over_omega", Cell::Float(self.gamma / self.omega)),
            ("phase", Cell::Text(self.phase.label().into())),
            ("unphysical_sp_branch", Cell::Bool(self.unphysical_sp_branch)),
            ("e0", af(|a| a.e0)),
            ("photon_number", af(|a| a.photon_number)),
            ("jz_over_j", af(|a| a.jz_over_j)),
            ("excitation", Cell::Float(self.analytic_excitation())),
            ("displaced_energy", Cell::Float(self.analytic_displaced_energy())),
            ("numeric_e0", nf(|r| r.energy)),
            ("numeric_photon_number", nf(|r| r.photon_number)),
            ("numeric_jz_over_j", nf(|r| r.jz_over_j)),
            ("numeric_excitation", Cell::Float(self.numeric_excitation())),
            ("numeric_displaced_energy", Cell::Float(self.numeric_displaced_energy())),
            ("numeric_converged", n.map_or(Cell::Empty, |r| Cell::Bool(r.converged))),
            ("numeric_n_max_used", n.map_or(Cell::Empty, |r| Cell::Int(r.n_max_used as i64))),
            ("numeric_sector", n.map_or(Cell::Empty, |r| Cell::Text(r.sector.label().into()))),
            (
                "numeric_error",
                match &self.numeric {
                    Some(Err(e)) => Cell::Text(e.clone()),
                    _ => Cell::Empty,
                },
            ),
        ]
    }
}

/// One typed table value.
#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Float(f64),
    Int(i64),
    Bool(bool),
    Text(String),
    Empty,
}

/// 17 significant digits; "nan", "inf", "-inf" for non-finite values.
pub fn format_float(x: f64) -> String {
    if x.is_nan() {
        "nan".into()
    } else if x.is_infinite() {
        if x > 0.0 { "inf".into() } else { "-inf".into() }
    } else {
        format!("{x:.16e}")
    }
}

impl Cell {
    fn csv(&self) -> String {
        match self {
            Self::Float(x) => format_float(*x),
            Self::Int(i) => i.to_string(),
            Self::Bool(b) => b.to_string(),
            Self::Text(s) => csv_escape(s),
            Self::Empty => String::new(),
        }
    }

    fn json(&self) -> Value {
        match self {
            Self::Float(x) if x.is_finite() => Value::from(*x),
            Self::Float(x) => Value::from(format_float(*x)),
            Self::Int(i) => Value::from(*i),
            Self::Bool(b) => Value::from(*b),
            Self::Text(s) => Value::from(s.as_str()),
            Self::Empty => Value::Null,
        }
    }
}

fn csv_escape(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

fn analytic_row(params: &ModelParams) -> (Phase, Option<MeanFieldObservables>, bool) {
    let phase = classify_phase(params);
    match phase {
        Phase::Normal => (phase, Some(normal_observables(params)), false),
        Phase::Superradiant => match superradiant_branch(params) {
            Ok(obs) => (phase, Some(obs), false),
            Err(_) => (Phase::Unphysical, Some(normal_observables(params)), true),
        },
        Phase::Unphysical => (phase, Some(normal_observables(params)), true),
        Phase::CollapseRegime => (phase, None, false),
    }
}

fn limit_row(omega: f64, omega0: f64, gamma: f64) -> (Phase, Option<MeanFieldObservables>) {
    if gamma >= omega / 2.0 {
        return (Phase::CollapseRegime, None);
    }
    let sign = if omega0 > 0.0 {
        1.0
    } else if omega0 < 0.0 {
        -1.0
    } else {
        0.0
    };
    let e0 = if omega0 == 0.0 { 0.0 } else { f64::NEG_INFINITY };
    (Phase::Normal, Some(MeanFieldObservables { e0, photon_number: 0.0, jz_over_j: -sign, phase: Phase::Normal }))
}

fn evaluate(spec: &GridSpec, ctrl: &NumericalControls, index: usize, j: f64, (omega0, gamma): (f64, f64)) -> SweepRow {
    let mut row = SweepRow {
        index,
        j,
        omega: spec.omega,
        omega0,
        gamma,
        phase: Phase::Normal,
        analytic: None,
        unphysical_sp_branch: false,
        numeric: None,
    };
    if j.is_infinite() {
        let (phase, obs) = limit_row(spec.omega, omega0, gamma);
        row.phase = phase;
        row.analytic = obs.filter(|_| spec.mode.analytic());
        return row;
    }
    let two_j = two_j_from_spin(j).expect("validated");
    let params = ModelParams { omega: spec.omega, omega0, gamma, two_j };
    let (phase, obs, unphysical) = analytic_row(&params);
    row.phase = phase;
    row.unphysical_sp_branch = unphysical;
    if spec.mode.analytic() {
        row.analytic = obs;
    }
    if spec.mode.numeric() {
        row.numeric = Some(ground_state(&params, ctrl).map_err(|e| e.to_string()));
    }
    row
}

pub fn run_sweep(spec: &GridSpec, ctrl: &NumericalControls) -> Result<Vec<SweepRow>, SweepError> {
    run_sweep_with_workers(spec, ctrl, None)
}

/// `workers = None` uses the global pool.
pub fn run_sweep_with_workers(
    spec: &GridSpec,
    ctrl: &NumericalControls,
    workers: Option<usize>,
) -> Result<Vec<SweepRow>, SweepError> {
    spec.validate()?;
    if spec.mode.numeric() {
        ctrl.validate()?;
    }
    let points = spec.points();
    let items: Vec<(f64, (f64, f64))> =
        spec.sizes().into_iter().flat_map(|j| points.iter().map(move |&p| (j, p))).collect();
    let work = || -> Vec<SweepRow> {
        items.par_iter().enumerate().map(|(i, &(j, p))| evaluate(spec, ctrl, i, j, p)).collect()
    };
    match workers {
        None => Ok(work()),
        Some(n) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(n.max(1))
                .build()
                .map_err(|e| SweepError::Pool(e.to_string()))?;
            Ok(pool.install(work))
        }
    }
}

/// Fraction of (ω0/ω, γ/ω) grid points classified superradiant at spin `j`;
/// `None` is the thermodynamic limit, where the fraction is 0.
pub fn superradiant_area(omega: f64, omega0_axis: &Axis, gamma_axis: &Axis, j: Option<f64>) -> Result<f64, SweepError> {
    omega0_axis.validate()?;
    gamma_axis.validate()?;
    let Some(j) = j else {
        return Ok(0.0);
    };
    let two_j = two_j_from_spin(j)?;
    let omega0s = omega0_axis.values();
    let hits: usize = gamma_axis
        .values()
        .par_iter()
        .map(|&g| {
            omega0s
                .iter()
                .filter(|&&w0| {
                    let params = ModelParams { omega, omega0: w0 * omega, gamma: g * omega, two_j };
                    classify_phase(&params) == Phase::Superradiant
                })
                .count()
        })
        .sum();
    Ok(hits as f64 / (omega0s.len() * gamma_axis.points) as f64)
}

/// Run description carried by every output file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Metadata {
    pub tool: String,
    pub version: String,
    /// Echo of the full run configuration.
    pub config: Value,
    pub seed: u64,
    pub started: String,
    pub finished: String,
}

fn write_preamble<W: Write>(out: &mut W, meta: &Metadata) -> io::Result<()> {
    writeln!(out, "# tool: {}", meta.tool)?;
    writeln!(out, "# version: {}", meta.version)?;
    writeln!(out, "# config: {}", meta.config)?;
    writeln!(out, "# seed: {}", meta.seed)?;
    writeln!(out, "# started: {}", meta.started)?;
    writeln!(out, "# finished: {}", meta.finished)
}

/// Writes a table whose rows share one column layout.
pub fn write_table_csv<W: Write>(mut out: W, meta: &Metadata, rows: &[Vec<(&'static str, Cell)>]) -> io::Result<()> {
    write_preamble(&mut out, meta)?;
    if let Some(first) = rows.first() {
        let header: Vec<&str> = first.iter().map(|c| c.0).collect();
        writeln!(out, "{}", header.join(","))?;
    }
    for row in rows {
        let line: Vec<String> = row.iter().map(|c| c.1.csv()).collect();
        writeln!(out, "{}", line.join(","))?;
    }
    Ok(())
}

pub fn table_json(meta: &Metadata, rows: &[Vec<(&'static str, Cell)>]) -> Value {
    let rows: Vec<Value> = rows
        .iter()
        .map(|row| Value::Object(row.iter().map(|(k, c)| (k.to_string(), c.json())).collect::<Map<_, _>>()))
        .collect();
    serde_json::json!({ "metadata": meta, "rows": rows })
}

pub fn write_table_json<W: Write>(mut out: W, meta: &Metadata, rows: &[Vec<(&'static str, Cell)>]) -> io::Result<()> {
    serde_json::to_writer_pretty(&mut out, &table_json(meta, rows))?;
    writeln!(out)
}

pub fn sweep_columns(rows: &[SweepRow]) -> Vec<Vec<(&'static str, Cell)>> {
    rows.iter().map(SweepRow::columns).collect()
}

pub fn surface_columns(samples: &[SurfaceSample]) -> Vec<Vec<(&'static str, Cell)>> {
    samples
        .iter()
        .map(|s| vec![("q", Cell::Float(s.q)), ("p", Cell::Float(s.p)), ("h", Cell::Float(s.h))])
        .collect()
}
