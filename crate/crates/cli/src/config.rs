//! Run configuration: a JSON document overlaid by command-line flags.
//! Flags win over the file on conflict.

use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use serde::{Deserialize, Serialize};
use tpdicke::model::NumericalControls;
use tpdicke::sweep::{Mode, Spacing};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

impl Format {
    pub fn extension(self) -> &'static str {
        match self {
            Self::Csv => "csv",
            Self::Json => "json",
        }
    }
}

/// j → ∞ panel selection.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum JmaxMode {
    /// Finite sizes only.
    #[default]
    Off,
    /// Finite sizes plus the j → ∞ panel.
    On,
    /// The j → ∞ panel alone.
    Only,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ModelConfig {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub omega: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub omega0: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gamma: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub j: Option<Vec<f64>>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GridConfig {
    /// Points along (first, second) axis: (ω0, γ) for phase diagrams, (q, p) for surfaces.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub points: Option<[usize; 2]>,
    /// Slice axis: "omega0" or "gamma".
    #[serde(skip_serializing_if = "Option::is_none")]
    pub axis: Option<tpdicke::sweep::AxisParam>,
    /// Slice point count.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub slice_points: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub omega0_range: Option<[f64; 2]>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gamma_range: Option<[f64; 2]>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub q_range: Option<[f64; 2]>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub p_range: Option<[f64; 2]>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub spacing: Option<Spacing>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub jmax_mode: Option<JmaxMode>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mode: Option<Mode>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub allow_collapse_numeric: Option<bool>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OutputConfig {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub path: Option<PathBuf>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub format: Option<Format>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub plot: Option<bool>,
    /// Plotted column for sweeps.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub column: Option<String>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub command: Option<String>,
    pub model: ModelConfig,
    pub grid: GridConfig,
    pub controls: NumericalControls,
    pub output: OutputConfig,
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading config {}", path.display()))?;
        serde_json::from_str(&text).with_context(|| format!("parsing config {}", path.display()))
    }

    /// Checks the file's command against the subcommand and records it.
    pub fn bind_command(&mut self, command: &str) -> Result<()> {
        match &self.command {
            Some(c) if c != command => bail!("config is for `{c}` but the subcommand is `{command}`"),
            _ => self.command = Some(command.to_string()),
        }
        Ok(())
    }

    pub fn omega(&self) -> f64 {
        self.model.omega.unwrap_or(1.0)
    }

    pub fn spins(&self, default: &[f64]) -> Vec<f64> {
        self.model.j.clone().unwrap_or_else(|| default.to_vec())
    }

    /// The single spin length of per-point commands.
    pub fn single_spin(&self) -> Result<f64> {
        match self.model.j.as_deref() {
            Some([j]) => Ok(*j),
            Some(list) => bail!("expected a single --j value, got {list:?}"),
            None => bail!("--j is required"),
        }
    }

    pub fn mode(&self) -> Mode {
        self.grid.mode.unwrap_or_default()
    }

    pub fn format(&self) -> Result<Format> {
        let from_path = self.output.path.as_deref().and_then(|p| p.extension()).and_then(|e| e.to_str()).and_then(|e| {
            match e.to_ascii_lowercase().as_str() {
                "csv" => Some(Format::Csv),
                "json" => Some(Format::Json),
                _ => None,
            }
        });
        match (self.output.format, from_path) {
            (Some(f), Some(p)) if f != p => {
                bail!("--format {} conflicts with output file extension .{}", f.extension(), p.extension())
            }
            (Some(f), _) | (None, Some(f)) => Ok(f),
            (None, None) => Ok(Format::Csv),
        }
    }

    pub fn plot(&self) -> bool {
        self.output.plot.unwrap_or(false)
    }
}

fn set<T>(slot: &mut Option<T>, flag: Option<T>) {
    if flag.is_some() {
        *slot = flag;
    }
}

/// Flag values collected by the command line; `None` leaves the file value.
#[derive(Debug, Default, Clone)]
pub struct Overrides {
    pub model: ModelConfig,
    pub grid: GridConfig,
    pub output: OutputConfig,
    pub n_max: Option<usize>,
    pub n_cap: Option<usize>,
    pub tol_abs: Option<f64>,
    pub tol_rel: Option<f64>,
    pub eig_tol: Option<f64>,
    pub seed: Option<u64>,
    pub max_iterations: Option<usize>,
    pub element_budget: Option<usize>,
}

impl RunConfig {
    pub fn apply(&mut self, o: Overrides) {
        let m = &mut self.model;
        set(&mut m.omega, o.model.omega);
        set(&mut m.omega0, o.model.omega0);
        set(&mut m.gamma, o.model.gamma);
        set(&mut m.j, o.model.j);

        let g = &mut self.grid;
        set(&mut g.points, o.grid.points);
        set(&mut g.axis, o.grid.axis);
        set(&mut g.slice_points, o.grid.slice_points);
        set(&mut g.omega0_range, o.grid.omega0_range);
        set(&mut g.gamma_range, o.grid.gamma_range);
        set(&mut g.q_range, o.grid.q_range);
        set(&mut g.p_range, o.grid.p_range);
        set(&mut g.spacing, o.grid.spacing);
        set(&mut g.jmax_mode, o.grid.jmax_mode);
        set(&mut g.mode, o.grid.mode);
        set(&mut g.allow_collapse_numeric, o.grid.allow_collapse_numeric);

        let out = &mut self.output;
        set(&mut out.path, o.output.path);
        set(&mut out.format, o.output.format);
        set(&mut out.plot, o.output.plot);
        set(&mut out.column, o.output.column);

        let c = &mut self.controls;
        macro_rules! control {
            ($($field:ident),*) => {$(if let Some(v) = o.$field { c.$field = v; })*};
        }
        control!(n_max, n_cap, tol_abs, tol_rel, eig_tol, seed, max_iterations, element_budget);
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flags_win_over_file() {
        let mut cfg: RunConfig =
            serde_json::from_str(r#"{"model": {"omega": 2.0, "gamma": 0.1}, "controls": {"n_max": 8}}"#).unwrap();
        let mut o = Overrides::default();
        o.model.gamma = Some(0.3);
        o.n_cap = Some(64);
        cfg.apply(o);
        assert_eq!(cfg.model.omega, Some(2.0));
        assert_eq!(cfg.model.gamma, Some(0.3));
        assert_eq!(cfg.controls.n_max, 8);
        assert_eq!(cfg.controls.n_cap, 64);
    }

    #[test]
    fn unknown_fields_rejected() {
        assert!(serde_json::from_str::<RunConfig>(r#"{"modle": {}}"#).is_err());
    }

    #[test]
    fn format_resolution() {
        let mut cfg = RunConfig::default();
        assert_eq!(cfg.format().unwrap(), Format::Csv);
        cfg.output.path = Some("a.json".into());
        assert_eq!(cfg.format().unwrap(), Format::Json);
        cfg.output.format = Some(Format::Csv);
        assert!(cfg.format().is_err());
    }

    #[test]
    fn command_binding() {
        let mut cfg = RunConfig { command: Some("surface".into()), ..RunConfig::default() };
        assert!(cfg.bind_command("limit").is_err());
        assert!(cfg.bind_command("surface").is_ok());
    }

    #[test]
    fn round_trip() {
        let mut cfg = RunConfig::default();
        cfg.model.j = Some(vec![10.0, 25.0]);
        cfg.grid.mode = Some(Mode::Both);
        cfg.grid.jmax_mode = Some(JmaxMode::On);
        let text = serde_json::to_string(&cfg).unwrap();
        assert_eq!(serde_json::from_str::<RunConfig>(&text).unwrap(), cfg);
    }
}
