//! `tpdicke`: command-line front end for the two-photon Dicke model.
//!
//! Every subcommand accepts `--config file.json`; flags given on the command
//! line override values from the file.

mod commands;
mod config;
mod output;
mod svg;
mod verify;

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Result;
use clap::{Args, Parser, Subcommand};
use serde::de::DeserializeOwned;
use tpdicke::sweep::{AxisParam, Mode, Spacing};

use config::{Format, JmaxMode, Overrides, RunConfig};

#[derive(Parser, Debug)]
#[command(name = "tpdicke", version, about = "Two-photon Dicke model: exact diagonalization, mean-field limits, sweeps")]
struct Cli {
    /// JSON run configuration; command-line flags take precedence.
    #[arg(long, global = true, value_name = "FILE")]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Numeric and mean-field ground state side by side.
    GroundState(Flags),
    /// Analytic (and optionally numeric) phase diagram over (ω0/ω, γ/ω).
    PhaseDiagram(Flags),
    /// One-dimensional cut through the phase diagram.
    Slice(Flags),
    /// Effective energy surface h(q, p) of the coherent limit.
    Surface(Flags),
    /// Stationary points of both classical energies.
    Stationary(Flags),
    /// Distance between squeezed and coherent stationary points versus j.
    Limit(Flags),
    /// Run the built-in cross-check suite.
    Verify(Flags),
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Self::GroundState(_) => "ground-state",
            Self::PhaseDiagram(_) => "phase-diagram",
            Self::Slice(_) => "slice",
            Self::Surface(_) => "surface",
            Self::Stationary(_) => "stationary",
            Self::Limit(_) => "limit",
            Self::Verify(_) => "verify",
        }
    }

    fn flags(self) -> Flags {
        match self {
            Self::GroundState(f)
            | Self::PhaseDiagram(f)
            | Self::Slice(f)
            | Self::Surface(f)
            | Self::Stationary(f)
            | Self::Limit(f)
            | Self::Verify(f) => f,
        }
    }
}

fn parse_pair(s: &str) -> Result<[f64; 2], String> {
    let parts: Vec<&str> = s.split(',').collect();
    match parts.as_slice() {
        [a, b] => Ok([a.trim().parse().map_err(|e| format!("{e}"))?, b.trim().parse().map_err(|e| format!("{e}"))?]),
        _ => Err(format!("expected MIN,MAX, got `{s}`")),
    }
}

fn parse_grid(s: &str) -> Result<[usize; 2], String> {
    let parts: Vec<&str> = s.split(['x', 'X']).collect();
    match parts.as_slice() {
        [a, b] => Ok([a.trim().parse().map_err(|e| format!("{e}"))?, b.trim().parse().map_err(|e| format!("{e}"))?]),
        _ => Err(format!("expected NxM, got `{s}`")),
    }
}

/// Parses lowercase names through the library's serde representation.
fn parse_name<T: DeserializeOwned>(s: &str) -> Result<T, String> {
    serde_json::from_value(serde_json::Value::String(s.to_ascii_lowercase())).map_err(|e| e.to_string())
}

#[derive(Args, Debug, Default)]
struct Flags {
    /// Cavity frequency ω.
    #[arg(long)]
    omega: Option<f64>,
    /// Atomic frequency ω0.
    #[arg(long, allow_hyphen_values = true)]
    omega0: Option<f64>,
    /// Coupling γ.
    #[arg(long)]
    gamma: Option<f64>,
    /// Spin length(s) j, comma separated (half-integers).
    #[arg(long, value_delimiter = ',')]
    j: Option<Vec<f64>>,

    /// Grid points, NxM: (ω0, γ) for phase diagrams, (q, p) for surfaces.
    #[arg(long, value_parser = parse_grid)]
    grid: Option<[usize; 2]>,
    /// Slice axis: omega0 or gamma.
    #[arg(long, value_parser = parse_name::<AxisParam>)]
    axis: Option<AxisParam>,
    /// Slice point count.
    #[arg(long)]
    points: Option<usize>,
    /// ω0/ω range MIN,MAX.
    #[arg(long, value_parser = parse_pair, allow_hyphen_values = true)]
    omega0_range: Option<[f64; 2]>,
    /// γ/ω range MIN,MAX.
    #[arg(long, value_parser = parse_pair, allow_hyphen_values = true)]
    gamma_range: Option<[f64; 2]>,
    /// q range MIN,MAX for surfaces.
    #[arg(long, value_parser = parse_pair, allow_hyphen_values = true)]
    q_range: Option<[f64; 2]>,
    /// p range MIN,MAX for surfaces.
    #[arg(long, value_parser = parse_pair, allow_hyphen_values = true)]
    p_range: Option<[f64; 2]>,
    /// Axis spacing: linear or log.
    #[arg(long, value_parser = parse_name::<Spacing>)]
    spacing: Option<Spacing>,
    /// j → ∞ panel: off, on (append), only.
    #[arg(long, value_enum)]
    jmax_mode: Option<JmaxMode>,
    /// Sweep columns: analytic, numeric or both.
    #[arg(long, value_parser = parse_name::<Mode>)]
    mode: Option<Mode>,
    /// Allow numeric sweeps at γ ≥ ω/2.
    #[arg(long)]
    allow_collapse_numeric: bool,

    /// Initial Fock cutoff.
    #[arg(long)]
    n_max: Option<usize>,
    /// Largest Fock cutoff.
    #[arg(long)]
    n_cap: Option<usize>,
    #[arg(long)]
    tol_abs: Option<f64>,
    #[arg(long)]
    tol_rel: Option<f64>,
    /// Eigen-residual tolerance.
    #[arg(long)]
    eig_tol: Option<f64>,
    /// Seed of the Lanczos start vectors.
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    max_iterations: Option<usize>,
    /// Largest number of stored Hamiltonian entries.
    #[arg(long)]
    element_budget: Option<usize>,

    /// Output file.
    #[arg(long, short)]
    output: Option<PathBuf>,
    /// Output format; defaults to the file extension, else CSV.
    #[arg(long, value_enum)]
    format: Option<Format>,
    /// Also write an SVG plot next to the output file.
    #[arg(long)]
    plot: bool,
    /// Column shown in sweep plots.
    #[arg(long)]
    column: Option<String>,
    /// Print machine-readable JSON to stdout.
    #[arg(long)]
    json: bool,
}

impl Flags {
    fn overrides(&self) -> Overrides {
        let mut o = Overrides::default();
        o.model.omega = self.omega;
        o.model.omega0 = self.omega0;
        o.model.gamma = self.gamma;
        o.model.j = self.j.clone();
        o.grid.points = self.grid;
        o.grid.axis = self.axis;
        o.grid.slice_points = self.points;
        o.grid.omega0_range = self.omega0_range;
        o.grid.gamma_range = self.gamma_range;
        o.grid.q_range = self.q_range;
        o.grid.p_range = self.p_range;
        o.grid.spacing = self.spacing;
        o.grid.jmax_mode = self.jmax_mode;
        o.grid.mode = self.mode;
        o.grid.allow_collapse_numeric = self.allow_collapse_numeric.then_some(true);
        o.output.path = self.output.clone();
        o.output.format = self.format;
        o.output.plot = self.plot.then_some(true);
        o.output.column = self.column.clone();
        o.n_max = self.n_max;
        o.n_cap = self.n_cap;
        o.tol_abs = self.tol_abs;
        o.tol_rel = self.tol_rel;
        o.eig_tol = self.eig_tol;
        o.seed = self.seed;
        o.max_iterations = self.max_iterations;
        o.element_budget = self.element_budget;
        o
    }
}

fn run(cli: Cli) -> Result<u8> {
    let name = cli.command.name();
    let mut cfg = match &cli.config {
        Some(path) => RunConfig::load(path).map_err(output::validation)?,
        None => RunConfig::default(),
    };
    cfg.bind_command(name).map_err(output::validation)?;
    let command = cli.command;
    let is_verify = matches!(command, Command::Verify(_));
    let flags = command.flags();
    cfg.apply(flags.overrides());
    cfg.controls.validate().map_err(output::validation)?;
    let json = flags.json;
    match name {
        "ground-state" => commands::ground_state_cmd(&cfg, json),
        "phase-diagram" => commands::phase_diagram(&cfg),
        "slice" => commands::slice(&cfg),
        "surface" => commands::surface(&cfg),
        "stationary" => commands::stationary(&cfg, json),
        "limit" => commands::limit(&cfg, json),
        _ if is_verify => commands::verify(&cfg),
        _ => unreachable!("every subcommand is dispatched"),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(output::exit_code(&e))
        }
    }
}
