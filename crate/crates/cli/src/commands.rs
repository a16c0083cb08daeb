//! Subcommand bodies. Each returns the process exit code on success.

use std::path::PathBuf;

use anyhow::{anyhow, Result};
use tpdicke::classical::{
    h_coherent_complex, h_squeezed_complex, limit_correspondence, stationary_coherent, stationary_squeezed, surface_boundedness,
    surface_grid, ClassicalPoint, Sheet, StationarySet, SurfaceBound,
};
use tpdicke::eigensolve::{ground_state, GroundStateError};
use tpdicke::meanfield::observables;
use tpdicke::model::{classify_phase, ModelParams};
use tpdicke::sweep::{
    run_sweep_with_workers, superradiant_area, surface_columns, sweep_columns, write_table_csv, write_table_json, Axis, AxisParam,
    Cell, GridSpec, Mode, SweepRow, DEFAULT_ANALYTIC_POINTS, DEFAULT_NUMERIC_POINTS,
};
use tpdicke::Complex64;

use crate::config::{Format, JmaxMode, RunConfig};
use crate::output::{self, PendingFile, EXIT_INVARIANT, EXIT_NONCONVERGENCE};
use crate::svg;
use crate::verify;

/// Environment variable capping the sweep worker count.
pub const WORKERS_ENV: &str = "TPDICKE_WORKERS";

const PHASE_DIAGRAM_J: [f64; 3] = [10.0, 25.0, 100.0];
const SLICE_J: [f64; 4] = [20.0, 40.0, 100.0, 200.0];
const LIMIT_J: [f64; 3] = [10.0, 100.0, 1000.0];

type Table = Vec<Vec<(&'static str, Cell)>>;

/// Commands without a plot reject `--plot` before any compute.
fn reject_plot(cfg: &RunConfig, command: &str) -> Result<()> {
    if cfg.plot() {
        return Err(output::validation(anyhow!("{command} has no plot output")));
    }
    Ok(())
}

fn required(value: Option<f64>, flag: &str) -> Result<f64> {
    value.ok_or_else(|| output::validation(anyhow!("--{flag} is required")))
}

fn point_params(cfg: &RunConfig) -> Result<ModelParams> {
    let j = cfg.single_spin().map_err(output::validation)?;
    let omega0 = required(cfg.model.omega0, "omega0")?;
    let gamma = required(cfg.model.gamma, "gamma")?;
    ModelParams::with_spin(cfg.omega(), omega0, gamma, j).map_err(output::validation)
}

fn workers() -> Result<Option<usize>> {
    match std::env::var(WORKERS_ENV) {
        Err(_) => Ok(None),
        Ok(s) => match s.trim().parse::<usize>() {
            Ok(n) if n > 0 => Ok(Some(n)),
            _ => Err(output::validation(anyhow!("{WORKERS_ENV} must be a positive integer, got `{s}`"))),
        },
    }
}

/// Output file of a table-writing command, reserved before any compute.
struct Sink {
    table: PendingFile,
    plot: Option<PendingFile>,
    format: Format,
    started: String,
}

impl Sink {
    fn open(cfg: &mut RunConfig, command: &str, always: bool) -> Result<Option<Self>> {
        let format = cfg.format().map_err(output::validation)?;
        let path = match (&cfg.output.path, always) {
            (Some(p), _) => p.clone(),
            (None, true) => PathBuf::from(format!("{command}.{}", format.extension())),
            (None, false) => return Ok(None),
        };
        cfg.output.path = Some(path.clone());
        let table = PendingFile::reserve(&path)?;
        let plot = if cfg.plot() { Some(PendingFile::reserve(&path.with_extension("svg"))?) } else { None };
        Ok(Some(Self { table, plot, format, started: output::timestamp() }))
    }

    fn commit(self, cfg: &RunConfig, rows: &Table, plot: impl FnOnce() -> Result<String>) -> Result<()> {
        let meta = output::metadata(cfg, self.started)?;
        let format = self.format;
        let path = self.table.write_with(|w| match format {
            Format::Csv => write_table_csv(w, &meta, rows),
            Format::Json => write_table_json(w, &meta, rows),
        })?;
        eprintln!("wrote {}", path.display());
        if let Some(pending) = self.plot {
            let body = plot()?;
            let path = pending.write_with(|w| w.write_all(body.as_bytes()))?;
            eprintln!("wrote {}", path.display());
        }
        Ok(())
    }
}

fn column_values(rows: &[SweepRow], column: &str) -> Result<Vec<f64>> {
    rows.iter()
        .map(|r| {
            let cells = r.columns();
            let cell = cells.iter().find(|c| c.0 == column).map(|c| &c.1);
            match cell {
                Some(Cell::Float(x)) => Ok(*x),
                Some(Cell::Int(i)) => Ok(*i as f64),
                Some(Cell::Empty) => Ok(f64::NAN),
                Some(_) => Err(output::validation(anyhow!("column `{column}` is not numeric"))),
                None => Err(output::validation(anyhow!("unknown column `{column}`"))),
            }
        })
        .collect()
}

fn size_label(j: f64) -> String {
    if j.is_infinite() {
        "j = ∞".into()
    } else {
        format!("j = {j}")
    }
}

fn fmt(x: Option<f64>) -> String {
    x.map_or_else(|| "n/a".into(), |v| format!("{v:.12}"))
}

pub fn ground_state_cmd(cfg: &RunConfig, json: bool) -> Result<u8> {
    let mut cfg = cfg.clone();
    let params = point_params(&cfg)?;
    reject_plot(&cfg, "ground-state")?;
    let sink = Sink::open(&mut cfg, "ground-state", false)?;
    let phase = classify_phase(&params);
    let analytic = observables(&params).ok();
    let numeric = ground_state(&params, &cfg.controls).map_err(|e| match e {
        GroundStateError::Eigen { .. } => e.into(),
        other => output::validation(other),
    })?;

    let mut code = 0;
    if numeric.collapse_regime {
        eprintln!(
            "warning: γ = {} ≥ ω/2 = {} (collapse regime): the spectrum is unbounded below; the numeric value is the lowest level at n_max = {} and is not a ground state",
            params.gamma,
            params.omega / 2.0,
            numeric.n_max_used
        );
        code = EXIT_NONCONVERGENCE;
    } else if !numeric.converged {
        eprintln!("warning: E0 did not converge in the Fock cutoff up to n_cap = {}", cfg.controls.n_cap);
        code = EXIT_NONCONVERGENCE;
    }

    if json {
        let doc = serde_json::json!({
            "params": params,
            "phase": phase,
            "analytic": analytic,
            "numeric": numeric,
        });
        println!("{}", serde_json::to_string_pretty(&doc)?);
    } else {
        println!("ω = {}, ω0 = {}, γ = {}, j = {}: {}", params.omega, params.omega0, params.gamma, params.j(), phase);
        println!("{:<16} {:>20} {:>20}", "", "analytic", "numeric");
        let rows = [
            ("E0", analytic.map(|a| a.e0), numeric.energy),
            ("<a†a>", analytic.map(|a| a.photon_number), numeric.photon_number),
            ("<Jz>/j", analytic.map(|a| a.jz_over_j), numeric.jz_over_j),
            ("1 + <Jz>/j", analytic.map(|a| a.excitation()), 1.0 + numeric.jz_over_j),
        ];
        for (name, a, n) in rows {
            println!("{name:<16} {:>20} {:>20}", fmt(a), fmt(Some(n)));
        }
        println!(
            "numeric: sector {}, n_max used {}, converged {}, residual {:.1e}",
            numeric.sector, numeric.n_max_used, numeric.converged, numeric.residual
        );
    }

    if let Some(sink) = sink {
        let opt = |x: Option<f64>| x.map_or(Cell::Empty, Cell::Float);
        let row = vec![
            ("omega", Cell::Float(params.omega)),
            ("omega0", Cell::Float(params.omega0)),
            ("gamma", Cell::Float(params.gamma)),
            ("j", Cell::Float(params.j())),
            ("phase", Cell::Text(phase.label().into())),
            ("e0", opt(analytic.map(|a| a.e0))),
            ("photon_number", opt(analytic.map(|a| a.photon_number))),
            ("jz_over_j", opt(analytic.map(|a| a.jz_over_j))),
            ("numeric_e0", Cell::Float(numeric.energy)),
            ("numeric_photon_number", Cell::Float(numeric.photon_number)),
            ("numeric_jz_over_j", Cell::Float(numeric.jz_over_j)),
            ("numeric_converged", Cell::Bool(numeric.converged)),
            ("numeric_n_max_used", Cell::Int(numeric.n_max_used as i64)),
            ("numeric_sector", Cell::Text(numeric.sector.label().into())),
            ("collapse_regime", Cell::Bool(numeric.collapse_regime)),
        ];
        sink.commit(&cfg, &vec![row], || unreachable!("plot rejected up front"))?;
    }
    Ok(code)
}

fn default_points(mode: Mode) -> usize {
    if mode == Mode::Analytic {
        DEFAULT_ANALYTIC_POINTS
    } else {
        DEFAULT_NUMERIC_POINTS
    }
}

/// Default γ/ω window; numeric sweeps stop short of the collapse point.
fn default_gamma_range(mode: Mode) -> [f64; 2] {
    if mode == Mode::Analytic {
        [0.0, 0.5]
    } else {
        [0.0, 0.49]
    }
}

fn sizes(cfg: &RunConfig, default_j: &[f64], default_jmax: JmaxMode) -> (Vec<f64>, bool) {
    match cfg.grid.jmax_mode.unwrap_or(default_jmax) {
        JmaxMode::Off => (cfg.spins(default_j), false),
        JmaxMode::On => (cfg.spins(default_j), true),
        JmaxMode::Only => (Vec::new(), true),
    }
}

fn numeric_failures(rows: &[SweepRow]) -> usize {
    rows.iter().filter(|r| matches!(&r.numeric, Some(Err(_))) || r.numeric_result().is_some_and(|n| !n.converged)).count()
}

fn sweep_exit(rows: &[SweepRow]) -> u8 {
    let bad = numeric_failures(rows);
    if bad > 0 {
        eprintln!("warning: {bad} numeric rows failed or did not converge");
        EXIT_NONCONVERGENCE
    } else {
        0
    }
}

pub fn phase_diagram(cfg: &RunConfig) -> Result<u8> {
    let mut cfg = cfg.clone();
    let mode = cfg.mode();
    let [omega0_pts, gamma_pts] = cfg.grid.points.unwrap_or([default_points(mode); 2]);
    let omega0_range = cfg.grid.omega0_range.unwrap_or([0.0, 0.5]);
    let gamma_range = cfg.grid.gamma_range.unwrap_or_else(|| default_gamma_range(mode));
    let (j_list, limit) = sizes(&cfg, &PHASE_DIAGRAM_J, JmaxMode::Off);
    let mut spec = GridSpec::phase_diagram(
        cfg.omega(),
        (omega0_range[0], omega0_range[1]),
        (gamma_range[0], gamma_range[1]),
        (gamma_pts, omega0_pts),
        j_list,
    );
    if let Some(spacing) = cfg.grid.spacing {
        spec.axes.iter_mut().for_each(|a| a.spacing = spacing);
    }
    spec.thermodynamic_limit = limit;
    spec.mode = mode;
    spec.allow_collapse_numeric = cfg.grid.allow_collapse_numeric.unwrap_or(false);
    spec.validate().map_err(output::validation)?;
    let column = cfg.output.column.clone().unwrap_or_else(|| if mode == Mode::Numeric { "numeric_excitation" } else { "excitation" }.into());
    let sink = Sink::open(&mut cfg, "phase-diagram", true)?.expect("always opened");

    let rows = run_sweep_with_workers(&spec, &cfg.controls, workers()?).map_err(output::validation)?;
    let (gamma_axis, omega0_axis) = (&spec.axes[0], &spec.axes[1]);
    for j in spec.sizes() {
        let area = superradiant_area(spec.omega, omega0_axis, gamma_axis, j.is_finite().then_some(j)).map_err(output::validation)?;
        println!("{}: superradiant area fraction {area:.6}", size_label(j));
    }
    let values = column_values(&rows, &column)?;
    let per_panel = omega0_axis.points * gamma_axis.points;
    let plot = || -> Result<String> {
        let panels: Vec<svg::Heatmap> = spec
            .sizes()
            .iter()
            .zip(values.chunks(per_panel))
            .map(|(&j, chunk)| svg::Heatmap {
                title: size_label(j),
                xs: omega0_axis.values(),
                ys: gamma_axis.values(),
                values: chunk.to_vec(),
            })
            .collect();
        Ok(svg::heatmaps(&column, "ω0/ω", "γ/ω", &panels))
    };
    sink.commit(&cfg, &sweep_columns(&rows), plot)?;
    Ok(sweep_exit(&rows))
}

pub fn slice(cfg: &RunConfig) -> Result<u8> {
    let mut cfg = cfg.clone();
    let mode = cfg.mode();
    let param = cfg.grid.axis.unwrap_or(AxisParam::Omega0);
    let points = cfg.grid.slice_points.unwrap_or_else(|| default_points(mode));
    let range = match param {
        AxisParam::Omega0 => cfg.grid.omega0_range.unwrap_or([-0.1, 0.1]),
        AxisParam::Gamma => cfg.grid.gamma_range.unwrap_or_else(|| default_gamma_range(mode)),
    };
    let mut axis = Axis::linear(param, range[0], range[1], points);
    if let Some(spacing) = cfg.grid.spacing {
        axis.spacing = spacing;
    }
    let (j_list, limit) = sizes(&cfg, &SLICE_J, JmaxMode::On);
    let spec = GridSpec {
        axes: vec![axis],
        omega: cfg.omega(),
        omega0: cfg.model.omega0.unwrap_or(0.0),
        gamma: cfg.model.gamma.unwrap_or(0.45),
        j_list,
        thermodynamic_limit: limit,
        mode,
        allow_collapse_numeric: cfg.grid.allow_collapse_numeric.unwrap_or(false),
    };
    spec.validate().map_err(output::validation)?;
    let column =
        cfg.output.column.clone().unwrap_or_else(|| if mode == Mode::Numeric { "numeric_displaced_energy" } else { "displaced_energy" }.into());
    let sink = Sink::open(&mut cfg, "slice", true)?.expect("always opened");

    let rows = run_sweep_with_workers(&spec, &cfg.controls, workers()?).map_err(output::validation)?;
    let values = column_values(&rows, &column)?;
    let xs = spec.axes[0].values();
    let plot = || -> Result<String> {
        let series: Vec<svg::Series> = spec
            .sizes()
            .iter()
            .zip(values.chunks(xs.len()))
            .map(|(&j, chunk)| svg::Series { label: size_label(j), points: xs.iter().copied().zip(chunk.iter().copied()).collect() })
            .collect();
        Ok(svg::line_plot(&column, &format!("{param}/ω"), &column, &series))
    };
    sink.commit(&cfg, &sweep_columns(&rows), plot)?;
    Ok(sweep_exit(&rows))
}

pub fn surface(cfg: &RunConfig) -> Result<u8> {
    let mut cfg = cfg.clone();
    let omega = cfg.omega();
    let omega0 = cfg.model.omega0.unwrap_or(2.0 * omega);
    let gamma = cfg.model.gamma.unwrap_or(0.5 * omega);
    let params = ModelParams::new(omega, omega0, gamma, 1).map_err(output::validation)?;
    let [nq, np] = cfg.grid.points.unwrap_or([201, 201]);
    if nq < 2 || np < 2 {
        return Err(output::validation(anyhow!("surface grid needs at least 2x2 points")));
    }
    let q_range = cfg.grid.q_range.unwrap_or([-6.0, 6.0]);
    let p_range = cfg.grid.p_range.unwrap_or([-6.0, 6.0]);
    for (name, r) in [("q", q_range), ("p", p_range)] {
        if !(r[0].is_finite() && r[1].is_finite() && r[0] < r[1]) {
            return Err(output::validation(anyhow!("{name} range must be finite with min < max")));
        }
    }
    let sink = Sink::open(&mut cfg, "surface", true)?.expect("always opened");

    let samples = surface_grid(&params, (q_range[0], q_range[1]), (p_range[0], p_range[1]), nq, np);
    match surface_boundedness(&params) {
        SurfaceBound::Bounded => println!("surface bounded below (γ < ω/2)"),
        SurfaceBound::Unbounded { boundary: true } => println!("surface unbounded: γ = ω/2, flat asymptote along q = ±p"),
        SurfaceBound::Unbounded { boundary: false } => println!("surface unbounded below (γ > ω/2)"),
    }
    let lowest = samples.iter().min_by(|a, b| a.h.total_cmp(&b.h)).expect("non-empty grid");
    println!("grid minimum h = {:.12} at (q, p) = ({}, {})", lowest.h, lowest.q, lowest.p);
    let plot = || -> Result<String> {
        let column = |i: usize| samples[i].q;
        let xs: Vec<f64> = (0..nq).map(|i| column(i * np)).collect();
        let ys: Vec<f64> = (0..np).map(|i| samples[i].p).collect();
        let mut values = Vec::with_capacity(nq * np);
        for ip in 0..np {
            for iq in 0..nq {
                values.push(samples[iq * np + ip].h);
            }
        }
        let title = format!("h(q, p) at ω = {omega}, ω0 = {omega0}, γ = {gamma}");
        Ok(svg::heatmaps(&title, "q", "p", &[svg::Heatmap { title: String::new(), xs, ys, values }]))
    };
    sink.commit(&cfg, &surface_columns(&samples), plot)?;
    Ok(0)
}

fn point_cells(limit: &'static str, label: &'static str, point: &ClassicalPoint, real: bool, energy: Complex64, j: f64) -> Vec<(&'static str, Cell)> {
    let c = point.components();
    vec![
        ("limit", Cell::Text(limit.into())),
        ("point", Cell::Text(label.into())),
        ("real", Cell::Bool(real)),
        (
            "sheet",
            Cell::Text(
                match point.sheet {
                    Sheet::Principal => "principal",
                    Sheet::Negated => "negated",
                }
                .into(),
            ),
        ),
        ("q_re", Cell::Float(c[0].re)),
        ("q_im", Cell::Float(c[0].im)),
        ("p_re", Cell::Float(c[1].re)),
        ("p_im", Cell::Float(c[1].im)),
        ("Q_re", Cell::Float(c[2].re)),
        ("Q_im", Cell::Float(c[2].im)),
        ("P_re", Cell::Float(c[3].re)),
        ("P_im", Cell::Float(c[3].im)),
        ("h_re", Cell::Float(energy.re)),
        ("h_im", Cell::Float(energy.im)),
        ("energy_re", Cell::Float(j * energy.re)),
        ("energy_im", Cell::Float(j * energy.im)),
    ]
}

fn stationary_rows(limit: &'static str, set: &StationarySet, params: &ModelParams, h: fn(&ClassicalPoint, &ModelParams) -> Complex64) -> Table {
    let mut rows = vec![point_cells(limit, "trivial", &set.trivial, true, h(&set.trivial, params), params.j())];
    for (label, s) in [("plus", set.plus), ("minus", set.minus)] {
        if let Some(s) = s {
            rows.push(point_cells(limit, label, &s.point, s.real, h(&s.point, params), params.j()));
        }
    }
    rows
}

fn print_set(title: &str, rows: &Table) {
    println!("{title}");
    for row in rows {
        let get = |k: &str| row.iter().find(|c| c.0 == k).map(|c| c.1.clone()).unwrap_or(Cell::Empty);
        let f = |k: &str| match get(k) {
            Cell::Float(x) => x,
            _ => f64::NAN,
        };
        let real = matches!(get("real"), Cell::Bool(true));
        let label = match get("point") {
            Cell::Text(s) => s,
            _ => String::new(),
        };
        println!(
            "  {label:<8} q = {:+.10}{:+.10}i  p = {:+.3}  Q = {:+.10}{:+.10}i  P = {:+.3}  jh = {:+.12}{:+.3e}i  {}",
            f("q_re"),
            f("q_im"),
            f("p_re"),
            f("Q_re"),
            f("Q_im"),
            f("P_re"),
            f("energy_re"),
            f("energy_im"),
            if real { "real" } else { "complex" }
        );
    }
}

pub fn stationary(cfg: &RunConfig, json: bool) -> Result<u8> {
    let mut cfg = cfg.clone();
    let params = point_params(&cfg)?;
    reject_plot(&cfg, "stationary")?;
    let sink = Sink::open(&mut cfg, "stationary", false)?;
    let squeezed = stationary_squeezed(&params);
    let mut rows = stationary_rows("squeezed", &squeezed, &params, h_squeezed_complex);
    let squeezed_rows = rows.len();
    match stationary_coherent(&params) {
        Ok(set) => rows.extend(stationary_rows("coherent", &set, &params, h_coherent_complex)),
        Err(e) => eprintln!("warning: coherent limit skipped: {e}"),
    }
    if json {
        let doc = serde_json::json!({
            "params": params,
            "squeezed": squeezed,
            "coherent": stationary_coherent(&params).ok(),
        });
        println!("{}", serde_json::to_string_pretty(&doc)?);
    } else {
        print_set("squeezed-vacuum limit", &rows[..squeezed_rows].to_vec());
        if rows.len() > squeezed_rows {
            print_set("coherent-state limit", &rows[squeezed_rows..].to_vec());
        }
    }
    if let Some(sink) = sink {
        sink.commit(&cfg, &rows, || unreachable!("plot rejected up front"))?;
    }
    Ok(0)
}

pub fn limit(cfg: &RunConfig, json: bool) -> Result<u8> {
    let mut cfg = cfg.clone();
    let omega0 = required(cfg.model.omega0, "omega0")?;
    let gamma = required(cfg.model.gamma, "gamma")?;
    let params = ModelParams::new(cfg.omega(), omega0, gamma, 1).map_err(output::validation)?;
    let spins = cfg.spins(&LIMIT_J);
    let sink = Sink::open(&mut cfg, "limit", true)?.expect("always opened");
    let rows = limit_correspondence(&params, &spins).map_err(output::validation)?;
    if json {
        println!("{}", serde_json::to_string_pretty(&rows)?);
    } else {
        println!("{:>12} {:>14} {:>14} {:>14} {:>14}", "j", "|x+ - y+|", "|x- - y-|", "|x+ - y-|", "1/(2j|q_y|)");
        for r in &rows {
            println!("{:>12} {:>14.6e} {:>14.6e} {:>14.6e} {:>14.6e}", r.j, r.plus, r.minus, r.cross, r.leading_order);
        }
    }
    let table: Table = rows
        .iter()
        .map(|r| {
            vec![
                ("j", Cell::Float(r.j)),
                ("plus", Cell::Float(r.plus)),
                ("minus", Cell::Float(r.minus)),
                ("cross", Cell::Float(r.cross)),
                ("trivial", Cell::Float(r.trivial)),
                ("leading_order", Cell::Float(r.leading_order)),
            ]
        })
        .collect();
    let plot = || -> Result<String> {
        let log = |pick: fn(&tpdicke::classical::LimitRow) -> f64| -> Vec<(f64, f64)> {
            rows.iter().map(|r| (r.j.log10(), pick(r).log10())).collect()
        };
        let series = [
            svg::Series { label: "x+ vs y+".into(), points: log(|r| r.plus) },
            svg::Series { label: "x- vs y-".into(), points: log(|r| r.minus) },
            svg::Series { label: "leading order".into(), points: log(|r| r.leading_order) },
        ];
        Ok(svg::line_plot("stationary-point distance", "log10 j", "log10 distance", &series))
    };
    sink.commit(&cfg, &table, plot)?;
    Ok(0)
}

pub fn verify(cfg: &RunConfig) -> Result<u8> {
    let checks = verify::run(&cfg.controls);
    let mut failed = 0;
    for c in &checks {
        match &c.result {
            Ok(detail) => println!("ok    {}: {detail}", c.name),
            Err(detail) => {
                failed += 1;
                println!("FAIL  {}: {detail}", c.name);
            }
        }
    }
    println!("{} of {} checks passed", checks.len() - failed, checks.len());
    Ok(if failed == 0 { 0 } else { EXIT_INVARIANT })
}


#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn size_labels() {
        assert_eq!(size_label(10.0), "j = 10");
        assert_eq!(size_label(f64::INFINITY), "j = ∞");
    }

    #[test]
    fn unknown_column_is_a_validation_error() {
        let spec = GridSpec::phase_diagram(1.0, (0.0, 0.5), (0.0, 0.4), (2, 2), vec![1.0]);
        let rows = tpdicke::sweep::run_sweep(&spec, &Default::default()).unwrap();
        assert_eq!(column_values(&rows, "excitation").unwrap().len(), 4);
        let err = column_values(&rows, "nope").unwrap_err();
        assert_eq!(output::exit_code(&err), output::EXIT_VALIDATION);
    }
}
