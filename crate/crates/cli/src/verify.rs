//! Cross-check suite behind `tpdicke verify`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use tpdicke::classical::{
    eom_coherent, eom_coherent_complex, eom_squeezed, eom_squeezed_complex, h_coherent, h_squeezed, limit_correspondence, residual,
    stationary_coherent, stationary_squeezed, surface_boundedness, ClassicalError, ClassicalPoint, SurfaceBound,
};
use tpdicke::eigensolve::{dense_smallest, ground_state, lanczos_smallest, EigOptions};
use tpdicke::hamiltonian::{commutator_norm_with_parity, SymSparseMatrix};
use tpdicke::meanfield::{hp_minimize, superradiant_branch};
use tpdicke::model::{ModelParams, NumericalControls};
use tpdicke::sweep::{run_sweep_with_workers, GridSpec, Mode};

pub struct Check {
    pub name: &'static str,
    pub result: Result<String, String>,
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn err(e: impl std::fmt::Display) -> String {
    e.to_string()
}

fn sp_params(rng: &mut ChaCha8Rng) -> ModelParams {
    let omega = rng.gen_range(0.5..2.0);
    let gamma = omega * rng.gen_range(0.05..0.48);
    let two_j = rng.gen_range(1..=40);
    let window = 2.0 * gamma * gamma / (omega * f64::from(two_j) / 2.0);
    ModelParams::new(omega, window * rng.gen_range(0.05..0.95), gamma, two_j).unwrap()
}

fn decoupled(ctrl: &NumericalControls) -> Result<String, String> {
    for j in [0.5, 1.0, 5.0, 20.0] {
        let r = ground_state(&ModelParams::with_spin(1.0, 0.7, 0.0, j).map_err(err)?, ctrl).map_err(err)?;
        ensure((r.energy + 0.7 * j).abs() < 1e-12 && r.photon_number.abs() < 1e-12, || {
            format!("j = {j}: E0 = {}, n = {}", r.energy, r.photon_number)
        })?;
    }
    Ok("E0 = -jω0 for j in {1/2, 1, 5, 20}".into())
}

fn parity() -> Result<String, String> {
    let mut count = 0;
    for two_j in 1..=6 {
        for n_max in [2, 5, 12] {
            let p = ModelParams::new(1.0, 0.8, 0.35, two_j).map_err(err)?;
            let norm = commutator_norm_with_parity(&p, n_max).map_err(err)?;
            ensure(norm == 0.0, || format!("‖[H, Π]‖ = {norm} at 2j = {two_j}, n_max = {n_max}"))?;
            count += 1;
        }
    }
    Ok(format!("‖[H, Π]‖ = 0 on {count} instances"))
}

fn eigensolver(rng: &mut ChaCha8Rng) -> Result<String, String> {
    let mut worst = 0.0f64;
    for _ in 0..20 {
        let dim = rng.gen_range(2..=60);
        let mut rows = vec![vec![0.0; dim]; dim];
        for r in 0..dim {
            for c in r..dim {
                let v = rng.gen_range(-1.0..1.0);
                rows[r][c] = v;
                rows[c][r] = v;
            }
        }
        let m = SymSparseMatrix::from_dense(&rows);
        let dense = dense_smallest(&m).map_err(err)?.eigenvalue;
        let lanczos = lanczos_smallest(&m, &EigOptions::new(1e-10)).map_err(err)?.eigenvalue;
        worst = worst.max((dense - lanczos).abs());
    }
    ensure(worst < 1e-10, || format!("Lanczos vs dense {worst:.3e}"))?;
    Ok(format!("Lanczos vs dense max error {worst:.1e}"))
}

type Energy = fn(&ClassicalPoint, &ModelParams) -> Result<f64, ClassicalError>;
type Flow = fn(&ClassicalPoint, &ModelParams) -> Result<[f64; 4], ClassicalError>;

fn gradients(rng: &mut ChaCha8Rng) -> Result<String, String> {
    let h = 1e-5;
    let mut worst = 0.0f64;
    for _ in 0..50 {
        let p = ModelParams::new(rng.gen_range(0.5..2.0), rng.gen_range(-1.0..1.0), rng.gen_range(0.0..1.0), rng.gen_range(1..60))
            .map_err(err)?;
        let (r, t): (f64, f64) = (rng.gen_range(0.0..1.9), rng.gen_range(0.0..std::f64::consts::TAU));
        let x = [rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0), r * t.cos(), r * t.sin()];
        let at = |y: [f64; 4]| ClassicalPoint::real(y[0], y[1], y[2], y[3]);
        let pairs: [(Energy, Flow); 2] = [(h_squeezed, eom_squeezed), (h_coherent, eom_coherent)];
        for (f, flow) in pairs {
            let flow = flow(&at(x), &p).map_err(err)?;
            let mut g = [0.0; 4];
            for i in 0..4 {
                let (mut a, mut b) = (x, x);
                a[i] += h;
                b[i] -= h;
                g[i] = (f(&at(a), &p).map_err(err)? - f(&at(b), &p).map_err(err)?) / (2.0 * h);
            }
            for (i, e) in [g[1], -g[0], g[3], -g[2]].iter().enumerate() {
                worst = worst.max((flow[i] - e).abs());
            }
        }
    }
    ensure(worst < 1e-6, || format!("max FD error {worst:.3e}"))?;
    Ok(format!("EOM vs finite differences max error {worst:.1e}"))
}

fn stationarity(rng: &mut ChaCha8Rng) -> Result<String, String> {
    let mut worst = 0.0f64;
    for _ in 0..50 {
        let p = sp_params(rng);
        let x = stationary_squeezed(&p);
        for s in [x.plus, x.minus].into_iter().flatten() {
            let r = if s.real {
                eom_squeezed(&s.point, &p).map_err(err)?.iter().fold(0.0f64, |m, v| m.max(v.abs()))
            } else {
                residual(&eom_squeezed_complex(&s.point, &p))
            };
            worst = worst.max(r);
        }
        let y = stationary_coherent(&p).map_err(err)?;
        for s in [y.plus, y.minus].into_iter().flatten() {
            worst = worst.max(residual(&eom_coherent_complex(&s.point, &p)));
        }
    }
    ensure(worst < 1e-10, || format!("max residual {worst:.3e}"))?;
    Ok(format!("stationary-point residual max {worst:.1e}"))
}

fn mean_field(rng: &mut ChaCha8Rng) -> Result<String, String> {
    let mut worst = 0.0f64;
    for _ in 0..100 {
        let p = sp_params(rng);
        let closed = superradiant_branch(&p).map_err(err)?.e0;
        let hp = hp_minimize(&p).map_err(err)?.energy;
        worst = worst.max(((hp - closed) / closed).abs());
    }
    ensure(worst < 1e-8, || format!("closed form vs variational {worst:.3e}"))?;
    Ok(format!("closed form vs variational max rel error {worst:.1e}"))
}

fn limit() -> Result<String, String> {
    let p = ModelParams::with_spin(1.0, 2.0, 0.4, 1.0).map_err(err)?;
    let rows = limit_correspondence(&p, &[10.0, 100.0, 1000.0, 10000.0]).map_err(err)?;
    ensure(rows.windows(2).all(|w| w[1].plus < w[0].plus && w[1].minus < w[0].minus), || "distances not decreasing".into())?;
    ensure(rows.iter().all(|r| r.trivial == 0.0), || "trivial points differ".into())?;
    Ok(format!("‖x₊ - y₊‖ = {:.3e} at j = 10⁴", rows[3].plus))
}

fn surface() -> Result<String, String> {
    let p = ModelParams::with_spin(1.0, 2.0, 0.5, 1.0).map_err(err)?;
    ensure(surface_boundedness(&p.with_gamma(0.5 - 1e-9)) == SurfaceBound::Bounded, || "bounded side".into())?;
    ensure(surface_boundedness(&p) == SurfaceBound::Unbounded { boundary: true }, || "boundary".into())?;
    Ok("boundedness flips at γ = ω/2".into())
}

fn sweep_equivalence(ctrl: &NumericalControls) -> Result<String, String> {
    let mut spec = GridSpec::phase_diagram(1.0, (0.0, 0.5), (0.0, 0.45), (4, 4), vec![1.0, 2.0]);
    spec.mode = Mode::Both;
    let serial = run_sweep_with_workers(&spec, ctrl, Some(1)).map_err(err)?;
    let parallel = run_sweep_with_workers(&spec, ctrl, Some(4)).map_err(err)?;
    ensure(serial == parallel, || "rows differ between 1 and 4 workers".into())?;
    Ok(format!("{} rows identical across 1 and 4 workers", serial.len()))
}

pub fn run(ctrl: &NumericalControls) -> Vec<Check> {
    let mut rng = ChaCha8Rng::seed_from_u64(ctrl.seed);
    vec![
        Check { name: "decoupled limit", result: decoupled(ctrl) },
        Check { name: "parity symmetry", result: parity() },
        Check { name: "eigensolver", result: eigensolver(&mut rng) },
        Check { name: "gradients", result: gradients(&mut rng) },
        Check { name: "stationarity", result: stationarity(&mut rng) },
        Check { name: "mean field", result: mean_field(&mut rng) },
        Check { name: "thermodynamic limit", result: limit() },
        Check { name: "collapse surface", result: surface() },
        Check { name: "sweep determinism", result: sweep_equivalence(ctrl) },
    ]
}
