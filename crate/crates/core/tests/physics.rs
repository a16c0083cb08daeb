mod common;

use num_complex::Complex64;
use proptest::prelude::*;

use tpdicke::classical::{h_coherent, h_squeezed, ClassicalPoint};
use tpdicke::eigensolve::ground_state;
use tpdicke::hamiltonian::build_full;
use tpdicke::meanfield::{observables, superradiant_half_width};
use tpdicke::model::{Basis, BasisIndex, ModelParams, NumericalControls, Phase};
use tpdicke::sweep::{run_sweep, superradiant_area, Axis, AxisParam, GridSpec, Mode};

/// Ground states frozen from an independent scipy `eigsh` build of H.
#[test]
fn exact_diagonalization_baseline() {
    let cases = [
        ((1.0, 0.02, 0.45, 10.0), -0.309_440_207_049_042, 0.533_697_179_978_7, -0.286_928_881_985_5),
        ((1.0, 1.0, 0.3, 5.0), -5.006_147_068_758_779, 0.004_302_270_996_8, -0.999_568_798_284_1),
        ((1.0, 0.1, 0.49, 3.0), -0.449_999_514_799_906, 1.380_630_769_694_2, -0.389_938_331_684_9),
    ];
    let ctrl = NumericalControls::default();
    for ((w, w0, g, j), e0, photons, jz) in cases {
        let r = ground_state(&ModelParams::with_spin(w, w0, g, j).unwrap(), &ctrl).unwrap();
        assert!(r.converged);
        assert!((r.energy - e0).abs() < 1e-10, "{} vs {e0}", r.energy);
        assert!((r.photon_number - photons).abs() < 1e-7);
        assert!((r.jz_over_j - jz).abs() < 1e-7);
    }
}

fn expectation(params: &ModelParams, n_max: usize, psi: &[Complex64]) -> f64 {
    let h = build_full(params, n_max).unwrap();
    let norm: f64 = psi.iter().map(|c| c.norm_sqr()).sum();
    let mut total = 0.0;
    for &(r, c, v) in h.entries() {
        let term = (psi[r].conj() * psi[c]).re * v;
        total += if r == c { term } else { 2.0 * term };
    }
    total / norm
}

fn ln_factorial(n: usize) -> f64 {
    (1..=n).map(|k| (k as f64).ln()).sum()
}

/// Bloch coherent amplitudes over k = j + m with β = (Q + iP)/√(4 - Q² - P²).
fn bloch(two_j: u32, big_q: f64, big_p: f64) -> Vec<Complex64> {
    let beta = Complex64::new(big_q, big_p) / (4.0 - big_q * big_q - big_p * big_p).sqrt();
    let n = two_j as usize;
    let scale = (1.0 + beta.norm_sqr()).powf(-f64::from(two_j) / 2.0);
    (0..=n)
        .map(|k| {
            let binom = (ln_factorial(n) - ln_factorial(k) - ln_factorial(n - k)).exp().sqrt();
            beta.powu(k as u32) * binom * scale
        })
        .collect()
}

fn product_state(basis: &Basis, field: &[Complex64], spin: &[Complex64]) -> Vec<Complex64> {
    let mut psi = vec![Complex64::new(0.0, 0.0); basis.dim()];
    for (n, &f) in field.iter().enumerate() {
        for (k, &s) in spin.iter().enumerate() {
            let index = basis.index_of(BasisIndex::new(n as u32, 2 * k as i32 - basis.two_j as i32));
            psi[index] = f * s;
        }
    }
    psi
}

#[test]
fn coherent_energy_is_a_quantum_expectation() {
    let n_max = 80;
    for (q, p, bq, bp) in [(0.7, -0.4, 1.1, 0.6), (-1.2, 0.3, -0.5, 1.5), (0.0, 1.0, 1.9, 0.0)] {
        let params = ModelParams::with_spin(1.3, 0.8, 0.37, 2.0).unwrap();
        let alpha = Complex64::new(q, p) * (params.j() / 2.0).sqrt();
        let field: Vec<Complex64> = (0..=n_max)
            .map(|n| alpha.powu(n as u32) * (-alpha.norm_sqr() / 2.0 - ln_factorial(n) / 2.0).exp())
            .collect();
        let basis = Basis::new(n_max, params.two_j);
        let psi = product_state(&basis, &field, &bloch(params.two_j, bq, bp));
        let quantum = expectation(&params, n_max, &psi) / params.j();
        let classical = h_coherent(&ClassicalPoint::real(q, p, bq, bp), &params).unwrap();
        assert!((quantum - classical).abs() < 1e-10, "{quantum} vs {classical}");
    }
}

#[test]
fn squeezed_energy_is_a_quantum_expectation() {
    // Squeezed vacuum S(r) with sinh² r = j q²/2, squeezing phase 0 for q > 0.
    let n_max = 240;
    for (q, bq, bp) in [(0.6, 1.2, 0.3), (-0.9, -0.4, 1.1), (0.3, -1.5, -0.2)] {
        let params = ModelParams::with_spin(1.0, 0.6, 0.41, 1.5).unwrap();
        let r = (params.j() * q * q / 2.0).sqrt().asinh();
        let sign = if q >= 0.0 { -1.0 } else { 1.0 };
        let t = sign * r.tanh();
        let mut field = vec![Complex64::new(0.0, 0.0); n_max + 1];
        for k in 0..=n_max / 2 {
            let log = 0.5 * ln_factorial(2 * k) - (k as f64) * 2f64.ln() - ln_factorial(k) - 0.5 * r.cosh().ln();
            field[2 * k] = Complex64::new(t.powi(k as i32) * log.exp(), 0.0);
        }
        let basis = Basis::new(n_max, params.two_j);
        let psi = product_state(&basis, &field, &bloch(params.two_j, bq, bp));
        let quantum = expectation(&params, n_max, &psi) / params.j();
        let classical = h_squeezed(&ClassicalPoint::real(q, 0.0, bq, bp), &params).unwrap();
        assert!((quantum - classical).abs() < 1e-9, "{quantum} vs {classical}");
    }
}

#[test]
fn slice_window_shrinks_with_size() {
    let spec = GridSpec {
        axes: vec![Axis::linear(AxisParam::Omega0, -0.1, 0.1, 401)],
        omega: 1.0,
        omega0: 0.0,
        gamma: 0.45,
        j_list: vec![20.0, 40.0, 100.0, 200.0],
        thermodynamic_limit: true,
        mode: Mode::Analytic,
        allow_collapse_numeric: false,
    };
    let rows = run_sweep(&spec, &NumericalControls::default()).unwrap();
    let mut widths = Vec::new();
    for j in spec.sizes() {
        let sp: Vec<f64> =
            rows.iter().filter(|r| r.j == j && r.phase == Phase::Superradiant).map(|r| r.omega0.abs()).collect();
        let measured = sp.iter().copied().fold(0.0, f64::max);
        if j.is_finite() {
            let bound = superradiant_half_width(&ModelParams::with_spin(1.0, 0.0, 0.45, j).unwrap());
            assert!(measured < bound && bound - measured <= 0.2 / 400.0 + 1e-15, "j = {j}");
            assert!(bound < 0.45 / j);
        } else {
            assert!(sp.is_empty());
        }
        widths.push(measured);
    }
    assert!(widths.windows(2).all(|w| w[1] < w[0]));
}

#[test]
fn zero_frequency_slice_diverges() {
    let spec = GridSpec {
        axes: vec![Axis::linear(AxisParam::Gamma, 0.0, 0.4999, 200)],
        omega: 1.0,
        omega0: 0.0,
        gamma: 0.0,
        j_list: vec![10.0],
        thermodynamic_limit: false,
        mode: Mode::Analytic,
        allow_collapse_numeric: false,
    };
    let rows = run_sweep(&spec, &NumericalControls::default()).unwrap();
    let photons: Vec<f64> = rows.iter().map(|r| r.analytic.unwrap().photon_number).collect();
    assert_eq!(photons[0], 0.0);
    assert!(photons.windows(2).all(|w| w[1] > w[0]));
    assert!(*photons.last().unwrap() > 20.0);
}

#[test]
fn deep_normal_phase_numeric_agrees() {
    let mut spec = GridSpec::phase_diagram(1.0, (0.2, 1.0), (0.0, 0.39), (3, 3), vec![20.0, 25.0]);
    spec.mode = Mode::Both;
    let rows = run_sweep(&spec, &NumericalControls::default()).unwrap();
    for r in &rows {
        let numeric = r.numeric_result().unwrap();
        assert!(numeric.converged);
        assert!((numeric.jz_over_j + 1.0).abs() < 10.0 / r.j);
        assert_eq!(r.phase, Phase::Normal);
    }
}

#[test]
fn superradiant_analytic_agrees_with_exact_diagonalization() {
    // Finite-size corrections are O(1/j); agreement within a few percent.
    let params = ModelParams::with_spin(1.0, 0.02, 0.45, 10.0).unwrap();
    let analytic = observables(&params).unwrap();
    let numeric = ground_state(&params, &NumericalControls::default()).unwrap();
    assert_eq!(analytic.phase, Phase::Superradiant);
    assert!(((numeric.energy - analytic.e0) / analytic.e0).abs() < 0.03);
    assert!((numeric.photon_number - analytic.photon_number).abs() < 0.05);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn area_non_increasing_under_doubling(
        w0_hi in 0.05f64..1.0,
        g_hi in 0.1f64..0.5,
        two_j in 1u32..16,
    ) {
        let w0 = Axis::linear(AxisParam::Omega0, 0.0, w0_hi, 41);
        let g = Axis::linear(AxisParam::Gamma, 0.0, g_hi, 41);
        let mut previous = f64::INFINITY;
        for doubling in 0..5 {
            let j = f64::from(two_j << doubling) / 2.0;
            let area = superradiant_area(1.0, &w0, &g, Some(j)).unwrap();
            prop_assert!(area <= previous);
            previous = area;
        }
        prop_assert_eq!(superradiant_area(1.0, &w0, &g, None).unwrap(), 0.0);
    }

    #[test]
    fn zero_frequency_observables_ignore_size(gamma in 0.0f64..0.4999, two_j in 1u32..20_000) {
        let a = observables(&ModelParams::new(1.0, 0.0, gamma, two_j).unwrap());
        let b = observables(&ModelParams::new(1.0, 0.0, gamma, 20).unwrap());
        prop_assert_eq!(a.unwrap(), b.unwrap());
    }
}
