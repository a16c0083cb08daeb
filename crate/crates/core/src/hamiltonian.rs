//! Truncated two-photon Dicke Hamiltonian as a real symmetric sparse matrix.
//!
//! Truncation is by photon number only: the matrix is P·H·P with P the
//! projector onto n ≤ n_max, so the a†² terms that would leave the basis are
//! dropped and every parity sector stays closed.

use std::io::{self, Write};

use num_complex::Complex64;
use thiserror::Error;

use crate::model::{parity_label, Basis, BasisIndex, ModelParams, ParitySector};

/// Default cap on stored matrix elements.
pub const DEFAULT_ELEMENT_BUDGET: usize = 50_000_000;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum HamiltonianError {
    #[error("Fock cutoff n_max must be >= 2, got {0}")]
    Cutoff(usize),
    #[error("matrix needs up to {needed} stored elements, budget is {budget}")]
    ResourceExceeded { needed: usize, budget: usize },
}

/// Real symmetric matrix stored as its upper triangle in coordinate form.
///
/// Entries are sorted by `(row, col)`, have `row <= col`, are never zero and
/// never repeat.
#[derive(Debug, Clone, PartialEq)]
pub struct SymSparseMatrix {
    dim: usize,
    entries: Vec<(usize, usize, f64)>,
}

impl SymSparseMatrix {
    /// Builds from an arbitrary upper/lower coordinate list. Lower entries are
    /// mirrored, duplicates are summed and zeros dropped.
    pub fn from_triplets(dim: usize, triplets: impl IntoIterator<Item = (usize, usize, f64)>) -> Self {
        let mut entries: Vec<(usize, usize, f64)> = triplets
            .into_iter()
            .map(|(r, c, v)| {
                assert!(r < dim && c < dim, "entry ({r}, {c}) outside dimension {dim}");
                if r <= c { (r, c, v) } else { (c, r, v) }
            })
            .collect();
        entries.sort_by_key(|e| (e.0, e.1));
        let mut merged: Vec<(usize, usize, f64)> = Vec::with_capacity(entries.len());
        for (r, c, v) in entries {
            match merged.last_mut() {
                Some(last) if last.0 == r && last.1 == c => last.2 += v,
                _ => merged.push((r, c, v)),
            }
        }
        merged.retain(|e| e.2 != 0.0);
        Self { dim, entries: merged }
    }

    /// Dense symmetric matrix, upper triangle read.
    pub fn from_dense(rows: &[Vec<f64>]) -> Self {
        let dim = rows.len();
        let triplets = (0..dim).flat_map(|r| (r..dim).map(move |c| (r, c))).map(|(r, c)| (r, c, rows[r][c]));
        Self::from_triplets(dim, triplets)
    }

    fn from_sorted_upper(dim: usize, entries: Vec<(usize, usize, f64)>) -> Self {
        debug_assert!(entries.windows(2).all(|w| (w[0].0, w[0].1) < (w[1].0, w[1].1)));
        debug_assert!(entries.iter().all(|e| e.0 <= e.1 && e.2 != 0.0));
        Self { dim, entries }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn nnz(&self) -> usize {
        self.entries.len()
    }

    pub fn entries(&self) -> &[(usize, usize, f64)] {
        &self.entries
    }

    /// Element (r, c) of the full symmetric operator.
    pub fn get(&self, r: usize, c: usize) -> f64 {
        let key = if r <= c { (r, c) } else { (c, r) };
        self.entries
            .binary_search_by(|e| (e.0, e.1).cmp(&key))
            .map(|i| self.entries[i].2)
            .unwrap_or(0.0)
    }

    /// y = M x.
    pub fn matvec(&self, x: &[f64], y: &mut [f64]) {
        assert_eq!(x.len(), self.dim);
        assert_eq!(y.len(), self.dim);
        y.iter_mut().for_each(|v| *v = 0.0);
        for &(r, c, v) in &self.entries {
            y[r] += v * x[c];
            if r != c {
                y[c] += v * x[r];
            }
        }
    }

    pub fn to_dense(&self) -> Vec<Vec<f64>> {
        let mut dense = vec![vec![0.0; self.dim]; self.dim];
        for &(r, c, v) in &self.entries {
            dense[r][c] = v;
            dense[c][r] = v;
        }
        dense
    }

    /// Largest absolute row sum, an upper bound of the spectral radius.
    pub fn norm_inf(&self) -> f64 {
        let mut sums = vec![0.0f64; self.dim];
        for &(r, c, v) in &self.entries {
            sums[r] += v.abs();
            if r != c {
                sums[c] += v.abs();
            }
        }
        sums.into_iter().fold(0.0, f64::max)
    }

    /// Coordinate dump: `dim nnz` header, then `row col value` lines.
    pub fn write_coordinate<W: Write>(&self, mut out: W) -> io::Result<()> {
        writeln!(out, "{} {}", self.dim, self.nnz())?;
        for &(r, c, v) in &self.entries {
            writeln!(out, "{r} {c} {v:.16e}")?;
        }
        Ok(())
    }
}

/// One parity block: its basis states, in the induced n-major order, and the
/// restricted matrix.
#[derive(Debug, Clone)]
pub struct SectorBlock {
    pub sector: ParitySector,
    pub states: Vec<BasisIndex>,
    pub matrix: SymSparseMatrix,
}

#[derive(Debug, Clone)]
pub struct BlockDecomposition {
    pub basis: Basis,
    /// Indexed in the order (+1, -1, +i, -i).
    pub blocks: Vec<SectorBlock>,
}

impl BlockDecomposition {
    pub fn block(&self, sector: ParitySector) -> &SectorBlock {
        &self.blocks[sector.position()]
    }

    pub fn sizes(&self) -> [usize; 4] {
        let mut sizes = [0; 4];
        for b in &self.blocks {
            sizes[b.sector.position()] = b.states.len();
        }
        sizes
    }

    /// Full matrix rebuilt from the blocks.
    pub fn reassemble(&self) -> SymSparseMatrix {
        let triplets = self.blocks.iter().flat_map(|block| {
            block.matrix.entries().iter().map(move |&(r, c, v)| {
                (self.basis.index_of(block.states[r]), self.basis.index_of(block.states[c]), v)
            })
        });
        SymSparseMatrix::from_triplets(self.basis.dim(), triplets)
    }
}

/// ⟨m ± 1| J± |m⟩ = √(j(j+1) - m(m ± 1)), written in doubled units.
fn ladder_spin(two_j: u32, m_twice: i32, raise: bool) -> f64 {
    let tj = i64::from(two_j);
    let mt = i64::from(m_twice);
    let shifted = if raise { mt + 2 } else { mt - 2 };
    let quad = tj * (tj + 2) - mt * shifted;
    (quad as f64 / 4.0).sqrt()
}

/// Upper-triangle elements of H reachable from state `b`.
fn row_elements(params: &ModelParams, basis: &Basis, b: BasisIndex, mut emit: impl FnMut(BasisIndex, f64)) {
    let diag = params.omega * f64::from(b.n) + params.omega0 * b.m();
    if diag != 0.0 {
        emit(b, diag);
    }
    if params.gamma == 0.0 || (b.n as usize) + 2 > basis.n_max {
        return;
    }
    let n = f64::from(b.n);
    let photon = ((n + 1.0) * (n + 2.0)).sqrt();
    let scale = params.gamma / params.atoms() * photon;
    let tj = basis.two_j as i32;
    // Raised n comes later in n-major order; lower m first.
    if b.m_twice - 2 >= -tj {
        emit(BasisIndex::new(b.n + 2, b.m_twice - 2), scale * ladder_spin(basis.two_j, b.m_twice, false));
    }
    if b.m_twice + 2 <= tj {
        emit(BasisIndex::new(b.n + 2, b.m_twice + 2), scale * ladder_spin(basis.two_j, b.m_twice, true));
    }
}

fn check_budget(basis: &Basis, budget: usize) -> Result<(), HamiltonianError> {
    // One diagonal and at most two upper couplings per state.
    let needed = basis.dim().saturating_mul(3);
    if needed > budget {
        return Err(HamiltonianError::ResourceExceeded { needed, budget });
    }
    Ok(())
}

pub fn build_full(params: &ModelParams, n_max: usize) -> Result<SymSparseMatrix, HamiltonianError> {
    build_full_with_budget(params, n_max, DEFAULT_ELEMENT_BUDGET)
}

pub fn build_full_with_budget(
    params: &ModelParams,
    n_max: usize,
    budget: usize,
) -> Result<SymSparseMatrix, HamiltonianError> {
    if n_max < 2 {
        return Err(HamiltonianError::Cutoff(n_max));
    }
    let basis = Basis::new(n_max, params.two_j);
    check_budget(&basis, budget)?;
    let mut entries = Vec::with_capacity(basis.dim() * 3);
    for b in basis.iter() {
        let row = basis.index_of(b);
        row_elements(params, &basis, b, |target, v| entries.push((row, basis.index_of(target), v)));
    }
    Ok(SymSparseMatrix::from_sorted_upper(basis.dim(), entries))
}

pub fn decompose(params: &ModelParams, n_max: usize) -> Result<BlockDecomposition, HamiltonianError> {
    decompose_with_budget(params, n_max, DEFAULT_ELEMENT_BUDGET)
}

pub fn decompose_with_budget(
    params: &ModelParams,
    n_max: usize,
    budget: usize,
) -> Result<BlockDecomposition, HamiltonianError> {
    if n_max < 2 {
        return Err(HamiltonianError::Cutoff(n_max));
    }
    let basis = Basis::new(n_max, params.two_j);
    check_budget(&basis, budget)?;

    let mut states: [Vec<BasisIndex>; 4] = Default::default();
    let mut local = vec![0usize; basis.dim()];
    for b in basis.iter() {
        let list = &mut states[parity_label(b, params.two_j).position()];
        local[basis.index_of(b)] = list.len();
        list.push(b);
    }

    let blocks = ParitySector::ALL
        .iter()
        .zip(states)
        .map(|(&sector, states)| {
            let mut entries = Vec::with_capacity(states.len() * 3);
            for &b in &states {
                let row = local[basis.index_of(b)];
                row_elements(params, &basis, b, |target, v| {
                    debug_assert_eq!(parity_label(target, params.two_j), sector);
                    entries.push((row, local[basis.index_of(target)], v));
                });
            }
            let matrix = SymSparseMatrix::from_sorted_upper(states.len(), entries);
            SectorBlock { sector, states, matrix }
        })
        .collect();
    Ok(BlockDecomposition { basis, blocks })
}

/// max |[H, Π]_{rc}| with Π = diag(i^n (-1)^(m+j)).
pub fn commutator_norm_with_parity(params: &ModelParams, n_max: usize) -> Result<f64, HamiltonianError> {
    let h = build_full(params, n_max)?;
    let basis = Basis::new(n_max, params.two_j);
    let labels: Vec<Complex64> = basis.iter().map(|b| parity_label(b, params.two_j).value()).collect();
    // ([H, Π])_{rc} = H_rc (Π_c - Π_r); the lower triangle is the same up to sign.
    Ok(h
        .entries()
        .iter()
        .map(|&(r, c, v)| (Complex64::new(v, 0.0) * (labels[c] - labels[r])).norm())
        .fold(0.0, f64::max))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params(omega: f64, omega0: f64, gamma: f64, two_j: u32) -> ModelParams {
        ModelParams::new(omega, omega0, gamma, two_j).unwrap()
    }

    /// Dense H from explicit ladder-operator matrices and Kronecker products.
    fn brute_force(p: &ModelParams, n_max: usize) -> Vec<Vec<f64>> {
        let nb = n_max + 1;
        let ns = p.two_j as usize + 1;
        let j = p.j();
        let mut a = vec![vec![0.0; nb]; nb];
        for n in 1..nb {
            a[n - 1][n] = (n as f64).sqrt();
        }
        let matmul = |x: &Vec<Vec<f64>>, y: &Vec<Vec<f64>>| -> Vec<Vec<f64>> {
            let d = x.len();
            let mut z = vec![vec![0.0; d]; d];
            for i in 0..d {
                for k in 0..d {
                    for l in 0..d {
                        z[i][l] += x[i][k] * y[k][l];
                    }
                }
            }
            z
        };
        let transpose = |x: &Vec<Vec<f64>>| -> Vec<Vec<f64>> {
            let d = x.len();
            (0..d).map(|i| (0..d).map(|k| x[k][i]).collect()).collect()
        };
        let adag = transpose(&a);
        // Products of the truncated matrices would keep spurious a a† terms at
        // the edge; instead take P (a†)² P directly from the untruncated rule.
        let mut a2 = vec![vec![0.0; nb]; nb];
        for n in 2..nb {
            a2[n - 2][n] = ((n * (n - 1)) as f64).sqrt();
        }
        let pair: Vec<Vec<f64>> = (0..nb).map(|r| (0..nb).map(|c| a2[r][c] + a2[c][r]).collect()).collect();
        let number = matmul(&adag, &a);
        let mut jp = vec![vec![0.0; ns]; ns];
        let mut jz = vec![vec![0.0; ns]; ns];
        for k in 0..ns {
            let m = -j + k as f64;
            jz[k][k] = m;
            if k + 1 < ns {
                jp[k + 1][k] = (j * (j + 1.0) - m * (m + 1.0)).sqrt();
            }
        }
        let jx2: Vec<Vec<f64>> = (0..ns).map(|r| (0..ns).map(|c| jp[r][c] + jp[c][r]).collect()).collect();
        let kron = |x: &Vec<Vec<f64>>, y: &Vec<Vec<f64>>| -> Vec<Vec<f64>> {
            let (dx, dy) = (x.len(), y.len());
            let mut z = vec![vec![0.0; dx * dy]; dx * dy];
            for i in 0..dx {
                for k in 0..dx {
                    for r in 0..dy {
                        for c in 0..dy {
                            z[i * dy + r][k * dy + c] = x[i][k] * y[r][c];
                        }
                    }
                }
            }
            z
        };
        let id_b: Vec<Vec<f64>> = (0..nb).map(|r| (0..nb).map(|c| f64::from(u8::from(r == c))).collect()).collect();
        let id_s: Vec<Vec<f64>> = (0..ns).map(|r| (0..ns).map(|c| f64::from(u8::from(r == c))).collect()).collect();
        let h1 = kron(&number, &id_s);
        let h2 = kron(&id_b, &jz);
        let h3 = kron(&pair, &jx2);
        let d = nb * ns;
        (0..d)
            .map(|r| {
                (0..d)
                    .map(|c| p.omega * h1[r][c] + p.omega0 * h2[r][c] + p.gamma / p.atoms() * h3[r][c])
                    .collect()
            })
            .collect()
    }

    #[test]
    fn decoupled_matrix_is_diagonal() {
        let p = params(1.3, -0.7, 0.0, 4);
        let h = build_full(&p, 6).unwrap();
        let basis = Basis::new(6, 4);
        for &(r, c, v) in h.entries() {
            assert_eq!(r, c);
            let b = basis.state(r);
            assert_eq!(v, 1.3 * f64::from(b.n) - 0.7 * b.m());
        }
    }

    #[test]
    fn spin_half_coupling_element() {
        let p = params(1.0, 1.0, 0.1, 1);
        let h = build_full(&p, 2).unwrap();
        assert_eq!(h.dim(), 6);
        let basis = Basis::new(2, 1);
        let from = basis.index_of(BasisIndex::new(0, -1));
        let to = basis.index_of(BasisIndex::new(2, 1));
        assert!((h.get(from, to) - 0.141_421_356_237_309_5).abs() < 1e-15);
        assert_eq!(h.get(from, to), h.get(to, from));
    }

    #[test]
    fn coupling_uses_number_of_atoms() {
        // j = 1: ⟨0|J+|-1⟩ = √2, N = 2, so the (0,-1)->(2,0) element is γ/2·√2·√2 = γ.
        let p = params(1.0, 0.0, 0.3, 2);
        let h = build_full(&p, 2).unwrap();
        let basis = Basis::new(2, 2);
        let v = h.get(basis.index_of(BasisIndex::new(0, -2)), basis.index_of(BasisIndex::new(2, 0)));
        assert!((v - 0.3).abs() < 1e-15);
    }

    #[test]
    fn interaction_scales_linearly() {
        let base = params(1.0, 0.8, 0.0, 5);
        let h0 = build_full(&base, 10).unwrap().to_dense();
        let h1 = build_full(&base.with_gamma(0.1), 10).unwrap().to_dense();
        let h2 = build_full(&base.with_gamma(0.3), 10).unwrap().to_dense();
        for r in 0..h0.len() {
            for c in 0..h0.len() {
                let d1 = h1[r][c] - h0[r][c];
                let d2 = h2[r][c] - h0[r][c];
                assert!((d2 - 3.0 * d1).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn matches_brute_force_construction() {
        for (p, n_max) in [
            (params(1.0, 1.0, 0.1, 1), 2),
            (params(0.7, -0.4, 0.33, 3), 7),
            (params(1.0, 0.02, 0.45, 6), 8),
            (params(2.0, 1.5, 0.9, 2), 20),
        ] {
            let dense = brute_force(&p, n_max);
            assert!(dense.len() <= 64);
            let h = build_full(&p, n_max).unwrap().to_dense();
            for r in 0..dense.len() {
                for c in 0..dense.len() {
                    let scale = dense[r][c].abs().max(1.0);
                    assert!((h[r][c] - dense[r][c]).abs() <= 1e-14 * scale, "{r} {c}");
                }
            }
        }
    }

    #[test]
    fn sector_sizes_spin_half() {
        let p = params(1.0, 1.0, 0.2, 1);
        let blocks = decompose(&p, 3).unwrap();
        assert_eq!(blocks.sizes(), [2, 2, 2, 2]);
    }

    #[test]
    fn decoupled_blocks_are_diagonal() {
        let blocks = decompose(&params(1.0, 0.5, 0.0, 6), 12).unwrap();
        for b in &blocks.blocks {
            assert!(b.matrix.entries().iter().all(|e| e.0 == e.1));
        }
    }

    #[test]
    fn reassembly_is_exact() {
        for (p, n_max) in [(params(1.0, 1.0, 0.3, 2), 10), (params(0.9, -0.2, 0.41, 7), 17)] {
            let full = build_full(&p, n_max).unwrap();
            let blocks = decompose(&p, n_max).unwrap();
            assert_eq!(blocks.reassemble(), full);
            for b in &blocks.blocks {
                assert_eq!(b.matrix.dim(), b.states.len());
            }
        }
    }

    #[test]
    fn no_cross_sector_elements() {
        let p = params(1.0, 0.3, 0.45, 5);
        let h = build_full(&p, 14).unwrap();
        let basis = Basis::new(14, 5);
        for &(r, c, _) in h.entries() {
            assert_eq!(parity_label(basis.state(r), 5), parity_label(basis.state(c), 5));
        }
    }

    #[test]
    fn parity_commutes() {
        assert_eq!(commutator_norm_with_parity(&params(1.0, 1.0, 0.3, 2), 10).unwrap(), 0.0);
        assert_eq!(commutator_norm_with_parity(&params(1.0, 1.0, 0.0, 2), 10).unwrap(), 0.0);
    }

    #[test]
    fn budget_and_cutoff_errors() {
        let p = params(1.0, 1.0, 0.3, 10);
        assert!(matches!(build_full(&p, 1), Err(HamiltonianError::Cutoff(1))));
        assert!(matches!(
            build_full_with_budget(&p, 100, 1000),
            Err(HamiltonianError::ResourceExceeded { .. })
        ));
    }

    #[test]
    fn representation_invariants() {
        let h = build_full(&params(1.0, 0.0, 0.4, 4), 9).unwrap();
        assert!(h.entries().iter().all(|e| e.0 <= e.1 && e.2 != 0.0));
        assert!(h.entries().windows(2).all(|w| (w[0].0, w[0].1) < (w[1].0, w[1].1)));
        let dense = h.to_dense();
        for r in 0..dense.len() {
            for c in 0..dense.len() {
                assert_eq!(dense[r][c], dense[c][r]);
            }
        }
    }

    #[test]
    fn coordinate_dump_format() {
        let h = build_full(&params(1.0, 1.0, 0.1, 1), 2).unwrap();
        let mut buf = Vec::new();
        h.write_coordinate(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next().unwrap(), format!("6 {}", h.nnz()));
        let parsed: Vec<(usize, usize, f64)> = lines
            .map(|l| {
                let f: Vec<&str> = l.split(' ').collect();
                (f[0].parse().unwrap(), f[1].parse().unwrap(), f[2].parse().unwrap())
            })
            .collect();
        assert_eq!(parsed, h.entries());
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #![proptest_config(ProptestConfig::with_cases(48))]
            #[test]
            fn commutator_vanishes(omega in 0.1f64..3.0, omega0 in -2.0f64..2.0, gamma in 0.0f64..2.0,
                                   two_j in 1u32..12, n_max in 2usize..30) {
                let p = params(omega, omega0, gamma, two_j);
                prop_assert_eq!(commutator_norm_with_parity(&p, n_max).unwrap(), 0.0);
            }

            #[test]
            fn from_triplets_roundtrips_dense(seed in 0u64..1000, dim in 1usize..9) {
                use rand::{Rng, SeedableRng};
                let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
                let mut rows = vec![vec![0.0; dim]; dim];
                for r in 0..dim {
                    for c in r..dim {
                        let v: f64 = if rng.gen_bool(0.5) { rng.gen_range(-1.0..1.0) } else { 0.0 };
                        rows[r][c] = v;
                        rows[c][r] = v;
                    }
                }
                let m = SymSparseMatrix::from_dense(&rows);
                prop_assert_eq!(m.to_dense(), rows);
            }
        }
    }
}
