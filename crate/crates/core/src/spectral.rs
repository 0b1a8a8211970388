//! Largest singular value of dense matrices.
//!
//! Matrices up to [`FULL_DECOMPOSITION_MAX`] on their long side go through a
//! full singular value decomposition. Larger ones use power iteration on
//! `AᵀA` from a fixed start vector, so every result is reproducible.
//!
//! Before either route runs, the support is split into the connected
//! components of its row/column incidence graph: the norm of a matrix is the
//! largest norm among these blocks.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::graph::DisjointSets;
use crate::matrix::WeightMatrix;

pub const FULL_DECOMPOSITION_MAX: usize = 512;
pub const DEFAULT_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SpectralMethod {
    FullDecomposition,
    PowerIteration,
    Lanczos,
    TracePower,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpectralResult {
    pub value: f64,
    pub iterations: usize,
    /// Relative residual `||AᵀAv - λv|| / λ`; zero for the decomposition.
    pub residual: f64,
    pub method: SpectralMethod,
}

impl SpectralResult {
    fn zero() -> Self {
        SpectralResult {
            value: 0.0,
            iterations: 0,
            residual: 0.0,
            method: SpectralMethod::FullDecomposition,
        }
    }
}

fn check_tol(tol: f64) -> Result<()> {
    if tol > 0.0 && tol <= 1e-3 {
        Ok(())
    } else {
        Err(invalid(format!("tolerance must lie in (0, 1e-3], got {tol}")))
    }
}

/// ‖A‖ to relative accuracy `tol`.
pub fn spectral_norm(a: &WeightMatrix, tol: f64) -> Result<SpectralResult> {
    check_tol(tol)?;
    let plan = BlockPlan::new(a);
    let mut best = SpectralResult::zero();
    for block in plan.blocks() {
        let m = a.select(&block.rows, &block.cols).to_dmatrix();
        let r = dense_norm(&m, tol)?;
        if r.value > best.value {
            best = r;
        }
    }
    Ok(best)
}

/// Norm of a dense nalgebra matrix, choosing the route by size.
pub fn dense_norm(m: &DMatrix<f64>, tol: f64) -> Result<SpectralResult> {
    if m.iter().all(|&x| x == 0.0) {
        return Ok(SpectralResult::zero());
    }
    if m.nrows().max(m.ncols()) <= FULL_DECOMPOSITION_MAX {
        Ok(SpectralResult {
            value: decomposition_norm(m),
            iterations: 0,
            residual: 0.0,
            method: SpectralMethod::FullDecomposition,
        })
    } else {
        power_iteration_norm(m, tol)
    }
}

/// Largest singular value from the full decomposition.
pub fn decomposition_norm(m: &DMatrix<f64>) -> f64 {
    match (m.nrows(), m.ncols()) {
        (1, _) | (_, 1) => m.norm(),
        _ => m
            .clone()
            .singular_values()
            .iter()
            .fold(0.0f64, |acc, &x| acc.max(x)),
    }
}

/// Power iteration on `AᵀA`. The start vector is all-ones plus an index ramp
/// of size 1e-3. Iteration stops once the relative residual is below
/// `sqrt(tol)`; the Rayleigh quotient error is then of order `tol` for a
/// separated top singular value.
pub fn power_iteration_norm(m: &DMatrix<f64>, tol: f64) -> Result<SpectralResult> {
    check_tol(tol)?;
    let n = m.ncols();
    let cap = 10 * n.max(m.nrows()) + 1000;
    let mut v = nalgebra::DVector::from_fn(n, |j, _| 1.0 + 1e-3 * (j as f64 + 1.0) / n as f64);
    v /= v.norm();
    let target = tol.sqrt();
    let mut lambda = 0.0;
    let mut residual = f64::INFINITY;
    for it in 1..=cap {
        let av = m * &v;
        let w = m.tr_mul(&av);
        lambda = av.norm_squared();
        if lambda == 0.0 {
            return Ok(SpectralResult {
                value: 0.0,
                iterations: it,
                residual: 0.0,
                method: SpectralMethod::PowerIteration,
            });
        }
        residual = (&w - &v * lambda).norm() / lambda;
        let wn = w.norm();
        v = w / wn;
        if residual <= target {
            // one more Rayleigh quotient at the updated vector
            let value = (m * &v).norm();
            return Ok(SpectralResult {
                value,
                iterations: it,
                residual,
                method: SpectralMethod::PowerIteration,
            });
        }
    }
    let _ = residual;
    Err(Error::NoConvergence {
        best: lambda.sqrt(),
        iterations: cap,
    })
}

/// Lanczos on the Gram matrix of the shorter side for a matrix given by its
/// nonzero `(row, col, value)` triples, with full reorthogonalization and
/// the same start vector as the power iteration. Stops when the Ritz
/// residual is at most `sqrt(tol)` times the Ritz value, or when the Krylov
/// space is exhausted.
pub fn sparse_norm(n_rows: usize, n_cols: usize, entries: &[(usize, usize, f64)], tol: f64) -> Result<SpectralResult> {
    check_tol(tol)?;
    let swap = n_rows < n_cols;
    let dim = if swap { n_rows } else { n_cols };
    // x -> AᵀA x on the column side (or AAᵀ on the row side)
    let gram = |x: &[f64]| -> Vec<f64> {
        let mut y = vec![0.0; if swap { n_cols } else { n_rows }];
        for &(i, j, a) in entries {
            let (src, dst) = if swap { (i, j) } else { (j, i) };
            y[dst] += a * x[src];
        }
        let mut out = vec![0.0; dim];
        for &(i, j, a) in entries {
            let (src, dst) = if swap { (i, j) } else { (j, i) };
            out[src] += a * y[dst];
        }
        out
    };
    let dot = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(x, y)| x * y).sum::<f64>();
    if dim == 0 || entries.is_empty() {
        return Ok(SpectralResult::zero());
    }
    let mut q: Vec<f64> = (0..dim).map(|j| 1.0 + 1e-3 * (j as f64 + 1.0) / dim as f64).collect();
    let norm = dot(&q, &q).sqrt();
    q.iter_mut().for_each(|x| *x /= norm);
    let mut basis: Vec<Vec<f64>> = vec![q];
    let (mut alpha, mut beta): (Vec<f64>, Vec<f64>) = (vec![], vec![]);
    let cap = dim.min(1000);
    let target = tol.sqrt();
    let ritz = |alpha: &[f64], beta: &[f64]| top_ritz(alpha, beta);
    for it in 1..=cap {
        let qj = basis.last().unwrap();
        let mut w = gram(qj);
        let a = dot(qj, &w);
        alpha.push(a);
        w.iter_mut().zip(qj).for_each(|(x, y)| *x -= a * y);
        if let (Some(&bp), Some(qp)) = (beta.last(), basis.len().checked_sub(2).map(|i| &basis[i])) {
            w.iter_mut().zip(qp).for_each(|(x, y)| *x -= bp * y);
        }
        // full reorthogonalization, repeated only when it cancelled heavily
        let before = dot(&w, &w).sqrt();
        for b in &basis {
            let c = dot(b, &w);
            w.iter_mut().zip(b).for_each(|(x, y)| *x -= c * y);
        }
        let mut b = dot(&w, &w).sqrt();
        if b < std::f64::consts::FRAC_1_SQRT_2 * before {
            for q in &basis {
                let c = dot(q, &w);
                w.iter_mut().zip(q).for_each(|(x, y)| *x -= c * y);
            }
            b = dot(&w, &w).sqrt();
        }
        let exhausted = it == cap || b <= 1e-13 * alpha.iter().fold(0.0f64, |m, x| m.max(x.abs())).max(f64::MIN_POSITIVE);
        if exhausted || it % 8 == 0 {
            let (theta, last) = ritz(&alpha, &beta);
            let residual = b * last;
            if exhausted || residual <= target * theta {
                return Ok(SpectralResult {
                    value: theta.max(0.0).sqrt(),
                    iterations: it,
                    residual: if theta > 0.0 { residual / theta } else { 0.0 },
                    method: SpectralMethod::Lanczos,
                });
            }
        }
        beta.push(b);
        w.iter_mut().for_each(|x| *x /= b);
        basis.push(w);
    }
    unreachable!("the loop returns once the Krylov space is exhausted")
}

/// Largest eigenvalue of the symmetric tridiagonal matrix with diagonal
/// `alpha` and off-diagonal `beta`, and the magnitude of the last component
/// of its unit eigenvector. Sturm bisection, then inverse iteration.
fn top_ritz(alpha: &[f64], beta: &[f64]) -> (f64, f64) {
    let k = alpha.len();
    if k == 1 {
        return (alpha[0], 1.0);
    }
    let off = |i: usize| if i < k - 1 { beta[i].abs() } else { 0.0 };
    let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
    for i in 0..k {
        let r = off(i) + if i > 0 { off(i - 1) } else { 0.0 };
        lo = lo.min(alpha[i] - r);
        hi = hi.max(alpha[i] + r);
    }
    let pivot_floor = f64::EPSILON * (hi - lo).abs().max(f64::MIN_POSITIVE);
    // number of eigenvalues below x
    let below = |x: f64| {
        let mut count = 0;
        let mut q = 1.0f64;
        for i in 0..k {
            let b2 = if i > 0 { beta[i - 1] * beta[i - 1] } else { 0.0 };
            q = alpha[i] - x - if i > 0 { b2 / q } else { 0.0 };
            if q == 0.0 {
                q = pivot_floor;
            }
            if q < 0.0 {
                count += 1;
            }
        }
        count
    };
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if below(mid) < k {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let theta = hi;
    // inverse iteration with a tiny shift above theta; Thomas solve
    let shift = theta + 1e-10 * theta.abs().max(1e-300);
    let mut y = vec![1.0; k];
    for _ in 0..3 {
        let mut c = vec![0.0; k];
        let mut d = vec![0.0; k];
        for i in 0..k {
            let sub = if i > 0 { beta[i - 1] } else { 0.0 };
            let mut den = alpha[i] - shift - sub * if i > 0 { c[i - 1] } else { 0.0 };
            if den == 0.0 {
                den = f64::MIN_POSITIVE;
            }
            c[i] = if i < k - 1 { beta[i] / den } else { 0.0 };
            d[i] = (y[i] - sub * if i > 0 { d[i - 1] } else { 0.0 }) / den;
        }
        for i in (0..k - 1).rev() {
            d[i] -= c[i] * d[i + 1];
        }
        let norm = d.iter().map(|x| x * x).sum::<f64>().sqrt();
        y = d.into_iter().map(|x| x / norm).collect();
    }
    (theta, y[k - 1].abs())
}

/// `(tr(A^{2k}))^{1/(2k)}` for symmetric `A`.
pub fn trace_power_norm(a: &WeightMatrix, k: usize) -> Result<f64> {
    if !a.is_symmetric() {
        return Err(invalid("trace-power estimate needs a symmetric matrix"));
    }
    if k == 0 {
        return Err(invalid("trace power k must be at least 1"));
    }
    let m = a.to_dmatrix();
    let scale = m.norm();
    if scale == 0.0 {
        return Ok(0.0);
    }
    let b = m / scale;
    let mut power = b.clone();
    for _ in 1..k {
        power = &power * &b;
    }
    // tr(B^{2k}) = ||B^k||_F^2 for symmetric B
    Ok(scale * power.norm().powf(1.0 / k as f64))
}

/// Largest Euclidean row length and largest column length.
pub fn max_row_col_l2(a: &WeightMatrix) -> (f64, f64) {
    let mut col = vec![0.0f64; a.n_cols()];
    let mut row_max = 0.0f64;
    for i in 0..a.n_rows() {
        let mut s = 0.0;
        for (j, &x) in a.row(i).iter().enumerate() {
            s += x * x;
            col[j] += x * x;
        }
        row_max = row_max.max(s);
    }
    let col_max = col.into_iter().fold(0.0f64, f64::max);
    (row_max.sqrt(), col_max.sqrt())
}

/// A connected block of the support: rows and columns linked by nonzero
/// entries.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Block {
    pub rows: Vec<usize>,
    pub cols: Vec<usize>,
}

/// Decomposition of a support pattern into independent blocks. Entries
/// outside the blocks are zero, so any matrix with the same (or smaller)
/// support has norm equal to the maximum over the blocks.
#[derive(Debug, Clone)]
pub struct BlockPlan {
    blocks: Vec<Block>,
}

impl BlockPlan {
    pub fn new(a: &WeightMatrix) -> Self {
        Self::from_support(a.n_rows(), a.n_cols(), &a.support())
    }

    pub fn from_support(n_rows: usize, n_cols: usize, support: &[(usize, usize)]) -> Self {
        let mut dsu = DisjointSets::new(n_rows + n_cols);
        let mut row_used = vec![false; n_rows];
        let mut col_used = vec![false; n_cols];
        for &(i, j) in support {
            dsu.union(i, n_rows + j);
            row_used[i] = true;
            col_used[j] = true;
        }
        let mut by_root: std::collections::BTreeMap<usize, Block> = Default::default();
        for i in (0..n_rows).filter(|&i| row_used[i]) {
            let r = dsu.find(i);
            by_root
                .entry(r)
                .or_insert_with(|| Block { rows: vec![], cols: vec![] })
                .rows
                .push(i);
        }
        for j in (0..n_cols).filter(|&j| col_used[j]) {
            let r = dsu.find(n_rows + j);
            by_root
                .entry(r)
                .or_insert_with(|| Block { rows: vec![], cols: vec![] })
                .cols
                .push(j);
        }
        let mut blocks: Vec<Block> = by_root.into_values().collect();
        blocks.sort_by(|a, b| a.rows.first().cmp(&b.rows.first()));
        BlockPlan { blocks }
    }

    pub fn blocks(&self) -> &[Block] {
        &self.blocks
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lanczos_matches_decomposition() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(21);
        for (n, m, density) in [(1, 1, 1.0), (3, 7, 0.6), (40, 30, 0.1), (120, 120, 0.03), (200, 90, 0.05)] {
            let mut entries = vec![];
            let mut dense = DMatrix::zeros(n, m);
            for i in 0..n {
                for j in 0..m {
                    if rng.random_bool(density) {
                        let x: f64 = rng.random_range(-1.0..1.0);
                        entries.push((i, j, x));
                        dense[(i, j)] = x;
                    }
                }
            }
            let got = sparse_norm(n, m, &entries, DEFAULT_TOL).unwrap();
            let want = decomposition_norm(&dense);
            assert!((got.value - want).abs() <= 1e-8 * want.max(1.0), "{n}x{m}: {} vs {want}", got.value);
        }
        assert_eq!(sparse_norm(4, 4, &[], DEFAULT_TOL).unwrap().value, 0.0);
        // identity: the start vector is already an eigenvector
        let id: Vec<_> = (0..50).map(|i| (i, i, 1.0)).collect();
        assert!((sparse_norm(50, 50, &id, DEFAULT_TOL).unwrap().value - 1.0).abs() < 1e-12);
    }
    use nalgebra::SymmetricEigen;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    /// Independent route: sqrt of the top eigenvalue of AᵀA.
    fn gram_oracle(a: &WeightMatrix) -> f64 {
        let m = a.to_dmatrix();
        let g = m.transpose() * &m;
        SymmetricEigen::new(g)
            .eigenvalues
            .iter()
            .fold(0.0f64, |acc, &x| acc.max(x))
            .sqrt()
    }

    fn random_matrix(rng: &mut ChaCha8Rng, r: usize, c: usize) -> WeightMatrix {
        WeightMatrix::from_fn(r, c, |_, _| rng.random_range(-1.0..1.0)).unwrap()
    }

    fn rel(a: f64, b: f64) -> f64 {
        (a - b).abs() / b.abs().max(1e-300)
    }

    #[test]
    fn examples() {
        let ones = WeightMatrix::ones(3, 3).unwrap();
        assert!((spectral_norm(&ones, DEFAULT_TOL).unwrap().value - 3.0).abs() < 1e-12);
        let h = WeightMatrix::from_rows(&[vec![1.0, 1.0], vec![1.0, -1.0]]).unwrap();
        assert!((spectral_norm(&h, DEFAULT_TOL).unwrap().value - 2f64.sqrt()).abs() < 1e-12);

        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let a = random_matrix(&mut rng, 20, 20);
        assert!(rel(spectral_norm(&a, DEFAULT_TOL).unwrap().value, gram_oracle(&a)) < 1e-8);
    }

    #[test]
    fn zero_matrix_takes_no_iterations() {
        let r = spectral_norm(&WeightMatrix::zeros(4, 4).unwrap(), DEFAULT_TOL).unwrap();
        assert_eq!(r.value, 0.0);
        assert_eq!(r.iterations, 0);
    }

    #[test]
    fn tolerance_is_validated() {
        let a = WeightMatrix::ones(2, 2).unwrap();
        assert!(spectral_norm(&a, 0.0).is_err());
        assert!(spectral_norm(&a, 1e-2).is_err());
    }

    #[test]
    fn oracle_agreement_on_random_matrices() {
        let mut rng = ChaCha8Rng::seed_from_u64(2024);
        for _ in 0..200 {
            let r = rng.random_range(1..=32);
            let c = rng.random_range(1..=32);
            let a = random_matrix(&mut rng, r, c);
            let got = spectral_norm(&a, DEFAULT_TOL).unwrap().value;
            assert!(rel(got, gram_oracle(&a)) <= 1e-8);
            assert!(rel(spectral_norm(&a.transpose(), DEFAULT_TOL).unwrap().value, got) <= 1e-10);
            let (row, col) = max_row_col_l2(&a);
            assert!(got >= row * (1.0 - 1e-12) && got >= col * (1.0 - 1e-12));
        }
    }

    #[test]
    fn block_decomposition_matches_whole_matrix() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..50 {
            let a = WeightMatrix::from_fn(12, 9, |_, _| {
                if rng.random_bool(0.15) {
                    rng.random_range(-2.0..2.0)
                } else {
                    0.0
                }
            })
            .unwrap();
            let whole = decomposition_norm(&a.to_dmatrix());
            let blocked = spectral_norm(&a, DEFAULT_TOL).unwrap().value;
            assert!((whole - blocked).abs() <= 1e-10 * whole.max(1.0));
        }
    }

    #[test]
    fn power_iteration_agrees_with_decomposition() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for &(r, c) in &[(40, 30), (25, 60), (64, 64)] {
            // all-ones spike plus noise keeps a gap at the top
            let a = WeightMatrix::from_fn(r, c, |_, _| 1.0 + 0.3 * rng.random_range(-1.0..1.0)).unwrap();
            let m = a.to_dmatrix();
            let p = power_iteration_norm(&m, DEFAULT_TOL).unwrap();
            assert_eq!(p.method, SpectralMethod::PowerIteration);
            assert!(rel(p.value, decomposition_norm(&m)) < 1e-8, "{r}x{c}");
        }
    }

    #[test]
    fn large_matrices_use_power_iteration() {
        let n = FULL_DECOMPOSITION_MAX + 8;
        let a = WeightMatrix::from_fn(n, n, |i, j| if (i + j) % 7 == 0 { 0.5 } else { 1.0 }).unwrap();
        let r = spectral_norm(&a, DEFAULT_TOL).unwrap();
        assert_eq!(r.method, SpectralMethod::PowerIteration);
        assert!(r.residual <= DEFAULT_TOL.sqrt());
        let g = gram_oracle(&a);
        assert!(rel(r.value, g) < 1e-8);
    }

    #[test]
    fn trace_power_examples() {
        let id = WeightMatrix::identity(4).unwrap();
        assert!((trace_power_norm(&id, 2).unwrap() - 4f64.powf(0.25)).abs() < 1e-12);

        let w = [0.5, -0.5, 0.5, 0.5];
        let rank1 = WeightMatrix::from_fn(4, 4, |i, j| w[i] * w[j]).unwrap();
        for k in 1..5 {
            assert!((trace_power_norm(&rank1, k).unwrap() - 1.0).abs() < 1e-12);
        }

        // C_4 has spectrum {2, 0, 0, -2}: tr(A^6) = 2 * 2^6
        let c4 = WeightMatrix::from_fn(4, 4, |i, j| if (i + 4 - j) % 4 == 1 || (j + 4 - i) % 4 == 1 { 1.0 } else { 0.0 }).unwrap();
        let t = trace_power_norm(&c4, 3).unwrap();
        assert!((t - (128f64).powf(1.0 / 6.0)).abs() < 1e-12);
        assert!(t >= 2.0 && t <= 2.0 * 4f64.powf(1.0 / 6.0));

        assert!(trace_power_norm(&WeightMatrix::from_rows(&[vec![0.0, 1.0], vec![0.0, 0.0]]).unwrap(), 2).is_err());
    }

    #[test]
    fn trace_power_sandwich_and_monotone() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..20 {
            let n = rng.random_range(2..16);
            let raw = random_matrix(&mut rng, n, n);
            let a = WeightMatrix::from_fn(n, n, |i, j| raw.get(i, j) + raw.get(j, i)).unwrap();
            let norm = spectral_norm(&a, DEFAULT_TOL).unwrap().value;
            let mut prev = f64::INFINITY;
            for k in 1..8 {
                let t = trace_power_norm(&a, k).unwrap();
                assert!(t >= norm * (1.0 - 1e-10));
                assert!(t <= (n as f64).powf(0.5 / k as f64) * norm * (1.0 + 1e-10));
                assert!(t <= prev * (1.0 + 1e-10));
                prev = t;
            }
        }
    }

    #[test]
    fn row_col_examples() {
        assert_eq!(max_row_col_l2(&WeightMatrix::identity(3).unwrap()), (1.0, 1.0));
        let (r, c) = max_row_col_l2(&WeightMatrix::ones(2, 3).unwrap());
        assert!((r - 3f64.sqrt()).abs() < 1e-15 && (c - 2f64.sqrt()).abs() < 1e-15);
        let d = 5;
        let k = WeightMatrix::from_fn(d + 1, d + 1, |i, j| if i != j { 1.0 } else { 0.0 }).unwrap();
        let (r, c) = max_row_col_l2(&k);
        assert!((r - (d as f64).sqrt()).abs() < 1e-15 && (c - (d as f64).sqrt()).abs() < 1e-15);
    }
}
