//! Lower estimate of `R_A(p)` for general weights by alternating ascent.
//!
//! For fixed unit `s, t` the `L_p` norm of `sum a_ij eps_ij s_i t_j` is
//! compared with the Hitczenko total of the coefficients `a_ij s_i t_j`. The
//! ascent maximizes `sum a_ij b_ij s_i t_j` over the box-ball set of `b` and
//! unit `s`, `t`, one block at a time; each block step is exact, so the
//! objective never decreases.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use super::{RBracket, RMode};
use crate::levels::level_sets;
use crate::matrix::WeightMatrix;
use crate::moments::{hitczenko_total_fast, water_fill};
use crate::spectral::max_row_col_l2;

const MAX_STEPS: usize = 60;
const STEP_TOL: f64 = 1e-9;

/// Nonzero entries as `(row, col, value)`.
pub(crate) struct Sparse {
    pub n_rows: usize,
    pub n_cols: usize,
    pub entries: Vec<(usize, usize, f64)>,
}

impl Sparse {
    pub(crate) fn new(a: &WeightMatrix, removed: Option<&[bool]>) -> Sparse {
        let keep = |i: usize| removed.is_none_or(|r| !r[i]);
        let mut entries = vec![];
        for i in (0..a.n_rows()).filter(|&i| keep(i)) {
            for (j, &x) in a.row(i).iter().enumerate() {
                if x != 0.0 && keep(j) {
                    entries.push((i, j, x));
                }
            }
        }
        Sparse {
            n_rows: a.n_rows(),
            n_cols: a.n_cols(),
            entries,
        }
    }

    fn coefficients(&self, s: &[f64], t: &[f64]) -> Vec<f64> {
        self.entries.iter().map(|&(i, j, a)| a * s[i] * t[j]).collect()
    }

    fn times(&self, w: &[f64], t: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.n_rows];
        for (k, &(i, j, a)) in self.entries.iter().enumerate() {
            out[i] += a * w[k] * t[j];
        }
        out
    }

    fn times_transposed(&self, w: &[f64], s: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.n_cols];
        for (k, &(i, j, a)) in self.entries.iter().enumerate() {
            out[j] += a * w[k] * s[i];
        }
        out
    }

    /// Top singular pair by power iteration from a fixed start.
    fn top_pair(&self) -> (Vec<f64>, Vec<f64>) {
        let ones = vec![1.0; self.entries.len()];
        let mut t: Vec<f64> = (0..self.n_cols).map(|j| 1.0 + 1e-3 * j as f64 / self.n_cols as f64).collect();
        normalize(&mut t);
        let mut s = vec![0.0; self.n_rows];
        for _ in 0..300 {
            s = self.times(&ones, &t);
            if !normalize(&mut s) {
                break;
            }
            let mut next = self.times_transposed(&ones, &s);
            if !normalize(&mut next) {
                break;
            }
            let delta: f64 = next.iter().zip(&t).map(|(a, b)| (a - b).abs()).sum();
            t = next;
            if delta < 1e-12 {
                break;
            }
        }
        (s, t)
    }
}

fn normalize(v: &mut [f64]) -> bool {
    let n = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    if n == 0.0 || !n.is_finite() {
        return false;
    }
    v.iter_mut().for_each(|x| *x /= n);
    true
}

fn basis(n: usize, i: usize) -> Vec<f64> {
    let mut v = vec![0.0; n];
    v[i] = 1.0;
    v
}

/// Flat unit vectors on the heaviest level sets of `u`, keeping signs.
fn flat_on_levels(u: &[f64], count: usize) -> Vec<Vec<f64>> {
    let Ok(ls) = level_sets(u, std::f64::consts::E) else {
        return vec![];
    };
    let mut buckets: Vec<(f64, &Vec<usize>)> = ls
        .buckets
        .iter()
        .map(|(&k, idx)| ((-2.0 * k as f64).exp() * idx.len() as f64, idx))
        .collect();
    buckets.sort_by(|a, b| b.0.total_cmp(&a.0));
    buckets
        .into_iter()
        .take(count)
        .map(|(_, idx)| {
            let mut v = vec![0.0; u.len()];
            let w = 1.0 / (idx.len() as f64).sqrt();
            for &i in idx {
                v[i] = w * u[i].signum();
            }
            v
        })
        .collect()
}

fn seeds(a: &Sparse, restarts: usize, seed: u64) -> Vec<(Vec<f64>, Vec<f64>)> {
    let mut out = vec![];
    let (u, v) = a.top_pair();
    out.push((u.clone(), v.clone()));
    let mut by_size: Vec<usize> = (0..a.entries.len()).collect();
    by_size.sort_by(|&x, &y| a.entries[y].2.abs().total_cmp(&a.entries[x].2.abs()).then(x.cmp(&y)));
    for &k in by_size.iter().take(4) {
        let (i, j, _) = a.entries[k];
        out.push((basis(a.n_rows, i), basis(a.n_cols, j)));
    }
    let fu = flat_on_levels(&u, 2);
    let fv = flat_on_levels(&v, 2);
    for s in &fu {
        for t in &fv {
            out.push((s.clone(), t.clone()));
        }
    }
    let mut flat_s = vec![1.0; a.n_rows];
    let mut flat_t = vec![1.0; a.n_cols];
    normalize(&mut flat_s);
    normalize(&mut flat_t);
    out.push((flat_s, flat_t));
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..restarts {
        let mut s: Vec<f64> = (0..a.n_rows).map(|_| StandardNormal.sample(&mut rng)).collect();
        let mut t: Vec<f64> = (0..a.n_cols).map(|_| StandardNormal.sample(&mut rng)).collect();
        normalize(&mut s);
        normalize(&mut t);
        out.push((s, t));
    }
    out
}

struct Best {
    value: f64,
    s: Vec<f64>,
    t: Vec<f64>,
}

fn ascend(a: &Sparse, p: f64, mut s: Vec<f64>, mut t: Vec<f64>, best: &mut Best) {
    let mut last = f64::NEG_INFINITY;
    for _ in 0..MAX_STEPS {
        let c = a.coefficients(&s, &t);
        let total = hitczenko_total_fast(&c, p);
        if total > best.value {
            best.value = total;
            best.s.clone_from(&s);
            best.t.clone_from(&t);
        }
        let abs: Vec<f64> = c.iter().map(|x| x.abs()).collect();
        let fill = water_fill(&abs, p);
        // signed weights so that every term contributes |c_k| w_k
        let w: Vec<f64> = fill.weights(&abs).into_iter().zip(&c).map(|(w, &x)| if x < 0.0 { -w } else { w }).collect();
        let objective: f64 = w.iter().zip(&c).map(|(w, x)| w * x).sum();
        if objective <= last * (1.0 + STEP_TOL) {
            break;
        }
        last = objective;
        let mut ns = a.times(&w, &t);
        if !normalize(&mut ns) {
            break;
        }
        let mut nt = a.times_transposed(&w, &ns);
        if !normalize(&mut nt) {
            break;
        }
        s = ns;
        t = nt;
    }
}

/// Alternating-ascent bracket with upper constant `c0`.
pub(crate) fn heuristic_bracket(a: &WeightMatrix, removed: Option<&[bool]>, p: f64, restarts: usize, seed: u64, c0: f64) -> RBracket {
    let sparse = Sparse::new(a, removed);
    let mut best = Best {
        value: 0.0,
        s: vec![0.0; a.n_rows()],
        t: vec![0.0; a.n_cols()],
    };
    if !sparse.entries.is_empty() {
        for (s, t) in seeds(&sparse, restarts, seed) {
            ascend(&sparse, p, s, t, &mut best);
        }
    }
    let (row, col, max_abs) = match removed {
        None => {
            let (r, c) = max_row_col_l2(a);
            (r, c, a.max_abs())
        }
        Some(_) => {
            let mut rows = vec![0.0; a.n_rows()];
            let mut cols = vec![0.0; a.n_cols()];
            let mut m = 0.0f64;
            for &(i, j, x) in &sparse.entries {
                rows[i] += x * x;
                cols[j] += x * x;
                m = m.max(x.abs());
            }
            let f = |v: Vec<f64>| v.into_iter().fold(0.0f64, f64::max).sqrt();
            (f(rows), f(cols), m)
        }
    };
    RBracket {
        p,
        lower: best.value,
        // the Hitczenko total never exceeds sqrt(2p) max|a| for unit s, t
        upper: c0 * (row + col + (2.0 * p).sqrt() * max_abs),
        witness_s: best.s,
        witness_t: best.t,
        mode: RMode::Heuristic,
        exact: false,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::moments::hitczenko_surrogate;

    #[test]
    fn single_entry() {
        let a = WeightMatrix::from_rows(&[vec![1.0]]).unwrap();
        let r = heuristic_bracket(&a, None, 4.0, 1, 0, 1.0);
        assert!((r.lower - 1.0).abs() < 1e-12);
        assert!(r.lower <= r.upper);
    }

    #[test]
    fn zero_diagonal_convention_gives_zero() {
        let a = WeightMatrix::identity(2).unwrap().without_diagonal();
        let r = heuristic_bracket(&a, None, 3.0, 2, 0, 1.0);
        assert_eq!((r.lower, r.upper), (0.0, 0.0));
    }

    #[test]
    fn beats_every_basis_seed() {
        let a = WeightMatrix::ones(4, 4).unwrap();
        let r = heuristic_bracket(&a, None, 2.0, 2, 1, 1.0);
        for i in 0..4 {
            for j in 0..4 {
                let c: Vec<f64> = (0..4)
                    .flat_map(|x| (0..4).map(move |y| if x == i && y == j { 1.0 } else { 0.0 }))
                    .collect();
                assert!(r.lower >= hitczenko_surrogate(&c, 2.0).unwrap().total - 1e-12);
            }
        }
        let norm_s: f64 = r.witness_s.iter().map(|x| x * x).sum();
        assert!(norm_s <= 1.0 + 1e-12);
        // the flat pair is visited: all 16 coefficients equal 1/4
        let flat = hitczenko_surrogate(&[0.25; 16], 2.0).unwrap().total;
        assert!(r.lower >= flat - 1e-12);
    }

    #[test]
    fn deterministic_for_fixed_seed() {
        let a = WeightMatrix::from_fn(6, 5, |i, j| ((i * 7 + j * 3) % 5) as f64 - 2.0).unwrap();
        let x = heuristic_bracket(&a, None, 3.0, 3, 9, 1.0);
        let y = heuristic_bracket(&a, None, 3.0, 3, 9, 1.0);
        assert_eq!(x.lower.to_bits(), y.lower.to_bits());
        assert_eq!(x.witness_s, y.witness_s);
    }
}
