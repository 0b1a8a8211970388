//! L_p norms of Rademacher sums `sum a_k eps_k`: the two closed-form
//! surrogates and Monte Carlo / exact evaluation.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};

pub const MAX_EMPIRICAL_P: f64 = 64.0;
pub const MIN_EMPIRICAL_SAMPLES: usize = 100;
pub const MAX_EXACT_TERMS: usize = 24;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SurrogateResult {
    pub head: f64,
    pub tail: f64,
    pub total: f64,
    pub p: f64,
}

/// `|a|` sorted nonincreasing.
pub fn rearrange_desc(a: &[f64]) -> Vec<f64> {
    let mut v: Vec<f64> = a.iter().map(|x| x.abs()).collect();
    v.sort_by(|x, y| y.total_cmp(x));
    v
}

fn check_p(p: f64) -> Result<()> {
    if p >= 1.0 && p.is_finite() {
        Ok(())
    } else {
        Err(invalid(format!("moment p must be a finite number >= 1, got {p}")))
    }
}

fn sum_squares(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum()
}

/// Sum of the `floor(p)` largest `|a_k|` plus `sqrt(p)` times the Euclidean
/// norm of the rest.
pub fn hitczenko_surrogate(a: &[f64], p: f64) -> Result<SurrogateResult> {
    check_p(p)?;
    let v = rearrange_desc(a);
    let cut = (p.floor() as usize).min(v.len());
    let head: f64 = v[..cut].iter().sum();
    let tail = p.sqrt() * sum_squares(&v[cut..]).sqrt();
    Ok(SurrogateResult {
        head,
        tail,
        total: head + tail,
        p,
    })
}

/// `sup { sum a_k b_k : |b_k| <= 1, ||b||_2 <= sqrt(p) }`, solved exactly.
///
/// The maximizer saturates `b` on the `m` largest entries and is
/// proportional to `|a|` elsewhere; `m` is the first index at which the
/// proportional part fits inside the box.
pub fn dual_surrogate(a: &[f64], p: f64) -> Result<f64> {
    check_p(p)?;
    let abs: Vec<f64> = a.iter().map(|x| x.abs()).collect();
    let fill = water_fill(&abs, p);
    Ok(fill.head + fill.level.map_or(0.0, |l| fill.rest_sq / l))
}

/// Solution of the box-ball problem for nonnegative `c`: entries ranked
/// below `saturated` get weight `c / level` (never above 1), the others 1.
#[derive(Debug, Clone)]
pub(crate) struct WaterFill {
    /// Indices given weight 1.
    pub saturated: Vec<usize>,
    pub level: Option<f64>,
    pub head: f64,
    pub rest_sq: f64,
}

impl WaterFill {
    pub(crate) fn weights(&self, c: &[f64]) -> Vec<f64> {
        let mut w: Vec<f64> = match self.level {
            Some(l) => c.iter().map(|x| (x / l).min(1.0)).collect(),
            None => vec![0.0; c.len()],
        };
        for &i in &self.saturated {
            w[i] = 1.0;
        }
        w
    }
}

/// Indices of the `k` largest entries of `c`, largest first, ties to the
/// lower index.
pub(crate) fn top_indices(c: &[f64], k: usize) -> Vec<usize> {
    let k = k.min(c.len());
    let mut idx: Vec<usize> = (0..c.len()).collect();
    let cmp = |&i: &usize, &j: &usize| c[j].total_cmp(&c[i]).then(i.cmp(&j));
    if k < idx.len() && k > 0 {
        idx.select_nth_unstable_by(k - 1, cmp);
    }
    idx.truncate(k);
    idx.sort_by(cmp);
    idx
}

pub(crate) fn water_fill(c: &[f64], p: f64) -> WaterFill {
    let n = c.len();
    if n as f64 <= p {
        return WaterFill {
            saturated: (0..n).collect(),
            level: None,
            head: c.iter().sum(),
            rest_sq: 0.0,
        };
    }
    // at most ceil(p) - 1 entries can saturate
    let top = top_indices(c, (p.ceil() as usize).min(n));
    let total_sq: f64 = c.iter().map(|x| x * x).sum();
    let mut head = 0.0;
    let mut rest_sq = total_sq;
    let mut used = 0;
    for (m, &i) in top.iter().enumerate() {
        if rest_sq <= 0.0 {
            break;
        }
        used = m + 1;
        let level = (rest_sq / (p - m as f64)).sqrt();
        if c[i] <= level {
            return WaterFill {
                saturated: top[..m].to_vec(),
                level: Some(level),
                head,
                rest_sq,
            };
        }
        head += c[i];
        rest_sq = (rest_sq - c[i] * c[i]).max(0.0);
    }
    WaterFill {
        saturated: top[..used].to_vec(),
        level: None,
        head,
        rest_sq: 0.0,
    }
}

/// Hitczenko total of `|c|` without a full sort.
pub(crate) fn hitczenko_total_fast(c: &[f64], p: f64) -> f64 {
    let cut = (p.floor() as usize).min(c.len());
    let top = top_indices(c, cut);
    let head: f64 = top.iter().map(|&i| c[i].abs()).sum();
    // summing the rest directly avoids cancellation in total - top
    let mut in_top = vec![false; c.len()];
    top.iter().for_each(|&i| in_top[i] = true);
    let rest_sq: f64 = c.iter().zip(&in_top).filter(|(_, &t)| !t).map(|(x, _)| x * x).sum();
    head + p.sqrt() * rest_sq.sqrt()
}

/// Mean of `|S|^p` as `(estimate, stderr)` of `||S||_p`, accumulated in log
/// space. `log_abs` holds `ln |S_i|` per sample.
pub(crate) fn lp_from_logs(log_abs: &[f64], p: f64) -> (f64, f64) {
    let n = log_abs.len() as f64;
    let shift = log_abs
        .iter()
        .map(|l| p * l)
        .fold(f64::NEG_INFINITY, f64::max);
    if shift == f64::NEG_INFINITY {
        return (0.0, 0.0);
    }
    let w: Vec<f64> = log_abs.iter().map(|l| (p * l - shift).exp()).collect();
    let mean = w.iter().sum::<f64>() / n;
    let var = w.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (n - 1.0).max(1.0);
    let estimate = ((shift + mean.ln()) / p).exp();
    // delta method on x -> x^{1/p}
    let stderr = estimate * (var.sqrt() / mean) / (p * n.sqrt());
    (estimate, stderr)
}

/// Monte Carlo estimate of `||sum a_k eps_k||_p` with its standard error.
/// Sample `i` draws from its own ChaCha stream, so the result does not depend
/// on how samples are spread over threads.
pub fn empirical_lp(a: &[f64], p: f64, samples: usize, seed: u64) -> Result<(f64, f64)> {
    check_p(p)?;
    if p > MAX_EMPIRICAL_P {
        return Err(invalid(format!("empirical moments are capped at p = {MAX_EMPIRICAL_P}")));
    }
    if samples < MIN_EMPIRICAL_SAMPLES {
        return Err(invalid(format!("need at least {MIN_EMPIRICAL_SAMPLES} samples, got {samples}")));
    }
    if let Some(k) = a.iter().position(|x| !x.is_finite()) {
        return Err(Error::NonFinite { row: 0, col: k });
    }
    let logs: Vec<f64> = (0..samples as u64)
        .into_par_iter()
        .map(|i| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(i);
            let s: f64 = a
                .iter()
                .map(|&x| if rng.random::<bool>() { x } else { -x })
                .sum();
            s.abs().ln()
        })
        .collect();
    Ok(lp_from_logs(&logs, p))
}

/// `||sum a_k eps_k||_p` by enumerating all sign patterns.
pub fn exact_lp(a: &[f64], p: f64) -> Result<f64> {
    check_p(p)?;
    if a.len() > MAX_EXACT_TERMS {
        return Err(Error::SizeCap {
            what: "terms",
            value: a.len(),
            cap: MAX_EXACT_TERMS,
        });
    }
    let logs: Vec<f64> = (0u64..1 << a.len())
        .map(|mask| {
            let s: f64 = a
                .iter()
                .enumerate()
                .map(|(k, &x)| if mask >> k & 1 == 1 { x } else { -x })
                .sum();
            s.abs().ln()
        })
        .collect();
    Ok(lp_from_logs(&logs, p).0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::{prop_assert, proptest};

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol * b.abs().max(1.0)
    }

    /// Grid search over feasible `b`, independent of the closed form.
    fn dual_by_grid(a: &[f64], p: f64, steps: usize) -> f64 {
        let n = a.len();
        let mut best = 0.0f64;
        let mut idx = vec![0usize; n];
        loop {
            let b: Vec<f64> = idx.iter().map(|&i| i as f64 / steps as f64).collect();
            if sum_squares(&b) <= p + 1e-12 {
                best = best.max(a.iter().zip(&b).map(|(x, y)| x.abs() * y).sum());
            }
            let mut k = 0;
            while k < n && idx[k] == steps {
                idx[k] = 0;
                k += 1;
            }
            if k == n {
                return best;
            }
            idx[k] += 1;
        }
    }

    #[test]
    fn rearrange_examples() {
        assert_eq!(rearrange_desc(&[-3.0, 1.0, 2.0]), vec![3.0, 2.0, 1.0]);
        assert!(rearrange_desc(&[]).is_empty());
        assert_eq!(rearrange_desc(&[1.0, 1.0, 1.0]), vec![1.0; 3]);
    }

    #[test]
    fn hitczenko_examples() {
        let r = hitczenko_surrogate(&[3.0, 2.0, 1.0], 2.0).unwrap();
        assert_eq!(r.head, 5.0);
        assert!(close(r.tail, 2f64.sqrt(), 1e-15));
        assert!(close(r.total, 5.0 + 2f64.sqrt(), 1e-15));
        assert_eq!(hitczenko_surrogate(&[1.0], 1.0).unwrap().total, 1.0);
        let r = hitczenko_surrogate(&[1.0; 4], 2.0).unwrap();
        assert_eq!((r.head, r.total), (2.0, 4.0));
        assert!(close(r.tail, 2.0, 1e-15));
        assert!(hitczenko_surrogate(&[1.0], 0.5).is_err());
    }

    #[test]
    fn total_is_not_monotone_across_integer_cuts() {
        // the floor cut makes the total drop when p crosses an integer
        let a = [1.0, 1.0, 1.0];
        let at2 = hitczenko_surrogate(&a, 2.0).unwrap().total;
        let at3 = hitczenko_surrogate(&a, 3.0).unwrap().total;
        assert!(at2 > at3);
    }

    #[test]
    fn dual_examples() {
        assert_eq!(dual_surrogate(&[1.0; 4], 4.0).unwrap(), 4.0);
        assert!(close(dual_surrogate(&[1.0; 4], 1.0).unwrap(), 2.0, 1e-15));
        let a = [3.0, 2.0, 1.0];
        let d = dual_surrogate(&a, 2.0).unwrap();
        let grid = dual_by_grid(&a, 2.0, 200);
        assert!(d >= grid - 1e-12 && d - grid < 0.02, "{d} vs {grid}");
    }

    #[test]
    fn empirical_examples() {
        for p in [1.0, 3.5, 40.0] {
            assert_eq!(empirical_lp(&[1.0], p, 100, 9).unwrap(), (1.0, 0.0));
        }
        let (e, s) = empirical_lp(&[1.0, 1.0], 2.0, 4000, 1).unwrap();
        assert!((e - 2f64.sqrt()).abs() <= 3.0 * s, "{e} ± {s}");
        let a = [3.0, 2.0, 1.0];
        let exact = exact_lp(&a, 4.0).unwrap();
        let (e, s) = empirical_lp(&a, 4.0, 4000, 2).unwrap();
        assert!((e - exact).abs() <= 3.0 * s, "{e} ± {s} vs {exact}");
    }

    #[test]
    fn empirical_rejects_bad_arguments() {
        assert!(empirical_lp(&[1.0], 2.0, 99, 0).is_err());
        assert!(empirical_lp(&[1.0], 65.0, 100, 0).is_err());
        assert!(empirical_lp(&[f64::NAN], 2.0, 100, 0).is_err());
    }

    #[test]
    fn empirical_is_thread_count_independent() {
        let a: Vec<f64> = (1..30).map(|k| 1.0 / k as f64).collect();
        let run = |threads| {
            rayon::ThreadPoolBuilder::new()
                .num_threads(threads)
                .build()
                .unwrap()
                .install(|| empirical_lp(&a, 6.0, 500, 42).unwrap())
        };
        assert_eq!(run(1), run(3));
    }

    #[test]
    fn exact_lp_small_cases() {
        // |eps_1 + eps_2| is 0 or 2 with equal odds
        assert!(close(exact_lp(&[1.0, 1.0], 2.0).unwrap(), 2f64.sqrt(), 1e-14));
        assert!(close(exact_lp(&[1.0, 1.0], 1.0).unwrap(), 1.0, 1e-14));
        // p = 2 gives the Euclidean norm
        let a = [0.3, -1.2, 2.5, 0.7];
        assert!(close(exact_lp(&a, 2.0).unwrap(), sum_squares(&a).sqrt(), 1e-13));
    }

    #[test]
    fn sandwich_against_exact_moments() {
        let mut rng = ChaCha8Rng::seed_from_u64(77);
        for _ in 0..50 {
            let n = rng.random_range(1..=14);
            let a: Vec<f64> = (0..n).map(|_| rng.random_range(-3.0..3.0)).collect();
            for p in [1.0, 2.0, 4.0, 8.0, 16.0] {
                let exact = exact_lp(&a, p).unwrap();
                let total = hitczenko_surrogate(&a, p).unwrap().total;
                assert!(exact >= total / 10.0 && exact <= 10.0 * total);
            }
        }
    }

    proptest! {
        #[test]
        fn fast_paths_match(a in proptest::collection::vec(0.0f64..10.0, 0..40), p in 1.0f64..50.0) {
            let slow = hitczenko_surrogate(&a, p).unwrap().total;
            prop_assert!((hitczenko_total_fast(&a, p) - slow).abs() <= 1e-9 * slow.max(1.0));
            let fill = water_fill(&a, p);
            let w = fill.weights(&a);
            let d = dual_surrogate(&a, p).unwrap();
            prop_assert!(w.iter().all(|&x| (0.0..=1.0).contains(&x)));
            prop_assert!(w.iter().map(|x| x * x).sum::<f64>() <= p * (1.0 + 1e-9));
            let value: f64 = a.iter().zip(&w).map(|(x, y)| x * y).sum();
            prop_assert!((value - d).abs() <= 1e-9 * d.max(1.0));
        }

        #[test]
        fn dual_and_total_within_factor_two(a in proptest::collection::vec(-10.0f64..10.0, 0..40), p in 1.0f64..50.0) {
            let d = dual_surrogate(&a, p).unwrap();
            let t = hitczenko_surrogate(&a, p).unwrap().total;
            prop_assert!(d <= t * (1.0 + 1e-12) + 1e-12);
            prop_assert!(t <= 2.0 * d * (1.0 + 1e-12) + 1e-12);
        }

        #[test]
        fn total_monotone_between_integer_cuts(a in proptest::collection::vec(-10.0f64..10.0, 1..30), m in 1usize..20, f in 0.0f64..0.999, g in 0.0f64..0.999) {
            let (lo, hi) = if f <= g { (f, g) } else { (g, f) };
            let t1 = hitczenko_surrogate(&a, m as f64 + lo).unwrap();
            let t2 = hitczenko_surrogate(&a, m as f64 + hi).unwrap();
            prop_assert!(t1.total <= t2.total * (1.0 + 1e-12));
            prop_assert!(t1.head >= 0.0 && t1.tail >= 0.0);
            prop_assert!(t1.total >= rearrange_desc(&a)[0] * (1.0 - 1e-12));
        }

        #[test]
        fn dual_is_feasible_optimum(a in proptest::collection::vec(0.0f64..5.0, 1..4), p in 1.0f64..3.0) {
            let d = dual_surrogate(&a, p).unwrap();
            let grid = dual_by_grid(&a, p, 60);
            prop_assert!(d >= grid - 1e-9);
            // grid resolution 1/60 per coordinate
            prop_assert!(d - grid <= a.iter().sum::<f64>() * 0.06 + 1e-9);
        }
    }
}
