//! Monte Carlo estimates of `E||(a_ij x_ij)||` for Rademacher and Gaussian
//! `x`.
//!
//! Sample `i` reads its randomness from ChaCha stream `i` under the run seed,
//! so the estimate does not depend on how samples are spread over threads.
//! Every independent draw consumes two uniforms `u1, u2` and sets
//! `g = sqrt(-2 ln u1) cos(2 pi u2)`; the Rademacher sign is `sign(g)`. The
//! modes therefore share their random numbers.

use std::f64::consts::TAU;

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::matrix::WeightMatrix;
use crate::moments::{lp_from_logs, MAX_EMPIRICAL_P, MIN_EMPIRICAL_SAMPLES};
use crate::spectral::{dense_norm, sparse_norm, BlockPlan, DEFAULT_TOL};

pub const MIN_SAMPLES: usize = 16;
pub const MAX_EXACT_SIGNS: usize = 24;
// blocks with both sides above this and density at most 1/8 go to Lanczos
const SPARSE_SIDE: usize = 48;
pub const CSV_HEADER: &str = "matrix_id,mode,samples,seed,mean,stderr";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    RademacherIid,
    /// One sign per unordered pair `{i, j}`, the diagonal getting its own.
    RademacherSymmetric,
    Gaussian,
}

impl Mode {
    pub fn name(self) -> &'static str {
        match self {
            Mode::RademacherIid => "rademacher_iid",
            Mode::RademacherSymmetric => "rademacher_symmetric",
            Mode::Gaussian => "gaussian",
        }
    }
}

impl std::str::FromStr for Mode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "rademacher_iid" | "iid" => Ok(Mode::RademacherIid),
            "rademacher_symmetric" | "symmetric" => Ok(Mode::RademacherSymmetric),
            "gaussian" => Ok(Mode::Gaussian),
            _ => Err(invalid(format!("unknown mode '{s}'"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MomentEstimate {
    pub p: f64,
    pub estimate: f64,
    pub stderr: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct McEstimate {
    pub mean: f64,
    /// Sample standard deviation over `sqrt(samples)`.
    pub stderr: f64,
    pub samples: usize,
    pub seed: u64,
    pub mode: Mode,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub p_moments: Option<Vec<MomentEstimate>>,
}

impl McEstimate {
    pub fn csv_row(&self, matrix_id: &str) -> String {
        format!(
            "{},{},{},{},{},{}",
            matrix_id,
            self.mode.name(),
            self.samples,
            self.seed,
            self.mean,
            self.stderr
        )
    }
}

/// Entry `(local row, local col, weight, draw index)` of one block.
type Cell = (usize, usize, f64, usize);

struct Layout {
    blocks: Vec<(usize, usize, Vec<Cell>)>,
    draws: usize,
}

impl Layout {
    fn new(a: &WeightMatrix, mode: Mode) -> Result<Layout> {
        if mode == Mode::RademacherSymmetric && !a.is_square() {
            return Err(Error::Shape(format!(
                "symmetric mode needs a square matrix, got {}x{}",
                a.n_rows(),
                a.n_cols()
            )));
        }
        let support = a.support();
        let draw_of: Vec<usize> = match mode {
            Mode::RademacherSymmetric => {
                let key = |&(i, j): &(usize, usize)| (i.max(j), i.min(j));
                let mut keys: Vec<(usize, usize)> = support.iter().map(key).collect();
                keys.sort_unstable();
                keys.dedup();
                support.iter().map(|e| keys.binary_search(&key(e)).unwrap()).collect()
            }
            _ => (0..support.len()).collect(),
        };
        let draws = draw_of.iter().map(|&k| k + 1).max().unwrap_or(0);
        let plan = BlockPlan::from_support(a.n_rows(), a.n_cols(), &support);
        let mut row_pos = vec![(0, 0); a.n_rows()];
        let mut col_pos = vec![0; a.n_cols()];
        for (b, block) in plan.blocks().iter().enumerate() {
            for (k, &i) in block.rows.iter().enumerate() {
                row_pos[i] = (b, k);
            }
            for (k, &j) in block.cols.iter().enumerate() {
                col_pos[j] = k;
            }
        }
        let mut blocks: Vec<(usize, usize, Vec<Cell>)> = plan.blocks().iter().map(|b| (b.rows.len(), b.cols.len(), vec![])).collect();
        for (&(i, j), &k) in support.iter().zip(&draw_of) {
            let (b, r) = row_pos[i];
            blocks[b].2.push((r, col_pos[j], a.get(i, j), k));
        }
        Ok(Layout { blocks, draws })
    }

    fn norm(&self, x: &[f64]) -> Result<f64> {
        let mut best = 0.0f64;
        for (rows, cols, cells) in &self.blocks {
            let v = if *rows == 1 || *cols == 1 {
                cells.iter().map(|&(_, _, a, k)| (a * x[k]).powi(2)).sum::<f64>().sqrt()
            } else if (*rows).min(*cols) > SPARSE_SIDE && cells.len() * 8 <= rows * cols {
                let entries: Vec<_> = cells.iter().map(|&(r, c, a, k)| (r, c, a * x[k])).collect();
                sparse_norm(*rows, *cols, &entries, DEFAULT_TOL)?.value
            } else {
                let mut m = DMatrix::zeros(*rows, *cols);
                for &(r, c, a, k) in cells {
                    m[(r, c)] = a * x[k];
                }
                dense_norm(&m, DEFAULT_TOL)?.value
            };
            best = best.max(v);
        }
        Ok(best)
    }
}

/// The `draws` values of sample `index` under `seed`.
fn realize(seed: u64, index: u64, draws: usize, mode: Mode) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    (0..draws)
        .map(|_| {
            let u1 = 1.0 - rng.random::<f64>();
            let u2: f64 = rng.random();
            let g = (-2.0 * u1.ln()).sqrt() * (TAU * u2).cos();
            match mode {
                Mode::Gaussian => g,
                _ if g < 0.0 => -1.0,
                _ => 1.0,
            }
        })
        .collect()
}

/// Sum in a fixed binary tree, so the result depends on the order of `v`
/// only.
pub(crate) fn pairwise_sum(v: &[f64]) -> f64 {
    if v.len() <= 8 {
        return v.iter().sum();
    }
    let (l, r) = v.split_at(v.len() / 2);
    pairwise_sum(l) + pairwise_sum(r)
}

fn mean_and_stderr(v: &[f64]) -> (f64, f64) {
    let n = v.len() as f64;
    let mean = pairwise_sum(v) / n;
    let sq: Vec<f64> = v.iter().map(|x| (x - mean) * (x - mean)).collect();
    let var = pairwise_sum(&sq) / (n - 1.0).max(1.0);
    (mean, (var / n).sqrt())
}

fn sample_norms(a: &WeightMatrix, mode: Mode, samples: usize, seed: u64) -> Result<Vec<f64>> {
    if samples < MIN_SAMPLES {
        return Err(invalid(format!("need at least {MIN_SAMPLES} samples, got {samples}")));
    }
    let layout = Layout::new(a, mode)?;
    (0..samples as u64)
        .into_par_iter()
        .map(|i| layout.norm(&realize(seed, i, layout.draws, mode)))
        .collect()
}

/// Mean and standard error of `||A o X||` over `samples` realizations.
pub fn mc_norm(a: &WeightMatrix, mode: Mode, samples: usize, seed: u64) -> Result<McEstimate> {
    let norms = sample_norms(a, mode, samples, seed)?;
    let (mean, stderr) = mean_and_stderr(&norms);
    Ok(McEstimate {
        mean,
        stderr,
        samples,
        seed,
        mode,
        p_moments: None,
    })
}

/// `(E||A o eps||^p)^{1/p}` for each `p`, Rademacher iid signs.
pub fn mc_norm_moments(a: &WeightMatrix, p_list: &[f64], samples: usize, seed: u64) -> Result<McEstimate> {
    mc_norm_moments_with(a, Mode::RademacherIid, p_list, samples, seed)
}

pub fn mc_norm_moments_with(a: &WeightMatrix, mode: Mode, p_list: &[f64], samples: usize, seed: u64) -> Result<McEstimate> {
    for &p in p_list {
        if !(p > 0.0 && p <= MAX_EMPIRICAL_P) {
            return Err(invalid(format!("moment order must lie in (0, {MAX_EMPIRICAL_P}], got {p}")));
        }
    }
    if samples < MIN_EMPIRICAL_SAMPLES {
        return Err(invalid(format!("need at least {MIN_EMPIRICAL_SAMPLES} samples, got {samples}")));
    }
    let norms = sample_norms(a, mode, samples, seed)?;
    let (mean, stderr) = mean_and_stderr(&norms);
    let logs: Vec<f64> = norms.iter().map(|x| x.ln()).collect();
    let p_moments = p_list
        .iter()
        .map(|&p| {
            let (estimate, stderr) = lp_from_logs(&logs, p);
            MomentEstimate { p, estimate, stderr }
        })
        .collect();
    Ok(McEstimate {
        mean,
        stderr,
        samples,
        seed,
        mode,
        p_moments: Some(p_moments),
    })
}

/// Exact `E||A o eps||` over all sign patterns.
pub fn exact_small_norm_expectation(a: &WeightMatrix, mode: Mode) -> Result<f64> {
    if mode == Mode::Gaussian {
        return Err(invalid("exact expectation needs a sign mode"));
    }
    let layout = Layout::new(a, mode)?;
    if layout.draws > MAX_EXACT_SIGNS {
        return Err(Error::SizeCap {
            what: "independent signs",
            value: layout.draws,
            cap: MAX_EXACT_SIGNS,
        });
    }
    let norms: Vec<f64> = (0u64..1 << layout.draws)
        .into_par_iter()
        .map(|mask| {
            let x: Vec<f64> = (0..layout.draws).map(|k| if mask >> k & 1 == 1 { -1.0 } else { 1.0 }).collect();
            layout.norm(&x)
        })
        .collect::<Result<_>>()?;
    Ok(pairwise_sum(&norms) / norms.len() as f64)
}
