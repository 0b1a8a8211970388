//! Closed-form norm bounds, estimators of `R_A(p)` and the combined profile.

mod exact01;
mod heuristic;
mod ksweep;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::graph::derive_graph;
use crate::log_clamped;
use crate::matrix::{EdgeSet, WeightMatrix};
use crate::spectral::max_row_col_l2;

pub use exact01::SHAPE_MAX_EDGES;
pub use ksweep::{ksweep_term, ksweep_with, min_over_removals, KSweep, KSweepRow, SweepMode};

pub(crate) use exact01::{max_subgraph_norm, Outcome, SearchLimits};

pub const DEFAULT_BUDGET_CAP: u64 = 20_000;
pub const DEFAULT_NODE_BUDGET: u64 = 50_000_000;
pub const DEFAULT_EXACT_THRESHOLD: u64 = 2_000;
pub const DEFAULT_RESTARTS: usize = 4;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RMode {
    #[serde(rename = "exact01")]
    Exact01,
    Heuristic,
}

/// Two-sided estimate of `R_A(p)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RBracket {
    pub p: f64,
    pub lower: f64,
    pub upper: f64,
    pub witness_s: Vec<f64>,
    pub witness_t: Vec<f64>,
    pub mode: RMode,
    /// `lower == upper` is certified. False for every heuristic bracket and
    /// for exact01 searches that ran out of budget.
    pub exact: bool,
}

/// `(Log n)^{1/4} (max row + max column)`.
pub fn seginer_bound(a: &WeightMatrix) -> f64 {
    let (r, c) = max_row_col_l2(a);
    let n = a.n_rows().max(a.n_cols()) as f64;
    log_clamped(n).powf(0.25) * (r + c)
}

/// `max row + max column + sqrt(Log n) max|a_ij|`.
pub fn bvh_bound(a: &WeightMatrix) -> f64 {
    let (r, c) = max_row_col_l2(a);
    let n = a.n_rows().max(a.n_cols()) as f64;
    r + c + log_clamped(n).sqrt() * a.max_abs()
}

/// `d_A` times the largest off-diagonal weight, with `d_A` the maximum degree
/// of the (symmetrized) support graph.
pub fn trivial_degree_bound(a: &WeightMatrix) -> Result<f64> {
    let g = derive_graph(a)?;
    Ok(g.max_degree() as f64 * a.max_abs_off_diagonal())
}

fn moment_edges(p: f64) -> Result<usize> {
    if !(p >= 1.0) || !p.is_finite() {
        return Err(invalid(format!("moment p must be a finite number >= 1, got {p}")));
    }
    Ok(p.floor() as usize)
}

fn bracket_from(outcome: Outcome, p: f64, n: usize) -> RBracket {
    let (_, s, t) = exact01::indicator_singular(&outcome.witness, n, n);
    RBracket {
        p,
        lower: outcome.lower,
        upper: outcome.upper,
        witness_s: s,
        witness_t: t,
        mode: RMode::Exact01,
        exact: outcome.exact,
    }
}

/// `max { ||1_F|| : F ⊆ E, |F| <= floor(p) }`. Components where
/// `C(|C|, floor(p))` is at most `budget_cap` are enumerated outright.
pub fn r_exact_01(e: &EdgeSet, p: f64, budget_cap: u64) -> Result<RBracket> {
    r_exact_01_with(e, p, budget_cap, DEFAULT_NODE_BUDGET)
}

/// As [`r_exact_01`] with an explicit cap on subgraph-matching steps.
pub fn r_exact_01_with(e: &EdgeSet, p: f64, budget_cap: u64, node_budget: u64) -> Result<RBracket> {
    let m = moment_edges(p)?;
    let limits = SearchLimits {
        exhaustive_cap: budget_cap,
        node_budget,
    };
    Ok(bracket_from(max_subgraph_norm(e.pairs(), m, None, limits), p, e.n()))
}

/// Alternating-ascent estimate of `R_A(p)` for arbitrary weights, with the
/// upper constant set to 1.
pub fn r_heuristic(a: &WeightMatrix, p: f64, restarts: usize, seed: u64) -> Result<RBracket> {
    r_heuristic_with(a, p, restarts, seed, 1.0)
}

pub fn r_heuristic_with(a: &WeightMatrix, p: f64, restarts: usize, seed: u64, c0: f64) -> Result<RBracket> {
    moment_edges(p)?;
    if restarts == 0 {
        return Err(invalid("restarts must be at least 1"));
    }
    if !(c0 >= 1.0) {
        return Err(invalid(format!("upper constant must be >= 1, got {c0}")));
    }
    Ok(heuristic::heuristic_bracket(a, None, p, restarts, seed, c0))
}

/// `R_A(p)` with the estimator picked by `config.mode`.
pub fn r_estimate(a: &WeightMatrix, p: f64, config: &BoundConfig) -> Result<RBracket> {
    moment_edges(p)?;
    config.validate()?;
    let mode = config.resolve(a)?;
    Ok(config.estimate(a, mode, None, p))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModeChoice {
    /// Exact search for {0,1} matrices, ascent otherwise.
    Auto,
    #[serde(rename = "exact01")]
    Exact01,
    Heuristic,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundConfig {
    pub mode: ModeChoice,
    pub budget_cap: u64,
    pub node_budget: u64,
    pub exact_threshold: u64,
    pub restarts: usize,
    pub seed: u64,
    pub c0: f64,
}

impl Default for BoundConfig {
    fn default() -> Self {
        BoundConfig {
            mode: ModeChoice::Auto,
            budget_cap: DEFAULT_BUDGET_CAP,
            node_budget: DEFAULT_NODE_BUDGET,
            exact_threshold: DEFAULT_EXACT_THRESHOLD,
            restarts: DEFAULT_RESTARTS,
            seed: 0,
            c0: 1.0,
        }
    }
}

impl BoundConfig {
    pub(crate) fn resolve(&self, a: &WeightMatrix) -> Result<RMode> {
        match self.mode {
            ModeChoice::Auto if a.is_binary() => Ok(RMode::Exact01),
            ModeChoice::Auto | ModeChoice::Heuristic => Ok(RMode::Heuristic),
            ModeChoice::Exact01 if a.is_binary() => Ok(RMode::Exact01),
            ModeChoice::Exact01 => Err(invalid("exact01 mode needs a {0,1} matrix")),
        }
    }

    pub(crate) fn limits(&self) -> SearchLimits {
        SearchLimits {
            exhaustive_cap: self.budget_cap,
            node_budget: self.node_budget,
        }
    }

    fn validate(&self) -> Result<()> {
        if self.restarts == 0 {
            return Err(invalid("restarts must be at least 1"));
        }
        if !(self.c0 >= 1.0) {
            return Err(invalid(format!("upper constant must be >= 1, got {}", self.c0)));
        }
        Ok(())
    }

    /// `R_A(p)` on the matrix with the `removed` indices deleted from both
    /// sides.
    pub(crate) fn estimate(&self, a: &WeightMatrix, mode: RMode, removed: Option<&[bool]>, p: f64) -> RBracket {
        match mode {
            RMode::Exact01 => {
                let keep = |i: usize| removed.is_none_or(|r| !r[i]);
                let pairs: Vec<(usize, usize)> = a.support().into_iter().filter(|&(i, j)| keep(i) && keep(j)).collect();
                let out = max_subgraph_norm(&pairs, p.floor() as usize, None, self.limits());
                bracket_from(out, p, a.n_rows())
            }
            RMode::Heuristic => heuristic::heuristic_bracket(a, removed, p, self.restarts, self.seed, self.c0),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NamedBounds {
    /// `row + column + R(Log n).upper`.
    pub log_n_bound: f64,
    /// `LogLog(d_A) (row + R(Log n).upper)`.
    pub loglog_degree_bound: f64,
    /// `LogLogLog(n) (row + column + R(Log n).upper)`.
    pub triple_log_bound: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProfileFlags {
    pub mode: RMode,
    pub loose_constants: bool,
    pub grid: String,
    pub c0: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundProfile {
    pub n: usize,
    pub row_max: f64,
    pub col_max: f64,
    pub r_logn: RBracket,
    pub ksweep_term: f64,
    pub ksweep_table: Vec<KSweepRow>,
    pub seginer: f64,
    pub bvh: f64,
    pub trivial_degree: f64,
    pub lower_profile: f64,
    pub conjectured_upper_profile: f64,
    pub named: NamedBounds,
    pub flags: ProfileFlags,
    pub config: BoundConfig,
}

pub fn bound_profile(a: &WeightMatrix, config: &BoundConfig) -> Result<BoundProfile> {
    if !a.is_square() {
        return Err(Error::Shape(format!("bound profile needs a square matrix, got {}x{}", a.n_rows(), a.n_cols())));
    }
    config.validate()?;
    let mode = config.resolve(a)?;
    let n = a.n_rows();
    let (row_max, col_max) = max_row_col_l2(a);
    let r_logn = config.estimate(a, mode, None, log_clamped(n as f64));
    let sweep = ksweep_with(a, config)?;
    let d_a = derive_graph(a)?.max_degree() as f64;
    let three_term = row_max + col_max + sweep.value;
    let r_up = r_logn.upper;
    Ok(BoundProfile {
        n,
        row_max,
        col_max,
        ksweep_term: sweep.value,
        ksweep_table: sweep.table,
        seginer: seginer_bound(a),
        bvh: bvh_bound(a),
        trivial_degree: trivial_degree_bound(a)?,
        lower_profile: three_term,
        conjectured_upper_profile: three_term,
        named: NamedBounds {
            log_n_bound: row_max + col_max + r_up,
            loglog_degree_bound: log_clamped(log_clamped(d_a)) * (row_max + r_up),
            triple_log_bound: log_clamped(log_clamped(log_clamped(n as f64))) * (row_max + col_max + r_up),
        },
        flags: ProfileFlags {
            mode,
            loose_constants: true,
            grid: "doubling".into(),
            c0: config.c0,
        },
        r_logn,
        config: *config,
    })
}
