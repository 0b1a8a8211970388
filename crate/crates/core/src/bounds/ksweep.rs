//! The k-sweep term: over a doubling grid of `k`, the smallest `R` value at
//! moment `Log k` left after deleting at most `k` indices (rows and columns
//! together), maximized over the grid.
//!
//! Deleting indices never increases `R`, so the inner minimum is attained
//! with exactly `min(k, n)` deletions. It is computed by enumeration when the
//! number of such sets is at most the exact threshold and by greedy deletion
//! otherwise. Greedy only ever reports an achievable value, which makes it an
//! upper bound on the true minimum.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use super::{heuristic::heuristic_bracket, max_subgraph_norm, BoundConfig, RMode, SearchLimits};
use crate::error::{Error, Result};
use crate::graph::DisjointSets;
use crate::log_clamped;
use crate::matrix::WeightMatrix;

const EPS: f64 = 1e-12;
/// Indices of the heuristic witness tried per greedy step.
const HEURISTIC_CANDIDATES: usize = 8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepMode {
    Exact,
    Greedy,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KSweepRow {
    pub k: usize,
    pub p: f64,
    /// Deleted indices, 1-based.
    pub removed: Vec<usize>,
    pub value: f64,
    pub mode: SweepMode,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KSweep {
    pub value: f64,
    pub table: Vec<KSweepRow>,
    pub estimator: RMode,
}

/// `{1, 2, 4, ...} ∪ {n}` restricted to `[1, n]`.
pub fn doubling_grid(n: usize) -> Vec<usize> {
    let mut grid = vec![];
    let mut k = 1;
    while k < n {
        grid.push(k);
        k *= 2;
    }
    grid.push(n.max(1));
    grid
}

pub fn ksweep_term(a: &WeightMatrix, exact_threshold: u64, seed: u64) -> Result<KSweep> {
    let cfg = BoundConfig {
        exact_threshold,
        seed,
        ..BoundConfig::default()
    };
    ksweep_with(a, &cfg)
}

pub fn ksweep_with(a: &WeightMatrix, cfg: &BoundConfig) -> Result<KSweep> {
    if !a.is_square() {
        return Err(Error::Shape(format!("k-sweep needs a square matrix, got {}x{}", a.n_rows(), a.n_cols())));
    }
    let mode = cfg.resolve(a)?;
    let n = a.n_rows();
    let mut table = vec![];
    for k in doubling_grid(n) {
        let p = log_clamped(k as f64);
        let (value, removed, sweep) = min_with_mode(a, mode, p, k, cfg);
        table.push(KSweepRow {
            k,
            p,
            removed: removed.into_iter().map(|i| i + 1).collect(),
            value,
            mode: sweep,
        });
    }
    let value = table.iter().map(|r| r.value).fold(0.0, f64::max);
    Ok(KSweep {
        value,
        table,
        estimator: mode,
    })
}

/// `min_{|I| <= k} R(A restricted to indices outside I)` at moment `p`,
/// with the deleted set (0-based) and how it was found.
pub fn min_over_removals(a: &WeightMatrix, p: f64, k: usize, cfg: &BoundConfig) -> Result<(f64, Vec<usize>, SweepMode)> {
    if !a.is_square() {
        return Err(Error::Shape("k-sweep needs a square matrix".into()));
    }
    let mode = cfg.resolve(a)?;
    Ok(min_with_mode(a, mode, p, k, cfg))
}

fn min_with_mode(a: &WeightMatrix, mode: RMode, p: f64, k: usize, cfg: &BoundConfig) -> (f64, Vec<usize>, SweepMode) {
    let n = a.n_rows();
    let size = k.min(n);
    if subsets_at_most(n, size, cfg.exact_threshold) {
        let (v, r) = exact_min(a, mode, p, size, cfg);
        (v, r, SweepMode::Exact)
    } else {
        let (v, r) = match mode {
            RMode::Exact01 => greedy_exact01(a, p, size, cfg.limits()),
            RMode::Heuristic => greedy_heuristic(a, p, size, cfg),
        };
        (v, r, SweepMode::Greedy)
    }
}

fn subsets_at_most(n: usize, k: usize, cap: u64) -> bool {
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
        if acc > cap as u128 {
            return false;
        }
    }
    true
}

fn ksweep_estimator(cfg: &BoundConfig) -> BoundConfig {
    // one random restart per evaluation keeps the greedy loop affordable
    BoundConfig {
        restarts: cfg.restarts.min(1),
        ..*cfg
    }
}

fn exact_min(a: &WeightMatrix, mode: RMode, p: f64, size: usize, cfg: &BoundConfig) -> (f64, Vec<usize>) {
    let n = a.n_rows();
    let est = ksweep_estimator(cfg);
    let full = est.estimate(a, mode, None, p).lower;
    let mut best = (full, vec![]);
    if size == 0 || full == 0.0 {
        return best;
    }
    let m = p.floor() as usize;
    let support = a.support();
    let mut idx: Vec<usize> = (0..size).collect();
    let mut mask = vec![false; n];
    loop {
        mask.iter_mut().for_each(|x| *x = false);
        for &i in &idx {
            mask[i] = true;
        }
        let v = match mode {
            RMode::Exact01 => {
                let pairs: Vec<(usize, usize)> = support.iter().copied().filter(|&(i, j)| !mask[i] && !mask[j]).collect();
                max_subgraph_norm(&pairs, m, Some(full), cfg.limits()).lower
            }
            RMode::Heuristic => heuristic_bracket(a, Some(&mask), p, est.restarts, est.seed, est.c0).lower,
        };
        if v < best.0 - EPS {
            best = (v, idx.clone());
            if v == 0.0 {
                return best;
            }
        }
        let mut i = size;
        while i > 0 && idx[i - 1] == n - size + i - 1 {
            i -= 1;
        }
        if i == 0 {
            return best;
        }
        idx[i - 1] += 1;
        for j in i..size {
            idx[j] = idx[j - 1] + 1;
        }
    }
}

/// Runs `steps` greedy deletions, keeping the best prefix.
fn greedy_loop(steps: usize, mut current: (f64, Vec<usize>), mut try_remove: impl FnMut(usize, f64) -> (f64, Vec<usize>), mut commit: impl FnMut(usize)) -> (f64, Vec<usize>) {
    let mut order = vec![];
    let mut best = (current.0, 0);
    for _ in 0..steps {
        if current.0 == 0.0 || current.1.is_empty() {
            break;
        }
        let mut pick: Option<(usize, (f64, Vec<usize>))> = None;
        for &x in &current.1 {
            let r = try_remove(x, current.0);
            if pick.as_ref().is_none_or(|(_, b)| r.0 < b.0 - EPS) {
                pick = Some((x, r));
            }
        }
        let (x, r) = pick.unwrap();
        commit(x);
        order.push(x);
        current = r;
        if current.0 < best.0 - EPS {
            best = (current.0, order.len());
        }
    }
    order.truncate(best.1);
    (best.0, order)
}

fn greedy_heuristic(a: &WeightMatrix, p: f64, size: usize, cfg: &BoundConfig) -> (f64, Vec<usize>) {
    let n = a.n_rows();
    let est = ksweep_estimator(cfg);
    let eval = |mask: &[bool]| {
        let r = heuristic_bracket(a, Some(mask), p, est.restarts, est.seed, est.c0);
        let mut idx: Vec<usize> = (0..n).filter(|&i| !mask[i] && (r.witness_s[i] != 0.0 || r.witness_t[i] != 0.0)).collect();
        let weight = |i: usize| r.witness_s[i].abs().max(r.witness_t[i].abs());
        idx.sort_by(|&x, &y| weight(y).total_cmp(&weight(x)).then(x.cmp(&y)));
        idx.truncate(HEURISTIC_CANDIDATES);
        idx.sort_unstable();
        (r.lower, idx)
    };
    let mask = std::cell::RefCell::new(vec![false; n]);
    let start = eval(&mask.borrow());
    greedy_loop(
        size,
        start,
        |x, _| {
            let mut m = mask.borrow().clone();
            m[x] = true;
            eval(&m)
        },
        |x| mask.borrow_mut()[x] = true,
    )
}

#[derive(Debug, Clone)]
struct Comp {
    edges: Vec<(usize, usize)>,
    value: f64,
    witness: Vec<(usize, usize)>,
}

/// Components of the current support with their values, updated locally
/// as indices are deleted.
struct CompState {
    m: usize,
    limits: SearchLimits,
    comps: Vec<Option<Comp>>,
    row_comp: Vec<Option<usize>>,
    col_comp: Vec<Option<usize>>,
}

fn split(edges: &[(usize, usize)], n: usize) -> Vec<Vec<(usize, usize)>> {
    let mut dsu = DisjointSets::new(2 * n);
    for &(r, c) in edges {
        dsu.union(r, n + c);
    }
    let mut groups: HashMap<usize, Vec<(usize, usize)>> = HashMap::new();
    for &(r, c) in edges {
        groups.entry(dsu.find(r)).or_default().push((r, c));
    }
    let mut out: Vec<Vec<(usize, usize)>> = groups.into_values().collect();
    out.sort();
    out
}

fn vertices(witness: &[(usize, usize)]) -> Vec<usize> {
    let mut v: Vec<usize> = witness.iter().flat_map(|&(r, c)| [r, c]).collect();
    v.sort_unstable();
    v.dedup();
    v
}

impl CompState {
    fn new(a: &WeightMatrix, m: usize, limits: SearchLimits) -> CompState {
        let n = a.n_rows();
        let mut st = CompState {
            m,
            limits,
            comps: vec![],
            row_comp: vec![None; n],
            col_comp: vec![None; n],
        };
        for edges in split(&a.support(), n) {
            st.add(edges, None);
        }
        st
    }

    fn add(&mut self, edges: Vec<(usize, usize)>, hint: Option<f64>) {
        let out = max_subgraph_norm(&edges, self.m, hint, self.limits);
        let id = self.comps.len();
        for &(r, c) in &edges {
            self.row_comp[r] = Some(id);
            self.col_comp[c] = Some(id);
        }
        self.comps.push(Some(Comp {
            edges,
            value: out.lower,
            witness: out.witness,
        }));
    }

    fn affected(&self, x: usize) -> Vec<usize> {
        let mut ids: Vec<usize> = [self.row_comp[x], self.col_comp[x]].into_iter().flatten().collect();
        ids.sort_unstable();
        ids.dedup();
        ids
    }

    /// Largest value among live components not in `skip`, lowest id first.
    fn best_excluding(&self, skip: &[usize]) -> (f64, Vec<(usize, usize)>) {
        let mut best: (f64, Option<usize>) = (0.0, None);
        for (id, c) in self.comps.iter().enumerate() {
            if let Some(c) = c {
                if !skip.contains(&id) && c.value > best.0 + EPS {
                    best = (c.value, Some(id));
                }
            }
        }
        match best.1 {
            Some(id) => (best.0, self.comps[id].as_ref().unwrap().witness.clone()),
            None => (0.0, vec![]),
        }
    }

    fn current(&self) -> (f64, Vec<usize>) {
        let (v, w) = self.best_excluding(&[]);
        (v, vertices(&w))
    }

    fn try_remove(&self, x: usize) -> (f64, Vec<usize>) {
        let hit = self.affected(x);
        let (mut value, mut witness) = self.best_excluding(&hit);
        for &id in &hit {
            let c = self.comps[id].as_ref().unwrap();
            let rest: Vec<(usize, usize)> = c.edges.iter().copied().filter(|&(r, col)| r != x && col != x).collect();
            let out = max_subgraph_norm(&rest, self.m, Some(c.value), self.limits);
            if out.lower > value + EPS {
                value = out.lower;
                witness = out.witness;
            }
        }
        (value, vertices(&witness))
    }

    fn commit(&mut self, x: usize, n: usize) {
        for id in self.affected(x) {
            let c = self.comps[id].take().unwrap();
            let rest: Vec<(usize, usize)> = c.edges.iter().copied().filter(|&(r, col)| r != x && col != x).collect();
            for &(r, col) in &c.edges {
                self.row_comp[r] = None;
                self.col_comp[col] = None;
            }
            for part in split(&rest, n) {
                self.add(part, Some(c.value));
            }
        }
    }
}

fn greedy_exact01(a: &WeightMatrix, p: f64, size: usize, limits: SearchLimits) -> (f64, Vec<usize>) {
    let n = a.n_rows();
    let state = std::cell::RefCell::new(CompState::new(a, p.floor() as usize, limits));
    let start = state.borrow().current();
    greedy_loop(size, start, |x, _| state.borrow().try_remove(x), |x| state.borrow_mut().commit(x, n))
}
