//! Brute-force computations for tiny instances: sign-bilinear maxima, the
//! normalized maximum `X` over index-set pairs, connected-subset
//! enumeration, a greedy neighbourhood cover and the largest norm of a
//! bounded-size edge subset.

use std::collections::BTreeSet;

use nalgebra::{DMatrix, SymmetricEigen};
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::graph::{power_graph, GraphView};
use crate::matrix::{EdgeSet, WeightMatrix};

pub const MAX_SIGN_SIDE: usize = 20;
pub const MAX_X_DIM: usize = 8;
pub const MAX_ENUMERATED: usize = 1_000_000;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SignBilinearResult {
    pub value: f64,
    pub eta_rows: Vec<i8>,
    pub eta_cols: Vec<i8>,
}

fn sign(x: f64) -> i8 {
    if x < 0.0 {
        -1
    } else {
        1
    }
}

/// `max sum_ij b_ij eta_i eta'_j` over sign vectors, enumerating the smaller
/// side in Gray-code order.
pub fn sign_bilinear_max(b: &WeightMatrix) -> Result<SignBilinearResult> {
    if b.n_rows() > b.n_cols() {
        let t = sign_bilinear_max(&b.transpose())?;
        return Ok(SignBilinearResult {
            value: t.value,
            eta_rows: t.eta_cols,
            eta_cols: t.eta_rows,
        });
    }
    let (k, l) = (b.n_rows(), b.n_cols());
    if k > MAX_SIGN_SIDE {
        return Err(Error::SizeCap {
            what: "smaller side",
            value: k,
            cap: MAX_SIGN_SIDE,
        });
    }
    if k == 0 {
        return Ok(SignBilinearResult {
            value: 0.0,
            eta_rows: vec![],
            eta_cols: vec![1; l],
        });
    }
    // eta_0 = +1 loses nothing: flipping every sign leaves the value alone
    let mut eta = vec![1i8; k];
    let mut partial: Vec<f64> = (0..l).map(|j| (0..k).map(|i| b.get(i, j)).sum()).collect();
    let value_of = |p: &[f64]| p.iter().map(|x| x.abs()).sum::<f64>();
    let mut best = (value_of(&partial), eta.clone());
    for step in 1u64..1 << (k - 1) {
        let i = step.trailing_zeros() as usize + 1;
        eta[i] = -eta[i];
        let f = 2.0 * f64::from(eta[i]);
        for (j, p) in partial.iter_mut().enumerate() {
            *p += f * b.get(i, j);
        }
        let v = value_of(&partial);
        if v > best.0 {
            best = (v, eta.clone());
        }
    }
    let (_, eta_rows) = best;
    let cols: Vec<f64> = (0..l).map(|j| (0..k).map(|i| f64::from(eta_rows[i]) * b.get(i, j)).sum()).collect();
    let eta_cols: Vec<i8> = cols.iter().map(|&x| sign(x)).collect();
    // recompute from scratch so the value matches the returned signs exactly
    let value = cols.iter().map(|x| x.abs()).sum();
    Ok(SignBilinearResult { value, eta_rows, eta_cols })
}

/// `max over nonempty I, J of (|I||J|)^{-1/2} max_eta sum_{I x J} x_ij eta_i eta'_j`
/// for an already realized matrix.
///
/// For fixed `I` and row signs the best `J` of each size takes the largest
/// column sums in absolute value, which avoids enumerating `J`.
pub fn x_quantity(realized: &WeightMatrix) -> Result<f64> {
    let (n, m) = (realized.n_rows(), realized.n_cols());
    if n.max(m) > MAX_X_DIM {
        return Err(Error::SizeCap {
            what: "dimension",
            value: n.max(m),
            cap: MAX_X_DIM,
        });
    }
    let mut best = 0.0f64;
    let mut sums = vec![0.0; m];
    for rows in 1u32..1 << n {
        let members: Vec<usize> = (0..n).filter(|&i| rows >> i & 1 == 1).collect();
        let size_i = members.len() as f64;
        for signs in 0u32..1 << (members.len() - 1) {
            sums.iter_mut().for_each(|s| *s = 0.0);
            for (t, &i) in members.iter().enumerate() {
                let e = if t > 0 && signs >> (t - 1) & 1 == 1 { -1.0 } else { 1.0 };
                for (j, s) in sums.iter_mut().enumerate() {
                    *s += e * realized.get(i, j);
                }
            }
            let mut abs: Vec<f64> = sums.iter().map(|x| x.abs()).collect();
            abs.sort_by(|a, b| b.total_cmp(a));
            let mut acc = 0.0;
            for (l, x) in abs.iter().enumerate() {
                acc += x;
                best = best.max(acc / (size_i * (l + 1) as f64).sqrt());
            }
        }
    }
    Ok(best)
}

/// All vertex sets of size `k` that contain `v` and are connected in the
/// `r`-th distance power of `g`, each sorted, in lexicographic order.
pub fn enumerate_connected(g: &GraphView, v: usize, k: usize, r: usize) -> Result<Vec<Vec<usize>>> {
    if k == 0 {
        return Err(invalid("subset size must be at least 1"));
    }
    if v >= g.n() {
        return Err(invalid(format!("vertex {v} out of range for {} vertices", g.n())));
    }
    let h = if r == 1 { g.clone() } else { power_graph(g, r)? };
    let mut out = vec![];
    let mut set = vec![v];
    let mut closed = vec![false; h.n()];
    closed[v] = true;
    for &w in h.neighbors(v) {
        closed[w] = true;
    }
    let ext: Vec<usize> = h.neighbors(v).to_vec();
    extend(&h, k, &mut set, &mut closed, ext, &mut out)?;
    for s in &mut out {
        s.sort_unstable();
    }
    out.sort();
    Ok(out)
}

/// Each connected superset of `set` is reached once: a vertex leaves the
/// extension pool as soon as it has been tried, and new candidates are only
/// vertices not adjacent to anything chosen before.
fn extend(h: &GraphView, k: usize, set: &mut Vec<usize>, closed: &mut [bool], mut ext: Vec<usize>, out: &mut Vec<Vec<usize>>) -> Result<()> {
    if set.len() == k {
        if out.len() >= MAX_ENUMERATED {
            return Err(Error::SizeCap {
                what: "connected subsets",
                value: out.len() + 1,
                cap: MAX_ENUMERATED,
            });
        }
        out.push(set.clone());
        return Ok(());
    }
    while let Some(w) = ext.pop() {
        let fresh: Vec<usize> = h.neighbors(w).iter().copied().filter(|&u| !closed[u]).collect();
        for &u in &fresh {
            closed[u] = true;
        }
        let mut next = ext.clone();
        next.extend(&fresh);
        set.push(w);
        extend(h, k, set, closed, next, out)?;
        set.pop();
        for &u in &fresh {
            closed[u] = false;
        }
    }
    Ok(())
}

/// Greedy picks from `i_pool`: each round takes the vertex with the most
/// neighbours in `j_pool` not yet covered by earlier picks (lowest index on
/// ties) and stops once that count drops below `threshold`. A pick whose
/// count equals the threshold is kept. Returns the picks and their counts.
pub fn greedy_cover(g: &GraphView, i_pool: &[usize], j_pool: &[usize], threshold: usize) -> Result<(Vec<usize>, Vec<usize>)> {
    if threshold == 0 {
        return Err(invalid("threshold must be at least 1"));
    }
    if let Some(&v) = i_pool.iter().chain(j_pool).find(|&&v| v >= g.n()) {
        return Err(invalid(format!("vertex {v} out of range")));
    }
    let mut open: Vec<bool> = vec![false; g.n()];
    for &j in j_pool {
        open[j] = true;
    }
    let mut left: BTreeSet<usize> = i_pool.iter().copied().collect();
    let (mut picked, mut counts) = (vec![], vec![]);
    loop {
        let best = left
            .iter()
            .map(|&i| (g.neighbors(i).iter().filter(|&&u| open[u]).count(), i))
            .max_by(|a, b| a.0.cmp(&b.0).then(b.1.cmp(&a.1)));
        match best {
            Some((l, i)) if l >= threshold => {
                for &u in g.neighbors(i) {
                    open[u] = false;
                }
                left.remove(&i);
                picked.push(i);
                counts.push(l);
            }
            _ => return Ok((picked, counts)),
        }
    }
}

fn binomial(n: usize, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

fn indicator_norm_by_gram(f: &[(usize, usize)]) -> f64 {
    if f.is_empty() {
        return 0.0;
    }
    let mut rows: Vec<usize> = f.iter().map(|e| e.0).collect();
    let mut cols: Vec<usize> = f.iter().map(|e| e.1).collect();
    rows.sort_unstable();
    rows.dedup();
    cols.sort_unstable();
    cols.dedup();
    let mut m = DMatrix::zeros(rows.len(), cols.len());
    for &(i, j) in f {
        m[(rows.binary_search(&i).unwrap(), cols.binary_search(&j).unwrap())] = 1.0;
    }
    let gram = m.transpose() * &m;
    SymmetricEigen::new(gram).eigenvalues.iter().fold(0.0f64, |a, &x| a.max(x)).sqrt()
}

/// `max ||1_F||` over `F` within `E` with `|F| <= p`. Entries are
/// nonnegative, so only sets of size exactly `min(p, |E|)` are visited.
pub fn subgraph_norm_enum(e: &EdgeSet, p: usize) -> Result<f64> {
    let pairs = e.pairs();
    let size = p.min(pairs.len());
    let count = binomial(pairs.len(), size);
    if count > MAX_ENUMERATED as f64 {
        return Err(Error::SizeCap {
            what: "edge subsets",
            value: count.min(usize::MAX as f64) as usize,
            cap: MAX_ENUMERATED,
        });
    }
    if size == 0 {
        return Ok(0.0);
    }
    let mut idx: Vec<usize> = (0..size).collect();
    let mut best = 0.0f64;
    loop {
        let f: Vec<(usize, usize)> = idx.iter().map(|&k| pairs[k]).collect();
        best = best.max(indicator_norm_by_gram(&f));
        // next combination in lexicographic order
        let Some(pos) = (0..size).rev().find(|&t| idx[t] < pairs.len() - size + t) else {
            return Ok(best);
        };
        idx[pos] += 1;
        for t in pos + 1..size {
            idx[t] = idx[t - 1] + 1;
        }
    }
}
