//! Generators for the example graph families, each tagged with the norm
//! scale it is expected to have. Every generator checks its own output
//! against the family's defining property before returning it.

use std::collections::BTreeMap;

use nalgebra::SymmetricEigen;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::error::{invalid, Error, Result};
use crate::graph::{girth, is_tangle_free, GraphView};
use crate::log_clamped;
use crate::matrix::{EdgeSet, MatrixInput, WeightMatrix, MAX_DIM};
use crate::spectral::{max_row_col_l2, spectral_norm, DEFAULT_TOL};

pub const REGULAR_RESTARTS: usize = 1_000;
pub const GIRTH_ATTEMPTS: usize = 20;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Family {
    UnionComplete,
    RandomRegular,
    LargeGirth,
    OneCycleNeighborhood,
    BlockPlusSingletons,
    Circulant,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FamilyInstance {
    pub family: Family,
    pub params: BTreeMap<String, Value>,
    pub seed: Option<u64>,
    pub predicted: f64,
    pub formula: String,
    /// Further named scales, e.g. the size of a bound that is not sharp here.
    pub scales: BTreeMap<String, f64>,
    pub matrix: MatrixInput,
}

impl FamilyInstance {
    fn new(family: Family, params: Value, seed: Option<u64>, predicted: f64, formula: &str, matrix: MatrixInput) -> Self {
        let params = match params {
            Value::Object(map) => map.into_iter().collect(),
            _ => BTreeMap::new(),
        };
        FamilyInstance {
            family,
            params,
            seed,
            predicted,
            formula: formula.into(),
            scales: BTreeMap::new(),
            matrix,
        }
    }

    pub fn edges(&self) -> Option<&EdgeSet> {
        match &self.matrix {
            MatrixInput::Edges(e) => Some(e),
            MatrixInput::Weights(_) => None,
        }
    }

    pub fn to_matrix(&self) -> WeightMatrix {
        self.matrix.clone().into_matrix()
    }

    pub fn to_json(&self) -> Value {
        json!({
            "family": self.family,
            "params": self.params,
            "seed": self.seed,
            "predicted": self.predicted,
            "formula": self.formula,
            "scales": self.scales,
            "matrix": self.matrix.to_json(),
        })
    }
}

fn graph_of(e: &EdgeSet) -> Result<GraphView> {
    GraphView::from_edges(e.n(), e.pairs())
}

fn check(ok: bool, what: &str) -> Result<()> {
    if ok {
        Ok(())
    } else {
        Err(Error::Stalled(format!("generated instance fails its {what} check")))
    }
}

fn cap_size(n: usize) -> Result<()> {
    if n > MAX_DIM {
        return Err(Error::SizeCap {
            what: "n",
            value: n,
            cap: MAX_DIM,
        });
    }
    Ok(())
}

/// `m` disjoint copies of `K_{d+1}` with zero diagonal.
pub fn union_complete(m: usize, d: usize) -> Result<FamilyInstance> {
    if m == 0 || d == 0 {
        return Err(invalid("union_complete needs m >= 1 and d >= 1"));
    }
    let n = m.checked_mul(d + 1).ok_or_else(|| invalid("size overflow"))?;
    cap_size(n)?;
    let mut edges = vec![];
    for b in 0..m {
        let base = b * (d + 1);
        for i in 0..=d {
            for j in (i + 1)..=d {
                edges.push((base + i, base + j));
            }
        }
    }
    let e = EdgeSet::from_undirected(n, &edges)?;
    let g = graph_of(&e)?;
    check(g.is_regular(d) && g.components().len() == m, "block structure")?;
    let predicted = (d as f64).sqrt() + (d as f64).min(log_clamped(n as f64).sqrt());
    Ok(FamilyInstance::new(
        Family::UnionComplete,
        json!({"m": m, "d": d, "n": n}),
        None,
        predicted,
        "sqrt(d) + min(d, sqrt(Log n))",
        MatrixInput::Edges(e),
    ))
}

/// Pairing model, pairing one point at a time: the partner is uniform over
/// the remaining points that keep the graph simple. An attempt that gets
/// stuck is thrown away whole.
pub fn random_regular(n: usize, d: usize, seed: u64) -> Result<FamilyInstance> {
    if d >= n || (n * d) % 2 == 1 {
        return Err(invalid(format!("no simple {d}-regular graph on {n} vertices")));
    }
    cap_size(n)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut points: Vec<usize> = (0..n).flat_map(|v| std::iter::repeat_n(v, d)).collect();
    let mut adj: Vec<Vec<usize>> = vec![Vec::with_capacity(d); n];
    let len = points.len();
    'attempt: for _ in 0..REGULAR_RESTARTS {
        adj.iter_mut().for_each(Vec::clear);
        let mut i = 0;
        while i < len {
            let j = rng.random_range(i..len);
            points.swap(i, j);
            let u = points[i];
            let ok = |v: usize, adj: &[Vec<usize>]| v != u && !adj[u].contains(&v);
            let mut pick = None;
            for _ in 0..32 {
                let j = rng.random_range(i + 1..len);
                if ok(points[j], &adj) {
                    pick = Some(j);
                    break;
                }
            }
            let j = match pick {
                Some(j) => j,
                None => {
                    let valid: Vec<usize> = (i + 1..len).filter(|&j| ok(points[j], &adj)).collect();
                    if valid.is_empty() {
                        continue 'attempt;
                    }
                    valid[rng.random_range(0..valid.len())]
                }
            };
            points.swap(i + 1, j);
            let v = points[i + 1];
            adj[u].push(v);
            adj[v].push(u);
            i += 2;
        }
        let e = EdgeSet::from_undirected(n, &edges_of(&adj))?;
        check(graph_of(&e)?.is_regular(d), "regularity")?;
        return Ok(FamilyInstance::new(
            Family::RandomRegular,
            json!({"n": n, "d": d}),
            Some(seed),
            (d as f64).sqrt(),
            "sqrt(d)",
            MatrixInput::Edges(e),
        ));
    }
    Err(Error::Stalled(format!("pairing got stuck in all {REGULAR_RESTARTS} attempts")))
}

/// Fewest vertices a graph of minimum degree `d` and girth `g` can have.
pub fn moore_bound(d: usize, g: usize) -> usize {
    if d <= 1 || g <= 2 {
        return d + 1;
    }
    let r = g / 2;
    let geometric = |terms: usize| (0..terms).map(|i| (d - 1).saturating_pow(i as u32)).fold(0usize, usize::saturating_add);
    if g % 2 == 1 {
        1usize.saturating_add(d.saturating_mul(geometric(r)))
    } else {
        2usize.saturating_mul(geometric(r))
    }
}

/// Vertices within distance `limit` of `src`.
fn near(adj: &[Vec<usize>], src: usize, limit: usize) -> Vec<bool> {
    let mut seen = vec![false; adj.len()];
    seen[src] = true;
    let mut frontier = vec![src];
    for _ in 0..limit {
        let mut next = vec![];
        for &u in &frontier {
            for &w in &adj[u] {
                if !seen[w] {
                    seen[w] = true;
                    next.push(w);
                }
            }
        }
        frontier = next;
    }
    seen
}

/// Random insertion of edges between unsaturated vertices, accepting an edge
/// only when `accept` agrees. A vertex with no acceptable partner is retired
/// for good, since later insertions only shrink its options.
fn grow(n: usize, d: usize, rng: &mut ChaCha8Rng, mut partners: impl FnMut(&[Vec<usize>], usize) -> Vec<usize>) -> Vec<Vec<usize>> {
    let mut adj: Vec<Vec<usize>> = vec![vec![]; n];
    let mut live: Vec<usize> = (0..n).filter(|_| d > 0).collect();
    while !live.is_empty() {
        let k = rng.random_range(0..live.len());
        let u = live[k];
        let cands: Vec<usize> = partners(&adj, u).into_iter().filter(|&v| v != u && adj[v].len() < d && !adj[u].contains(&v)).collect();
        if cands.is_empty() {
            live.swap_remove(k);
            continue;
        }
        let v = cands[rng.random_range(0..cands.len())];
        adj[u].push(v);
        adj[v].push(u);
        live.retain(|&w| adj[w].len() < d);
    }
    adj
}

fn edges_of(adj: &[Vec<usize>]) -> Vec<(usize, usize)> {
    (0..adj.len()).flat_map(|u| adj[u].iter().filter(move |&&v| u < v).map(move |&v| (u, v))).collect()
}

/// Max-degree-`d` graph with girth at least `g_target`, built by random
/// insertion of edges whose endpoints are at distance `>= g_target - 1`.
/// Attempts that leave some vertex two or more below degree `d` are retried.
pub fn large_girth_instance(n: usize, d: usize, g_target: usize, seed: u64) -> Result<FamilyInstance> {
    if d == 0 || d >= n {
        return Err(invalid("large_girth needs 1 <= d < n"));
    }
    if g_target < 3 {
        return Err(invalid("girth target must be at least 3"));
    }
    cap_size(n)?;
    let need = moore_bound(d, g_target);
    if need > n {
        return Err(invalid(format!("girth {g_target} with degree {d} needs at least {need} vertices, got {n}")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..GIRTH_ATTEMPTS {
        let adj = grow(n, d, &mut rng, |adj, u| {
            let close = near(adj, u, g_target - 2);
            (0..n).filter(|&v| !close[v]).collect()
        });
        if adj.iter().any(|a| a.len() + 1 < d) {
            continue;
        }
        let e = EdgeSet::from_undirected(n, &edges_of(&adj))?;
        let g = graph_of(&e)?;
        check(g.max_degree() <= d && girth(&g).is_none_or(|x| x >= g_target), "girth")?;
        return Ok(FamilyInstance::new(
            Family::LargeGirth,
            json!({"n": n, "d": d, "g_target": g_target}),
            Some(seed),
            (d as f64).sqrt(),
            "sqrt(d)",
            MatrixInput::Edges(e),
        ));
    }
    Err(Error::Stalled(format!("no near-regular girth-{g_target} graph in {GIRTH_ATTEMPTS} attempts")))
}

/// Cycle rank of the radius-`r` ball around `v`.
fn ball_rank(adj: &[Vec<usize>], v: usize, r: usize) -> usize {
    let inside = near(adj, v, r);
    let verts = inside.iter().filter(|&&x| x).count();
    let edges: usize = (0..adj.len()).filter(|&u| inside[u]).map(|u| adj[u].iter().filter(|&&w| inside[w] && u < w).count()).sum();
    // the ball is connected
    edges + 1 - verts
}

/// Max-degree-`d` graph in which every radius-`r` ball holds at most one
/// cycle. Edges are inserted at random and kept only if every ball they can
/// touch stays within that limit.
pub fn one_cycle_neighborhood_instance(n: usize, d: usize, r: usize, seed: u64) -> Result<FamilyInstance> {
    if d == 0 || d >= n {
        return Err(invalid("one_cycle_neighborhood needs 1 <= d < n"));
    }
    if r == 0 {
        return Err(invalid("radius must be at least 1"));
    }
    cap_size(n)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let tries = 24;
    let adj = grow(n, d, &mut rng.clone(), |adj, u| {
        let mut ok = vec![];
        let pool: Vec<usize> = (0..n).filter(|&v| v != u && adj[v].len() < d && !adj[u].contains(&v)).collect();
        for _ in 0..tries.min(pool.len()) {
            let v = pool[rng.random_range(0..pool.len())];
            let mut trial = adj.to_vec();
            trial[u].push(v);
            trial[v].push(u);
            let around_u = near(&trial, u, r);
            let around_v = near(&trial, v, r);
            let fine = (0..n).filter(|&w| around_u[w] || around_v[w]).all(|w| ball_rank(&trial, w, r) <= 1);
            if fine {
                ok.push(v);
                break;
            }
        }
        ok
    });
    let e = EdgeSet::from_undirected(n, &edges_of(&adj))?;
    let g = graph_of(&e)?;
    check(g.max_degree() <= d && is_tangle_free(&g, r)?, "tangle-free")?;
    Ok(FamilyInstance::new(
        Family::OneCycleNeighborhood,
        json!({"n": n, "d": d, "r": r}),
        Some(seed),
        (d as f64).sqrt(),
        "sqrt(d)",
        MatrixInput::Edges(e),
    ))
}

/// `(d, lambda)` for a `d`-regular graph, where `lambda` is the largest
/// eigenvalue modulus once one copy of `d` is set aside.
pub fn expander_check(e: &EdgeSet) -> Result<(usize, f64)> {
    let n = e.n();
    if e.pairs().iter().any(|&(i, j)| i == j || !e.contains(j, i)) {
        return Err(invalid("expander check needs a symmetric, loop-free edge set"));
    }
    let g = graph_of(e)?;
    let d = g.degree(0);
    if !g.is_regular(d) {
        return Err(invalid("expander check needs a regular graph"));
    }
    if n <= 1 {
        return Ok((d, 0.0));
    }
    // the all-ones vector is an eigenvector for d, so deflating it leaves
    // the rest of the spectrum in place
    let shift = d as f64 / n as f64;
    let a = WeightMatrix::from_fn(n, n, |i, j| if e.contains(i, j) { 1.0 } else { 0.0 } - shift)?;
    let lambda = if n <= 2048 {
        SymmetricEigen::new(a.to_dmatrix()).eigenvalues.iter().fold(0.0f64, |m, x| m.max(x.abs()))
    } else {
        spectral_norm(&a, DEFAULT_TOL)?.value
    };
    Ok((d, lambda))
}

/// One `d x d` block of ones plus the diagonal singletons `(i, i)`, `i > d`.
pub fn block_plus_singletons(n: usize, d: usize) -> Result<FamilyInstance> {
    if d == 0 || d > n {
        return Err(invalid("block_plus_singletons needs 1 <= d <= n"));
    }
    cap_size(n)?;
    let mut pairs: Vec<(usize, usize)> = (0..d).flat_map(|i| (0..d).map(move |j| (i, j))).collect();
    pairs.extend((d..n).map(|i| (i, i)));
    let e = EdgeSet::new(n, pairs)?;
    check(e.len() == d * d + n - d, "block structure")?;
    let sd = (d as f64).sqrt();
    let mut inst = FamilyInstance::new(
        Family::BlockPlusSingletons,
        json!({"n": n, "d": d}),
        None,
        sd,
        "sqrt(d)",
        MatrixInput::Edges(e),
    );
    inst.scales.insert("log_n_bound_scale".into(), sd + (d as f64).min(log_clamped(n as f64).sqrt()));
    Ok(inst)
}

/// `a_ij = b_{(i - j) mod n}`.
pub fn circulant(b: &[f64]) -> Result<FamilyInstance> {
    let n = b.len();
    if n == 0 {
        return Err(invalid("circulant needs at least one coefficient"));
    }
    cap_size(n)?;
    let a = WeightMatrix::from_fn(n, n, |i, j| b[(i + n - j) % n])?;
    let norm = b.iter().map(|x| x * x).sum::<f64>().sqrt();
    let (r, c) = max_row_col_l2(&a);
    check((r - norm).abs() <= 1e-12 * norm.max(1.0) && (c - norm).abs() <= 1e-12 * norm.max(1.0), "row/column norm")?;
    Ok(FamilyInstance::new(
        Family::Circulant,
        json!({"n": n, "b": b}),
        None,
        norm,
        "||b||_2",
        MatrixInput::Weights(a),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::tests::{complete, cycle};

    fn graph(inst: &FamilyInstance) -> GraphView {
        graph_of(inst.edges().unwrap()).unwrap()
    }

    #[test]
    fn union_complete_examples() {
        let i = union_complete(2, 1).unwrap();
        assert_eq!(i.edges().unwrap().pairs(), &[(0, 1), (1, 0), (2, 3), (3, 2)]);
        assert_eq!(union_complete(1, 2).unwrap().edges().unwrap(), &complete(3).to_edge_set());
        let g = graph(&union_complete(3, 3).unwrap());
        assert_eq!(g.n(), 12);
        assert!(g.is_regular(3));
        let i = union_complete(4, 3).unwrap();
        assert!((i.predicted - (3f64.sqrt() + 3f64.min(16f64.ln().sqrt()))).abs() < 1e-15);
        assert!(matches!(union_complete(5000, 3), Err(Error::SizeCap { .. })));
    }

    #[test]
    fn random_regular_examples() {
        assert_eq!(random_regular(4, 3, 1).unwrap().edges().unwrap(), &complete(4).to_edge_set());
        for seed in 0..5 {
            let g = graph(&random_regular(6, 2, seed).unwrap());
            // 2-regular means a union of cycles covering every vertex
            assert!(g.is_regular(2));
            for comp in g.components() {
                assert!(comp.len() >= 3);
            }
        }
        assert!(graph(&random_regular(100, 3, 42).unwrap()).is_regular(3));
        assert!(random_regular(5, 3, 0).is_err());
        assert_eq!(random_regular(50, 3, 9).unwrap(), random_regular(50, 3, 9).unwrap());
    }

    #[test]
    fn girth_examples() {
        assert_eq!(moore_bound(4, 6), 26);
        assert_eq!(moore_bound(3, 5), 10);
        assert_eq!(moore_bound(2, 10), 10);
        // with n equal to the Moore bound the only option is a 10-cycle
        let c10 = graph(&large_girth_instance(10, 2, 10, 3).unwrap());
        assert!(c10.is_regular(2) && c10.components().len() == 1);
        assert_eq!(girth(&c10), girth(&cycle(10)));
        let g = graph(&large_girth_instance(30, 3, 5, 7).unwrap());
        assert!(girth(&g).unwrap() >= 5 && g.max_degree() <= 3);
        assert!(large_girth_instance(5, 4, 6, 0).is_err());
    }

    #[test]
    fn tangle_free_generator() {
        for seed in 0..3 {
            let inst = one_cycle_neighborhood_instance(40, 3, 2, seed).unwrap();
            let g = graph(&inst);
            assert!(is_tangle_free(&g, 2).unwrap());
            assert!(g.max_degree() <= 3);
        }
    }

    #[test]
    fn expander_examples() {
        let (d, l) = expander_check(&complete(4).to_edge_set()).unwrap();
        assert_eq!(d, 3);
        assert!((l - 1.0).abs() < 1e-12);
        let (d, l) = expander_check(&cycle(6).to_edge_set()).unwrap();
        assert_eq!(d, 2);
        assert!((l - 2.0).abs() < 1e-12);
        let two_k2 = EdgeSet::from_undirected(4, &[(0, 1), (2, 3)]).unwrap();
        let (d, l) = expander_check(&two_k2).unwrap();
        assert_eq!(d, 1);
        assert!((l - 1.0).abs() < 1e-12);
        for d in 1..=8 {
            let (dd, l) = expander_check(&complete(d + 1).to_edge_set()).unwrap();
            assert_eq!(dd, d);
            assert!((l - 1.0).abs() < 1e-10);
        }
        let path = EdgeSet::from_undirected(3, &[(0, 1), (1, 2)]).unwrap();
        assert!(expander_check(&path).is_err());
    }

    #[test]
    fn block_examples() {
        let i = block_plus_singletons(3, 1).unwrap();
        assert_eq!(i.edges().unwrap().pairs(), &[(0, 0), (1, 1), (2, 2)]);
        let i = block_plus_singletons(5, 2).unwrap();
        assert_eq!(i.edges().unwrap().pairs(), &[(0, 0), (0, 1), (1, 0), (1, 1), (2, 2), (3, 3), (4, 4)]);
        let i = block_plus_singletons(4, 4).unwrap();
        assert_eq!(i.edges().unwrap().len(), 16);
        assert!(block_plus_singletons(3, 4).is_err());
    }

    #[test]
    fn circulant_examples() {
        let mut b = vec![0.0; 6];
        b[1] = 1.0;
        let a = circulant(&b).unwrap().to_matrix();
        for i in 0..6 {
            assert_eq!(a.row(i).iter().sum::<f64>(), 1.0);
            assert_eq!(a.get(i, (i + 5) % 6), 1.0);
        }
        assert!(circulant(&[0.0; 4]).unwrap().to_matrix().is_zero());
        let a = circulant(&[0.0, 1.0, 1.0, 0.0, 0.0]).unwrap().to_matrix();
        let (r, c) = max_row_col_l2(&a);
        assert!((r - 2f64.sqrt()).abs() < 1e-15 && (c - 2f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn envelope_round_trips_through_the_parser() {
        let inst = union_complete(2, 2).unwrap();
        let text = inst.to_json().to_string();
        let back = crate::matrix::parse_input(&text).unwrap();
        assert_eq!(back, inst.matrix);
    }
}
