//! The graph G_A of a square matrix and the distance-based machinery around
//! it: power graphs, neighbour sets, girth and tangle-freeness.

use std::collections::VecDeque;

use crate::error::{invalid, Error, Result};
use crate::matrix::{EdgeSet, WeightMatrix};

/// Simple undirected graph on `0..n` with sorted adjacency lists.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GraphView {
    adjacency: Vec<Vec<usize>>,
    max_degree: usize,
}

impl GraphView {
    /// Builds a graph from undirected edges; loops are dropped and duplicate
    /// edges merged.
    pub fn from_edges(n: usize, edges: &[(usize, usize)]) -> Result<Self> {
        let mut adjacency = vec![Vec::new(); n];
        for &(i, j) in edges {
            if i >= n || j >= n {
                return Err(invalid(format!("edge ({i}, {j}) out of range for n = {n}")));
            }
            if i != j {
                adjacency[i].push(j);
                adjacency[j].push(i);
            }
        }
        Ok(Self::from_adjacency(adjacency))
    }

    fn from_adjacency(mut adjacency: Vec<Vec<usize>>) -> Self {
        for list in &mut adjacency {
            list.sort_unstable();
            list.dedup();
        }
        let max_degree = adjacency.iter().map(Vec::len).max().unwrap_or(0);
        GraphView {
            adjacency,
            max_degree,
        }
    }

    pub fn n(&self) -> usize {
        self.adjacency.len()
    }

    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.adjacency[v]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adjacency[v].len()
    }

    /// d_A, the maximal vertex degree.
    pub fn max_degree(&self) -> usize {
        self.max_degree
    }

    pub fn edge_count(&self) -> usize {
        self.adjacency.iter().map(Vec::len).sum::<usize>() / 2
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.adjacency[u].binary_search(&v).is_ok()
    }

    /// Undirected edges `(u, v)` with `u < v`.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::with_capacity(self.edge_count());
        for (u, list) in self.adjacency.iter().enumerate() {
            out.extend(list.iter().filter(|&&v| v > u).map(|&v| (u, v)));
        }
        out
    }

    pub fn is_regular(&self, d: usize) -> bool {
        self.adjacency.iter().all(|l| l.len() == d)
    }

    /// Symmetric {0,1} edge set with both orientations of every edge.
    pub fn to_edge_set(&self) -> EdgeSet {
        EdgeSet::from_undirected(self.n(), &self.edges()).expect("graph indices are in range")
    }

    /// BFS distances from `source`, `None` for unreachable vertices. Stops
    /// expanding past `limit` when given.
    pub fn distances_from(&self, source: usize, limit: Option<usize>) -> Vec<Option<usize>> {
        let mut dist = vec![None; self.n()];
        dist[source] = Some(0);
        let mut queue = VecDeque::from([source]);
        while let Some(u) = queue.pop_front() {
            let du = dist[u].unwrap();
            if limit.is_some_and(|l| du >= l) {
                continue;
            }
            for &w in &self.adjacency[u] {
                if dist[w].is_none() {
                    dist[w] = Some(du + 1);
                    queue.push_back(w);
                }
            }
        }
        dist
    }

    /// Connected components, each sorted, ordered by smallest vertex.
    pub fn components(&self) -> Vec<Vec<usize>> {
        let mut seen = vec![false; self.n()];
        let mut out = Vec::new();
        for s in 0..self.n() {
            if seen[s] {
                continue;
            }
            seen[s] = true;
            let mut comp = vec![s];
            let mut stack = vec![s];
            while let Some(u) = stack.pop() {
                for &w in &self.adjacency[u] {
                    if !seen[w] {
                        seen[w] = true;
                        comp.push(w);
                        stack.push(w);
                    }
                }
            }
            comp.sort_unstable();
            out.push(comp);
        }
        out
    }
}

/// G_A: `i ~ j` iff `i != j` and `a_ij != 0` or `a_ji != 0`.
pub fn derive_graph(a: &WeightMatrix) -> Result<GraphView> {
    if !a.is_square() {
        return Err(Error::Shape(format!(
            "graph of a {}x{} matrix is undefined",
            a.n_rows(),
            a.n_cols()
        )));
    }
    let n = a.n_rows();
    let mut adjacency = vec![Vec::new(); n];
    for (i, j) in a.support() {
        if i != j {
            adjacency[i].push(j);
            adjacency[j].push(i);
        }
    }
    Ok(GraphView::from_adjacency(adjacency))
}

/// G_r: vertices at graph distance 1..=r become adjacent.
pub fn power_graph(g: &GraphView, r: usize) -> Result<GraphView> {
    if r == 0 {
        return Err(invalid("power graph radius must be at least 1"));
    }
    if r == 1 {
        return Ok(g.clone());
    }
    let adjacency = (0..g.n())
        .map(|v| {
            g.distances_from(v, Some(r))
                .iter()
                .enumerate()
                .filter(|&(w, d)| w != v && d.is_some_and(|d| d <= r))
                .map(|(w, _)| w)
                .collect()
        })
        .collect();
    Ok(GraphView::from_adjacency(adjacency))
}

/// Returns `(I', I'')`: the neighbours of `I` and the neighbours of `I'`.
pub fn neighborhood_sets(g: &GraphView, set: &[usize]) -> Result<(Vec<usize>, Vec<usize>)> {
    if let Some(&v) = set.iter().find(|&&v| v >= g.n()) {
        return Err(invalid(format!("vertex {v} out of range for n = {}", g.n())));
    }
    let expand = |from: &[usize]| {
        let mut mark = vec![false; g.n()];
        for &v in from {
            for &w in g.neighbors(v) {
                mark[w] = true;
            }
        }
        mark.iter()
            .enumerate()
            .filter_map(|(w, &m)| m.then_some(w))
            .collect::<Vec<_>>()
    };
    let first = expand(set);
    let second = expand(&first);
    Ok((first, second))
}

/// Length of a shortest cycle; `None` for forests.
pub fn girth(g: &GraphView) -> Option<usize> {
    let n = g.n();
    let mut best: Option<usize> = None;
    let mut dist = vec![usize::MAX; n];
    let mut parent = vec![usize::MAX; n];
    for root in 0..n {
        dist.iter_mut().for_each(|d| *d = usize::MAX);
        dist[root] = 0;
        parent[root] = usize::MAX;
        let mut queue = VecDeque::from([root]);
        'bfs: while let Some(u) = queue.pop_front() {
            // every cycle found from here on is at least 2*dist[u] long
            if best.is_some_and(|b| 2 * dist[u] >= b) {
                break 'bfs;
            }
            for &w in g.neighbors(u) {
                if dist[w] == usize::MAX {
                    dist[w] = dist[u] + 1;
                    parent[w] = u;
                    queue.push_back(w);
                } else if parent[u] != w {
                    let len = dist[u] + dist[w] + 1;
                    best = Some(best.map_or(len, |b| b.min(len)));
                }
            }
        }
    }
    best
}

/// Cycle-space dimension |E| - |V| + #components of the subgraph induced on
/// `vertices`.
pub fn cycle_rank(g: &GraphView, vertices: &[usize]) -> usize {
    let mut local = vec![usize::MAX; g.n()];
    for (k, &v) in vertices.iter().enumerate() {
        local[v] = k;
    }
    let mut dsu = DisjointSets::new(vertices.len());
    let mut edges = 0;
    for (k, &v) in vertices.iter().enumerate() {
        for &w in g.neighbors(v) {
            let lw = local[w];
            if lw != usize::MAX && lw > k {
                edges += 1;
                dsu.union(k, lw);
            }
        }
    }
    edges + dsu.count - vertices.len()
}

/// True iff the ball of radius `r` around every vertex induces a subgraph
/// with at most one independent cycle.
pub fn is_tangle_free(g: &GraphView, r: usize) -> Result<bool> {
    if r == 0 {
        return Err(invalid("tangle-free radius must be at least 1"));
    }
    for v in 0..g.n() {
        let ball: Vec<usize> = g
            .distances_from(v, Some(r))
            .iter()
            .enumerate()
            .filter_map(|(w, d)| d.is_some_and(|d| d <= r).then_some(w))
            .collect();
        if cycle_rank(g, &ball) > 1 {
            return Ok(false);
        }
    }
    Ok(true)
}

pub(crate) struct DisjointSets {
    parent: Vec<usize>,
    pub(crate) count: usize,
}

impl DisjointSets {
    pub(crate) fn new(n: usize) -> Self {
        DisjointSets {
            parent: (0..n).collect(),
            count: n,
        }
    }

    pub(crate) fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    pub(crate) fn union(&mut self, a: usize, b: usize) -> bool {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        self.parent[ra.max(rb)] = ra.min(rb);
        self.count -= 1;
        true
    }
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;

    pub(crate) fn cycle(n: usize) -> GraphView {
        let edges: Vec<_> = (0..n).map(|i| (i, (i + 1) % n)).collect();
        GraphView::from_edges(n, &edges).unwrap()
    }

    pub(crate) fn path(n: usize) -> GraphView {
        let edges: Vec<_> = (1..n).map(|i| (i - 1, i)).collect();
        GraphView::from_edges(n, &edges).unwrap()
    }

    pub(crate) fn complete(n: usize) -> GraphView {
        let mut edges = Vec::new();
        for i in 0..n {
            for j in i + 1..n {
                edges.push((i, j));
            }
        }
        GraphView::from_edges(n, &edges).unwrap()
    }

    fn bowtie() -> GraphView {
        GraphView::from_edges(5, &[(0, 1), (1, 2), (2, 0), (0, 3), (3, 4), (4, 0)]).unwrap()
    }

    #[test]
    fn derive_graph_examples() {
        let k3 = WeightMatrix::from_fn(3, 3, |i, j| if i != j { 1.0 } else { 0.0 }).unwrap();
        let g = derive_graph(&k3).unwrap();
        assert!(g.is_regular(2));
        assert_eq!(g.max_degree(), 2);

        let g = derive_graph(&WeightMatrix::zeros(4, 4).unwrap()).unwrap();
        assert_eq!(g.max_degree(), 0);
        assert_eq!(g.edge_count(), 0);

        let e = EdgeSet::new(4, vec![(0, 1), (1, 0), (2, 3), (3, 2)]).unwrap();
        let g = derive_graph(&e.indicator()).unwrap();
        assert_eq!(g.max_degree(), 1);
        assert_eq!(g.edges(), vec![(0, 1), (2, 3)]);

        assert!(derive_graph(&WeightMatrix::zeros(2, 3).unwrap()).is_err());
    }

    #[test]
    fn derive_graph_symmetrizes_and_ignores_diagonal() {
        let e = EdgeSet::new(3, vec![(0, 0), (0, 2)]).unwrap();
        let g = derive_graph(&e.indicator()).unwrap();
        assert_eq!(g.neighbors(2), &[0]);
        assert_eq!(g.neighbors(0), &[2]);
    }

    #[test]
    fn power_graph_examples() {
        let p = power_graph(&path(3), 2).unwrap();
        assert_eq!(p.edges(), vec![(0, 1), (0, 2), (1, 2)]);
        assert_eq!(power_graph(&bowtie(), 1).unwrap(), bowtie());
        assert!(power_graph(&cycle(6), 2).unwrap().is_regular(4));
        assert!(power_graph(&path(3), 0).is_err());
    }

    #[test]
    fn neighborhood_examples() {
        let (a, b) = neighborhood_sets(&path(3), &[0]).unwrap();
        assert_eq!((a, b), (vec![1], vec![0, 2]));
        let g = GraphView::from_edges(3, &[(0, 1)]).unwrap();
        let (a, b) = neighborhood_sets(&g, &[2]).unwrap();
        assert!(a.is_empty() && b.is_empty());
        let (a, b) = neighborhood_sets(&complete(4), &[0]).unwrap();
        assert_eq!((a, b), (vec![1, 2, 3], vec![0, 1, 2, 3]));
        assert!(neighborhood_sets(&path(3), &[3]).is_err());
    }

    #[test]
    fn girth_examples() {
        assert_eq!(girth(&cycle(5)), Some(5));
        assert_eq!(girth(&path(6)), None);
        assert_eq!(girth(&complete(4)), Some(3));
        assert_eq!(girth(&cycle(10)), Some(10));
    }

    #[test]
    fn tangle_free_examples() {
        assert!(is_tangle_free(&cycle(5), 2).unwrap());
        assert!(!is_tangle_free(&bowtie(), 1).unwrap());
        for r in 1..5 {
            assert!(is_tangle_free(&path(7), r).unwrap());
        }
        assert!(is_tangle_free(&path(3), 0).is_err());
    }

    /// All simple cycles by DFS from their smallest vertex; the shortest one
    /// is the girth.
    fn girth_by_cycle_enumeration(g: &GraphView) -> Option<usize> {
        fn dfs(g: &GraphView, start: usize, u: usize, len: usize, on: &mut [bool], best: &mut Option<usize>) {
            for &w in g.neighbors(u) {
                if w == start && len >= 3 {
                    *best = Some(best.map_or(len, |b| b.min(len)));
                } else if w > start && !on[w] {
                    on[w] = true;
                    dfs(g, start, w, len + 1, on, best);
                    on[w] = false;
                }
            }
        }
        let mut best = None;
        let mut on = vec![false; g.n()];
        for s in 0..g.n() {
            on[s] = true;
            dfs(g, s, s, 1, &mut on, &mut best);
            on[s] = false;
        }
        best
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        fn arb_graph(max_n: usize) -> impl Strategy<Value = GraphView> {
            (1..=max_n).prop_flat_map(|n| {
                proptest::collection::vec(proptest::bool::weighted(0.35), n * (n - 1) / 2).prop_map(
                    move |bits| {
                        let mut edges = Vec::new();
                        let mut k = 0;
                        for i in 0..n {
                            for j in i + 1..n {
                                if bits[k] {
                                    edges.push((i, j));
                                }
                                k += 1;
                            }
                        }
                        GraphView::from_edges(n, &edges).unwrap()
                    },
                )
            })
        }

        proptest! {
            #[test]
            fn girth_matches_cycle_enumeration(g in arb_graph(8)) {
                prop_assert_eq!(girth(&g), girth_by_cycle_enumeration(&g));
            }

            #[test]
            fn neighborhood_size_bounds(g in arb_graph(12), picks in proptest::collection::vec(0usize..12, 0..6)) {
                let set: Vec<usize> = picks.into_iter().filter(|&v| v < g.n()).collect::<std::collections::BTreeSet<_>>().into_iter().collect();
                let (first, second) = neighborhood_sets(&g, &set).unwrap();
                let d = g.max_degree();
                prop_assert!(first.len() <= d * set.len());
                prop_assert!(second.len() <= d * d * set.len());
                for &v in &set {
                    if g.degree(v) > 0 {
                        prop_assert!(second.contains(&v));
                    }
                }
            }

            #[test]
            fn power_graph_matches_bfs(g in arb_graph(10), r in 1usize..4) {
                let p = power_graph(&g, r).unwrap();
                for u in 0..g.n() {
                    let dist = g.distances_from(u, None);
                    for v in 0..g.n() {
                        let expect = u != v && dist[v].is_some_and(|d| d <= r);
                        prop_assert_eq!(p.has_edge(u, v), expect);
                    }
                }
                let d = g.max_degree();
                prop_assert!(p.max_degree() <= d.pow(r as u32));
            }

            #[test]
            fn derive_graph_reproduces_symmetrized_support(n in 1usize..7, raw in proptest::collection::vec((0usize..7, 0usize..7), 0..15)) {
                let pairs: Vec<_> = raw.into_iter().filter(|&(i, j)| i < n && j < n).collect();
                let e = EdgeSet::new(n, pairs).unwrap();
                let g = derive_graph(&e.indicator()).unwrap();
                for i in 0..n {
                    for j in 0..n {
                        let expect = i != j && (e.contains(i, j) || e.contains(j, i));
                        prop_assert_eq!(g.has_edge(i, j), expect);
                    }
                }
            }
        }
    }
}
