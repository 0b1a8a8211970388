//! Brute-force oracles on tiny inputs.

use radnorm::graph::derive_graph;
use radnorm::oracles::{enumerate_connected, greedy_cover, sign_bilinear_max, subgraph_norm_enum, x_quantity};
use radnorm::{EdgeSet, WeightMatrix};

fn main() -> radnorm::Result<()> {
    let b = WeightMatrix::from_rows(&[vec![1.0, -2.0, 0.5], vec![0.0, 1.0, 1.0], vec![3.0, 0.0, -1.0]])?;
    let s = sign_bilinear_max(&b)?;
    println!("max sign bilinear {} at rows {:?} cols {:?}", s.value, s.eta_rows, s.eta_cols);
    println!("X = {:.4}", x_quantity(&b)?);

    let cycle: Vec<(usize, usize)> = (0..6).flat_map(|i| [(i, (i + 1) % 6), ((i + 1) % 6, i)]).collect();
    let e = EdgeSet::new(6, cycle)?;
    let g = derive_graph(&e.indicator())?;
    for k in 1..=4 {
        println!("connected {k}-sets through 0: {}", enumerate_connected(&g, 0, k, 1)?.len());
    }
    let all: Vec<usize> = (0..6).collect();
    println!("greedy cover (threshold 2): {:?}", greedy_cover(&g, &all, &all, 2)?);
    for p in 1..=4 {
        println!("best norm with {p} edges: {:.4}", subgraph_norm_enum(&e, p)?);
    }
    Ok(())
}
