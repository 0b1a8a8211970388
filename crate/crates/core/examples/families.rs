//! Generate each graph family and print its predicted scale.

use radnorm::families::{
    block_plus_singletons, circulant, expander_check, large_girth_instance, one_cycle_neighborhood_instance, random_regular,
    union_complete,
};
use radnorm::graph::{girth, is_tangle_free};

fn main() -> radnorm::Result<()> {
    let show = |f: &radnorm::families::FamilyInstance| {
        println!("{:?} {:?}: predicted {:.4} = {}", f.family, f.params, f.predicted, f.formula);
    };
    show(&union_complete(8, 4)?);
    show(&block_plus_singletons(256, 5)?);
    show(&circulant(&[0.0, 1.0, -0.5, 0.0, -0.5, 1.0])?);

    let rr = random_regular(200, 4, 11)?;
    show(&rr);
    let (d, lambda) = expander_check(rr.edges().unwrap())?;
    println!("  degree {d}, second eigenvalue bound {lambda:.4} vs 2 sqrt(d-1) = {:.4}", 2.0 * ((d - 1) as f64).sqrt());

    let lg = large_girth_instance(200, 3, 6, 5)?;
    show(&lg);
    let g = radnorm::GraphView::from_edges(200, &undirected(lg.edges().unwrap()))?;
    println!("  girth {:?}", girth(&g));

    let t = one_cycle_neighborhood_instance(120, 3, 2, 5)?;
    show(&t);
    let g = radnorm::GraphView::from_edges(120, &undirected(t.edges().unwrap()))?;
    println!("  tangle-free at radius 2: {}", is_tangle_free(&g, 2)?);
    Ok(())
}

fn undirected(e: &radnorm::EdgeSet) -> Vec<(usize, usize)> {
    e.pairs().iter().copied().filter(|&(i, j)| i < j).collect()
}
