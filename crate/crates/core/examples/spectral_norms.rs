//! Spectral norm of a weight matrix by the available methods.

use radnorm::spectral::{decomposition_norm, max_row_col_l2, sparse_norm, spectral_norm, trace_power_norm, BlockPlan, DEFAULT_TOL};
use radnorm::WeightMatrix;

fn main() -> radnorm::Result<()> {
    // two disjoint blocks: a 2x2 all-ones block and a weighted 3-cycle
    let a = WeightMatrix::from_rows(&[
        vec![1.0, 1.0, 0.0, 0.0, 0.0],
        vec![1.0, 1.0, 0.0, 0.0, 0.0],
        vec![0.0, 0.0, 0.0, 0.5, 0.5],
        vec![0.0, 0.0, 0.5, 0.0, 0.5],
        vec![0.0, 0.0, 0.5, 0.5, 0.0],
    ])?;
    let r = spectral_norm(&a, DEFAULT_TOL)?;
    println!("norm {:.12} via {:?}, {} iterations", r.value, r.method, r.iterations);
    println!("svd  {:.12}", decomposition_norm(&a.to_dmatrix()));
    println!("trace power k=20 {:.6}", trace_power_norm(&a, 20)?);
    let (row, col) = max_row_col_l2(&a);
    println!("max row l2 {row:.4}, max col l2 {col:.4}");
    for b in BlockPlan::new(&a).blocks() {
        println!("block rows {:?} cols {:?}", b.rows, b.cols);
    }

    let entries: Vec<(usize, usize, f64)> = a.support().into_iter().map(|(i, j)| (i, j, a.get(i, j))).collect();
    println!("lanczos {:.12}", sparse_norm(5, 5, &entries, DEFAULT_TOL)?.value);
    Ok(())
}
