//! The row-removal sweep on a circulant, with the per-k table.

use radnorm::bounds::{ksweep_term, ModeChoice, BoundConfig, ksweep_with};
use radnorm::families::circulant;

fn main() -> radnorm::Result<()> {
    let mut b = vec![0.0; 16];
    b[1] = 1.0;
    b[2] = 1.0;
    b[15] = 1.0;
    let a = circulant(&b)?.to_matrix();

    let sweep = ksweep_term(&a, 100_000, 0)?;
    println!("sweep term {:.4} ({:?})", sweep.value, sweep.estimator);
    for row in &sweep.table {
        println!("  k {:>2}  p {:.3}  value {:.4}  {:?}  removed {:?}", row.k, row.p, row.value, row.mode, row.removed);
    }

    let cfg = BoundConfig { mode: ModeChoice::Heuristic, seed: 3, ..BoundConfig::default() };
    println!("heuristic sweep term {:.4}", ksweep_with(&a, &cfg)?.value);
    Ok(())
}
