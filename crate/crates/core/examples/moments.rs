//! L_p norms of Rademacher sums: exact, sampled and the two-sided surrogates.

use radnorm::moments::{dual_surrogate, empirical_lp, exact_lp, hitczenko_surrogate};

fn main() -> radnorm::Result<()> {
    let a = [3.0, -1.0, 0.5, 0.5, 0.25, 0.25, 0.1, 0.1, 0.1, 0.1];
    println!("{:>4} {:>9} {:>18} {:>9} {:>9}", "p", "exact", "sampled", "surr", "dual");
    for p in [1.0, 2.0, 3.5, 8.0] {
        let exact = exact_lp(&a, p)?;
        let (est, se) = empirical_lp(&a, p, 20_000, 7)?;
        let surr = hitczenko_surrogate(&a, p)?;
        println!("{p:>4} {exact:>9.4} {est:>9.4} +- {se:<6.4} {:>9.4} {:>9.4}", surr.total, dual_surrogate(&a, p)?);
    }
    Ok(())
}
