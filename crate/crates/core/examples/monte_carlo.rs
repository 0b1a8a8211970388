//! Monte Carlo mean norm and moments, with the exact value for comparison.

use radnorm::sampler::{exact_small_norm_expectation, mc_norm, mc_norm_moments, Mode, CSV_HEADER};
use radnorm::WeightMatrix;

fn main() -> radnorm::Result<()> {
    let a = WeightMatrix::ones(2, 2)?;
    println!("exact E||A.eps|| = {:.6}", exact_small_norm_expectation(&a, Mode::RademacherIid)?);

    println!("{CSV_HEADER}");
    for mode in [Mode::RademacherIid, Mode::RademacherSymmetric, Mode::Gaussian] {
        println!("{}", mc_norm(&a, mode, 100_000, 1)?.csv_row("ones_2x2"));
    }

    let est = mc_norm_moments(&WeightMatrix::identity(8)?, &[1.0, 4.0, 16.0], 10_000, 2)?;
    for m in est.p_moments.unwrap_or_default() {
        println!("identity_8 p {:>4}: {:.6} +- {:.2e}", m.p, m.estimate, m.stderr);
    }
    Ok(())
}
