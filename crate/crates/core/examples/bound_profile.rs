//! Every bound term for a small graph, as JSON.

use radnorm::bounds::{bound_profile, r_exact_01, BoundConfig, DEFAULT_BUDGET_CAP};
use radnorm::EdgeSet;

fn main() -> radnorm::Result<()> {
    // the 6-cycle plus one chord
    let mut pairs = vec![];
    for i in 0..6 {
        pairs.push((i, (i + 1) % 6));
        pairs.push(((i + 1) % 6, i));
    }
    pairs.extend([(0, 3), (3, 0)]);
    let e = EdgeSet::new(6, pairs)?;

    let r = r_exact_01(&e, 4.0, DEFAULT_BUDGET_CAP)?;
    println!("R(4) in [{}, {}], exact: {}", r.lower, r.upper, r.exact);

    let profile = bound_profile(&e.indicator(), &BoundConfig::default())?;
    println!("{}", serde_json::to_string_pretty(&profile).unwrap());
    Ok(())
}
