//! Run one verification scenario with a small sample count.
//!
//! `cargo run --release --example scenario -- block_counterexample 500`

use radnorm::report::{run_scenario, Scenario, VerifyOptions};

fn main() -> radnorm::Result<()> {
    let mut args = std::env::args().skip(1);
    let scenario: Scenario = args.next().as_deref().unwrap_or("circulant_chain").parse()?;
    let samples = args.next().and_then(|s| s.parse().ok()).unwrap_or(500);
    let report = run_scenario(scenario, &VerifyOptions { samples, ..VerifyOptions::default() })?;
    for r in &report.records {
        let ratio = r.ratio.map_or("-".to_string(), |x| format!("{x:.3}"));
        println!("{:<32} predicted {:>8.4}  mc {:>8.4} +- {:.4}  ratio {ratio}", r.label, r.predicted, r.mc_mean, r.mc_stderr);
    }
    println!("spread {:?}, checks pass: {}", report.summary.spread, report.all_checks_pass());
    Ok(())
}
