//! Level-set buckets of a unit vector.

use radnorm::levels::level_sets;

fn main() -> radnorm::Result<()> {
    let s = [0.9, -0.3, 0.2, 0.05, 0.0, 0.01];
    let levels = level_sets(&s, std::f64::consts::E)?;
    for (label, idx) in levels.labelled() {
        println!("level {label:>2}: {idx:?}");
    }
    println!("weighted mass {:.4}", levels.weighted_mass());
    Ok(())
}
