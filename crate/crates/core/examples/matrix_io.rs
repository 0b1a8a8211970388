//! Read and write the JSON and text matrix formats.

use radnorm::matrix::parse_input;
use radnorm::{EdgeSet, WeightMatrix};

fn main() -> radnorm::Result<()> {
    let w = WeightMatrix::from_rows(&[vec![0.0, 1.5], vec![-0.1, 2.0]])?;
    println!("{}", w.to_json());
    print!("{}", w.to_text());

    let e = EdgeSet::new(3, vec![(0, 1), (1, 2)])?;
    println!("{}", e.to_json());
    print!("{}", e.to_text());

    let back = parse_input(&e.to_text())?;
    println!("text round trip: {}", back.to_json() == e.to_json());
    Ok(())
}
