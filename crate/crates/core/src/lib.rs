//! Bounds and Monte Carlo estimates for `E||(a_ij eps_ij)||`, the expected
//! operator norm of a weighted Rademacher matrix.

pub mod bounds;
pub mod error;
pub mod families;
pub mod graph;
pub mod levels;
pub mod matrix;
pub mod moments;
pub mod oracles;
pub mod report;
pub mod sampler;
pub mod spectral;

pub use error::{Error, Result};
pub use graph::GraphView;
pub use matrix::{EdgeSet, MatrixInput, WeightMatrix};

/// `ln(max(x, e))`.
pub fn log_clamped(x: f64) -> f64 {
    x.max(std::f64::consts::E).ln()
}
