//! Span sets of Brownian motion and random walks: exact span computation,
//! Monte Carlo span statistics, box-counting dimension estimates, moment
//! integrals of the approximate span measure, and Hausdorff-distance
//! convergence experiments.

pub mod dimension;
pub mod error;
pub mod metric;
pub mod moments;
pub mod paths;
pub mod quad;
pub mod estimate;
pub mod rng;
pub mod spans;
pub mod stats;

pub use error::{Error, Result};
