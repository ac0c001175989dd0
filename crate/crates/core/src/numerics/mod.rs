//! Complex linear algebra and random sources shared by every link model.

mod matrix;
mod rng;

pub use matrix::{Complex, ComplexMatrix, SINGULARITY_TOL};
pub use rng::{Lane, RandomSource};
