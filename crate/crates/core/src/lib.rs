//! Streaming sketches whose outputs have low entropy across random seeds.

pub mod algorithms;
mod error;
pub mod linalg;
pub mod randomness;
pub mod samplers;
pub mod stream;

pub use error::{Error, Result};

/// Double-precision dense matrix.
pub type Matrix = linalg::DenseMatrix<f64>;
/// Single-precision dense matrix.
pub type MatrixF32 = linalg::DenseMatrix<f32>;
/// Exact rational matrix for oracle computations.
pub type RationalMatrix = linalg::DenseMatrix<num_rational::BigRational>;
