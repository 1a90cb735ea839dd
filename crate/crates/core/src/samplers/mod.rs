//! Randomized building blocks: ℓ0 sampling, second-moment estimation and
//! approximate counting.

mod ams;
mod l0;
mod morris;

pub use ams::{AmsConfig, AmsSketch};
pub use l0::{L0Config, L0Sampler, OneSparseRecoverer, MERSENNE_61};
pub use morris::MorrisCounter;
