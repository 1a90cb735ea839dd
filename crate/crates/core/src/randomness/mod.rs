//! Hash families, sign families and the space-bounded PRG. Every sketch in
//! the crate draws its randomness through this module.

pub mod field;
mod gf2;
mod hash;
mod prg;
mod seed;

pub use gf2::Gf2Field;
pub use hash::{HashFamilySpec, HashFunction, SignHash};
pub use prg::{PrgSeed, PrgSpec};
pub use seed::{tags, Seed};
