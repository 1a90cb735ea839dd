//! The low-entropy streaming algorithms.

mod basis;
mod find_duplicate;
mod inner_product;
mod l2_trunc;
mod misra_gries;
mod nonzero_row;
mod point_query;

pub use basis::{BasisRecovery, BasisRecoveryConfig, ROW_FACTOR};
pub use find_duplicate::{
    branching, multipass_find_duplicate, ConcentratedDuplicate, DuplicateSampler, MultipassOutcome,
};
pub use inner_product::{InnerProduct, Side, TopEntry};
pub use l2_trunc::{truncate_l2, L2Truncated, TruncatedL2Config};
pub use misra_gries::{capacity_for, MisraGries};
pub use nonzero_row::{NonzeroRowPd, NonzeroRowRand, PRG_SPACE_FACTOR};
pub use point_query::{PointQuery, PointQueryConfig};
