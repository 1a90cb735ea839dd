use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("invalid specification: {0}")]
    InvalidSpec(String),
    #[error("domain error: {0}")]
    Domain(String),
    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("stream model violation: {0}")]
    ModelViolation(String),
    #[error("space accounting error: {0}")]
    Accounting(String),
    #[error("precondition failed: {0}")]
    Precondition(String),
    #[error("rank promise violated: sketch rank {rank} exceeds bound {bound}")]
    RankPromise { rank: usize, bound: usize },
    #[error("hash collision among retained ids: hashed id {hashed} shared by indices {first} and {second}")]
    Collision { hashed: u64, first: u64, second: u64 },
}

pub type Result<T> = std::result::Result<T, Error>;
