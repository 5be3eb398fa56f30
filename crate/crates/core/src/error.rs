use thiserror::Error;

/// Errors produced by the library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid column: {0}")]
    InvalidColumn(String),

    #[error("row count mismatch: expected n={expected}, got n={got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("duplicate edge {0}")]
    DuplicateEdge(String),

    #[error("{what} = {value} exceeds the limit {limit}")]
    TooLarge {
        what: &'static str,
        value: u128,
        limit: u128,
    },

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("parse error on line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("column stream exhausted after {0} distinct columns")]
    Exhausted(u128),

    #[error(
        "peel/rank identity violated: rank={total_rank}, m1={m1}, core rank={core_rank}\n{instance}"
    )]
    IdentityViolation {
        total_rank: usize,
        m1: usize,
        core_rank: usize,
        instance: String,
    },

    #[error("greedy basis stalled at rank {rank}, expected {target}")]
    GreedyStalled { rank: usize, target: usize },

    #[error("thread pool: {0}")]
    ThreadPool(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
