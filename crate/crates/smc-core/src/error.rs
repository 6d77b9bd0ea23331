use thiserror::Error;

/// Errors produced by instance construction, parsing, solvers and the
/// reduction compiler.
#[derive(Debug, Error)]
pub enum Error {
    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("negative valuation at row {row}, column {col}")]
    NegativeValuation { row: usize, col: usize },

    #[error("matching weight out of range at row {row}, column {col}")]
    WeightOutOfRange { row: usize, col: usize },

    #[error("row or column sum exceeds one at index {index}")]
    SumExceedsOne { index: usize },

    #[error("epsilon out of range: {0}")]
    EpsilonOutOfRange(String),

    #[error("instance is not binary")]
    NotBinary,

    #[error("matching is not doubly stochastic")]
    NotDoublyStochastic,

    #[error("instance size {n} exceeds enumeration cap {cap}")]
    CapExceeded { n: usize, cap: usize },

    #[error("formula is not 2P2N-3SAT: {0}")]
    Not2P2N(String),

    #[error("assignment does not satisfy the formula")]
    AssignmentDoesNotSatisfy,

    #[error("parameter out of domain: {0}")]
    ParamDomain(String),

    #[error("duplicate agent in matching: {0}")]
    DuplicateAgent(String),
}

pub type Result<T> = std::result::Result<T, Error>;
