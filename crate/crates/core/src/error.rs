use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("a partition needs at least one cell")]
    EmptyPartition,

    #[error("invalid partition: {0}")]
    InvalidPartition(String),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("negative power {0} requested for a stochastic (non-invertible) system")]
    NegativePowerOfStochastic(i64),

    #[error("operation requires an exact (permutation) system")]
    NotExact,

    #[error("not a permutation: {0}")]
    NotAPermutation(String),

    #[error("not doubly stochastic: {0}")]
    NotDoublyStochastic(String),

    #[error("not a coupling matrix: {0}")]
    NotACoupling(String),

    #[error("cannot repair into the coupling polytope: {0}")]
    NotRepairable(String),

    #[error("size guard: {what} = {value} exceeds the limit {limit}")]
    SizeGuard {
        what: &'static str,
        value: usize,
        limit: usize,
    },

    #[error("resolution guard: witness resolution {value} exceeds the limit {limit}")]
    ResolutionGuard { value: usize, limit: usize },

    #[error("infeasible rational target: {0}")]
    InfeasibleTarget(String),

    #[error("bad blocks: {0}")]
    BadBlocks(String),

    #[error("automorphism is not invertible: {0}")]
    NonInvertible(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
