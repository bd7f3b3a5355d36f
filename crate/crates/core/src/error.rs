use thiserror::Error;

/// Errors raised by the library.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("invalid permutation: {0}")]
    InvalidPermutation(String),

    #[error("index {index} out of range 1..={len}")]
    IndexOutOfRange { index: usize, len: usize },

    #[error("duplicate index {0}")]
    DuplicateIndex(usize),

    #[error("empty index set")]
    EmptyIndexSet,

    #[error("permutation is not separable")]
    NotSeparable,

    #[error("invalid tree: {0}")]
    InvalidTree(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("invalid excursion: {0}")]
    InvalidExcursion(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("sizes do not match: patterns total {patterns}, target has size {target}")]
    SizeMismatch { patterns: usize, target: usize },

    #[error(
        "moment computation needs {pairs} (Pos,Val) pairs, above the budget of {budget}"
    )]
    BudgetExceeded { pairs: u128, budget: u128 },

    #[error("no tree with {leaves} leaves after {attempts} attempts")]
    AttemptsExhausted { leaves: usize, attempts: u64 },

    #[error("signs are not well defined: {0}")]
    ConditionC(#[from] ConditionCFailure),
}

/// The clause of the sign well-definedness condition that failed during
/// signed extraction. Intervals are numbered from 1 between consecutive points.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
pub enum ConditionCFailure {
    #[error("minimum on interval {0} is reached at an endpoint")]
    BoundaryMinimum(usize),

    #[error("minimum on interval {0} is reached at an unsigned point")]
    UnsignedMinimum(usize),

    #[error("minimizers on interval {0} carry different signs")]
    SignConflict(usize),

    #[error("tied minima of intervals {0} and {1} carry different signs")]
    TiedMinimaConflict(usize, usize),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
