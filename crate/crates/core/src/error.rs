use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("extent of mode {mode} is zero")]
    ZeroExtent { mode: usize },

    #[error("tensor has {elements} elements, exceeding the cap of {cap}")]
    CapExceeded { elements: u128, cap: usize },

    #[error("value buffer has length {got}, shape requires {expected}")]
    LengthMismatch { expected: usize, got: usize },

    #[error("mode weights for mode {mode}: {reason}")]
    InvalidWeights { mode: usize, reason: String },

    #[error("non-finite entry at flat index {index}")]
    NonFinite { index: usize },

    #[error("invalid unfolding: {0}")]
    InvalidUnfolding(String),

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("mode {mode} out of range for a tensor with {ndim} modes")]
    ModeOutOfRange { mode: usize, ndim: usize },

    #[error("rank {rank} at position {position} is infeasible; feasible range is 1..={max}")]
    RankInfeasible {
        position: usize,
        rank: usize,
        max: usize,
    },

    #[error("expected {expected} ranks, got {got}")]
    RankCount { expected: usize, got: usize },

    #[error("tail-energy target {target:e} lies below the achievable noise floor {floor:e}")]
    BelowNoiseFloor { target: f64, floor: f64 },

    #[error("decay fit needs at least {needed} usable singular values, found {found}")]
    InsufficientSpectrum { needed: usize, found: usize },

    #[error("grid along mode {mode} is not uniform")]
    NonUniformGrid { mode: usize },

    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("unknown function id `{0}`")]
    UnknownFunction(String),

    #[error("function `{id}`: {reason}")]
    InvalidFunction { id: String, reason: String },

    #[error("evaluation of `{id}` failed at point {point:?}")]
    Evaluation { id: String, point: Vec<f64> },

    #[error("invalid scheduler parameters: {0}")]
    InvalidSchedule(String),
}

pub type Result<T> = std::result::Result<T, Error>;
