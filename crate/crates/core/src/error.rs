use thiserror::Error;

/// Errors raised by the library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid dimension {0}: must be at least 2")]
    InvalidDimension(usize),

    #[error("invalid count {0}: must be at least {1}")]
    InvalidCount(usize, usize),

    #[error("invalid partition: {0}")]
    InvalidPartition(String),

    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("index {index} out of range for {len} items")]
    IndexOutOfRange { index: usize, len: usize },

    #[error("state is not normalized (norm^2 = {0})")]
    NotNormalized(f64),

    #[error("too many states: {states} states in dimension {dim}")]
    TooManyStates { states: usize, dim: usize },

    #[error("expected {expected} rows, got {actual}")]
    WrongRowCount { expected: usize, actual: usize },

    #[error("parameter {name} = {value} outside {range}")]
    InvalidParameter {
        name: &'static str,
        value: f64,
        range: &'static str,
    },

    #[error("{0} is prime: no nontrivial factorization")]
    NoPartition(usize),

    #[error("{states} states exceed the disentangling bound {bound}")]
    BoundExceeded { states: usize, bound: usize },

    #[error("matrix is not unitary (residual {0:e})")]
    NotUnitary(f64),

    #[error("unsupported configuration: {0}")]
    Unsupported(String),

    #[error("no detection up to a = {0}")]
    NotFound(f64),

    #[error("degenerate input: {0}")]
    Degenerate(String),
}

pub type Result<T> = std::result::Result<T, Error>;
