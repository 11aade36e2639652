use thiserror::Error;

/// Errors raised by the solvers and data readers.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("support sizes differ: {left} vs {right}")]
    SupportMismatch { left: usize, right: usize },

    #[error("divergence is infinite: atom {index} has mass in q but not in p")]
    InfiniteDivergence { index: usize },

    #[error("invalid distribution: {0}")]
    InvalidDistribution(String),

    #[error("simplex grid of dimension {dim} with increment {increment} has no interior point")]
    EmptyGrid { dim: usize, increment: f64 },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("ambiguity set with a single support atom is degenerate")]
    DegenerateSupport,

    #[error("value vector has a non-finite entry at index {index}")]
    NonFiniteValue { index: usize },

    #[error("no convergence after {iterations} iterations (residual {residual:e})")]
    NotConverged { iterations: usize, residual: f64 },

    #[error("data error at line {line}: {message}")]
    Data { line: usize, message: String },

    #[error("io error: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl From<std::io::Error> for Error {
    fn from(err: std::io::Error) -> Self {
        Error::Io(err.to_string())
    }
}
