use thiserror::Error;

/// Errors produced by the library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("empty weight list")]
    EmptySpace,

    #[error("negative weight at index {index}: {value}")]
    NegativeWeight { index: usize, value: f64 },

    #[error("non-finite weight at index {index}")]
    NonFiniteWeight { index: usize },

    #[error("weights sum to {sum}, expected 1 within 1e-9")]
    NotNormalized { sum: f64 },

    #[error("label list has length {labels}, weight list has length {weights}")]
    LabelCount { labels: usize, weights: usize },

    #[error("duplicate outcome label {0:?}")]
    DuplicateLabel(String),

    #[error("outcome index {index} out of range for a space of {size} outcomes")]
    IndexOutOfRange { index: usize, size: usize },

    #[error("invalid partition: {0}")]
    InvalidPartition(String),

    #[error("partition covers {found} outcomes, space has {expected}")]
    SizeMismatch { expected: usize, found: usize },

    #[error("invalid filtration: {0}")]
    InvalidFiltration(String),

    #[error("{what} = {value} is outside the supported range {range}")]
    OutOfRange {
        what: &'static str,
        value: usize,
        range: &'static str,
    },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("absolute continuity violated: symbol {symbol} has probability 0 under theta0 but {p_theta} under theta {theta:?}")]
    AbsoluteContinuity {
        symbol: usize,
        theta: Vec<f64>,
        p_theta: f64,
    },

    #[error("family evaluated to {value}, outside the declared bound {bound}")]
    BoundViolated { value: f64, bound: f64 },

    #[error("family has no declared bound")]
    Unbounded,

    #[error("covariance factorization failed for theta {theta:?} at n = {n}")]
    Factorization { theta: Vec<f64>, n: usize },

    #[error("degenerate model: {0}")]
    DegenerateModel(String),

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
