use thiserror::Error;

/// Errors raised by the numerical kernel and everything built on it.
#[derive(Debug, Error)]
pub enum Error {
    #[error("range error: {0}")]
    Range(String),

    #[error("matrix is singular or ill-conditioned (condition estimate {condition:e}, cap {cap:e})")]
    Singular { condition: f64, cap: f64 },

    #[error("power iteration did not converge after {iterations} iterations (best estimate {best})")]
    NoConvergence { iterations: usize, best: f64 },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("node index {index} out of range for a grid of {len} nodes")]
    IndexOutOfRange { index: usize, len: usize },

    #[error("malformed grid: {0}")]
    InvalidGrid(String),

    #[error("fiber operator at node {node} (s = {s}) is not invertible (condition estimate {condition:e})")]
    NonInvertibleFiber { node: usize, s: f64, condition: f64 },

    #[error("lambda = {lambda} lies in the numerical spectrum of the fiber at node {node} (s = {s}, condition estimate {condition:e})")]
    Spectral {
        node: usize,
        s: f64,
        lambda: num_complex::Complex64,
        condition: f64,
    },

    #[error("functions live on different grids")]
    GridMismatch,

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("time {t} is not an integer multiple of the grid spacing {spacing}")]
    Alignment { t: f64, spacing: f64 },

    #[error("time ordering violated: {0}")]
    Ordering(String),

    #[error("no derivative available: {0}")]
    MissingDerivative(String),

    #[error("configuration error at `{path}`: {message}")]
    Config { path: String, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
