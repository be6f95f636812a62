use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// An input violates a stated parameter range.
    #[error("invalid parameter: {0}")]
    Parameter(String),

    /// The requested computation would exceed a configured size cap.
    #[error("resource limit: {0}")]
    Resource(String),

    /// A geometric construction is not valid for the given input.
    #[error("domain error: {0}")]
    Domain(String),

    #[error("solver did not converge after {iterations} iterations (relative residual {residual:.3e})")]
    Solver {
        iterations: usize,
        residual: f64,
        history: Vec<f64>,
    },

    #[error("config error: {0}")]
    Config(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn param(msg: impl Into<String>) -> Error {
    Error::Parameter(msg.into())
}
