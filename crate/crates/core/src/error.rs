use thiserror::Error;

/// Errors raised by the numerical library and the harness.
#[derive(Debug, Error)]
pub enum Error {
    /// An argument lies outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// An off-grid evaluation fell outside the extension band of a sampled function.
    #[error(
        "range error: point {point} lies outside the extension band [-{limit}, {limit}] \
         (x = {x}, y = {y}, theta = {theta})"
    )]
    Range {
        x: f64,
        y: f64,
        theta: f64,
        point: f64,
        limit: f64,
    },

    /// Two objects that must share a grid (or an alpha) do not.
    #[error("grid mismatch: {0}")]
    GridMismatch(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("usage error: {0}")]
    Usage(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn domain<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Domain(msg.into()))
}
