use thiserror::Error;

/// Errors raised across the crate.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("derivative order {requested} exceeds the supported maximum {max}")]
    Order { requested: usize, max: usize },
    #[error("mode error: {0}")]
    Mode(String),
    #[error("indeterminate limit at the origin: {0}")]
    Indeterminate(String),
    #[error("precision error: {0}")]
    Precision(String),
    #[error("finite-difference stencil left the domain: {0}")]
    Stencil(String),
    #[error("no convergence after {iterations} iterations (relative residual {residual:e})")]
    NoConvergence { iterations: usize, residual: f64 },
    #[error("invalid schedule: {0}")]
    Schedule(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
