use thiserror::Error;

/// Errors raised by the analytics, simulator and report layers.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// An argument lies outside the domain of the operation.
    #[error("domain error in {op}: {detail}")]
    Domain { op: &'static str, detail: String },

    /// A result is not representable as a finite double.
    #[error("overflow in {op}: {detail}")]
    Overflow { op: &'static str, detail: String },

    /// Monte Carlo paths hit the horizon before the threshold.
    #[error("{truncated} of {paths} paths reached the horizon before the threshold")]
    Truncated { truncated: u64, paths: u64 },

    /// A requested simulation exceeds the configured work budget.
    #[error("simulation refused: {0}")]
    Budget(String),

    /// Malformed input file or CSV not produced by this tool.
    #[error("parse error: {0}")]
    Parse(String),

    #[error("i/o error: {0}")]
    Io(String),
}

impl Error {
    pub(crate) fn domain(op: &'static str, detail: impl Into<String>) -> Self {
        Error::Domain {
            op,
            detail: detail.into(),
        }
    }

    pub(crate) fn overflow(op: &'static str, detail: impl Into<String>) -> Self {
        Error::Overflow {
            op,
            detail: detail.into(),
        }
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
