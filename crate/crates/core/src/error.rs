use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    /// A point outside the individual space `[0, 1]`.
    #[error("domain error: {0} is outside [0, 1]")]
    Domain(f64),

    #[error("invalid argument: {0}")]
    Argument(String),

    #[error("invalid piecewise function: {0}")]
    InvalidFunction(String),

    #[error("invalid measure: {0}")]
    InvalidMeasure(String),

    #[error("invalid shape: {0}")]
    Shape(String),

    /// A black-box aggregator answered a probe with something that is not a
    /// fuzzy classification.
    #[error("protocol error on probe {probe}: {reason}")]
    Protocol { probe: String, reason: String },

    #[error("precondition not met: {0}")]
    Precondition(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn argument(msg: impl Into<String>) -> Self {
        Error::Argument(msg.into())
    }
}
