use thiserror::Error;

/// Errors raised by the simulator, analysis routines and runner.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// An exhaustive enumeration was requested for a size that is out of reach.
    #[error("size limit exceeded: {what} is {actual}, limit {limit}")]
    TooLarge {
        what: &'static str,
        actual: usize,
        limit: usize,
    },

    /// A dense register would exceed the engine cap.
    #[error("register of {qubits} qubits exceeds the dense cap of {cap}")]
    Resource { qubits: usize, cap: usize },

    #[error("objective evaluation failed at start {start}: {source}")]
    Objective {
        start: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("schema mismatch: {0}")]
    Schema(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Toml(#[from] toml::de::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidArgument(msg.into())
}
