use std::path::PathBuf;

/// Errors raised by mechanisms, estimators and the experiment harness.
#[derive(Debug, thiserror::Error)]
#[non_exhaustive]
pub enum Error {
    /// A numeric parameter is outside its valid range.
    #[error("invalid parameter: {0}")]
    Parameter(String),

    /// An input record lies outside the domain a channel or estimator accepts.
    #[error("domain violation: {0}")]
    Domain(String),

    /// An enumeration was requested beyond its size cap.
    #[error("size limit exceeded: {0}")]
    Size(String),

    /// The operation is not defined for this channel kind.
    #[error("unsupported: {0}")]
    Unsupported(String),

    /// Two pmfs disagree on which outputs have zero probability.
    #[error("support mismatch: {0}")]
    Support(String),

    /// Malformed data handed to a fitting routine.
    #[error("invalid data: {0}")]
    Data(String),

    /// An experiment or generator configuration is inconsistent.
    #[error("configuration error: {0}")]
    Config(String),

    #[error("I/O error on {}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    /// Should not happen; e.g. a rejection sampler exhausted its attempt cap.
    #[error("internal error: {0}")]
    Internal(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl Error {
    pub(crate) fn param(msg: impl Into<String>) -> Self {
        Error::Parameter(msg.into())
    }

    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn config(msg: impl Into<String>) -> Self {
        Error::Config(msg.into())
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
