use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// Shapes, lengths or structural parameters do not fit together.
    #[error("structural error: {0}")]
    Structural(String),
    /// A model parameter violates its invariant.
    #[error("invalid {field}: {reason}")]
    InvalidParameter { field: String, reason: String },
    #[error("linear algebra error: {0}")]
    LinearAlgebra(String),
    #[error("model consistency error: {0}")]
    ModelConsistency(String),
    /// Enumeration would exceed the materialization cap.
    #[error("resource limit: {0}")]
    Resource(String),
    #[error("numerical divergence: {0}")]
    NumericalDivergence(String),
    #[error("estimation error: {0}")]
    Estimation(String),
    #[error("trial {trial}: {source}")]
    Trial {
        trial: u64,
        #[source]
        source: Box<Error>,
    },
}

impl Error {
    pub(crate) fn invalid(field: impl Into<String>, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            field: field.into(),
            reason: reason.into(),
        }
    }

    /// Strips any trial wrapper and returns the underlying error.
    pub fn root(&self) -> &Error {
        match self {
            Error::Trial { source, .. } => source.root(),
            other => other,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
