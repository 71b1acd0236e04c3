use thiserror::Error;

/// Errors raised by the library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An argument lies outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// A tabulated density is too coarse or malformed for the requested operation.
    #[error("resolution error: {0}")]
    Resolution(String),

    /// Invalid or degenerate geometric input.
    #[error("geometry error: {0}")]
    Geometry(String),

    /// The requested pairing of primitives is outside the exact subalgebra.
    #[error("unsupported: {what}; fallback: {fallback}")]
    Capability { what: String, fallback: String },

    /// An adaptive rule could not reach the requested tolerance.
    #[error("accuracy error: requested {requested:e}, achieved {achieved:e}")]
    Accuracy { requested: f64, achieved: f64 },

    /// A one-dimensional search failed to bracket or to shrink its bracket.
    #[error("optimization error: {0}")]
    Optimization(String),

    /// A counterexample construction could not satisfy its conditions.
    #[error("construction error: {0}")]
    Construction(String),

    /// A verification experiment did not produce the expected structure.
    #[error("experiment failure: {0}")]
    Experiment(String),

    /// Malformed serialized input.
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn capability(what: impl Into<String>, fallback: impl Into<String>) -> Self {
        Error::Capability {
            what: what.into(),
            fallback: fallback.into(),
        }
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Parse(e.to_string())
    }
}
