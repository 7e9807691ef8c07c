use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// The map document is malformed (bad JSON, wrong shape, bad numbers).
    #[error("schema error: {0}")]
    Schema(String),

    /// The map is well formed but violates a structural condition.
    #[error("validation failed: {0}")]
    Validation(String),

    /// An argument outside the operation's domain.
    #[error("domain error: {0}")]
    Domain(String),

    /// A constructive step that must succeed did not; signals a bug upstream.
    #[error("internal consistency error in {stage}: {detail}")]
    Internal { stage: &'static str, detail: String },

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn internal(stage: &'static str, detail: impl Into<String>) -> Self {
        Error::Internal { stage, detail: detail.into() }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
