use thiserror::Error;

/// Errors raised by the toolkit.
///
/// The variants map one-to-one onto the CLI exit-code classes: `Invalid`,
/// `Domain`, `Data`, `Usage`, `Io` and `Json` are input problems (exit 2),
/// `Internal` is an invariant breach inside a kernel (exit 3).
#[derive(Debug, Error)]
pub enum Error {
    /// A value object was constructed in violation of one of its invariants.
    #[error("invalid {what}: {reason}")]
    Invalid { what: &'static str, reason: String },

    /// A coordinate map was evaluated outside its domain.
    #[error("domain error: {0}")]
    Domain(String),

    /// Recorded data cannot be processed (e.g. a nonpositive intensity).
    #[error("data error: {0}")]
    Data(String),

    /// Incompatible inputs (shape or kind mismatch).
    #[error("usage error: {0}")]
    Usage(String),

    /// A computed result broke an output invariant (NaN/Inf escaped).
    #[error("internal invariant breach: {0}")]
    Internal(String),

    #[error("io error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },

    #[error("json error in {path}: {source}")]
    Json {
        path: String,
        #[source]
        source: serde_json::Error,
    },
}

impl Error {
    pub(crate) fn invalid(what: &'static str, reason: impl Into<String>) -> Self {
        Error::Invalid {
            what,
            reason: reason.into(),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
