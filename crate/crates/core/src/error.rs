use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("element {id} is outside the ground set of size {n}")]
    UnknownElement { id: usize, n: usize },

    #[error("element {id} is already in the set")]
    DuplicateElement { id: usize },

    #[error("unsupported operation: {0}")]
    Unsupported(&'static str),

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("numerical failure on set {set:?}: {detail}")]
    Numeric { set: Vec<usize>, detail: String },

    #[error("instance too large for exhaustive enumeration: n = {n} exceeds the limit of {limit}")]
    TooLarge { n: usize, limit: usize },

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("configuration error: {0}")]
    Config(String),

    #[error("{source} (after {} binary-search steps)", .history.len())]
    Solve {
        #[source]
        source: Box<Error>,
        history: Vec<crate::robust::GammaStep>,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Error {
    Error::InvalidParameter {
        name,
        reason: reason.into(),
    }
}
