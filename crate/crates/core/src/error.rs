use std::io;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("degenerate target: {0}")]
    DegenerateTarget(String),

    #[error("undefined correlation: {0}")]
    UndefinedCorrelation(String),

    #[error("underdetermined system: {0}")]
    Underdetermined(String),

    #[error("invalid state: {0}")]
    InvalidState(String),

    #[error("degenerate pair: every paired difference is zero")]
    DegeneratePair,

    #[error("config error at `{path}`: {msg}")]
    Config { path: String, msg: String },

    #[error("empty report: {0}")]
    EmptyReport(String),

    #[error(transparent)]
    Io(#[from] io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }

    pub(crate) fn config(path: impl Into<String>, msg: impl Into<String>) -> Self {
        Error::Config {
            path: path.into(),
            msg: msg.into(),
        }
    }

    /// True for errors caused by a malformed configuration rather than a runtime failure.
    pub fn is_config(&self) -> bool {
        matches!(self, Error::Config { .. })
    }
}
