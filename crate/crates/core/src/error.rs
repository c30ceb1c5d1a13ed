use thiserror::Error;

/// Errors surfaced by the library.
///
/// The three non-I/O variants map onto distinct failure classes: `Config`
/// for caller mistakes (bad dimensions, out-of-range parameters), `Numerical`
/// for solver trouble (residual above tolerance), and `Invariant` for
/// conditions that a correct build can never reach (a valid discounted
/// kernel produced a singular system, exact policy iteration failed to
/// terminate). Consumers key exit codes off this split.
#[derive(Debug, Error)]
pub enum Error {
    #[error("configuration error: {0}")]
    Config(String),

    #[error("numerical error: {0}")]
    Numerical(String),

    #[error("invariant violation: {0}")]
    Invariant(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub fn config(msg: impl Into<String>) -> Self {
        Error::Config(msg.into())
    }

    pub fn numerical(msg: impl Into<String>) -> Self {
        Error::Numerical(msg.into())
    }

    pub fn invariant(msg: impl Into<String>) -> Self {
        Error::Invariant(msg.into())
    }

    pub fn parse(msg: impl Into<String>) -> Self {
        Error::Parse(msg.into())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
