use thiserror::Error;

use crate::Ident;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("robot {robot} has no transition {from} -> {to}")]
    NotATransition { robot: usize, from: Ident, to: Ident },

    #[error("parse error at {location}: {message}")]
    Parse { location: String, message: String },

    #[error("product automaton too large: {size} states exceeds the cap of {cap}")]
    TooLarge { size: String, cap: usize },

    #[error("configuration error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }

    pub(crate) fn parse(location: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Parse {
            location: location.into(),
            message: message.into(),
        }
    }
}
