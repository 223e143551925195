use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// An argument violated an operation's precondition.
    #[error("invalid input: {0}")]
    Input(String),

    /// A document could not be decoded. `location` names the line/column or
    /// the JSON path of the offending field.
    #[error("parse error at {location}: {message}")]
    Parse { location: String, message: String },

    /// A guarded enumeration refused to start.
    #[error("size limit exceeded: {0}")]
    Limit(String),

    /// A scripted tie-break policy ran out or named an illegal choice.
    #[error("tie-break policy error at step {step}: {message}")]
    Policy { step: usize, message: String },

    #[error("csv: {0}")]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn input(msg: impl Into<String>) -> Self {
        Error::Input(msg.into())
    }

    pub(crate) fn parse(location: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Parse {
            location: location.into(),
            message: message.into(),
        }
    }
}
