use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// Invalid configuration or inconsistent parameters.
    #[error("configuration error: {0}")]
    Config(String),
    /// A caller passed a value outside an operation's domain.
    #[error("invalid argument: {0}")]
    Argument(String),
    /// Key tokens missing or another transmission-protocol violation.
    #[error("protocol error: {0}")]
    Protocol(String),
    /// Bitstream or LLR length inconsistent with the agreed frame layout.
    #[error("framing error: {0}")]
    Framing(String),
    #[error("training error: {0}")]
    Training(String),
    /// The symbol budget cannot carry even the key tokens.
    #[error("infeasible budget: {0}")]
    Infeasible(String),
    #[error("parse error at byte {offset}: {message}")]
    Parse { offset: usize, message: String },
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    /// I/O failure with the offending path attached.
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}

pub(crate) fn config<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Config(msg.into()))
}

pub(crate) fn argument<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Argument(msg.into()))
}
