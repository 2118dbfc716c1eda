//! Error type shared across the crate.

use thiserror::Error;

/// Errors produced by simulation, model construction, training and data
/// ingestion.
#[derive(Debug, Error)]
pub enum Error {
    /// A requested configuration is outside supported limits.
    #[error("configuration error: {0}")]
    Config(String),

    /// A circuit, gate or parameter table is internally inconsistent.
    #[error("structure error: {0}")]
    Structure(String),

    /// A computation produced a non-finite value.
    #[error("numeric error: {0}")]
    Numeric(String),

    /// Input data violates a documented range or shape requirement.
    #[error("data error: {0}")]
    Data(String),

    /// A byte stream could not be decoded; `offset` is the position of the
    /// first offending byte.
    #[error("parse error at byte {offset}: {message}")]
    Parse { offset: usize, message: String },

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn config(msg: impl Into<String>) -> Self {
        Error::Config(msg.into())
    }

    pub(crate) fn structure(msg: impl Into<String>) -> Self {
        Error::Structure(msg.into())
    }

    pub(crate) fn numeric(msg: impl Into<String>) -> Self {
        Error::Numeric(msg.into())
    }

    pub(crate) fn data(msg: impl Into<String>) -> Self {
        Error::Data(msg.into())
    }

    pub(crate) fn parse(offset: usize, message: impl Into<String>) -> Self {
        Error::Parse {
            offset,
            message: message.into(),
        }
    }
}
