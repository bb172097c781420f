//! Crate-wide error type.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// A spec or config is invalid. The message names the offending stage,
    /// column, or field path.
    #[error("configuration error: {0}")]
    Config(String),

    /// Generation hit a data-dependent failure (e.g. arithmetic overflow).
    /// The message names the stage and row.
    #[error("generation error: {0}")]
    Generation(String),

    /// An API was called with incompatible arguments (mismatched sketches,
    /// single-class labels, dimension mismatch).
    #[error("usage error: {0}")]
    Usage(String),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub fn config(msg: impl Into<String>) -> Self {
        Error::Config(msg.into())
    }

    pub fn generation(msg: impl Into<String>) -> Self {
        Error::Generation(msg.into())
    }

    pub fn usage(msg: impl Into<String>) -> Self {
        Error::Usage(msg.into())
    }
}
