use thiserror::Error;

/// Crate-wide error type.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("invalid solution parameters: {0}")]
    InvalidSolution(String),

    #[error("invalid scheme configuration: {0}")]
    InvalidScheme(String),

    #[error("config error: {0}")]
    Config(String),

    #[error("diagnostics: {0}")]
    Diagnostics(String),

    #[error("output data: {0}")]
    Data(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
