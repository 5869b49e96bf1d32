use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("non-finite arithmetic: {0}")]
    NonFinite(String),
    #[error("exact arithmetic: {0}")]
    Exact(String),
    #[error("state not found: {0}")]
    MissingState(String),
}

pub type Result<T> = std::result::Result<T, Error>;
