use thiserror::Error;

/// Errors raised across the crate.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("invalid range: {0}")]
    InvalidRange(String),

    #[error("lattice too large: {cells} cells exceeds the limit of {limit}")]
    TooLarge { cells: u128, limit: u128 },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("degenerate modulus: {0}")]
    DegenerateModulus(String),

    #[error("site has no parents at level 0")]
    NoParents,

    #[error("invalid dyadic site: {0}")]
    InvalidSite(String),

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("numeric failure: {0}")]
    NumericFailure(String),

    #[error("insufficient data: {0}")]
    InsufficientData(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
