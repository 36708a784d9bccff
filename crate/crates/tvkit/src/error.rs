use thiserror::Error;

/// Error type shared across the crate.
#[derive(Debug, Error)]
pub enum Error {
    /// Malformed or out-of-contract input (bad spec string, empty
    /// polynomial, dimension mismatch, ...). CLI exit code 2.
    #[error("input error: {0}")]
    Input(String),

    /// A numeric routine failed to converge or produced non-finite
    /// values. CLI exit code 3.
    #[error("numeric failure: {0}")]
    Numeric(String),

    /// Requested configuration is outside the supported envelope
    /// (e.g. exact determinants beyond n = 12). CLI exit code 2.
    #[error("unsupported: {0}")]
    Unsupported(String),

    /// An internal invariant was violated; indicates a bug.
    #[error("internal error: {0}")]
    Internal(String),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// Process exit code according to the CLI contract: 2 for input
    /// problems, 3 for numeric failures.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Input(_) | Error::Unsupported(_) | Error::Io(_) => 2,
            Error::Numeric(_) | Error::Internal(_) => 3,
        }
    }
}
