//! Error taxonomy shared across the crate.
//!
//! The CLI maps these onto process exit codes, so the split matters:
//! configuration problems are user-fixable, numerical failures are not.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// Invalid configuration value (bad parameter range, shape mismatch).
    #[error("config error: {0}")]
    Config(String),

    /// API misuse: index out of range, incompatible operands.
    #[error("usage error: {0}")]
    Usage(String),

    /// Cholesky pivot failure; doubles as the crate's SPD test.
    #[error("matrix is not symmetric positive definite: {0}")]
    NotSpd(String),

    /// Iteration did not converge or a computation degenerated.
    #[error("numerical failure: {0}")]
    Numerical(String),
}

pub type Result<T> = std::result::Result<T, Error>;
