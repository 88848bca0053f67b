//! Error type shared across the crate.

use thiserror::Error;

#[derive(Debug, Clone, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("invalid state: {0}")]
    InvalidState(String),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    /// A determinant or probability degenerated beyond what roundoff can
    /// explain; the inputs are outside the trustworthy numeric regime.
    #[error("numeric degeneracy: {0}")]
    NumericDegeneracy(String),

    #[error("insufficient data: {0}")]
    InsufficientData(String),

    /// Requested a noise threshold along a direction where the noiseless
    /// variance is already non-negative.
    #[error("no threshold exists: {0}")]
    NoThreshold(String),
}

pub type Result<T> = std::result::Result<T, Error>;
