//! Error type shared by every module in the crate.

use thiserror::Error;

/// Errors produced by matrix validation, cubature construction, filtering and
/// the simulation harness.
#[derive(Debug, Error)]
pub enum Error {
    /// A matrix that must be symmetric positive definite failed its Cholesky
    /// factorization. The context names the matrix so filter divergence is
    /// attributable (predicted scale, posterior scale, ...).
    #[error("matrix is not positive definite: {context}")]
    NotPositiveDefinite { context: String },

    /// An argument escaped the mathematical domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// Degrees of freedom below the minimum the operation can support.
    #[error("degrees of freedom must exceed {min}, got {dof}")]
    DofTooSmall { dof: f64, min: f64 },

    /// The integrand returned NaN or an infinity at an evaluation point.
    #[error("integrand returned a non-finite value")]
    NonFiniteIntegrand,

    /// The innovation scale matrix stayed non-positive-definite even after the
    /// one-shot diagonal jitter repair.
    #[error("innovation scale matrix is not positive definite after jitter repair")]
    InnovationNotPositiveDefinite,

    /// Two sequences or dimensions that must agree do not.
    #[error("length mismatch: {0}")]
    LengthMismatch(String),

    /// A run configuration was rejected before any simulation work started.
    #[error("configuration error: {0}")]
    Config(String),
}

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;
