//! Crate-wide error type.

use crate::measure::C1Report;

/// Errors surfaced by sampling, solving, and the command-line harness.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// A constructor or operation was given an out-of-domain parameter.
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// A computation produced or encountered a non-finite value.
    #[error("non-finite value in {0}")]
    NonFinite(String),

    /// An iterative numerical routine failed to reach its tolerance.
    #[error("{context}: no convergence (residual {residual:.3e})")]
    NonConvergence { context: String, residual: f64 },

    /// The QL sweep limit was exceeded for one eigenvalue.
    #[error("eigensolver: QL sweep limit exceeded at index {index}")]
    SweepLimit { index: usize },

    /// The summability condition required for Laplacian limits fails.
    #[error("summability condition fails for this Levy measure: {reason}")]
    Summability { reason: String, report: Box<C1Report> },

    /// Two grids that must match exactly do not.
    #[error("grid mismatch: {0}")]
    GridMismatch(String),

    /// Malformed configuration input.
    #[error("config: {0}")]
    Config(String),

    #[error("io: {0}")]
    Io(#[from] std::io::Error),

    #[error("serialization: {0}")]
    Json(#[from] serde_json::Error),
}
