//! Error type shared across the library.

use thiserror::Error;

/// Library result alias.
pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// A precondition on an argument was violated (bad count, non-unit axis, ...).
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// A desk-scale guard (tuple count, partition order) was exceeded.
    #[error("resource limit exceeded: {0}")]
    ResourceLimit(String),

    /// Input is valid syntactically but numerically degenerate
    /// (zero variance, vanishing normalization).
    #[error("degenerate input: {0}")]
    DegenerateInput(String),

    /// Nonlinear fit failed to converge; the message carries residual diagnostics.
    #[error("fit did not converge: {0}")]
    FitDidNotConverge(String),

    /// A geometry or table file could not be parsed. serde's message names the
    /// offending field and line/column.
    #[error("parse error in {path}: {message}")]
    Parse { path: String, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
