//! Error type shared by every module of the library.

use thiserror::Error;

/// Errors raised by library operations.
///
/// Numerical problems are never hidden: when a comparison cannot be
/// decided at the configured precision the operation fails with
/// [`Error::PrecisionExhausted`] instead of rounding.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// A non-finite floating point value was supplied.
    #[error("non-finite input: {0}")]
    NonFinite(f64),
    /// An interval-guarded comparison was inconclusive at the working precision.
    #[error("precision exhausted while {context} (working precision {bits} bits)")]
    PrecisionExhausted { context: String, bits: u32 },
    /// Input violated a documented precondition.
    #[error("precondition violated: {0}")]
    Precondition(String),
    /// Input could not be parsed or is structurally invalid.
    #[error("invalid input: {0}")]
    InvalidInput(String),
    /// A sequence failed a required growth hypothesis at the given 1-based index.
    #[error("ratio hypothesis violated at index {index}: {detail}")]
    RatioViolation { index: u64, detail: String },
    /// A verified post-condition failed on a concrete pair of indices.
    #[error("verification failed for (M, N) = ({m}, {n}): {detail}")]
    VerificationFailed { m: u64, n: u64, detail: String },
    /// The requested work exceeds the configured enumeration budget.
    #[error("budget exceeded: {0}")]
    BudgetExceeded(String),
}

/// Convenience alias used throughout the crate.
pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn exhausted(context: impl Into<String>, bits: u32) -> Error {
    Error::PrecisionExhausted {
        context: context.into(),
        bits,
    }
}
