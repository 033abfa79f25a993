//! Error type shared by all modules.

use thiserror::Error;

/// Errors reported by the library.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    /// A result failed an internal self-check; indicates a bug.
    #[error("internal consistency error: {0}")]
    Internal(String),
    /// A coefficient needed by a formula is absent from the table.
    #[error("insufficient table: missing key {0}")]
    InsufficientTable(String),
    /// An argument lies outside the domain of a numeric function.
    #[error("domain error: {0}")]
    Domain(String),
    /// A quantity that must be nonzero vanished.
    #[error("degenerate: {0}")]
    Degenerate(String),
    /// A numeric search could not decide.
    #[error("inconclusive: {0}")]
    Inconclusive(String),
    /// A vector, pair or wedge is not primitive.
    #[error("not primitive: {0}")]
    NotPrimitive(String),
    /// A precondition of a constructive lemma does not hold.
    #[error("hypothesis violated: {0}")]
    HypothesisViolated(String),
    /// Malformed or out-of-range input.
    #[error("invalid input: {0}")]
    Invalid(String),
}

/// Result alias.
pub type Result<T> = std::result::Result<T, Error>;
