//! Crate-wide error type.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// An allocation does not match the instance shape (bundle count,
    /// item indices out of range).
    #[error("malformed allocation: {0}")]
    MalformedAllocation(String),

    /// A checker or solver was handed an allocation that is not feasible.
    #[error("infeasible allocation: {0}")]
    InfeasibleAllocation(String),

    /// A table valuation has no entry and no default for a queried set.
    #[error("incomplete valuation: {0}")]
    IncompleteValuation(String),

    /// The valuation profile does not meet an operation's requirements
    /// (e.g. absolute-value reduction of a non-monotone profile).
    #[error("unsupported valuation: {0}")]
    UnsupportedValuation(String),

    /// A specialized solver was invoked on an instance outside its domain.
    #[error("wrong solver: {0}")]
    WrongSolver(String),

    /// Unknown built-in instance name or invalid catalog parameter.
    #[error("unknown builtin: {0}")]
    UnknownBuiltin(String),

    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("invalid instance: {0}")]
    InvalidInstance(String),

    /// Violated precondition of an algorithm (also used for runtime
    /// verification of constructed sequences and colorings).
    #[error("precondition violated: {0}")]
    Precondition(String),

    /// The enumeration budget ran out before the search was exhaustive.
    #[error("enumeration budget exhausted: {0}")]
    BudgetExhausted(String),

    /// The requested exhaustive check is too large for the configured cap.
    #[error("oracle too large: {0}")]
    OracleTooLarge(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
