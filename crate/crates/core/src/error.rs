use thiserror::Error;

/// Errors raised by the solvers, the oracle wrapper and the testbed.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("vector must have at least one entry")]
    EmptyVector,

    #[error("non-finite value produced by {origin}")]
    NonFinite { origin: &'static str },

    #[error("oracle budget exhausted after {used} calls (limit {limit})")]
    BudgetExhausted { used: u64, limit: u64 },

    #[error("regularization parameter {sigma:e} fell below the floor {floor:e}")]
    SigmaUnderflow { sigma: f64, floor: f64 },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("root finder failed: {0}")]
    RootFinding(String),
}

impl Error {
    /// True for the safeguard conditions that end a run with a partial result
    /// instead of an outright failure.
    pub fn is_safeguard(&self) -> bool {
        matches!(self, Error::BudgetExhausted { .. } | Error::SigmaUnderflow { .. })
    }
}

pub type Result<T> = std::result::Result<T, Error>;
