use thiserror::Error;

/// Errors produced by the solver library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("degenerate input: {0}")]
    DegenerateInput(String),

    /// A floating-point result left the finite range.
    #[error("numeric overflow while {0}")]
    NumericOverflow(&'static str),

    /// The polynomial vanishes exactly at the evaluation point.
    #[error("polynomial evaluates to zero at the requested point")]
    EvaluationAtRoot,

    /// Two points coincide within the collision threshold; carries the
    /// index of the offending point in the `others` slice.
    #[error("point coincides with other point #{0}")]
    CollisionDetected(usize),

    #[error("exact integer arithmetic overflowed while {0}")]
    SymbolicOverflow(&'static str),

    #[error("order estimate unavailable: {0}")]
    UnreliableEstimate(String),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
}

pub type Result<T> = std::result::Result<T, Error>;
