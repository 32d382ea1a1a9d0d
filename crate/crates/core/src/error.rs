use thiserror::Error;

use crate::gf2::{Letter, Word};

/// Errors raised by design construction, evaluation and search.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DesignError {
    #[error("capacity exceeded: {0}")]
    Capacity(String),

    #[error("column {bits} is not a nonzero vector of GF(2)^{k}")]
    InvalidColumn { bits: u32, k: u32 },

    #[error("letter {0} is not assigned in this design")]
    UnknownLetter(Letter),

    #[error("letter {0} appears more than once")]
    DuplicateLetter(Letter),

    #[error("letters {first} and {second} share column {bits}")]
    DuplicateColumn {
        first: Letter,
        second: Letter,
        bits: u32,
    },

    #[error("generators are not independent")]
    DependentGenerators,

    #[error("generator {0} does not multiply to the identity column")]
    InconsistentGenerator(Word),

    #[error("model is not estimable: {0}")]
    NotEstimable(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("argument outside the domain: {0}")]
    Domain(String),

    #[error("identity violated: {0}")]
    IdentityViolation(String),

    #[error("infeasible: {0}")]
    Infeasible(String),

    #[error("no feasible candidate design")]
    NoCandidate,
}

pub type Result<T, E = DesignError> = std::result::Result<T, E>;
