use thiserror::Error;

use crate::rational::Val;

/// Every failure the library can report.
///
/// Precision-related variants are raised instead of guessing: an answer that
/// depends on digits below a known precision floor is never produced.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("{0} is not prime")]
    NonPrime(u64),
    #[error("unsupported tower: {0}")]
    UnsupportedTower(String),
    #[error("precision {requested} too large for p = {p} (limit {limit} p-adic digits)")]
    PrecisionTooLarge { p: u64, requested: u32, limit: u32 },
    #[error("precision loss: {0}")]
    PrecisionLoss(String),
    #[error("division by an element not certifiably nonzero")]
    DivisionByUncertifiedZero,
    #[error("not a unit (valuation {0})")]
    NotAUnit(String),
    #[error("elements belong to different parents")]
    ParentMismatch,
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("truncation loss: {0}")]
    TruncationLoss(String),
    #[error("root not in field; an extension of degree {needed_degree} over F_p is required")]
    RootNotInField { needed_degree: u32 },
    #[error("hypothesis violated: {0}")]
    HypothesisViolated(String),
    #[error("no convergence after {0} iterations")]
    NoConvergence(usize),
    #[error("degenerate Newton polygon: fewer than two finite points")]
    DegeneratePolygon,
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("family parameter u must be nonzero")]
    ZeroU,
    #[error("search space of {candidates} maps exceeds budget {budget}")]
    BudgetExceeded { candidates: u64, budget: u64 },
    #[error("valuation {0} is not on a boundary of the period domain")]
    NotOnBoundary(Val),
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn parse(msg: impl Into<String>) -> Self {
        Error::Parse(msg.into())
    }
}
