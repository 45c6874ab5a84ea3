use thiserror::Error;

use crate::stepper::StepReport;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("time order alpha = {0} is outside the admissible range (0, 1]")]
    AlphaOutOfRange(f64),

    #[error("space order beta = {0} is outside the admissible range (1, 2]")]
    BetaOutOfRange(f64),

    #[error("weight table must hold at least one entry")]
    EmptyTable,

    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("invalid model parameter: {0}")]
    InvalidParameter(String),

    #[error("length mismatch: expected {expected}, got {actual}")]
    LengthMismatch { expected: usize, actual: usize },

    #[error("weight table has {available} entries but the operator needs {required}")]
    TableTooShort { required: usize, available: usize },

    #[error("history holds {available} levels but level {requested} was requested")]
    InsufficientHistory { requested: usize, available: usize },

    #[error("linear solve failed: {0}")]
    Solver(String),

    #[error("guard violation at step {}: {}", .0.time_index, .0.guard_violation.as_deref().unwrap_or("unknown"))]
    GuardViolation(Box<StepReport>),
}

impl Error {
    /// Short machine-readable category used by front ends.
    pub fn category(&self) -> &'static str {
        match self {
            Error::AlphaOutOfRange(_)
            | Error::BetaOutOfRange(_)
            | Error::EmptyTable
            | Error::InvalidGrid(_)
            | Error::InvalidParameter(_)
            | Error::LengthMismatch { .. }
            | Error::TableTooShort { .. }
            | Error::InsufficientHistory { .. } => "config",
            Error::Solver(_) => "solver",
            Error::GuardViolation(_) => "guard",
        }
    }
}
