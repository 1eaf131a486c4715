use std::io;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// An argument fell outside the domain of a formula.
    #[error("domain error: {0}")]
    Domain(String),

    /// One or more configuration invariants were violated.
    #[error("invalid configuration: {}", .0.join("; "))]
    Validation(Vec<String>),

    #[error("charge slot count overflows the exact integer range (B_max / E = {0:e})")]
    Overflow(f64),

    /// The link can never deliver an update, so the average age is unbounded.
    #[error("infeasible link: {0}")]
    Infeasible(String),

    #[error("simulation exceeded the slot budget of {max_slots} after {cycles} renewals")]
    BudgetExceeded { max_slots: u64, cycles: u64 },

    #[error("cannot merge results from different scenarios: {0}")]
    MismatchedScenario(String),

    #[error("failed to parse configuration: {0}")]
    Parse(#[from] serde_json::Error),

    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),

    #[error("i/o error: {0}")]
    Io(#[from] io::Error),
}

impl Error {
    /// Process exit code for the command-line front end.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Domain(_)
            | Error::Validation(_)
            | Error::Overflow(_)
            | Error::Parse(_)
            | Error::MismatchedScenario(_) => 1,
            Error::Infeasible(_) | Error::BudgetExceeded { .. } => 2,
            Error::Io(_) | Error::Csv(_) => 3,
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
