//! Crate error type.

use thiserror::Error;

/// Errors produced by the simulator, classifiers and harness.
#[derive(Debug, Error)]
pub enum Error {
    /// Invalid configuration value or file. Messages name the offending key.
    #[error("configuration error: {0}")]
    Config(String),

    /// A sector reported more than one outcome for the same pilot slot.
    #[error("malformed report: {0}")]
    MalformedReport(String),

    /// Classifier input carried no known entries at all.
    #[error("cannot fit: no known entries in the observation sets")]
    EmptyObservations,

    /// The gradient solver produced a non-finite objective.
    #[error("solver diverged (non-finite objective) with step size {step}")]
    SolverDiverged { step: f64 },

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
}

impl Error {
    /// Shorthand for a configuration error.
    pub fn config(msg: impl Into<String>) -> Self {
        Error::Config(msg.into())
    }

    /// Process exit code associated with this error (the CLI contract).
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Config(_) => 2,
            Error::SolverDiverged { .. } => 3,
            _ => 1,
        }
    }
}
