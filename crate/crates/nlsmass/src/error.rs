use thiserror::Error;

use crate::augmented::PspcRecord;

#[derive(Debug, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("resolution error: {0}")]
    Resolution(String),
    #[error("hypothesis violation: {0}")]
    HypothesisViolation(String),
    #[error("no bracket: {0}")]
    NoBracket(String),
    #[error("integrator failure: {0}")]
    Integrator(String),
    #[error("critical case: {0}")]
    CriticalCase(String),
    #[error("inconclusive: {0}")]
    Inconclusive(String),
    #[error("not applicable: {0}")]
    NotApplicable(String),
    #[error("path construction failed: {0}")]
    Path(String),
    #[error("descent stalled at step {step}")]
    Stall { step: usize, record: Box<PspcRecord> },
    #[error("empty input: {0}")]
    EmptyInput(String),
    #[error("config error: {0}")]
    Config(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    /// Process exit code used by the CLI: 2 for configuration problems,
    /// 3 for anything that went wrong numerically.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Config(_) | Error::Json(_) | Error::Io(_) | Error::Csv(_) => 2,
            _ => 3,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
