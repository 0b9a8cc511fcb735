use std::path::Path;

use seqforge_core::denoise::DenoiseError;
use seqforge_core::ensemble::EnsembleError;
use seqforge_core::eval::EvalError;
use seqforge_core::seqio::SeqIoError;
use seqforge_core::simkit::SimError;
use seqforge_core::varfeat::FeatError;
use thiserror::Error;

/// Every failure maps onto one of three exit codes.
#[derive(Debug, Error)]
pub enum CliError {
    /// Bad input file, flag or config value.
    #[error("{0}")]
    Input(String),
    /// Training diverged.
    #[error("{0}")]
    Numerical(String),
    /// Broken internal invariant or an output that could not be written.
    #[error("{0}")]
    Internal(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Input(_) => 2,
            CliError::Numerical(_) => 3,
            CliError::Internal(_) => 4,
        }
    }

    pub fn input(msg: impl Into<String>) -> Self {
        CliError::Input(msg.into())
    }

    /// Prefixes the message with the file it concerns.
    pub fn at(self, path: &Path) -> Self {
        let p = path.display();
        match self {
            CliError::Input(m) => CliError::Input(format!("{p}: {m}")),
            CliError::Numerical(m) => CliError::Numerical(format!("{p}: {m}")),
            CliError::Internal(m) => CliError::Internal(format!("{p}: {m}")),
        }
    }
}

pub type CliResult<T> = Result<T, CliError>;

impl From<SeqIoError> for CliError {
    fn from(e: SeqIoError) -> Self {
        CliError::Input(e.to_string())
    }
}

impl From<SimError> for CliError {
    fn from(e: SimError) -> Self {
        CliError::Input(e.to_string())
    }
}

impl From<DenoiseError> for CliError {
    fn from(e: DenoiseError) -> Self {
        match e {
            DenoiseError::DivergedLoss { .. } => CliError::Numerical(e.to_string()),
            DenoiseError::Shape(_) => CliError::Internal(e.to_string()),
            _ => CliError::Input(e.to_string()),
        }
    }
}

impl From<EnsembleError> for CliError {
    fn from(e: EnsembleError) -> Self {
        match e {
            EnsembleError::DivergedLoss => CliError::Numerical(e.to_string()),
            EnsembleError::Leakage(_) | EnsembleError::MaskMismatch { .. } => CliError::Internal(e.to_string()),
            _ => CliError::Input(e.to_string()),
        }
    }
}

impl From<FeatError> for CliError {
    fn from(e: FeatError) -> Self {
        match e {
            FeatError::Ensemble(inner) => inner.into(),
            other => CliError::Input(other.to_string()),
        }
    }
}

impl From<EvalError> for CliError {
    fn from(e: EvalError) -> Self {
        match e {
            EvalError::LedgerMismatch(_) | EvalError::EmptyInput => CliError::Input(e.to_string()),
            _ => CliError::Internal(e.to_string()),
        }
    }
}
