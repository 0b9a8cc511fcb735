//! Metrics tying predictions back to ground truth.

mod classify;
mod denoising;
mod pileup;
mod stats;

pub use classify::{auc, mean_sd, ClassMetrics, MeanSd};
pub use denoising::{recovery_rate, snr, snr_report, substitution_correction_profile, SnrReport, SubstitutionProfile, SNR_CAP_DB};
pub use pileup::{call_snps, variant_detection_score, PileupConfig};
pub use stats::{hypergeom_enrichment, pearson};

use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum EvalError {
    #[error("no input to evaluate")]
    EmptyInput,
    #[error("ledger does not match reads: {0}")]
    LedgerMismatch(String),
    #[error("both classes are required")]
    OneClassOnly,
    #[error("input vectors have zero variance or mismatched lengths")]
    DegenerateVariance,
    #[error("invalid counts: {0}")]
    InvalidCounts(String),
}
