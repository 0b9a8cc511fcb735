//! Dual-encoder read denoiser: a convolutional branch and a tanh recurrent
//! branch read the same window, their per-position features are
//! concatenated, and a dense head emits four base logits plus one noise
//! logit per position.

mod apply;
mod encode;
mod format;
pub mod layers;
mod model;
mod tensor;
mod train;

pub use apply::denoise_reads;
pub use encode::{build_dataset, encode_window, tile, Example, IGNORE};
pub use format::{read_model, write_model, MODEL_MAGIC, MODEL_VERSION};
pub use model::{Arch, DenoiseModel, LossParts};
pub use tensor::Tensor;
pub use train::{train, EpochStats, TrainConfig, TrainReport};

use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum DenoiseError {
    #[error("shape error: {0}")]
    Shape(String),
    #[error("truth does not match reads: {0}")]
    TruthMismatch(String),
    #[error("training loss became non-finite at epoch {epoch}")]
    DivergedLoss { epoch: usize },
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("model file: {0}")]
    Format(String),
}
