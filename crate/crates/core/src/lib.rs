//! Sequencing read quality control, ground-truth noise simulation, a
//! dual-encoder read denoiser, and a fused tree/forest/perceptron
//! pathogenicity classifier over engineered variant features.
//!
//! Every stochastic routine takes an explicit 64-bit seed and is
//! bit-reproducible; parallel sections derive per-item seeds with
//! [`seeds::derive`] so results never depend on the worker count.

pub mod denoise;
pub mod ensemble;
pub mod eval;
pub mod optim;
pub mod qc;
pub mod seeds;
pub mod seqio;
pub mod simkit;
pub mod tsv;
pub mod varfeat;

pub use denoise::{DenoiseModel, TrainConfig, TrainReport};
pub use ensemble::{FusionModel, FusionWeights};
pub use eval::{ClassMetrics, SnrReport};
pub use qc::{QcReport, TrimPolicy};
pub use seqio::{ReadSet, SeqRecord};
pub use simkit::{NoiseSpec, Reference, SimTruth};
pub use varfeat::{FeatureMatrix, VariantRecord, VariantType};
