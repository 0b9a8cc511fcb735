//! Gradient-boosted trees, random forest and MLP with weighted probability
//! fusion, SMOTE, and the cross-validation protocols.

mod bundle;
mod cv;
mod forest;
mod fusion;
mod gbt;
mod mlp;
mod smote;
pub mod tree;

pub use bundle::{ModelBundle, BUNDLE_FORMAT, BUNDLE_VERSION};
pub use cv::{
    check_no_leakage, cross_validate, fit_pipeline, leave_one_out, stratified_folds, CvConfig, CvReport, FittedPipeline,
    FoldResult, LooReport, PipelineConfig, Selection, Weighting,
};
pub use forest::{max_features, train_forest, ForestConfig, ForestModel};
pub use fusion::{optimize_fusion_weights, FusionModel, FusionSearch, FusionWeights};
pub use gbt::{train_gbt, GbtConfig, GbtModel};
pub use mlp::{class_weights, train_mlp, weighted_bce, Dense, MlpConfig, MlpModel};
pub use smote::{smote, SmoteConfig};

use thiserror::Error;

use crate::varfeat::FeatureMatrix;

#[derive(Debug, Clone, Error, PartialEq)]
pub enum EnsembleError {
    #[error("training data must contain both classes")]
    OneClassOnly,
    #[error("SMOTE needs at least {need} minority rows, have {have}")]
    TooFewMinority { have: usize, need: usize },
    #[error("need at least {need} rows, have {have}")]
    TooFewRows { have: usize, need: usize },
    #[error("feature vector has {found} values, model expects {expected}")]
    MaskMismatch { expected: usize, found: usize },
    #[error("training loss became non-finite")]
    DivergedLoss,
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("validation leakage: {0}")]
    Leakage(String),
    #[error("feature selection failed: {0}")]
    Selection(String),
    #[error("model bundle: {0}")]
    Bundle(String),
}

pub(crate) fn sigmoid(z: f64) -> f64 {
    if z >= 0.0 {
        1.0 / (1.0 + (-z).exp())
    } else {
        let e = z.exp();
        e / (1.0 + e)
    }
}

pub(crate) fn check_two_classes(m: &FeatureMatrix) -> Result<[usize; 2], EnsembleError> {
    let c = m.class_counts();
    if c[0] == 0 || c[1] == 0 {
        return Err(EnsembleError::OneClassOnly);
    }
    if m.n_cols() == 0 {
        return Err(EnsembleError::InvalidConfig("no feature columns".into()));
    }
    Ok(c)
}
