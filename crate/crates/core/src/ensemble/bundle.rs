use serde::{Deserialize, Serialize};

use super::{EnsembleError, FusionModel, FusionWeights};

pub const BUNDLE_FORMAT: &str = "seqforge.classifier";
pub const BUNDLE_VERSION: u32 = 1;

/// Versioned JSON container for a trained fusion model.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelBundle {
    pub format: String,
    pub version: u32,
    /// Names of the raw feature columns the mask refers to.
    pub feature_names: Vec<String>,
    pub model: FusionModel,
}

impl ModelBundle {
    pub fn new(model: FusionModel, feature_names: Vec<String>) -> Self {
        ModelBundle { format: BUNDLE_FORMAT.into(), version: BUNDLE_VERSION, feature_names, model }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("bundle is always serializable")
    }

    /// Parses and validates a bundle; fusion weights are renormalized.
    pub fn from_json(text: &str) -> Result<Self, EnsembleError> {
        let mut b: ModelBundle = serde_json::from_str(text).map_err(|e| EnsembleError::Bundle(e.to_string()))?;
        if b.format != BUNDLE_FORMAT {
            return Err(EnsembleError::Bundle(format!("unknown format {:?}", b.format)));
        }
        if b.version != BUNDLE_VERSION {
            return Err(EnsembleError::Bundle(format!("unsupported version {}", b.version)));
        }
        if b.feature_names.len() != b.model.feature_mask.len() {
            return Err(EnsembleError::Bundle("feature names do not match the mask".into()));
        }
        let w = b.model.weights;
        b.model.weights = FusionWeights::new(w.alpha, w.beta, w.gamma)?;
        Ok(b)
    }
}
