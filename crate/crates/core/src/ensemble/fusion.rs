use serde::{Deserialize, Serialize};

use super::{EnsembleError, ForestModel, GbtModel, MlpModel};
use crate::eval::{auc, EvalError};

/// Convex weights for (GBT, forest, MLP).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FusionWeights {
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
}

impl Default for FusionWeights {
    fn default() -> Self {
        FusionWeights { alpha: 0.45, beta: 0.30, gamma: 0.25 }
    }
}

impl FusionWeights {
    /// Normalizes non-negative weights to sum to one.
    pub fn new(alpha: f64, beta: f64, gamma: f64) -> Result<Self, EnsembleError> {
        let s = alpha + beta + gamma;
        if [alpha, beta, gamma].iter().any(|w| !w.is_finite() || *w < 0.0) || !(s > 0.0) {
            return Err(EnsembleError::InvalidConfig(format!("bad fusion weights ({alpha}, {beta}, {gamma})")));
        }
        if s == 1.0 {
            return Ok(FusionWeights { alpha, beta, gamma });
        }
        Ok(FusionWeights { alpha: alpha / s, beta: beta / s, gamma: gamma / s })
    }

    pub fn as_array(&self) -> [f64; 3] {
        [self.alpha, self.beta, self.gamma]
    }

    pub fn fuse(&self, p: [f64; 3]) -> f64 {
        (self.alpha * p[0] + self.beta * p[1] + self.gamma * p[2]).clamp(0.0, 1.0)
    }
}

/// The three trained learners, their feature mask and fusion weights.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FusionModel {
    pub weights: FusionWeights,
    pub gbt: GbtModel,
    pub forest: ForestModel,
    pub mlp: MlpModel,
    /// Columns of the raw feature vector the learners were trained on.
    pub feature_mask: Vec<bool>,
}

impl FusionModel {
    fn project(&self, x: &[f64]) -> Result<Vec<f64>, EnsembleError> {
        if x.len() != self.feature_mask.len() {
            return Err(EnsembleError::MaskMismatch { expected: self.feature_mask.len(), found: x.len() });
        }
        Ok(x.iter().zip(&self.feature_mask).filter(|(_, &k)| k).map(|(v, _)| *v).collect())
    }

    /// `[p_gbt, p_forest, p_mlp]` for a raw (unmasked) feature vector.
    pub fn component_probs(&self, x: &[f64]) -> Result<[f64; 3], EnsembleError> {
        let s = self.project(x)?;
        Ok([self.gbt.predict_proba(&s), self.forest.predict_proba(&s), self.mlp.predict_proba(&s)])
    }

    pub fn fuse_predict(&self, x: &[f64]) -> Result<f64, EnsembleError> {
        Ok(self.weights.fuse(self.component_probs(x)?))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FusionSearch {
    pub weights: FusionWeights,
    pub val_auc: f64,
    pub evaluated: usize,
}

/// Exhaustive search over the simplex lattice with spacing `step`,
/// maximizing validation AUC. Points are visited by descending alpha, then
/// descending beta, and only a strictly better AUC replaces the incumbent,
/// so ties favor larger alpha, then larger beta.
pub fn optimize_fusion_weights(
    component_probs: &[[f64; 3]],
    labels: &[u8],
    step: f64,
) -> Result<FusionSearch, EnsembleError> {
    if !(step > 0.0 && step <= 1.0) {
        return Err(EnsembleError::InvalidConfig(format!("step {step} must be in (0, 1]")));
    }
    let m = (1.0 / step).round() as usize;
    let mut best: Option<FusionSearch> = None;
    let mut evaluated = 0;
    let mut scored = Vec::with_capacity(labels.len());
    for i in (0..=m).rev() {
        for j in (0..=m - i).rev() {
            let k = m - i - j;
            let w = FusionWeights { alpha: i as f64 / m as f64, beta: j as f64 / m as f64, gamma: k as f64 / m as f64 };
            scored.clear();
            scored.extend(component_probs.iter().zip(labels).map(|(p, &y)| (w.fuse(*p), y)));
            let a = auc(&scored).map_err(|e| match e {
                EvalError::OneClassOnly => EnsembleError::OneClassOnly,
                other => EnsembleError::InvalidConfig(other.to_string()),
            })?;
            evaluated += 1;
            if best.is_none_or(|b| a > b.val_auc) {
                best = Some(FusionSearch { weights: w, val_auc: a, evaluated: 0 });
            }
        }
    }
    let mut b = best.expect("lattice has at least one point");
    b.evaluated = evaluated;
    Ok(b)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::seeds;
    use proptest::prelude::*;
    use rand::Rng as _;

    #[test]
    fn paper_weights_arithmetic() {
        let w = FusionWeights::default();
        assert_eq!(w.fuse([0.8, 0.6, 0.4]), 0.64);
        assert_eq!(w.fuse([1.0, 1.0, 1.0]), 1.0);
        let only = FusionWeights::new(1.0, 0.0, 0.0).unwrap();
        assert_eq!(only.fuse([0.37, 0.9, 0.1]), 0.37);
    }

    #[test]
    fn normalization() {
        let w = FusionWeights::new(9.0, 6.0, 5.0).unwrap();
        assert!((w.alpha - 0.45).abs() < 1e-15 && (w.beta - 0.30).abs() < 1e-15);
        assert!(FusionWeights::new(0.0, 0.0, 0.0).is_err());
        assert!(FusionWeights::new(-1.0, 1.0, 1.0).is_err());
    }

    #[test]
    fn lattice_sizes_and_tie_break() {
        let probs = [[0.1; 3], [0.9; 3], [0.4; 3]];
        let y = [0, 1, 1];
        let r = optimize_fusion_weights(&probs, &y, 0.5).unwrap();
        assert_eq!(r.evaluated, 6);
        assert_eq!(r.weights.as_array(), [1.0, 0.0, 0.0]);
        assert_eq!(optimize_fusion_weights(&probs, &y, 0.05).unwrap().evaluated, 231);
        assert_eq!(optimize_fusion_weights(&probs, &[1, 1, 1], 0.5), Err(EnsembleError::OneClassOnly));
    }

    #[test]
    fn perfect_component_wins() {
        let mut rng = seeds::rng(4);
        let y: Vec<u8> = (0..200).map(|i| (i % 2) as u8).collect();
        let probs: Vec<[f64; 3]> = y
            .iter()
            .map(|&l| [rng.random(), 0.499 + 0.002 * f64::from(l) + 1e-4 * rng.random::<f64>(), rng.random()])
            .collect();
        let r = optimize_fusion_weights(&probs, &y, 0.05).unwrap();
        assert_eq!(r.val_auc, 1.0);
        // the separating margin is narrower than any 0.05 share of noise
        assert_eq!(r.weights.as_array(), [0.0, 1.0, 0.0]);
    }

    proptest! {
        #[test]
        fn fused_is_convex(p in prop::array::uniform3(0.0f64..=1.0), w in prop::array::uniform3(0.0f64..10.0)) {
            prop_assume!(w.iter().sum::<f64>() > 1e-6);
            let fw = FusionWeights::new(w[0], w[1], w[2]).unwrap();
            let f = fw.fuse(p);
            let lo = p.iter().copied().fold(f64::INFINITY, f64::min);
            let hi = p.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            prop_assert!(f >= lo - 1e-12 && f <= hi + 1e-12);
        }

        #[test]
        fn scaling_weights_keeps_auc(
            rows in prop::collection::vec((prop::array::uniform3(0.0f64..1.0), 0u8..2), 4..40),
            w in prop::array::uniform3(0.01f64..1.0),
            c in 0.1f64..10.0,
        ) {
            let probs: Vec<[f64; 3]> = rows.iter().map(|r| r.0).collect();
            let y: Vec<u8> = rows.iter().map(|r| r.1).collect();
            let a = FusionWeights::new(w[0], w[1], w[2]).unwrap();
            let b = FusionWeights::new(c * w[0], c * w[1], c * w[2]).unwrap();
            let sa: Vec<(f64, u8)> = probs.iter().zip(&y).map(|(p, &l)| (a.fuse(*p), l)).collect();
            let sb: Vec<(f64, u8)> = probs.iter().zip(&y).map(|(p, &l)| (b.fuse(*p), l)).collect();
            if let (Ok(x), Ok(z)) = (auc(&sa), auc(&sb)) {
                prop_assert!((x - z).abs() < 1e-9);
            }
        }
    }
}
