use serde::{Deserialize, Serialize};

use super::tree::{Columns, Criterion, GrowConfig, Grower, Tree};
use super::{check_two_classes, sigmoid, EnsembleError};
use crate::seeds;
use crate::varfeat::FeatureMatrix;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GbtConfig {
    pub learning_rate: f64,
    pub max_depth: usize,
    pub n_rounds: usize,
    /// L2 penalty on leaf values.
    pub lambda: f64,
    /// Minimum hessian mass per child.
    pub min_child_weight: f64,
}

impl Default for GbtConfig {
    fn default() -> Self {
        GbtConfig { learning_rate: 0.05, max_depth: 6, n_rounds: 300, lambda: 1.0, min_child_weight: 1.0 }
    }
}

/// Logistic-loss boosted trees. Leaf values already include the learning
/// rate, so `p = logistic(base_score + sum of leaves)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GbtModel {
    pub base_score: f64,
    pub trees: Vec<Tree>,
    pub n_features: usize,
    pub config: GbtConfig,
}

pub fn train_gbt(m: &FeatureMatrix, cfg: &GbtConfig) -> Result<GbtModel, EnsembleError> {
    let [n0, n1] = check_two_classes(m)?;
    if !(cfg.learning_rate > 0.0) || cfg.lambda < 0.0 {
        return Err(EnsembleError::InvalidConfig("learning_rate must be > 0 and lambda >= 0".into()));
    }
    let n = m.n_rows();
    let d = m.n_cols();
    let data: Vec<f64> = (0..n).flat_map(|i| m.row(i).iter().copied()).collect();
    let cols = Columns { data: &data, n_rows: n, n_cols: d };
    let presorted = cols.presort();
    let base_score = (n1 as f64 / n0 as f64).ln();
    let mut margin = vec![base_score; n];
    let mut grad = vec![0.0; n];
    let mut hess = vec![0.0; n];
    let mut trees = Vec::with_capacity(cfg.n_rounds);
    // growth is deterministic with all features; the rng is never drawn from
    let mut rng = seeds::rng(0);
    for _ in 0..cfg.n_rounds {
        for i in 0..n {
            let p = sigmoid(margin[i]);
            grad[i] = p - f64::from(m.labels[i]);
            hess[i] = (p * (1.0 - p)).max(1e-16);
        }
        let g = Grower::new(
            &cols,
            Criterion::Newton {
                grad: &grad,
                hess: &hess,
                lambda: cfg.lambda,
                min_child_hess: cfg.min_child_weight,
                scale: cfg.learning_rate,
            },
            GrowConfig { max_depth: cfg.max_depth, max_features: None },
        );
        let (tree, _) = g.grow(presorted.clone(), &mut rng);
        for (i, mg) in margin.iter_mut().enumerate() {
            *mg += tree.predict(m.row(i));
        }
        trees.push(tree);
    }
    Ok(GbtModel { base_score, trees, n_features: d, config: *cfg })
}

impl GbtModel {
    pub fn margin(&self, x: &[f64]) -> f64 {
        self.base_score + self.trees.iter().map(|t| t.predict(x)).sum::<f64>()
    }

    pub fn predict_proba(&self, x: &[f64]) -> f64 {
        sigmoid(self.margin(x))
    }
}
