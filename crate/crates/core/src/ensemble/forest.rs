use rand::Rng as _;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::tree::{Columns, Criterion, GrowConfig, Grower, Tree};
use super::{check_two_classes, EnsembleError};
use crate::seeds;
use crate::varfeat::FeatureMatrix;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ForestConfig {
    pub n_trees: usize,
    pub max_depth: usize,
    pub bootstrap: bool,
    pub seed: u64,
}

impl Default for ForestConfig {
    fn default() -> Self {
        ForestConfig { n_trees: 200, max_depth: 12, bootstrap: true, seed: 0 }
    }
}

/// Random forest of Gini trees; `predict_proba` is the fraction of trees
/// voting positive.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ForestModel {
    pub trees: Vec<Tree>,
    pub n_features: usize,
    pub config: ForestConfig,
    /// Mean decrease in impurity per feature, normalized to sum to 1.
    pub importances: Vec<f64>,
}

pub fn max_features(d: usize) -> usize {
    ((d as f64).sqrt().round() as usize).clamp(1, d.max(1))
}

pub fn train_forest(m: &FeatureMatrix, cfg: &ForestConfig) -> Result<ForestModel, EnsembleError> {
    check_two_classes(m)?;
    if cfg.n_trees == 0 {
        return Err(EnsembleError::InvalidConfig("n_trees must be >= 1".into()));
    }
    let d = m.n_cols();
    let n = m.n_rows();
    let data: Vec<f64> = (0..n).flat_map(|i| m.row(i).iter().copied()).collect();
    let cols = Columns { data: &data, n_rows: n, n_cols: d };
    let presorted = cols.presort();
    let mtry = max_features(d);
    let grown: Vec<(Tree, Vec<f64>)> = (0..cfg.n_trees)
        .into_par_iter()
        .map(|t| {
            let mut rng = seeds::sub_rng(cfg.seed, t as u64);
            let mut weight = vec![0.0; n];
            if cfg.bootstrap {
                for _ in 0..n {
                    weight[rng.random_range(0..n)] += 1.0;
                }
            } else {
                weight.iter_mut().for_each(|w| *w = 1.0);
            }
            let sorted: Vec<Vec<u32>> = presorted
                .iter()
                .map(|l| l.iter().copied().filter(|&r| weight[r as usize] > 0.0).collect())
                .collect();
            let g = Grower::new(
                &cols,
                Criterion::Gini { weight: &weight, label: &m.labels },
                GrowConfig { max_depth: cfg.max_depth, max_features: Some(mtry) },
            );
            g.grow(sorted, &mut rng)
        })
        .collect();
    let mut importances = vec![0.0; d];
    let mut trees = Vec::with_capacity(grown.len());
    for (tree, imp) in grown {
        let s: f64 = imp.iter().sum();
        if s > 0.0 {
            for (a, b) in importances.iter_mut().zip(&imp) {
                *a += b / s;
            }
        }
        trees.push(tree);
    }
    let s: f64 = importances.iter().sum();
    if s > 0.0 {
        importances.iter_mut().for_each(|v| *v /= s);
    }
    Ok(ForestModel { trees, n_features: d, config: *cfg, importances })
}

impl ForestModel {
    pub fn predict_proba(&self, x: &[f64]) -> f64 {
        let votes: f64 = self.trees.iter().map(|t| t.predict(x)).sum();
        votes / self.trees.len() as f64
    }
}
