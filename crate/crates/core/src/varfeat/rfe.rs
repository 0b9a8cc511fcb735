use serde::{Deserialize, Serialize};

use super::{FeatError, FeatureMatrix};
use crate::ensemble::{stratified_folds, train_forest, ForestConfig};
use crate::eval::auc;
use crate::seeds;
use crate::tsv::{fmt_f64, schema_line};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RfeConfig {
    pub target_k: usize,
    pub step: usize,
    pub forest: ForestConfig,
    /// Folds for the per-step CV-AUC curve; 0 skips the curve.
    pub cv_folds: usize,
    pub seed: u64,
}

impl Default for RfeConfig {
    fn default() -> Self {
        RfeConfig {
            target_k: 17,
            step: 1,
            forest: ForestConfig { n_trees: 100, max_depth: 10, ..ForestConfig::default() },
            cv_folds: 3,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RfeResult {
    pub selected_mask: Vec<bool>,
    /// All column indices, most important first: survivors by final
    /// importance, then eliminated columns latest-removed first.
    pub ranking: Vec<usize>,
    /// Feature count at the step each column was removed (`None` for survivors).
    pub eliminated_at_k: Vec<Option<usize>>,
    /// Importance from the last forest each column took part in.
    pub importances: Vec<f64>,
    /// `(k, cv_auc)` for every feature count visited, largest first.
    pub cv_curve: Vec<(usize, f64)>,
}

fn cv_auc(m: &FeatureMatrix, cfg: &RfeConfig, step_seed: u64) -> Result<f64, FeatError> {
    let folds = stratified_folds(&m.labels, cfg.cv_folds, step_seed)?;
    let mut scored = Vec::with_capacity(m.n_rows());
    for f in 0..cfg.cv_folds {
        let train: Vec<usize> = (0..m.n_rows()).filter(|&i| folds[i] != f).collect();
        let forest_cfg = ForestConfig { seed: seeds::derive(step_seed, f as u64), ..cfg.forest };
        let model = train_forest(&m.subset_rows(&train), &forest_cfg)?;
        scored.extend((0..m.n_rows()).filter(|&i| folds[i] == f).map(|i| (model.predict_proba(m.row(i)), m.labels[i])));
    }
    // pooled out-of-fold AUC
    auc(&scored).map_err(|e| FeatError::InvalidConfig(e.to_string()))
}

/// Recursive feature elimination wrapped around a random forest with
/// mean-decrease-in-impurity importances.
pub fn rfe_select(m: &FeatureMatrix, cfg: &RfeConfig) -> Result<RfeResult, FeatError> {
    let d = m.n_cols();
    if cfg.target_k == 0 || cfg.step == 0 {
        return Err(FeatError::InvalidConfig("target_k and step must be >= 1".into()));
    }
    if d < cfg.target_k {
        return Err(FeatError::TooFewFeatures { needed: cfg.target_k, have: d });
    }
    let mut active: Vec<usize> = (0..d).collect();
    let mut importances = vec![0.0; d];
    let mut eliminated_at_k = vec![None; d];
    let mut removed_order = Vec::new();
    let mut cv_curve = Vec::new();
    let mut it = 0u64;
    loop {
        let mut mask = vec![false; d];
        active.iter().for_each(|&j| mask[j] = true);
        let sub = m.select_columns(&mask);
        let step_seed = seeds::derive(cfg.seed, it);
        if cfg.cv_folds > 0 {
            cv_curve.push((active.len(), cv_auc(&sub, cfg, step_seed)?));
        }
        let f = train_forest(&sub, &ForestConfig { seed: step_seed, ..cfg.forest })?;
        for (pos, &j) in active.iter().enumerate() {
            importances[j] = f.importances[pos];
        }
        if active.len() == cfg.target_k {
            break;
        }
        let drop = cfg.step.min(active.len() - cfg.target_k);
        let mut order: Vec<usize> = active.clone();
        // lowest importance first; ties drop the higher index
        order.sort_by(|&a, &b| importances[a].total_cmp(&importances[b]).then(b.cmp(&a)));
        let k = active.len();
        for &j in &order[..drop] {
            eliminated_at_k[j] = Some(k);
            removed_order.push(j);
        }
        active.retain(|j| eliminated_at_k[*j].is_none());
        it += 1;
    }
    let mut ranking = active.clone();
    ranking.sort_by(|&a, &b| importances[b].total_cmp(&importances[a]).then(a.cmp(&b)));
    ranking.extend(removed_order.iter().rev());
    let mut selected_mask = vec![false; d];
    active.iter().for_each(|&j| selected_mask[j] = true);
    Ok(RfeResult { selected_mask, ranking, eliminated_at_k, importances, cv_curve })
}

/// `rank, slot, name, importance, eliminated_at_k`; rank 1 is most important.
pub fn write_selection_tsv(r: &RfeResult, names: &[String]) -> String {
    let mut s = schema_line("seqforge.selection.v1");
    s.push_str("rank\tslot\tname\timportance\teliminated_at_k\n");
    for (rank, &j) in r.ranking.iter().enumerate() {
        let elim = r.eliminated_at_k[j].map_or("NA".to_string(), |k| k.to_string());
        s.push_str(&format!("{}\t{}\t{}\t{}\t{}\n", rank + 1, j, names[j], fmt_f64(r.importances[j]), elim));
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::varfeat::{synth_feature_dataset, SynthConfig};

    fn small() -> (FeatureMatrix, RfeConfig) {
        let m = synth_feature_dataset(&SynthConfig {
            n_pos: 150,
            n_neg: 150,
            informative: vec![0, 1, 2],
            correlation_pairs: vec![],
            seed: 2,
            ..SynthConfig::default()
        })
        .unwrap()
        .select_columns(&(0..63).map(|j| j < 10).collect::<Vec<_>>());
        let cfg = RfeConfig {
            target_k: 3,
            step: 2,
            forest: ForestConfig { n_trees: 30, max_depth: 6, ..ForestConfig::default() },
            cv_folds: 2,
            seed: 5,
        };
        (m, cfg)
    }

    #[test]
    fn identity_when_target_is_width() {
        let (m, mut cfg) = small();
        cfg.target_k = 10;
        let r = rfe_select(&m, &cfg).unwrap();
        assert!(r.selected_mask.iter().all(|&k| k));
        assert!(r.eliminated_at_k.iter().all(Option::is_none));
        assert_eq!(r.cv_curve.len(), 1);
    }

    #[test]
    fn shrinks_by_step_and_ranks_everything() {
        let (m, cfg) = small();
        let r = rfe_select(&m, &cfg).unwrap();
        let ks: Vec<usize> = r.cv_curve.iter().map(|c| c.0).collect();
        assert_eq!(ks, vec![10, 8, 6, 4, 3]);
        let mut sorted = r.ranking.clone();
        sorted.sort_unstable();
        assert_eq!(sorted, (0..10).collect::<Vec<_>>());
        assert_eq!(r.selected_mask.iter().filter(|&&k| k).count(), 3);
        let mut got: Vec<usize> = (0..10).filter(|&j| r.selected_mask[j]).collect();
        got.sort_unstable();
        assert_eq!(got, vec![0, 1, 2]);
        assert_eq!(r, rfe_select(&m, &cfg).unwrap());
        let tsv = write_selection_tsv(&r, &m.feature_names);
        assert_eq!(tsv.lines().count(), 12);
    }

    #[test]
    fn too_few_features() {
        let (m, mut cfg) = small();
        cfg.target_k = 11;
        assert_eq!(rfe_select(&m, &cfg), Err(FeatError::TooFewFeatures { needed: 11, have: 10 }));
    }
}
