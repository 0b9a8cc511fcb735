use std::collections::HashSet;

use rand::seq::SliceRandom;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{
    optimize_fusion_weights, smote, train_forest, train_gbt, train_mlp, EnsembleError, ForestConfig, FusionModel,
    FusionSearch, FusionWeights, GbtConfig, MlpConfig, SmoteConfig,
};
use crate::eval::{mean_sd, ClassMetrics, MeanSd};
use crate::seeds;
use crate::varfeat::{rfe_select, FeatureMatrix, RfeConfig, RfeResult};

/// Fold index per row. Each class is shuffled separately, the two lists
/// are concatenated and row `i` of that order lands in fold `i mod k`.
pub fn stratified_folds(labels: &[u8], k: usize, seed: u64) -> Result<Vec<usize>, EnsembleError> {
    if k < 2 {
        return Err(EnsembleError::InvalidConfig(format!("need at least 2 folds, got {k}")));
    }
    if labels.len() < k {
        return Err(EnsembleError::TooFewRows { have: labels.len(), need: k });
    }
    let mut rng = seeds::sub_rng(seed, 0xF01D);
    let mut order = Vec::with_capacity(labels.len());
    for class in [0u8, 1] {
        let mut idx: Vec<usize> = (0..labels.len()).filter(|&i| labels[i] == class).collect();
        idx.shuffle(&mut rng);
        order.extend(idx);
    }
    let mut folds = vec![0; labels.len()];
    for (pos, &i) in order.iter().enumerate() {
        folds[i] = pos % k;
    }
    Ok(folds)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Selection {
    All,
    Fixed(Vec<bool>),
    Rfe(RfeConfig),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Weighting {
    Fixed(FusionWeights),
    /// Grid search on an inner stratified holdout (`1 / inner_folds` of the
    /// training rows). With `refit` the learners are retrained on all
    /// training rows afterwards; otherwise the inner models are kept.
    Search { step: f64, inner_folds: usize, refit: bool },
}

/// Selection, then SMOTE, then the three learners, then fusion.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PipelineConfig {
    pub selection: Selection,
    pub smote: Option<SmoteConfig>,
    pub gbt: GbtConfig,
    pub forest: ForestConfig,
    pub mlp: MlpConfig,
    pub weighting: Weighting,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        PipelineConfig {
            selection: Selection::Rfe(RfeConfig::default()),
            smote: Some(SmoteConfig::default()),
            gbt: GbtConfig::default(),
            forest: ForestConfig::default(),
            mlp: MlpConfig::default(),
            weighting: Weighting::Fixed(FusionWeights::default()),
        }
    }
}

#[derive(Debug, Clone)]
pub struct FittedPipeline {
    pub model: FusionModel,
    pub rfe: Option<RfeResult>,
    pub search: Option<FusionSearch>,
    /// The matrix the learners were trained on (after selection and SMOTE).
    pub training: FeatureMatrix,
}

fn fit_components(
    train: &FeatureMatrix,
    cfg: &PipelineConfig,
    mask: &[bool],
    weights: FusionWeights,
    seed: u64,
) -> Result<(FusionModel, FeatureMatrix), EnsembleError> {
    let selected = train.select_columns(mask);
    let augmented = match &cfg.smote {
        Some(s) => smote(&selected, &SmoteConfig { seed: seeds::derive(seed, 1), ..*s })?,
        None => selected,
    };
    let gbt = train_gbt(&augmented, &cfg.gbt)?;
    let forest = train_forest(&augmented, &ForestConfig { seed: seeds::derive(seed, 2), ..cfg.forest })?;
    let mlp = train_mlp(&augmented, &MlpConfig { seed: seeds::derive(seed, 3), ..cfg.mlp.clone() })?;
    Ok((FusionModel { weights, gbt, forest, mlp, feature_mask: mask.to_vec() }, augmented))
}

pub fn fit_pipeline(train: &FeatureMatrix, cfg: &PipelineConfig, seed: u64) -> Result<FittedPipeline, EnsembleError> {
    if train.class_counts().contains(&0) {
        return Err(EnsembleError::OneClassOnly);
    }
    let d = train.n_cols();
    let (mask, rfe) = match &cfg.selection {
        Selection::All => (vec![true; d], None),
        Selection::Fixed(mask) => {
            if mask.len() != d {
                return Err(EnsembleError::MaskMismatch { expected: d, found: mask.len() });
            }
            (mask.clone(), None)
        }
        Selection::Rfe(r) => {
            let res = rfe_select(train, &RfeConfig { seed: seeds::derive(seed, 0), ..r.clone() })
                .map_err(|e| EnsembleError::Selection(e.to_string()))?;
            (res.selected_mask.clone(), Some(res))
        }
    };
    match cfg.weighting {
        Weighting::Fixed(w) => {
            let (model, training) = fit_components(train, cfg, &mask, w, seed)?;
            Ok(FittedPipeline { model, rfe, search: None, training })
        }
        Weighting::Search { step, inner_folds, refit } => {
            let folds = stratified_folds(&train.labels, inner_folds, seeds::derive(seed, 4))?;
            let inner_train: Vec<usize> = (0..train.n_rows()).filter(|&i| folds[i] != 0).collect();
            let holdout: Vec<usize> = (0..train.n_rows()).filter(|&i| folds[i] == 0).collect();
            let (mut inner, inner_training) =
                fit_components(&train.subset_rows(&inner_train), cfg, &mask, FusionWeights::default(), seed)?;
            let probs: Vec<[f64; 3]> =
                holdout.iter().map(|&i| inner.component_probs(train.row(i))).collect::<Result<_, _>>()?;
            let labels: Vec<u8> = holdout.iter().map(|&i| train.labels[i]).collect();
            let s = optimize_fusion_weights(&probs, &labels, step)?;
            if refit {
                let (model, training) = fit_components(train, cfg, &mask, s.weights, seeds::derive(seed, 5))?;
                Ok(FittedPipeline { model, rfe, search: Some(s), training })
            } else {
                inner.weights = s.weights;
                Ok(FittedPipeline { model: inner, rfe, search: Some(s), training: inner_training })
            }
        }
    }
}

/// Errors unless every training row (and both parents of every synthetic
/// row) is absent from the validation ids.
pub fn check_no_leakage(validation_ids: &HashSet<u64>, training: &FeatureMatrix) -> Result<(), EnsembleError> {
    for o in &training.origins {
        for p in o.parents() {
            if validation_ids.contains(&p) {
                return Err(EnsembleError::Leakage(format!("row {p} is in both training and validation")));
            }
        }
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CvConfig {
    pub folds: usize,
    pub repeats: usize,
    pub seed: u64,
}

impl Default for CvConfig {
    fn default() -> Self {
        CvConfig { folds: 5, repeats: 10, seed: 0 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FoldResult {
    pub repeat: usize,
    pub fold: usize,
    /// Indices of the validation rows in the input matrix.
    pub validation: Vec<usize>,
    pub labels: Vec<u8>,
    /// `[p_gbt, p_forest, p_mlp]` per validation row.
    pub probs: Vec<[f64; 3]>,
    pub weights: FusionWeights,
    pub selected_mask: Vec<bool>,
    /// Why the fold produced no predictions, if it failed.
    pub error: Option<EnsembleError>,
}

impl FoldResult {
    pub fn metrics(&self, w: FusionWeights) -> ClassMetrics {
        let fused: Vec<f64> = self.probs.iter().map(|p| w.fuse(*p)).collect();
        ClassMetrics::from_scores(&fused, &self.labels, 0.5)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CvReport {
    pub folds: Vec<FoldResult>,
    /// Folds whose leakage check ran and passed.
    pub leakage_checked: usize,
}

impl CvReport {
    /// Per-metric mean and sd over folds, scoring each fold with `weights`
    /// (or the fold's own weights when `None`).
    pub fn summary(&self, weights: Option<FusionWeights>) -> Vec<(&'static str, MeanSd)> {
        let per_fold: Vec<ClassMetrics> = self
            .folds
            .iter()
            .filter(|f| f.error.is_none())
            .map(|f| f.metrics(weights.unwrap_or(f.weights)))
            .collect();
        let names = ClassMetrics::from_counts(0, 0, 0, 0, 0.0).named().map(|(n, _)| n);
        names
            .iter()
            .enumerate()
            .map(|(k, &n)| (n, mean_sd(&per_fold.iter().map(|m| m.named()[k].1).collect::<Vec<_>>())))
            .collect()
    }

    /// Confusion counts summed over all folds at threshold 0.5.
    pub fn pooled(&self, weights: Option<FusionWeights>) -> ClassMetrics {
        let (mut p, mut y) = (Vec::new(), Vec::new());
        for f in self.folds.iter().filter(|f| f.error.is_none()) {
            let w = weights.unwrap_or(f.weights);
            p.extend(f.probs.iter().map(|q| w.fuse(*q)));
            y.extend_from_slice(&f.labels);
        }
        ClassMetrics::from_scores(&p, &y, 0.5)
    }
}

fn run_fold(
    m: &FeatureMatrix,
    folds: &[usize],
    fold: usize,
    repeat: usize,
    cfg: &PipelineConfig,
    seed: u64,
) -> Result<(FoldResult, bool), EnsembleError> {
    let validation: Vec<usize> = (0..m.n_rows()).filter(|&i| folds[i] == fold).collect();
    let train_idx: Vec<usize> = (0..m.n_rows()).filter(|&i| folds[i] != fold).collect();
    let labels: Vec<u8> = validation.iter().map(|&i| m.labels[i]).collect();
    let mut result = FoldResult {
        repeat,
        fold,
        validation: validation.clone(),
        labels,
        probs: Vec::new(),
        weights: FusionWeights::default(),
        selected_mask: Vec::new(),
        error: None,
    };
    let fitted = match fit_pipeline(&m.subset_rows(&train_idx), cfg, seed) {
        Ok(f) => f,
        Err(e @ (EnsembleError::OneClassOnly | EnsembleError::TooFewMinority { .. })) => {
            result.error = Some(e);
            return Ok((result, false));
        }
        Err(e) => return Err(e),
    };
    let val_ids: HashSet<u64> = validation.iter().flat_map(|&i| m.origins[i].parents()).collect();
    check_no_leakage(&val_ids, &fitted.training)?;
    result.probs = validation.iter().map(|&i| fitted.model.component_probs(m.row(i))).collect::<Result<_, _>>()?;
    result.weights = fitted.model.weights;
    result.selected_mask = fitted.model.feature_mask;
    Ok((result, true))
}

/// Repeated stratified k-fold CV. Selection and SMOTE run inside each
/// training fold; validation rows are never seen by either.
pub fn cross_validate(m: &FeatureMatrix, cv: &CvConfig, cfg: &PipelineConfig) -> Result<CvReport, EnsembleError> {
    if cv.repeats == 0 {
        return Err(EnsembleError::InvalidConfig("repeats must be >= 1".into()));
    }
    let assignments: Vec<Vec<usize>> = (0..cv.repeats)
        .map(|r| stratified_folds(&m.labels, cv.folds, seeds::derive(cv.seed, r as u64)))
        .collect::<Result<_, _>>()?;
    let jobs: Vec<(usize, usize)> = (0..cv.repeats).flat_map(|r| (0..cv.folds).map(move |f| (r, f))).collect();
    let results: Vec<(FoldResult, bool)> = jobs
        .par_iter()
        .map(|&(r, f)| {
            let seed = seeds::derive(cv.seed, 0x1000 + (r * cv.folds + f) as u64);
            run_fold(m, &assignments[r], f, r, cfg, seed)
        })
        .collect::<Result<_, _>>()?;
    let leakage_checked = results.iter().filter(|r| r.1).count();
    Ok(CvReport { folds: results.into_iter().map(|r| r.0).collect(), leakage_checked })
}

#[derive(Debug, Clone, PartialEq)]
pub struct LooReport {
    /// Pooled over every fold that produced a prediction.
    pub metrics: ClassMetrics,
    /// `(row, reason)` for folds that could not be trained.
    pub skipped: Vec<(usize, EnsembleError)>,
    pub report: CvReport,
}

/// Leave-one-out: `n` folds of one row each.
pub fn leave_one_out(m: &FeatureMatrix, cfg: &PipelineConfig, seed: u64) -> Result<LooReport, EnsembleError> {
    let n = m.n_rows();
    if n < 2 {
        return Err(EnsembleError::TooFewRows { have: n, need: 2 });
    }
    let report = cross_validate(m, &CvConfig { folds: n, repeats: 1, seed }, cfg)?;
    let skipped = report
        .folds
        .iter()
        .filter_map(|f| f.error.clone().map(|e| (f.validation[0], e)))
        .collect();
    Ok(LooReport { metrics: report.pooled(None), skipped, report })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn folds_are_stratified() {
        let labels: Vec<u8> = (0..103).map(|i| u8::from(i % 4 == 0)).collect();
        let f = stratified_folds(&labels, 5, 3).unwrap();
        for k in 0..5 {
            let size = f.iter().filter(|&&x| x == k).count();
            assert!((20..=21).contains(&size));
            let pos = (0..103).filter(|&i| f[i] == k && labels[i] == 1).count();
            assert!((5..=6).contains(&pos), "{pos}");
        }
        assert_eq!(f, stratified_folds(&labels, 5, 3).unwrap());
    }

    #[test]
    fn five_rows_five_folds() {
        let f = stratified_folds(&[0, 1, 0, 1, 0], 5, 1).unwrap();
        let mut s = f.clone();
        s.sort_unstable();
        assert_eq!(s, vec![0, 1, 2, 3, 4]);
        assert_eq!(stratified_folds(&[0, 1], 3, 1), Err(EnsembleError::TooFewRows { have: 2, need: 3 }));
    }

    #[test]
    fn leakage_detected() {
        let mut m = FeatureMatrix::from_rows(&[vec![0.0], vec![1.0]], vec![0, 1]);
        m.origins[1] = crate::varfeat::RowOrigin::Synthetic { parent: 0, neighbor: 7 };
        let val: HashSet<u64> = [7].into();
        assert!(matches!(check_no_leakage(&val, &m), Err(EnsembleError::Leakage(_))));
        let val: HashSet<u64> = [3].into();
        assert!(check_no_leakage(&val, &m).is_ok());
    }
}
