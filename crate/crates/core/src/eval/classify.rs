use serde::{Deserialize, Serialize};

use super::EvalError;

/// Area under the ROC curve via the Mann-Whitney statistic with midranks.
///
/// Ties count half. Works on integer doubled ranks so the result is the
/// same float as the brute-force pair count.
pub fn auc(scored: &[(f64, u8)]) -> Result<f64, EvalError> {
    let n_pos = scored.iter().filter(|s| s.1 == 1).count();
    let n_neg = scored.len() - n_pos;
    if n_pos == 0 || n_neg == 0 {
        return Err(EvalError::OneClassOnly);
    }
    let mut order: Vec<usize> = (0..scored.len()).collect();
    order.sort_by(|&a, &b| scored[a].0.total_cmp(&scored[b].0));
    // sum of doubled midranks over positives
    let mut rank2_sum: u128 = 0;
    let mut i = 0;
    while i < order.len() {
        let mut j = i;
        while j + 1 < order.len() && scored[order[j + 1]].0 == scored[order[i]].0 {
            j += 1;
        }
        let doubled_mid = (i + 1 + j + 1) as u128;
        for &o in &order[i..=j] {
            if scored[o].1 == 1 {
                rank2_sum += doubled_mid;
            }
        }
        i = j + 1;
    }
    let np = n_pos as u128;
    // 2U = 2R - np(np+1) == 2*concordant + ties
    let u2 = rank2_sum - np * (np + 1);
    Ok(u2 as f64 / (2 * np * n_neg as u128) as f64)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ClassMetrics {
    pub accuracy: f64,
    pub sensitivity: f64,
    pub specificity: f64,
    pub precision: f64,
    pub f1: f64,
    pub auc: f64,
    pub tp: u64,
    pub fp: u64,
    pub tn: u64,
    pub fn_: u64,
}

fn ratio(a: u64, b: u64) -> f64 {
    if b == 0 {
        f64::NAN
    } else {
        a as f64 / b as f64
    }
}

impl ClassMetrics {
    /// Confusion-matrix metrics at `threshold` (`p >= threshold` calls positive).
    /// Undefined ratios are NaN; AUC is NaN when only one class is present.
    pub fn from_scores(probs: &[f64], labels: &[u8], threshold: f64) -> Self {
        let (mut tp, mut fp, mut tn, mut fn_) = (0, 0, 0, 0);
        for (&p, &y) in probs.iter().zip(labels) {
            match (p >= threshold, y == 1) {
                (true, true) => tp += 1,
                (true, false) => fp += 1,
                (false, false) => tn += 1,
                (false, true) => fn_ += 1,
            }
        }
        let scored: Vec<(f64, u8)> = probs.iter().copied().zip(labels.iter().copied()).collect();
        Self::from_counts(tp, fp, tn, fn_, auc(&scored).unwrap_or(f64::NAN))
    }

    pub fn from_counts(tp: u64, fp: u64, tn: u64, fn_: u64, auc: f64) -> Self {
        let sensitivity = ratio(tp, tp + fn_);
        let precision = ratio(tp, tp + fp);
        let f1 = ratio(2 * tp, 2 * tp + fp + fn_);
        ClassMetrics {
            accuracy: ratio(tp + tn, tp + fp + tn + fn_),
            sensitivity,
            specificity: ratio(tn, tn + fp),
            precision,
            f1,
            auc,
            tp,
            fp,
            tn,
            fn_,
        }
    }

    pub fn named(&self) -> [(&'static str, f64); 6] {
        [
            ("accuracy", self.accuracy),
            ("sensitivity", self.sensitivity),
            ("specificity", self.specificity),
            ("precision", self.precision),
            ("f1", self.f1),
            ("auc", self.auc),
        ]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MeanSd {
    pub mean: f64,
    pub sd: f64,
    /// Number of finite values that went into the summary.
    pub n: usize,
}

/// Mean and sample standard deviation of the finite values; NaN when none.
pub fn mean_sd(values: &[f64]) -> MeanSd {
    let v: Vec<f64> = values.iter().copied().filter(|x| x.is_finite()).collect();
    let n = v.len();
    if n == 0 {
        return MeanSd { mean: f64::NAN, sd: f64::NAN, n };
    }
    let mean = v.iter().sum::<f64>() / n as f64;
    let sd = if n > 1 {
        (v.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1) as f64).sqrt()
    } else {
        0.0
    };
    MeanSd { mean, sd, n }
}
