use rand::seq::SliceRandom;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use super::{check_two_classes, sigmoid, EnsembleError};
use crate::optim::{Adam, AdamConfig};
use crate::seeds;
use crate::varfeat::FeatureMatrix;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MlpConfig {
    pub hidden: Vec<usize>,
    pub epochs: usize,
    pub batch_size: usize,
    pub lr: f64,
    pub seed: u64,
}

impl Default for MlpConfig {
    fn default() -> Self {
        MlpConfig { hidden: vec![32, 16], epochs: 60, batch_size: 64, lr: 1e-3, seed: 0 }
    }
}

/// Inverse-frequency class weights `n / (2 n_y)`.
pub fn class_weights(labels: &[u8]) -> [f64; 2] {
    let n = labels.len() as f64;
    let n1 = labels.iter().filter(|&&y| y == 1).count() as f64;
    let n0 = n - n1;
    [n / (2.0 * n0), n / (2.0 * n1)]
}

/// Class-weighted binary cross-entropy,
/// `-(1/N) sum w_y [y ln p + (1-y) ln(1-p)]`.
pub fn weighted_bce(probs: &[f64], labels: &[u8], w: [f64; 2]) -> f64 {
    let s: f64 = probs
        .iter()
        .zip(labels)
        .map(|(&p, &y)| {
            let p = p.clamp(1e-12, 1.0 - 1e-12);
            let yf = f64::from(y);
            w[y as usize] * (yf * p.ln() + (1.0 - yf) * (1.0 - p).ln())
        })
        .sum();
    -s / probs.len() as f64
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Dense {
    pub n_in: usize,
    pub n_out: usize,
    /// Row-major `n_out x n_in`.
    pub w: Vec<f64>,
    pub b: Vec<f64>,
}

/// ReLU hidden layers, logistic output. Inputs are standardized with the
/// training-set mean and sd stored in the model.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MlpModel {
    pub layers: Vec<Dense>,
    pub mean: Vec<f64>,
    pub sd: Vec<f64>,
    pub class_weights: [f64; 2],
    pub final_loss: Option<f64>,
}

impl MlpModel {
    fn forward(&self, x: &[f64], acts: &mut Vec<Vec<f64>>) -> f64 {
        acts.clear();
        acts.push(x.iter().zip(&self.mean).zip(&self.sd).map(|((v, m), s)| (v - m) / s).collect());
        let last = self.layers.len() - 1;
        for (li, l) in self.layers.iter().enumerate() {
            let inp = &acts[li];
            let mut out = l.b.clone();
            for (o, ov) in out.iter_mut().enumerate() {
                let row = &l.w[o * l.n_in..(o + 1) * l.n_in];
                *ov += row.iter().zip(inp).map(|(a, b)| a * b).sum::<f64>();
                if li < last {
                    *ov = ov.max(0.0);
                }
            }
            acts.push(out);
        }
        acts[last + 1][0]
    }

    /// Adds the gradient of the batch-mean weighted loss to `gw`/`gb` and
    /// returns the summed (not averaged) loss of the batch.
    fn accumulate(
        &self,
        m: &FeatureMatrix,
        batch: &[usize],
        gw: &mut [Vec<f64>],
        gb: &mut [Vec<f64>],
        acts: &mut Vec<Vec<f64>>,
    ) -> f64 {
        let cw = self.class_weights;
        let nl = self.layers.len();
        let mut loss = 0.0;
        for &i in batch {
            let y = m.labels[i];
            let z = self.forward(m.row(i), acts);
            let p = sigmoid(z);
            let w = cw[y as usize];
            let pc = p.clamp(1e-12, 1.0 - 1e-12);
            loss -= w * if y == 1 { pc.ln() } else { (1.0 - pc).ln() };
            // d(loss)/dz for weighted BCE through the sigmoid
            let mut delta = vec![w * (p - f64::from(y)) / batch.len() as f64];
            for li in (0..nl).rev() {
                let l = &self.layers[li];
                let inp = &acts[li];
                for o in 0..l.n_out {
                    gb[li][o] += delta[o];
                    let row = &mut gw[li][o * l.n_in..(o + 1) * l.n_in];
                    for (g, a) in row.iter_mut().zip(inp) {
                        *g += delta[o] * a;
                    }
                }
                if li > 0 {
                    let mut prev = vec![0.0; l.n_in];
                    for o in 0..l.n_out {
                        let row = &l.w[o * l.n_in..(o + 1) * l.n_in];
                        for (pv, wv) in prev.iter_mut().zip(row) {
                            *pv += delta[o] * wv;
                        }
                    }
                    for (pv, a) in prev.iter_mut().zip(inp) {
                        if *a <= 0.0 {
                            *pv = 0.0;
                        }
                    }
                    delta = prev;
                }
            }
        }
        loss
    }

    /// Kept strictly inside (0, 1) even when the logit saturates.
    pub fn predict_proba(&self, x: &[f64]) -> f64 {
        let mut acts = Vec::new();
        sigmoid(self.forward(x, &mut acts)).clamp(1e-15, 1.0 - 1e-15)
    }
}

pub fn train_mlp(m: &FeatureMatrix, cfg: &MlpConfig) -> Result<MlpModel, EnsembleError> {
    check_two_classes(m)?;
    if cfg.batch_size == 0 || !(cfg.lr > 0.0) {
        return Err(EnsembleError::InvalidConfig("batch_size and lr must be positive".into()));
    }
    let n = m.n_rows();
    let d = m.n_cols();
    let mut mean = vec![0.0; d];
    let mut sd = vec![0.0; d];
    for j in 0..d {
        let c = m.column(j);
        mean[j] = c.iter().sum::<f64>() / n as f64;
        let var = c.iter().map(|v| (v - mean[j]).powi(2)).sum::<f64>() / n as f64;
        sd[j] = if var > 0.0 { var.sqrt() } else { 1.0 };
    }
    let mut rng = seeds::sub_rng(cfg.seed, 0x3E7);
    let widths: Vec<usize> = std::iter::once(d).chain(cfg.hidden.iter().copied()).chain([1]).collect();
    let layers: Vec<Dense> = widths
        .windows(2)
        .map(|w| {
            let he = Normal::new(0.0, (2.0 / w[0] as f64).sqrt()).unwrap();
            Dense { n_in: w[0], n_out: w[1], w: (0..w[0] * w[1]).map(|_| he.sample(&mut rng)).collect(), b: vec![0.0; w[1]] }
        })
        .collect();
    let cw = class_weights(&m.labels);
    let mut model = MlpModel { layers, mean, sd, class_weights: cw, final_loss: None };
    let sizes: Vec<usize> = model.layers.iter().flat_map(|l| [l.w.len(), l.b.len()]).collect();
    let mut adam = Adam::new(AdamConfig { lr: cfg.lr, ..AdamConfig::default() }, &sizes);
    let mut order: Vec<usize> = (0..n).collect();
    let mut gw: Vec<Vec<f64>> = model.layers.iter().map(|l| vec![0.0; l.w.len()]).collect();
    let mut gb: Vec<Vec<f64>> = model.layers.iter().map(|l| vec![0.0; l.b.len()]).collect();
    let mut acts = Vec::new();
    for _ in 0..cfg.epochs {
        order.shuffle(&mut rng);
        let mut epoch_loss = 0.0;
        for batch in order.chunks(cfg.batch_size) {
            gw.iter_mut().flatten().for_each(|g| *g = 0.0);
            gb.iter_mut().flatten().for_each(|g| *g = 0.0);
            epoch_loss += model.accumulate(m, batch, &mut gw, &mut gb, &mut acts);
            adam.tick();
            for (li, l) in model.layers.iter_mut().enumerate() {
                adam.update(2 * li, &mut l.w, &gw[li]);
                adam.update(2 * li + 1, &mut l.b, &gb[li]);
            }
        }
        epoch_loss /= n as f64;
        if !epoch_loss.is_finite() {
            return Err(EnsembleError::DivergedLoss);
        }
        model.final_loss = Some(epoch_loss);
    }
    Ok(model)
}
