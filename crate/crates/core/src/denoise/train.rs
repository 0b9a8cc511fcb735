use rand::seq::SliceRandom;
use rayon::prelude::*;

use super::model::OUT_CHANNELS;
use super::{DenoiseError, DenoiseModel, Example, IGNORE};
use crate::optim::{Adam, AdamConfig};
use crate::seeds;

/// Windows per gradient work unit. Fixed so the floating-point reduction
/// order does not depend on the number of workers.
const CHUNK: usize = 8;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrainConfig {
    pub learning_rate: f64,
    pub batch_size: usize,
    pub epochs: usize,
    /// Fraction of windows held out for noise-recognition accuracy.
    pub val_fraction: f64,
    pub seed: u64,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig { learning_rate: 3e-4, batch_size: 128, epochs: 10, val_fraction: 0.1, seed: 0 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EpochStats {
    pub epoch: usize,
    /// Mean over training positions, measured before each batch's update.
    pub ce: f64,
    pub penalty: f64,
    pub total: f64,
    /// Share of held-out positions whose noise flag is predicted correctly
    /// (noise probability > 0.5); NaN without a validation split.
    pub val_noise_accuracy: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrainReport {
    pub epochs: Vec<EpochStats>,
    pub n_train: usize,
    pub n_val: usize,
}

impl TrainReport {
    pub fn to_tsv(&self) -> String {
        use crate::tsv::{fmt_f64, schema_line};
        let mut s = schema_line("seqforge.train_report.v1");
        s.push_str("epoch\tce\tpenalty\ttotal\tval_noise_accuracy\n");
        for e in &self.epochs {
            s.push_str(&format!(
                "{}\t{}\t{}\t{}\t{}\n",
                e.epoch,
                fmt_f64(e.ce),
                fmt_f64(e.penalty),
                fmt_f64(e.total),
                fmt_f64(e.val_noise_accuracy)
            ));
        }
        s
    }
}

fn noise_accuracy(model: &DenoiseModel, val: &[&Example]) -> f64 {
    let (hit, n) = val
        .par_iter()
        .map(|ex| {
            let z = model.forward(&ex.x).expect("dataset windows match the model");
            let mut hit = 0usize;
            let mut n = 0usize;
            for (t, &y) in ex.target.iter().enumerate() {
                if y == IGNORE {
                    continue;
                }
                n += 1;
                let called = z[t * OUT_CHANNELS + 4] > 0.0;
                if called == (ex.flag[t] == 1) {
                    hit += 1;
                }
            }
            (hit, n)
        })
        .reduce(|| (0, 0), |a, b| (a.0 + b.0, a.1 + b.1));
    if n == 0 {
        f64::NAN
    } else {
        hit as f64 / n as f64
    }
}

/// Minibatch Adam on the mean of `ce + lambda * penalty` over scored
/// positions. Deterministic in `(model, dataset, cfg)` for any worker count.
/// Final parameters are rounded to f32 so a saved model reloads exactly.
pub fn train(
    mut model: DenoiseModel,
    dataset: &[Example],
    cfg: &TrainConfig,
) -> Result<(DenoiseModel, TrainReport), DenoiseError> {
    if dataset.is_empty() {
        return Err(DenoiseError::InvalidConfig("dataset is empty".into()));
    }
    if !(cfg.learning_rate >= 0.0 && cfg.learning_rate.is_finite()) || cfg.batch_size == 0 {
        return Err(DenoiseError::InvalidConfig("learning_rate must be >= 0 and batch_size >= 1".into()));
    }
    if !(0.0..1.0).contains(&cfg.val_fraction) {
        return Err(DenoiseError::InvalidConfig("val_fraction must be in [0, 1)".into()));
    }
    let want = model.arch.window * super::model::IN_CHANNELS;
    if dataset.iter().any(|e| e.x.len() != want || e.target.len() != model.arch.window) {
        return Err(DenoiseError::Shape(format!("windows must match the model width {}", model.arch.window)));
    }
    let mut idx: Vec<usize> = (0..dataset.len()).collect();
    let mut split_rng = seeds::sub_rng(cfg.seed, 0x5A17);
    idx.shuffle(&mut split_rng);
    let n_val = ((cfg.val_fraction * dataset.len() as f64).round() as usize).min(dataset.len() - 1);
    let val: Vec<&Example> = idx[..n_val].iter().map(|&i| &dataset[i]).collect();
    let mut train_idx = idx[n_val..].to_vec();

    let sizes: Vec<usize> = model.params().iter().map(|t| t.len()).collect();
    let mut adam = Adam::new(AdamConfig { lr: cfg.learning_rate, ..AdamConfig::default() }, &sizes);
    let mut order_rng = seeds::sub_rng(cfg.seed, 0x7EA1);
    let lambda = model.arch.lambda;
    let mut epochs = Vec::with_capacity(cfg.epochs);
    for epoch in 0..cfg.epochs {
        train_idx.shuffle(&mut order_rng);
        let (mut ce_sum, mut pen_sum, mut n_sum) = (0.0, 0.0, 0usize);
        for batch in train_idx.chunks(cfg.batch_size) {
            let n_scored: usize =
                batch.iter().map(|&i| dataset[i].target.iter().filter(|&&y| y != IGNORE).count()).sum();
            if n_scored == 0 {
                continue;
            }
            let scale = 1.0 / n_scored as f64;
            let partial: Vec<(Vec<Vec<f64>>, f64, f64)> = batch
                .par_chunks(CHUNK)
                .map(|chunk| {
                    let mut g = model.zero_grads();
                    let (mut ce, mut pen) = (0.0, 0.0);
                    for &i in chunk {
                        let (a, b, _) = model.accumulate_grads(&dataset[i], scale, &mut g);
                        ce += a;
                        pen += b;
                    }
                    (g, ce, pen)
                })
                .collect();
            let mut grads = model.zero_grads();
            for (g, ce, pen) in &partial {
                for (acc, part) in grads.iter_mut().zip(g) {
                    acc.iter_mut().zip(part).for_each(|(a, b)| *a += b);
                }
                ce_sum += ce;
                pen_sum += pen;
            }
            n_sum += n_scored;
            adam.tick();
            for (slot, (p, g)) in model.params_mut().into_iter().zip(grads).enumerate() {
                adam.update(slot, &mut p.data, &g);
                p.grad = Some(g);
            }
            if !(ce_sum + lambda * pen_sum).is_finite() || !model.is_finite() {
                return Err(DenoiseError::DivergedLoss { epoch });
            }
        }
        let nf = n_sum.max(1) as f64;
        let (ce, penalty) = (ce_sum / nf, pen_sum / nf);
        epochs.push(EpochStats {
            epoch,
            ce,
            penalty,
            total: ce + lambda * penalty,
            val_noise_accuracy: noise_accuracy(&model, &val),
        });
    }
    for p in model.params_mut() {
        p.data.iter_mut().for_each(|v| *v = *v as f32 as f64);
        p.grad = None;
    }
    Ok((model, TrainReport { epochs, n_train: train_idx.len(), n_val }))
}
