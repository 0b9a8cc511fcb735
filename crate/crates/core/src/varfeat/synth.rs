use rand::Rng as _;
use rand_distr::{Distribution, StandardNormal};

use super::{FeatError, FeatureMatrix, FeatureSchema, DEFAULT_INFORMATIVE, N_FEATURES};
use crate::seeds;

/// Parameters for a synthetic variant feature matrix with a known set of
/// informative slots.
#[derive(Debug, Clone, PartialEq)]
pub struct SynthConfig {
    pub n_pos: usize,
    pub n_neg: usize,
    pub informative: Vec<usize>,
    /// `(source, target, r)`: target is rebuilt as `r*source + sqrt(1-r^2)*noise`.
    pub correlation_pairs: Vec<(usize, usize, f64)>,
    /// L2 norm of the logistic coefficient vector. The default makes the
    /// classes nearly separable (Bayes accuracy about 0.98).
    pub effect_size: f64,
    pub seed: u64,
}

impl Default for SynthConfig {
    fn default() -> Self {
        SynthConfig {
            n_pos: 2500,
            n_neg: 2500,
            informative: DEFAULT_INFORMATIVE.to_vec(),
            correlation_pairs: vec![(0, 1, 0.78), (0, 13, 0.23)],
            effect_size: 25.0,
            seed: 0,
        }
    }
}

impl SynthConfig {
    fn validate(&self) -> Result<(), FeatError> {
        if self.informative.is_empty() {
            return Err(FeatError::InvalidConfig("at least one informative slot is required".into()));
        }
        if let Some(&i) = self.informative.iter().find(|&&i| i >= N_FEATURES) {
            return Err(FeatError::IndexOutOfRange(i));
        }
        for &(i, j, r) in &self.correlation_pairs {
            if !r.is_finite() || r.abs() >= 1.0 {
                return Err(FeatError::BadCorrelation(r));
            }
            for k in [i, j] {
                if k >= N_FEATURES {
                    return Err(FeatError::IndexOutOfRange(k));
                }
            }
            if i == j {
                return Err(FeatError::InvalidConfig(format!("pair ({i},{j}) correlates a slot with itself")));
            }
        }
        if !self.effect_size.is_finite() || self.effect_size < 0.0 {
            return Err(FeatError::InvalidConfig("effect_size must be finite and >= 0".into()));
        }
        Ok(())
    }

    /// Logistic coefficients, one per informative slot, in slot order of
    /// `informative`.
    pub fn coefficients(&self) -> Vec<f64> {
        let mut rng = seeds::sub_rng(self.seed, 0xC0EF);
        let raw: Vec<f64> = self
            .informative
            .iter()
            .map(|_| {
                let sign = if rng.random::<bool>() { 1.0 } else { -1.0 };
                sign * rng.random_range(0.6..1.0)
            })
            .collect();
        let norm = raw.iter().map(|b| b * b).sum::<f64>().sqrt();
        raw.iter().map(|b| b / norm * self.effect_size).collect()
    }
}

/// Generates exactly `n_pos` positive and `n_neg` negative rows. Labels are
/// Bernoulli draws through a logistic link on the informative slots only;
/// rows are accepted until each class quota is filled.
pub fn synth_feature_dataset(cfg: &SynthConfig) -> Result<FeatureMatrix, FeatError> {
    cfg.validate()?;
    let beta = cfg.coefficients();
    let mut rng = seeds::sub_rng(cfg.seed, 0x5EED);
    let n = cfg.n_pos + cfg.n_neg;
    let mut data = Vec::with_capacity(n * N_FEATURES);
    let mut labels = Vec::with_capacity(n);
    let mut need = [cfg.n_neg, cfg.n_pos];
    let mut row = [0.0f64; N_FEATURES];
    while need[0] + need[1] > 0 {
        for v in row.iter_mut() {
            *v = StandardNormal.sample(&mut rng);
        }
        for &(i, j, r) in &cfg.correlation_pairs {
            row[j] = r * row[i] + (1.0 - r * r).sqrt() * row[j];
        }
        let logit: f64 = cfg.informative.iter().zip(&beta).map(|(&k, b)| b * row[k]).sum();
        let p = 1.0 / (1.0 + (-logit).exp());
        let y = usize::from(rng.random::<f64>() < p);
        if need[y] > 0 {
            need[y] -= 1;
            data.extend_from_slice(&row);
            labels.push(y as u8);
        }
    }
    Ok(FeatureMatrix::new(data, N_FEATURES, labels, FeatureSchema::standard().names()))
}
