//! Adam, shared by the denoiser and the MLP classifier.

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AdamConfig {
    pub lr: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub eps: f64,
}

impl Default for AdamConfig {
    fn default() -> Self {
        AdamConfig { lr: 1e-3, beta1: 0.9, beta2: 0.999, eps: 1e-8 }
    }
}

/// Moment state for a fixed list of parameter tensors ("slots").
#[derive(Debug, Clone)]
pub struct Adam {
    pub cfg: AdamConfig,
    t: i32,
    m: Vec<Vec<f64>>,
    v: Vec<Vec<f64>>,
}

impl Adam {
    pub fn new(cfg: AdamConfig, sizes: &[usize]) -> Self {
        Adam {
            cfg,
            t: 0,
            m: sizes.iter().map(|&n| vec![0.0; n]).collect(),
            v: sizes.iter().map(|&n| vec![0.0; n]).collect(),
        }
    }

    /// Advances the timestep; call once per minibatch before `update`.
    pub fn tick(&mut self) {
        self.t += 1;
    }

    pub fn update(&mut self, slot: usize, param: &mut [f64], grad: &[f64]) {
        let AdamConfig { lr, beta1, beta2, eps } = self.cfg;
        let bc1 = 1.0 - beta1.powi(self.t);
        let bc2 = 1.0 - beta2.powi(self.t);
        let (m, v) = (&mut self.m[slot], &mut self.v[slot]);
        debug_assert_eq!(param.len(), m.len());
        for i in 0..param.len() {
            m[i] = beta1 * m[i] + (1.0 - beta1) * grad[i];
            v[i] = beta2 * v[i] + (1.0 - beta2) * grad[i] * grad[i];
            let mh = m[i] / bc1;
            let vh = v[i] / bc2;
            param[i] -= lr * mh / (vh.sqrt() + eps);
        }
    }
}
