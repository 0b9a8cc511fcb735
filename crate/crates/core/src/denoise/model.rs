use rand_distr::{Distribution, Normal};

use super::layers::{relu_backward, relu_inplace, Conv1d, Dense, Rnn};
use super::{DenoiseError, Example, Tensor, IGNORE};
use crate::seeds;

/// Input channels: one-hot A, C, G, T and quality / 60.
pub const IN_CHANNELS: usize = 5;
/// Output channels: four base logits and the noise logit.
pub const OUT_CHANNELS: usize = 5;
const LOG_FLOOR: f64 = 1e-12;

/// Architecture hyperparameters, all recorded in the model file.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Arch {
    pub window: usize,
    pub kernel: usize,
    pub conv1: usize,
    pub conv2: usize,
    pub hidden: usize,
    /// Weight of the noise penalty in the training loss.
    pub lambda: f64,
}

impl Default for Arch {
    fn default() -> Self {
        Arch { window: 64, kernel: 5, conv1: 16, conv2: 32, hidden: 32, lambda: 0.5 }
    }
}

impl Arch {
    pub fn validate(&self) -> Result<(), DenoiseError> {
        if self.window == 0 || self.kernel == 0 || self.kernel % 2 == 0 {
            return Err(DenoiseError::InvalidConfig("window must be >= 1 and kernel odd".into()));
        }
        if self.conv1 == 0 || self.conv2 == 0 || self.hidden == 0 {
            return Err(DenoiseError::InvalidConfig("layer widths must be >= 1".into()));
        }
        if !(self.lambda >= 0.0 && self.lambda.is_finite()) {
            return Err(DenoiseError::InvalidConfig(format!("lambda {} must be finite and >= 0", self.lambda)));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LossParts {
    pub total: f64,
    pub ce: f64,
    pub penalty: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DenoiseModel {
    pub arch: Arch,
    pub seed: u64,
    pub conv1: Conv1d,
    pub conv2: Conv1d,
    pub rnn: Rnn,
    pub head: Dense,
}

pub const PARAM_NAMES: [&str; 9] =
    ["conv1.w", "conv1.b", "conv2.w", "conv2.b", "rnn.wx", "rnn.wh", "rnn.b", "head.w", "head.b"];

struct Cache {
    a1: Vec<f64>,
    a2: Vec<f64>,
    hs: Vec<f64>,
    cat: Vec<f64>,
    logits: Vec<f64>,
}

fn sigmoid(z: f64) -> f64 {
    if z >= 0.0 {
        1.0 / (1.0 + (-z).exp())
    } else {
        let e = z.exp();
        e / (1.0 + e)
    }
}

/// Softmax over the four base logits of one position.
pub fn base_softmax(z: &[f64]) -> [f64; 4] {
    let m = z[..4].iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let e = [(z[0] - m).exp(), (z[1] - m).exp(), (z[2] - m).exp(), (z[3] - m).exp()];
    let s = e[0] + e[1] + e[2] + e[3];
    [e[0] / s, e[1] / s, e[2] / s, e[3] / s]
}

/// Summed cross-entropy and penalty over the non-ignored positions of one
/// window, plus their count. With `grad`, writes `d(ce + lambda*pen)/dz`
/// scaled by `scale` into it.
pub fn window_loss(
    logits: &[f64],
    ex: &Example,
    lambda: f64,
    mut grad: Option<(&mut [f64], f64)>,
) -> (f64, f64, usize) {
    let (mut ce, mut pen, mut n) = (0.0, 0.0, 0);
    for (t, &y) in ex.target.iter().enumerate() {
        let z = &logits[t * OUT_CHANNELS..(t + 1) * OUT_CHANNELS];
        if y == IGNORE {
            continue;
        }
        n += 1;
        let p = base_softmax(z);
        let py = p[y as usize];
        ce -= py.max(LOG_FLOOR).ln();
        let s = sigmoid(z[4]);
        let diff = s - f64::from(ex.flag[t]);
        pen += diff * diff;
        if let Some((g, scale)) = grad.as_mut() {
            let gz = &mut g[t * OUT_CHANNELS..(t + 1) * OUT_CHANNELS];
            if py > LOG_FLOOR {
                for k in 0..4 {
                    gz[k] = *scale * (p[k] - f64::from(u8::from(k == y as usize)));
                }
            }
            gz[4] = *scale * lambda * 2.0 * diff * s * (1.0 - s);
        }
    }
    (ce, pen, n)
}

impl DenoiseModel {
    /// All parameters zero: every logit is 0 for any input.
    pub fn zeros(arch: Arch, seed: u64) -> Self {
        DenoiseModel {
            arch,
            seed,
            conv1: Conv1d::zeros(IN_CHANNELS, arch.conv1, arch.kernel),
            conv2: Conv1d::zeros(arch.conv1, arch.conv2, arch.kernel),
            rnn: Rnn::zeros(IN_CHANNELS, arch.hidden),
            head: Dense::zeros(arch.conv2 + arch.hidden, OUT_CHANNELS),
        }
    }

    /// Seeded random initialization (He for convolutions, scaled normal
    /// elsewhere); biases start at zero.
    pub fn init(arch: Arch, seed: u64) -> Result<Self, DenoiseError> {
        arch.validate()?;
        let mut m = Self::zeros(arch, seed);
        let mut rng = seeds::sub_rng(seed, 0xDE05);
        let fill = |t: &mut Tensor, std: f64, rng: &mut seeds::Rng| {
            let d = Normal::new(0.0, std).unwrap();
            t.data.iter_mut().for_each(|v| *v = d.sample(rng));
        };
        let k = arch.kernel as f64;
        fill(&mut m.conv1.w, (2.0 / (IN_CHANNELS as f64 * k)).sqrt(), &mut rng);
        fill(&mut m.conv2.w, (2.0 / (arch.conv1 as f64 * k)).sqrt(), &mut rng);
        fill(&mut m.rnn.wx, (1.0 / IN_CHANNELS as f64).sqrt(), &mut rng);
        fill(&mut m.rnn.wh, 0.5 / (arch.hidden as f64).sqrt(), &mut rng);
        fill(&mut m.head.w, (1.0 / (arch.conv2 + arch.hidden) as f64).sqrt(), &mut rng);
        Ok(m)
    }

    pub fn params(&self) -> [&Tensor; 9] {
        [
            &self.conv1.w,
            &self.conv1.b,
            &self.conv2.w,
            &self.conv2.b,
            &self.rnn.wx,
            &self.rnn.wh,
            &self.rnn.b,
            &self.head.w,
            &self.head.b,
        ]
    }

    pub fn params_mut(&mut self) -> [&mut Tensor; 9] {
        [
            &mut self.conv1.w,
            &mut self.conv1.b,
            &mut self.conv2.w,
            &mut self.conv2.b,
            &mut self.rnn.wx,
            &mut self.rnn.wh,
            &mut self.rnn.b,
            &mut self.head.w,
            &mut self.head.b,
        ]
    }

    pub fn is_finite(&self) -> bool {
        self.params().iter().all(|t| t.is_finite())
    }

    fn forward_cached(&self, x: &[f64]) -> Cache {
        let w = self.arch.window;
        let mut a1 = self.conv1.forward(x, w);
        relu_inplace(&mut a1);
        let mut a2 = self.conv2.forward(&a1, w);
        relu_inplace(&mut a2);
        let hs = self.rnn.forward(x, w);
        let (c2, h) = (self.arch.conv2, self.arch.hidden);
        let mut cat = Vec::with_capacity(w * (c2 + h));
        for t in 0..w {
            cat.extend_from_slice(&a2[t * c2..(t + 1) * c2]);
            cat.extend_from_slice(&hs[t * h..(t + 1) * h]);
        }
        let logits = self.head.forward(&cat, w);
        Cache { a1, a2, hs, cat, logits }
    }

    /// Logits `[window, 5]`: four base logits then the noise logit.
    pub fn forward(&self, x: &[f64]) -> Result<Vec<f64>, DenoiseError> {
        let want = self.arch.window * IN_CHANNELS;
        if x.len() != want {
            return Err(DenoiseError::Shape(format!("input has {} values, expected {want}", x.len())));
        }
        if x.iter().any(|v| !v.is_finite()) {
            return Err(DenoiseError::Shape("input contains non-finite values".into()));
        }
        Ok(self.forward_cached(x).logits)
    }

    /// Mean cross-entropy and mean penalty over all scored positions;
    /// `total = ce + lambda * penalty`.
    pub fn loss(&self, batch: &[Example]) -> LossParts {
        let (mut ce, mut pen, mut n) = (0.0, 0.0, 0usize);
        for ex in batch {
            let c = self.forward_cached(&ex.x);
            let (a, b, k) = window_loss(&c.logits, ex, self.arch.lambda, None);
            ce += a;
            pen += b;
            n += k;
        }
        let nf = n.max(1) as f64;
        let (ce, penalty) = (ce / nf, pen / nf);
        LossParts { total: ce + self.arch.lambda * penalty, ce, penalty }
    }

    /// Adds `scale * d(loss sums)/d(params)` for one window to `grads`
    /// (one buffer per parameter, in `PARAM_NAMES` order). Returns the
    /// window's summed ce, summed penalty and scored-position count.
    pub fn accumulate_grads(&self, ex: &Example, scale: f64, grads: &mut [Vec<f64>]) -> (f64, f64, usize) {
        let w = self.arch.window;
        let c = self.forward_cached(&ex.x);
        let mut dlogits = vec![0.0; c.logits.len()];
        let sums = window_loss(&c.logits, ex, self.arch.lambda, Some((&mut dlogits, scale)));
        let [g0, g1, g2, g3, g4, g5, g6, g7, g8] = grads else { panic!("nine gradient buffers expected") };
        let dcat = self.head.backward(&c.cat, w, &dlogits, g7, g8);
        let (c2, h) = (self.arch.conv2, self.arch.hidden);
        let mut da2 = Vec::with_capacity(w * c2);
        let mut dhs = Vec::with_capacity(w * h);
        for t in 0..w {
            let row = &dcat[t * (c2 + h)..(t + 1) * (c2 + h)];
            da2.extend_from_slice(&row[..c2]);
            dhs.extend_from_slice(&row[c2..]);
        }
        relu_backward(&c.a2, &mut da2);
        let mut da1 = self.conv2.backward(&c.a1, w, &da2, g2, g3);
        relu_backward(&c.a1, &mut da1);
        self.conv1.backward(&ex.x, w, &da1, g0, g1);
        self.rnn.backward(&ex.x, &c.hs, w, &dhs, g4, g5, g6);
        sums
    }

    pub fn zero_grads(&self) -> Vec<Vec<f64>> {
        self.params().iter().map(|t| vec![0.0; t.len()]).collect()
    }
}
