//! Layers with hand-written backward passes. Activations are row-major
//! `[positions, channels]`.

use super::Tensor;

/// Same-padded 1-D convolution; weight layout `[c_out, kernel, c_in]`.
#[derive(Debug, Clone, PartialEq)]
pub struct Conv1d {
    pub w: Tensor,
    pub b: Tensor,
}

impl Conv1d {
    pub fn zeros(c_in: usize, c_out: usize, kernel: usize) -> Self {
        Conv1d { w: Tensor::zeros(&[c_out, kernel, c_in]), b: Tensor::zeros(&[c_out]) }
    }

    pub fn c_out(&self) -> usize {
        self.w.shape[0]
    }
    pub fn kernel(&self) -> usize {
        self.w.shape[1]
    }
    pub fn c_in(&self) -> usize {
        self.w.shape[2]
    }

    pub fn forward(&self, x: &[f64], len: usize) -> Vec<f64> {
        let (ci, co, k) = (self.c_in(), self.c_out(), self.kernel());
        let pad = k / 2;
        let w = &self.w.data;
        let mut out = vec![0.0; len * co];
        for t in 0..len {
            let row = &mut out[t * co..(t + 1) * co];
            row.copy_from_slice(&self.b.data);
            for kk in 0..k {
                let Some(s) = (t + kk).checked_sub(pad).filter(|&s| s < len) else { continue };
                let xs = &x[s * ci..(s + 1) * ci];
                for (o, acc) in row.iter_mut().enumerate() {
                    let ws = &w[(o * k + kk) * ci..(o * k + kk + 1) * ci];
                    *acc += ws.iter().zip(xs).map(|(a, b)| a * b).sum::<f64>();
                }
            }
        }
        out
    }

    /// Accumulates parameter gradients and returns the input gradient.
    pub fn backward(&self, x: &[f64], len: usize, dout: &[f64], dw: &mut [f64], db: &mut [f64]) -> Vec<f64> {
        let (ci, co, k) = (self.c_in(), self.c_out(), self.kernel());
        let pad = k / 2;
        let w = &self.w.data;
        let mut dx = vec![0.0; len * ci];
        for t in 0..len {
            let g = &dout[t * co..(t + 1) * co];
            for (o, &go) in g.iter().enumerate() {
                db[o] += go;
            }
            for kk in 0..k {
                let Some(s) = (t + kk).checked_sub(pad).filter(|&s| s < len) else { continue };
                let xs = &x[s * ci..(s + 1) * ci];
                for (o, &go) in g.iter().enumerate() {
                    if go == 0.0 {
                        continue;
                    }
                    let base = (o * k + kk) * ci;
                    for c in 0..ci {
                        dw[base + c] += go * xs[c];
                        dx[s * ci + c] += go * w[base + c];
                    }
                }
            }
        }
        dx
    }
}

pub fn relu_inplace(x: &mut [f64]) {
    x.iter_mut().for_each(|v| *v = v.max(0.0));
}

/// Masks `dout` where the activation output was clamped.
pub fn relu_backward(out: &[f64], dout: &mut [f64]) {
    for (g, &o) in dout.iter_mut().zip(out) {
        if o <= 0.0 {
            *g = 0.0;
        }
    }
}

/// Elman recurrence `h_t = tanh(W_x x_t + W_h h_{t-1} + b)`, `h_{-1} = 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct Rnn {
    pub wx: Tensor,
    pub wh: Tensor,
    pub b: Tensor,
}

impl Rnn {
    pub fn zeros(input: usize, hidden: usize) -> Self {
        Rnn { wx: Tensor::zeros(&[hidden, input]), wh: Tensor::zeros(&[hidden, hidden]), b: Tensor::zeros(&[hidden]) }
    }

    pub fn hidden(&self) -> usize {
        self.wx.shape[0]
    }
    pub fn input(&self) -> usize {
        self.wx.shape[1]
    }

    pub fn forward(&self, x: &[f64], len: usize) -> Vec<f64> {
        let (ni, nh) = (self.input(), self.hidden());
        let mut hs = vec![0.0; len * nh];
        for t in 0..len {
            let xt = &x[t * ni..(t + 1) * ni];
            for j in 0..nh {
                let mut a = self.b.data[j];
                a += self.wx.data[j * ni..(j + 1) * ni].iter().zip(xt).map(|(p, q)| p * q).sum::<f64>();
                if t > 0 {
                    let prev = &hs[(t - 1) * nh..t * nh];
                    a += self.wh.data[j * nh..(j + 1) * nh].iter().zip(prev).map(|(p, q)| p * q).sum::<f64>();
                }
                hs[t * nh + j] = a.tanh();
            }
        }
        hs
    }

    /// Backpropagation through time from per-step output gradients.
    #[allow(clippy::too_many_arguments)]
    pub fn backward(
        &self,
        x: &[f64],
        hs: &[f64],
        len: usize,
        dhs: &[f64],
        dwx: &mut [f64],
        dwh: &mut [f64],
        db: &mut [f64],
    ) -> Vec<f64> {
        let (ni, nh) = (self.input(), self.hidden());
        let mut dx = vec![0.0; len * ni];
        let mut carry = vec![0.0; nh];
        let mut da = vec![0.0; nh];
        for t in (0..len).rev() {
            let h = &hs[t * nh..(t + 1) * nh];
            for j in 0..nh {
                da[j] = (dhs[t * nh + j] + carry[j]) * (1.0 - h[j] * h[j]);
            }
            let xt = &x[t * ni..(t + 1) * ni];
            carry.iter_mut().for_each(|v| *v = 0.0);
            for j in 0..nh {
                let d = da[j];
                db[j] += d;
                for i in 0..ni {
                    dwx[j * ni + i] += d * xt[i];
                    dx[t * ni + i] += d * self.wx.data[j * ni + i];
                }
                if t > 0 {
                    let prev = &hs[(t - 1) * nh..t * nh];
                    for i in 0..nh {
                        dwh[j * nh + i] += d * prev[i];
                        carry[i] += d * self.wh.data[j * nh + i];
                    }
                }
            }
        }
        dx
    }
}

/// Position-wise affine map; weight layout `[out, in]`.
#[derive(Debug, Clone, PartialEq)]
pub struct Dense {
    pub w: Tensor,
    pub b: Tensor,
}

impl Dense {
    pub fn zeros(input: usize, output: usize) -> Self {
        Dense { w: Tensor::zeros(&[output, input]), b: Tensor::zeros(&[output]) }
    }

    pub fn output(&self) -> usize {
        self.w.shape[0]
    }
    pub fn input(&self) -> usize {
        self.w.shape[1]
    }

    pub fn forward(&self, x: &[f64], len: usize) -> Vec<f64> {
        let (ni, no) = (self.input(), self.output());
        let mut out = vec![0.0; len * no];
        for t in 0..len {
            let xt = &x[t * ni..(t + 1) * ni];
            for o in 0..no {
                out[t * no + o] =
                    self.b.data[o] + self.w.data[o * ni..(o + 1) * ni].iter().zip(xt).map(|(p, q)| p * q).sum::<f64>();
            }
        }
        out
    }

    pub fn backward(&self, x: &[f64], len: usize, dout: &[f64], dw: &mut [f64], db: &mut [f64]) -> Vec<f64> {
        let (ni, no) = (self.input(), self.output());
        let mut dx = vec![0.0; len * ni];
        for t in 0..len {
            let xt = &x[t * ni..(t + 1) * ni];
            for o in 0..no {
                let g = dout[t * no + o];
                db[o] += g;
                for i in 0..ni {
                    dw[o * ni + i] += g * xt[i];
                    dx[t * ni + i] += g * self.w.data[o * ni + i];
                }
            }
        }
        dx
    }
}
