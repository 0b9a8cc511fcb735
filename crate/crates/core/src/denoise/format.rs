//! Binary model file. All integers and floats are little-endian:
//!
//! ```text
//! magic      8 bytes  "SQFDENOI"
//! version    u32      MODEL_VERSION
//! window     u32
//! kernel     u32
//! conv1      u32      channels of the first convolution
//! conv2      u32      channels of the second convolution
//! hidden     u32      recurrent width
//! lambda     f64
//! seed       u64
//! n_tensors  u32
//! then per tensor:
//!   name_len u16, name (UTF-8), ndim u32, dims u32 x ndim, values f32 x product(dims)
//! ```

use super::model::PARAM_NAMES;
use super::{Arch, DenoiseError, DenoiseModel};

pub const MODEL_MAGIC: &[u8; 8] = b"SQFDENOI";
pub const MODEL_VERSION: u32 = 1;

pub fn write_model(m: &DenoiseModel) -> Vec<u8> {
    let mut out = Vec::new();
    out.extend_from_slice(MODEL_MAGIC);
    let a = &m.arch;
    for v in [MODEL_VERSION, a.window as u32, a.kernel as u32, a.conv1 as u32, a.conv2 as u32, a.hidden as u32] {
        out.extend_from_slice(&v.to_le_bytes());
    }
    out.extend_from_slice(&a.lambda.to_le_bytes());
    out.extend_from_slice(&m.seed.to_le_bytes());
    out.extend_from_slice(&(PARAM_NAMES.len() as u32).to_le_bytes());
    for (name, t) in PARAM_NAMES.iter().zip(m.params()) {
        out.extend_from_slice(&(name.len() as u16).to_le_bytes());
        out.extend_from_slice(name.as_bytes());
        out.extend_from_slice(&(t.shape.len() as u32).to_le_bytes());
        for &d in &t.shape {
            out.extend_from_slice(&(d as u32).to_le_bytes());
        }
        for &v in &t.data {
            out.extend_from_slice(&(v as f32).to_le_bytes());
        }
    }
    out
}

struct Cursor<'a> {
    buf: &'a [u8],
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn take(&mut self, n: usize) -> Result<&'a [u8], DenoiseError> {
        let end = self.pos.checked_add(n).filter(|&e| e <= self.buf.len());
        let end = end.ok_or_else(|| DenoiseError::Format(format!("truncated at byte {}", self.pos)))?;
        let s = &self.buf[self.pos..end];
        self.pos = end;
        Ok(s)
    }
    fn u16(&mut self) -> Result<u16, DenoiseError> {
        Ok(u16::from_le_bytes(self.take(2)?.try_into().unwrap()))
    }
    fn u32(&mut self) -> Result<u32, DenoiseError> {
        Ok(u32::from_le_bytes(self.take(4)?.try_into().unwrap()))
    }
    fn u64(&mut self) -> Result<u64, DenoiseError> {
        Ok(u64::from_le_bytes(self.take(8)?.try_into().unwrap()))
    }
    fn f64(&mut self) -> Result<f64, DenoiseError> {
        Ok(f64::from_le_bytes(self.take(8)?.try_into().unwrap()))
    }
}

pub fn read_model(bytes: &[u8]) -> Result<DenoiseModel, DenoiseError> {
    let mut c = Cursor { buf: bytes, pos: 0 };
    if c.take(8)? != MODEL_MAGIC {
        return Err(DenoiseError::Format("not a denoiser model file".into()));
    }
    let version = c.u32()?;
    if version != MODEL_VERSION {
        return Err(DenoiseError::Format(format!("unsupported version {version}")));
    }
    let window = c.u32()? as usize;
    let kernel = c.u32()? as usize;
    let conv1 = c.u32()? as usize;
    let conv2 = c.u32()? as usize;
    let hidden = c.u32()? as usize;
    let lambda = c.f64()?;
    let seed = c.u64()?;
    let arch = Arch { window, kernel, conv1, conv2, hidden, lambda };
    arch.validate().map_err(|e| DenoiseError::Format(e.to_string()))?;
    let mut model = DenoiseModel::zeros(arch, seed);
    let n = c.u32()? as usize;
    if n != PARAM_NAMES.len() {
        return Err(DenoiseError::Format(format!("expected {} tensors, found {n}", PARAM_NAMES.len())));
    }
    for (i, want) in PARAM_NAMES.iter().enumerate() {
        let len = c.u16()? as usize;
        let name = std::str::from_utf8(c.take(len)?).map_err(|_| DenoiseError::Format("tensor name is not UTF-8".into()))?;
        if name != *want {
            return Err(DenoiseError::Format(format!("expected tensor {want}, found {name}")));
        }
        let ndim = c.u32()? as usize;
        let mut shape = Vec::with_capacity(ndim.min(8));
        for _ in 0..ndim {
            shape.push(c.u32()? as usize);
        }
        let t = &mut model.params_mut()[i];
        if shape != t.shape {
            return Err(DenoiseError::Format(format!("{name} has shape {shape:?}, architecture implies {:?}", t.shape)));
        }
        let raw = c.take(t.len() * 4)?;
        for (v, b) in t.data.iter_mut().zip(raw.chunks_exact(4)) {
            *v = f64::from(f32::from_le_bytes(b.try_into().unwrap()));
        }
        if !t.is_finite() {
            return Err(DenoiseError::Format(format!("{name} has non-finite values")));
        }
    }
    if c.pos != bytes.len() {
        return Err(DenoiseError::Format("trailing bytes after the last tensor".into()));
    }
    Ok(model)
}
