use std::collections::{HashMap, HashSet};

use super::model::IN_CHANNELS;
use super::DenoiseError;
use crate::seqio::{ReadSet, MAX_PHRED};
use crate::simkit::{base_index, SimTruth};

/// Target value for positions that carry no label (window padding).
pub const IGNORE: u8 = u8::MAX;

/// One training window: encoded input, clean-base targets and noise flags.
#[derive(Debug, Clone, PartialEq)]
pub struct Example {
    /// Row-major `[window, 5]`.
    pub x: Vec<f64>,
    pub target: Vec<u8>,
    pub flag: Vec<u8>,
}

/// Non-overlapping windows `(start, len)` covering `n` positions; the last
/// one may be short and is padded by the encoder.
pub fn tile(n: usize, window: usize) -> Vec<(usize, usize)> {
    (0..n).step_by(window.max(1)).map(|s| (s, window.min(n - s))).collect()
}

/// Channels 0-3 one-hot base (`N` all zero), channel 4 quality / 60.
/// Positions past the end of the slice are padding (all zero).
pub fn encode_window(bases: &[u8], quals: &[u8], window: usize) -> Vec<f64> {
    let mut x = vec![0.0; window * IN_CHANNELS];
    for (t, (&b, &q)) in bases.iter().zip(quals).take(window).enumerate() {
        if let Some(k) = base_index(b) {
            x[t * IN_CHANNELS + k] = 1.0;
        }
        x[t * IN_CHANNELS + 4] = f64::from(q) / f64::from(MAX_PHRED);
    }
    x
}

/// Windows over every read with targets taken from the truth: the clean
/// base at each position and a flag for every base-level ledger entry.
pub fn build_dataset(reads: &ReadSet, truth: &SimTruth, window: usize) -> Result<Vec<Example>, DenoiseError> {
    let ids: HashSet<&str> = reads.records.iter().map(|r| r.id.as_str()).collect();
    let mut flagged: HashMap<&str, Vec<usize>> = HashMap::new();
    for c in &truth.ledger {
        if !ids.contains(c.read_id.as_str()) {
            return Err(DenoiseError::TruthMismatch(format!("ledger names read {} which is not in the set", c.read_id)));
        }
        flagged.entry(c.read_id.as_str()).or_default().push(c.pos);
    }
    let mut out = Vec::new();
    for r in &reads.records {
        let clean = truth
            .clean_bases(&r.id)
            .ok_or_else(|| DenoiseError::TruthMismatch(format!("read {} has no alignment", r.id)))?;
        let mut flags = vec![0u8; r.len()];
        for &p in flagged.get(r.id.as_str()).map_or(&[][..], Vec::as_slice) {
            if p >= r.len() {
                return Err(DenoiseError::TruthMismatch(format!("{}:{p} is past the read end", r.id)));
            }
            flags[p] = 1;
        }
        for (s, len) in tile(r.len(), window) {
            let mut target = vec![IGNORE; window];
            let mut flag = vec![0u8; window];
            for t in 0..len {
                target[t] = clean.get(s + t).and_then(|&b| base_index(b)).map_or(IGNORE, |k| k as u8);
                flag[t] = flags[s + t];
            }
            out.push(Example { x: encode_window(&r.bases[s..s + len], &r.quals[s..s + len], window), target, flag });
        }
    }
    Ok(out)
}
