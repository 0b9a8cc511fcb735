use std::io::{BufRead, Write};

use rand::Rng as _;

use super::SimError;
use crate::seeds;

/// Width of the GC-content track windows.
pub const GC_WINDOW: usize = 100;

#[derive(Debug, Clone, PartialEq)]
pub struct Reference {
    pub name: String,
    pub sequence: Vec<u8>,
    /// GC fraction per consecutive `GC_WINDOW` bp window (last window may
    /// be shorter); `N` bases are excluded from the denominator.
    pub gc_track: Vec<f64>,
}

impl Reference {
    pub fn new(name: impl Into<String>, sequence: Vec<u8>) -> Self {
        let gc_track = sequence
            .chunks(GC_WINDOW)
            .map(|w| {
                let called = w.iter().filter(|&&b| b != b'N').count();
                let gc = w.iter().filter(|&&b| b == b'G' || b == b'C').count();
                if called == 0 {
                    0.0
                } else {
                    gc as f64 / called as f64
                }
            })
            .collect();
        Reference { name: name.into(), sequence, gc_track }
    }

    pub fn len(&self) -> usize {
        self.sequence.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sequence.is_empty()
    }

    pub fn gc_at(&self, pos: usize) -> f64 {
        self.gc_track[pos / GC_WINDOW]
    }
}

fn check_gc(gc: f64) -> Result<(), SimError> {
    if gc.is_finite() && (0.0..=1.0).contains(&gc) {
        Ok(())
    } else {
        Err(SimError::BadFraction(gc))
    }
}

fn draw_bases(rng: &mut seeds::Rng, len: usize, gc: f64, out: &mut Vec<u8>) {
    for _ in 0..len {
        let u: f64 = rng.random();
        let b = if u < gc {
            if u < gc / 2.0 {
                b'G'
            } else {
                b'C'
            }
        } else if u < gc + (1.0 - gc) / 2.0 {
            b'A'
        } else {
            b'T'
        };
        out.push(b);
    }
}

/// I.i.d. bases with `P(G) + P(C) = gc_target`.
pub fn gen_reference(length: usize, gc_target: f64, seed: u64) -> Result<Reference, SimError> {
    check_gc(gc_target)?;
    if length == 0 {
        return Err(SimError::InvalidLength("reference length must be >= 1".into()));
    }
    let mut rng = seeds::sub_rng(seed, 0x4EF);
    let mut seq = Vec::with_capacity(length);
    draw_bases(&mut rng, length, gc_target, &mut seq);
    Ok(Reference::new(format!("synth_{seed}"), seq))
}

/// Concatenation of i.i.d. segments, each `(length, gc_target)`; used to get
/// GC-rich isochores next to ordinary sequence.
pub fn gen_mosaic_reference(segments: &[(usize, f64)], seed: u64) -> Result<Reference, SimError> {
    let total: usize = segments.iter().map(|s| s.0).sum();
    if total == 0 {
        return Err(SimError::InvalidLength("reference length must be >= 1".into()));
    }
    let mut rng = seeds::sub_rng(seed, 0x4EF);
    let mut seq = Vec::with_capacity(total);
    for &(len, gc) in segments {
        check_gc(gc)?;
        draw_bases(&mut rng, len, gc, &mut seq);
    }
    Ok(Reference::new(format!("mosaic_{seed}"), seq))
}

/// Two-line `>name` / sequence text, no wrapping.
pub fn write_reference<W: Write>(r: &Reference, sink: &mut W) -> std::io::Result<()> {
    writeln!(sink, ">{}", r.name)?;
    sink.write_all(&r.sequence)?;
    sink.write_all(b"\n")
}

pub fn read_reference<R: BufRead>(src: R) -> Result<Reference, SimError> {
    let mut lines = src.lines();
    let header = lines.next().ok_or_else(|| SimError::Parse("empty reference file".into()))??;
    let name = header
        .strip_prefix('>')
        .ok_or_else(|| SimError::Parse("reference header must start with '>'".into()))?
        .to_string();
    let mut seq = Vec::new();
    for line in lines {
        let line = line?;
        for b in line.trim_end().bytes() {
            match crate::seqio::normalize_base(b) {
                Some(n) => seq.push(n),
                None => return Err(SimError::Parse(format!("invalid reference base {:?}", b as char))),
            }
        }
    }
    if seq.is_empty() {
        return Err(SimError::InvalidLength("reference sequence is empty".into()));
    }
    Ok(Reference::new(name, seq))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_bad_inputs() {
        assert!(matches!(gen_reference(0, 0.5, 1), Err(SimError::InvalidLength(_))));
        assert!(matches!(gen_reference(10, 1.5, 1), Err(SimError::BadFraction(_))));
    }

    #[test]
    fn zero_gc_is_at_only() {
        let r = gen_reference(5000, 0.0, 3).unwrap();
        assert!(r.sequence.iter().all(|&b| b == b'A' || b == b'T'));
        assert!(r.gc_track.iter().all(|&g| g == 0.0));
    }

    #[test]
    fn gc_concentrates() {
        let r = gen_reference(100_000, 0.5, 5).unwrap();
        let gc = r.sequence.iter().filter(|&&b| b == b'G' || b == b'C').count() as f64 / 1e5;
        // binomial sd is 0.0016, so 0.01 is > 6 sd
        assert!((gc - 0.5).abs() < 0.01, "{gc}");
        assert_eq!(r.gc_track.len(), 1000);
        assert!(r.gc_track.iter().all(|g| (0.0..=1.0).contains(g)));
    }

    #[test]
    fn deterministic_and_round_trips() {
        let a = gen_mosaic_reference(&[(250, 0.8), (130, 0.3)], 2).unwrap();
        assert_eq!(a, gen_mosaic_reference(&[(250, 0.8), (130, 0.3)], 2).unwrap());
        assert_eq!(a.gc_track.len(), 4);
        let mut buf = Vec::new();
        write_reference(&a, &mut buf).unwrap();
        assert_eq!(read_reference(&buf[..]).unwrap(), a);
    }
}
