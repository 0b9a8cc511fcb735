use rand::Rng as _;

use super::{Alignment, Reference, SimError, SimTruth};
use crate::seeds;
use crate::seqio::{ReadSet, SeqRecord};

/// Clean bases get Phred scores in `CLEAN_QUAL_MIN..=CLEAN_QUAL_MAX` (with a
/// mild 3' decay); sequencing errors are re-scored into the error band.
pub const CLEAN_QUAL_MIN: u8 = 26;
pub const CLEAN_QUAL_MAX: u8 = 40;
pub const ERROR_QUAL_MIN: u8 = 2;
pub const ERROR_QUAL_MAX: u8 = 15;

/// Uniformly placed error-free reads; `round(depth * len / read_len)` of them.
pub fn simulate_reads(
    reference: &Reference,
    depth: f64,
    read_len: usize,
    seed: u64,
) -> Result<(ReadSet, SimTruth), SimError> {
    if read_len == 0 || read_len > reference.len() {
        return Err(SimError::InvalidLength(format!(
            "read length {read_len} must be in 1..={}",
            reference.len()
        )));
    }
    if !depth.is_finite() || depth < 0.0 {
        return Err(SimError::InvalidLength(format!("depth {depth} must be >= 0")));
    }
    let n_reads = (depth * reference.len() as f64 / read_len as f64).round() as usize;
    let max_start = reference.len() - read_len;
    let mut rng = seeds::sub_rng(seed, 0x4EAD);
    let width = n_reads.max(1).to_string().len();
    let mut records = Vec::with_capacity(n_reads);
    let mut alignments = Vec::with_capacity(n_reads);
    for i in 0..n_reads {
        let start = rng.random_range(0..=max_start);
        let id = format!("r{i:0width$}");
        let bases = reference.sequence[start..start + read_len].to_vec();
        let quals = (0..read_len)
            .map(|p| {
                let decay = (4 * p / read_len) as u8;
                (rng.random_range(CLEAN_QUAL_MIN + 4..=CLEAN_QUAL_MAX) - decay).max(CLEAN_QUAL_MIN)
            })
            .collect();
        alignments.push(Alignment { read_id: id.clone(), start, len: read_len, duplicate_of: None });
        records.push(SeqRecord { id, bases, quals });
    }
    Ok((ReadSet::new(records, reference.name.clone()), SimTruth::new(reference.clone(), alignments)))
}
