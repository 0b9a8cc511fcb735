use rand::seq::SliceRandom;
use rand::Rng as _;

use super::{Reference, SimError, BASES};
use crate::seeds;
use crate::varfeat::{FeatureSchema, Label, VariantRecord, VariantType, N_FEATURES};

const MAX_INDEL: usize = 5;
/// Bases reserved per variant slot: anchor + longest deletion + spacer.
const SLOT_MIN: usize = MAX_INDEL + 3;

/// Plants non-overlapping SNPs and indels, returning the donor sequence and
/// the truth list (positions on the original reference, VCF-style anchored
/// indel alleles).
pub fn plant_variants(
    reference: &Reference,
    n_snp: usize,
    n_indel: usize,
    seed: u64,
) -> Result<(Reference, Vec<VariantRecord>), SimError> {
    let n = n_snp + n_indel;
    if n == 0 {
        return Ok((Reference::new(format!("{}_donor", reference.name), reference.sequence.clone()), Vec::new()));
    }
    let slot = reference.len() / n;
    if slot < SLOT_MIN {
        return Err(SimError::Overcrowded { requested: n, length: reference.len() });
    }
    let mut rng = seeds::sub_rng(seed, 0x7A4);
    let mut kinds: Vec<bool> = std::iter::repeat_n(true, n_snp).chain(std::iter::repeat_n(false, n_indel)).collect();
    kinds.shuffle(&mut rng);

    let schema = FeatureSchema::standard();
    let gc_slot = schema.index_of("gc_fraction").unwrap();
    let homo_slot = schema.index_of("homopolymer_length").unwrap();
    let seq = &reference.sequence;
    let mut variants = Vec::with_capacity(n);
    for (s, &is_snp) in kinds.iter().enumerate() {
        let lo = s * slot;
        let pos = lo + rng.random_range(0..slot - (MAX_INDEL + 1));
        let ref_base = seq[pos];
        let (vtype, ref_allele, alt_allele) = if is_snp {
            let choices: Vec<u8> = BASES.iter().copied().filter(|&b| b != ref_base).collect();
            let alt = choices[rng.random_range(0..choices.len())];
            (VariantType::Snp, vec![ref_base], vec![alt])
        } else {
            let k = rng.random_range(1..=MAX_INDEL);
            if rng.random::<bool>() {
                let mut alt = vec![ref_base];
                alt.extend((0..k).map(|_| BASES[rng.random_range(0..4)]));
                (VariantType::Ins, vec![ref_base], alt)
            } else {
                (VariantType::Del, seq[pos..=pos + k].to_vec(), vec![ref_base])
            }
        };
        let mut features = vec![0.0; N_FEATURES];
        features[gc_slot] = reference.gc_at(pos);
        features[homo_slot] = homopolymer_run(seq, pos) as f64;
        variants.push(VariantRecord {
            chrom: reference.name.clone(),
            pos: pos as u64,
            ref_allele: String::from_utf8(ref_allele).unwrap(),
            alt_allele: String::from_utf8(alt_allele).unwrap(),
            vtype,
            label: Label::Unlabeled,
            features,
            annotations: Vec::new(),
        });
    }

    let mut donor = Vec::with_capacity(seq.len() + n_indel * MAX_INDEL);
    let mut cursor = 0;
    for v in &variants {
        let pos = v.pos as usize;
        donor.extend_from_slice(&seq[cursor..pos]);
        donor.extend_from_slice(v.alt_allele.as_bytes());
        cursor = pos + v.ref_allele.len();
    }
    donor.extend_from_slice(&seq[cursor..]);
    Ok((Reference::new(format!("{}_donor", reference.name), donor), variants))
}

fn homopolymer_run(seq: &[u8], pos: usize) -> usize {
    let b = seq[pos];
    let left = seq[..pos].iter().rev().take_while(|&&x| x == b).count();
    let right = seq[pos + 1..].iter().take_while(|&&x| x == b).count();
    left + 1 + right
}

/// Maps donor coordinates back to the reference they were planted on.
#[derive(Debug, Clone, PartialEq)]
pub struct DonorMap {
    /// `(donor_start, ref_start, len)` runs of co-linear sequence.
    runs: Vec<(usize, usize, usize)>,
}

impl DonorMap {
    pub fn new(reference_len: usize, variants: &[VariantRecord]) -> Self {
        let mut sorted: Vec<&VariantRecord> = variants.iter().collect();
        sorted.sort_by_key(|v| v.pos);
        let mut runs = Vec::new();
        let (mut ref_cursor, mut donor_cursor) = (0usize, 0usize);
        for v in sorted {
            let pos = v.pos as usize;
            // anchor base (and SNP base) is co-linear
            let run_end = pos + 1;
            runs.push((donor_cursor, ref_cursor, run_end - ref_cursor));
            donor_cursor += run_end - ref_cursor + v.alt_allele.len() - 1;
            ref_cursor = pos + v.ref_allele.len();
        }
        runs.push((donor_cursor, ref_cursor, reference_len - ref_cursor));
        DonorMap { runs }
    }

    /// Reference position of a donor base, or `None` inside an insertion.
    pub fn to_reference(&self, donor_pos: usize) -> Option<usize> {
        let i = self.runs.partition_point(|r| r.0 <= donor_pos).checked_sub(1)?;
        let (d, r, len) = self.runs[i];
        (donor_pos < d + len).then(|| r + donor_pos - d)
    }
}
