use std::collections::HashSet;

use super::ClassMetrics;
use crate::seqio::ReadSet;
use crate::simkit::{base_index, DonorMap, Reference, SimTruth, BASES};
use crate::varfeat::{Label, VariantRecord, VariantType, N_FEATURES};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PileupConfig {
    pub min_depth: u32,
    pub min_alt_fraction: f64,
}

impl Default for PileupConfig {
    fn default() -> Self {
        PileupConfig { min_depth: 5, min_alt_fraction: 0.3 }
    }
}

/// Naive SNP caller: piles reads up at their true donor placement and calls
/// the most frequent non-reference base where it reaches `min_alt_fraction`.
/// Only used to compare read sets before and after denoising, so it leans
/// on the simulator's alignments instead of an aligner.
pub fn call_snps(
    reads: &ReadSet,
    truth: &SimTruth,
    reference: &Reference,
    map: &DonorMap,
    cfg: &PileupConfig,
) -> Vec<VariantRecord> {
    let donor_len = truth.reference.len();
    let mut counts = vec![[0u32; 4]; donor_len];
    for r in &reads.records {
        let Some(a) = truth.alignment(&r.id) else { continue };
        for (i, &b) in r.bases.iter().enumerate().take(a.len) {
            if let Some(k) = base_index(b) {
                counts[a.start + i][k] += 1;
            }
        }
    }
    let mut calls = Vec::new();
    for (p, c) in counts.iter().enumerate() {
        let depth: u32 = c.iter().sum();
        if depth < cfg.min_depth {
            continue;
        }
        let Some(rp) = map.to_reference(p) else { continue };
        let Some(ri) = base_index(reference.sequence[rp]) else { continue };
        let (alt, n_alt) = (0..4).filter(|&k| k != ri).map(|k| (k, c[k])).fold((0, 0), |best, x| {
            if x.1 > best.1 {
                x
            } else {
                best
            }
        });
        if n_alt > 0 && n_alt as f64 / depth as f64 >= cfg.min_alt_fraction {
            calls.push(VariantRecord {
                chrom: reference.name.clone(),
                pos: rp as u64,
                ref_allele: (BASES[ri] as char).to_string(),
                alt_allele: (BASES[alt] as char).to_string(),
                vtype: VariantType::Snp,
                label: Label::Unlabeled,
                features: vec![0.0; N_FEATURES],
                annotations: Vec::new(),
            });
        }
    }
    calls
}

/// Calls matched to truth on (chrom, pos, alt). There are no true negatives
/// in this setting, so specificity and AUC are undefined.
pub fn variant_detection_score(called: &[VariantRecord], truth: &[VariantRecord]) -> ClassMetrics {
    let key = |v: &VariantRecord| (v.chrom.clone(), v.pos, v.alt_allele.clone());
    let truth_keys: HashSet<_> = truth.iter().map(key).collect();
    let called_keys: HashSet<_> = called.iter().map(key).collect();
    let tp = called_keys.intersection(&truth_keys).count() as u64;
    let fp = called_keys.len() as u64 - tp;
    let fn_ = truth_keys.len() as u64 - tp;
    ClassMetrics::from_counts(tp, fp, 0, fn_, f64::NAN)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::simkit::{gen_reference, plant_variants, simulate_reads};

    #[test]
    fn clean_reads_find_planted_snps() {
        let r = gen_reference(20_000, 0.45, 5).unwrap();
        let (donor, planted) = plant_variants(&r, 40, 10, 5).unwrap();
        let (reads, truth) = simulate_reads(&donor, 20.0, 100, 5).unwrap();
        let map = DonorMap::new(r.len(), &planted);
        let calls = call_snps(&reads, &truth, &r, &map, &PileupConfig::default());
        let snps: Vec<VariantRecord> = planted.into_iter().filter(|v| v.vtype == VariantType::Snp).collect();
        let m = variant_detection_score(&calls, &snps);
        assert_eq!(m.fp, 0);
        // a few SNPs may sit in low-coverage gaps
        assert!(m.sensitivity > 0.9, "{m:?}");
        assert!(m.specificity.is_nan());
    }

    #[test]
    fn score_counts() {
        let v = |pos, alt: &str| VariantRecord {
            chrom: "c".into(),
            pos,
            ref_allele: "A".into(),
            alt_allele: alt.into(),
            vtype: VariantType::Snp,
            label: Label::Unlabeled,
            features: vec![],
            annotations: vec![],
        };
        let m = variant_detection_score(&[v(1, "C"), v(2, "G"), v(9, "T")], &[v(1, "C"), v(2, "T")]);
        assert_eq!((m.tp, m.fp, m.fn_, m.tn), (1, 2, 1, 0));
        assert_eq!(m.precision, 1.0 / 3.0);
        assert_eq!(m.sensitivity, 0.5);
    }
}
