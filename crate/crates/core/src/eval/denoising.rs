use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use super::EvalError;
use crate::seqio::{ReadSet, SeqRecord};
use crate::simkit::{base_index, NoiseClass, SimTruth, BASES};
use crate::tsv::{fmt_f64, schema_line};

/// Reported SNR when a read set has no mismatches at all.
pub const SNR_CAP_DB: f64 = 99.0;

/// `10 log10(matching / mismatching)` over every read base that has a
/// ground-truth counterpart.
pub fn snr(reads: &ReadSet, truth: &SimTruth) -> Result<f64, EvalError> {
    let (mut hit, mut miss) = (0u64, 0u64);
    for r in &reads.records {
        let clean = truth
            .clean_bases(&r.id)
            .ok_or_else(|| EvalError::LedgerMismatch(format!("read {} has no alignment", r.id)))?;
        for (a, b) in r.bases.iter().zip(clean) {
            if a == b {
                hit += 1;
            } else {
                miss += 1;
            }
        }
    }
    match (hit, miss) {
        (0, 0) => Err(EvalError::EmptyInput),
        (_, 0) => Ok(SNR_CAP_DB),
        (0, _) => Ok(-SNR_CAP_DB),
        _ => Ok(10.0 * (hit as f64 / miss as f64).log10()),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SnrReport {
    pub before: f64,
    pub after: f64,
    pub improvement: f64,
}

pub fn snr_report(noisy: &ReadSet, denoised: &ReadSet, truth: &SimTruth) -> Result<SnrReport, EvalError> {
    let before = snr(noisy, truth)?;
    let after = snr(denoised, truth)?;
    Ok(SnrReport { before, after, improvement: after - before })
}

fn by_id(reads: &ReadSet) -> HashMap<&str, &SeqRecord> {
    reads.records.iter().map(|r| (r.id.as_str(), r)).collect()
}

/// Walks base-level ledger entries of the given classes, yielding
/// `(entry, denoised base)` after checking the noisy reads agree with the
/// ledger. The base is `None` when the processed set dropped the read or
/// trimmed the position away.
fn ledger_pairs<'a>(
    noisy: &ReadSet,
    denoised: &'a ReadSet,
    truth: &'a SimTruth,
    classes: &[NoiseClass],
) -> Result<Vec<(&'a crate::simkit::Corruption, Option<u8>)>, EvalError> {
    let n = by_id(noisy);
    let d = by_id(denoised);
    let mut out = Vec::new();
    for c in truth.ledger.iter().filter(|c| classes.contains(&c.class)) {
        let nr = n
            .get(c.read_id.as_str())
            .ok_or_else(|| EvalError::LedgerMismatch(format!("read {} missing from noisy set", c.read_id)))?;
        if nr.bases.get(c.pos) != Some(&c.noisy_base) {
            return Err(EvalError::LedgerMismatch(format!("{}:{} is not the recorded noisy base", c.read_id, c.pos)));
        }
        let base = d.get(c.read_id.as_str()).and_then(|r| r.bases.get(c.pos).copied());
        out.push((c, base));
    }
    Ok(out)
}

/// Fraction of base-level corruptions (sequencing errors and contaminant
/// substitutions) whose clean base is present after processing. Removed
/// reads and trimmed positions count as not recovered.
pub fn recovery_rate(noisy: &ReadSet, denoised: &ReadSet, truth: &SimTruth) -> Result<f64, EvalError> {
    let pairs = ledger_pairs(
        noisy,
        denoised,
        truth,
        &[NoiseClass::SequencingError, NoiseClass::Contamination],
    )?;
    if pairs.is_empty() {
        return Err(EvalError::EmptyInput);
    }
    let ok = pairs.iter().filter(|(c, b)| *b == Some(c.clean_base)).count();
    Ok(ok as f64 / pairs.len() as f64)
}

/// Correction rate per (clean, noisy) substitution for sequencing errors.
/// Cells with no occurrences are `None`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SubstitutionProfile {
    pub occurrences: [[u64; 4]; 4],
    pub corrected: [[u64; 4]; 4],
}

impl SubstitutionProfile {
    pub fn rate(&self, clean: usize, noisy: usize) -> Option<f64> {
        let n = self.occurrences[clean][noisy];
        (n > 0).then(|| self.corrected[clean][noisy] as f64 / n as f64)
    }

    pub fn to_tsv(&self) -> String {
        let mut s = schema_line("seqforge.substitution_profile.v1");
        s.push_str("clean\tnoisy\toccurrences\tcorrected\trate\n");
        for i in 0..4 {
            for j in 0..4 {
                if i == j {
                    continue;
                }
                let rate = self.rate(i, j).unwrap_or(f64::NAN);
                s.push_str(&format!(
                    "{}\t{}\t{}\t{}\t{}\n",
                    BASES[i] as char,
                    BASES[j] as char,
                    self.occurrences[i][j],
                    self.corrected[i][j],
                    fmt_f64(rate)
                ));
            }
        }
        s
    }
}

pub fn substitution_correction_profile(
    noisy: &ReadSet,
    denoised: &ReadSet,
    truth: &SimTruth,
) -> Result<SubstitutionProfile, EvalError> {
    let mut p = SubstitutionProfile { occurrences: [[0; 4]; 4], corrected: [[0; 4]; 4] };
    for (c, b) in ledger_pairs(noisy, denoised, truth, &[NoiseClass::SequencingError])? {
        let (Some(i), Some(j)) = (base_index(c.clean_base), base_index(c.noisy_base)) else { continue };
        p.occurrences[i][j] += 1;
        if b == Some(c.clean_base) {
            p.corrected[i][j] += 1;
        }
    }
    Ok(p)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::simkit::{gen_reference, inject_noise, simulate_reads, NoiseSpec};

    fn setup() -> (ReadSet, ReadSet, SimTruth) {
        let r = gen_reference(3000, 0.45, 3).unwrap();
        let (clean, truth) = simulate_reads(&r, 5.0, 100, 3).unwrap();
        let (noisy, truth) = inject_noise(&clean, &truth, &NoiseSpec::sequencing_only(3), 0.05).unwrap();
        (clean, noisy, truth)
    }

    #[test]
    fn snr_definition() {
        let (clean, noisy, truth) = setup();
        assert_eq!(snr(&clean, &truth).unwrap(), SNR_CAP_DB);
        let total = noisy.total_bases() as f64;
        let miss = truth.ledger.len() as f64;
        let expect = 10.0 * ((total - miss) / miss).log10();
        assert!((snr(&noisy, &truth).unwrap() - expect).abs() < 1e-12);
        let rep = snr_report(&noisy, &clean, &truth).unwrap();
        assert_eq!(rep.improvement, rep.after - rep.before);
    }

    #[test]
    fn recovery_extremes() {
        let (clean, noisy, truth) = setup();
        assert_eq!(recovery_rate(&noisy, &noisy, &truth).unwrap(), 0.0);
        assert_eq!(recovery_rate(&noisy, &clean, &truth).unwrap(), 1.0);
        // half of the errors fixed
        let mut half = noisy.clone();
        let idx: HashMap<String, usize> = half.records.iter().enumerate().map(|(i, r)| (r.id.clone(), i)).collect();
        let fix = truth.ledger.len() / 2;
        for c in &truth.ledger[..fix] {
            half.records[idx[&c.read_id]].bases[c.pos] = c.clean_base;
        }
        let got = recovery_rate(&noisy, &half, &truth).unwrap();
        assert_eq!(got, fix as f64 / truth.ledger.len() as f64);
        // trimming only removes bases, so it recovers nothing
        let mut trimmed = noisy.clone();
        trimmed.records.iter_mut().for_each(|r| r.bases.truncate(10));
        trimmed.records.pop();
        assert!(recovery_rate(&noisy, &trimmed, &truth).unwrap() < 0.2);
        // ledger / reads disagreement
        assert!(matches!(recovery_rate(&clean, &clean, &truth), Err(EvalError::LedgerMismatch(_))));
    }

    #[test]
    fn profile_counts_cover_ledger() {
        let (clean, noisy, truth) = setup();
        let p = substitution_correction_profile(&noisy, &clean, &truth).unwrap();
        let total: u64 = p.occurrences.iter().flatten().sum();
        assert_eq!(total as usize, truth.ledger.len());
        for i in 0..4 {
            assert_eq!(p.rate(i, i), None);
            for j in 0..4 {
                if p.occurrences[i][j] > 0 {
                    assert_eq!(p.rate(i, j), Some(1.0));
                }
            }
        }
        assert!(p.to_tsv().starts_with("#schema="));
    }
}
