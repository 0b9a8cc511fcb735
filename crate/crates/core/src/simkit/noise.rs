use rand::seq::{index, SliceRandom};
use rand::Rng as _;

use super::reads::{ERROR_QUAL_MAX, ERROR_QUAL_MIN};
use super::{base_index, Alignment, Corruption, NoiseClass, NoiseSpec, ReadEvent, SimError, SimTruth, BASES};
use crate::seeds;
use crate::seqio::{ReadSet, SeqRecord};

/// Corrupts `round(level * total_bases)` bases' worth of the read set.
///
/// Each unit of the budget is assigned a class from `spec.mix`. Sequencing
/// errors spend one unit per substituted base; the read-level classes (PCR
/// duplication/dropout, contamination, processing anomalies) spend a whole
/// read's length per affected read. Sequencing errors land
/// `gc_high_multiplier` times more often per base inside GC-rich windows,
/// with the split between strata fixed up front so the total stays exact.
pub fn inject_noise(
    reads: &ReadSet,
    truth: &SimTruth,
    spec: &NoiseSpec,
    level: f64,
) -> Result<(ReadSet, SimTruth), SimError> {
    spec.validate()?;
    if !(0.0..=1.0).contains(&level) {
        return Err(SimError::BadFraction(level));
    }
    if truth.is_noisy() {
        return Err(SimError::InvalidSpec("truth already carries injected noise".into()));
    }
    let aligns: Vec<&Alignment> = reads
        .records
        .iter()
        .map(|r| truth.alignment(&r.id).ok_or_else(|| SimError::TruthMismatch(r.id.clone())))
        .collect::<Result<_, _>>()?;

    let total = reads.total_bases();
    let budget = (level * total as f64).round() as usize;
    let mut out_truth = truth.clone();
    if budget == 0 || reads.is_empty() {
        return Ok((reads.clone(), out_truth));
    }
    let mut rng = seeds::sub_rng(spec.seed, 0x0415E);

    let mix = spec.normalized_mix();
    let mut units = [0usize; 4];
    if let Some(only) = mix.iter().position(|&w| w == 1.0) {
        units[only] = budget;
    } else {
        let cum: Vec<f64> = mix.iter().scan(0.0, |acc, w| {
            *acc += w;
            Some(*acc)
        }).collect();
        for _ in 0..budget {
            let u: f64 = rng.random();
            let c = cum.iter().position(|&x| u < x).unwrap_or(3);
            units[c] += 1;
        }
    }

    // read-level classes claim whole reads
    let mean_len = total as f64 / reads.len() as f64;
    let mut order: Vec<usize> = (0..reads.len()).collect();
    order.shuffle(&mut rng);
    let mut read_class: Vec<Option<NoiseClass>> = vec![None; reads.len()];
    let mut cursor = 0;
    for class in [NoiseClass::PcrBias, NoiseClass::Contamination, NoiseClass::ProcessingAnomaly] {
        let n = (units[class.index()] as f64 / mean_len).round() as usize;
        for &i in order.iter().skip(cursor).take(n) {
            read_class[i] = Some(class);
        }
        cursor = (cursor + n).min(order.len());
    }

    // sequencing errors: stratified by GC window of the underlying locus
    let is_high = |a: &Alignment, p: usize| truth.reference.gc_at(a.start + p) > spec.gc_high_threshold;
    let (mut n_high_pool, mut n_low_pool) = (0usize, 0usize);
    for (i, r) in reads.records.iter().enumerate() {
        if read_class[i].is_some() {
            continue;
        }
        for (p, &b) in r.bases.iter().enumerate() {
            if base_index(b).is_none() {
                continue;
            }
            if is_high(aligns[i], p) {
                n_high_pool += 1;
            } else {
                n_low_pool += 1;
            }
        }
    }
    let n_seq = units[NoiseClass::SequencingError.index()].min(n_high_pool + n_low_pool);
    let m = spec.gc_high_multiplier;
    let weight_high = m * n_high_pool as f64;
    let denom = weight_high + n_low_pool as f64;
    let mut n_high = if denom > 0.0 { (n_seq as f64 * weight_high / denom).round() as usize } else { 0 };
    n_high = n_high.min(n_high_pool).max(n_seq.saturating_sub(n_low_pool));
    let n_low = n_seq - n_high;
    let mut high_ranks = index::sample(&mut rng, n_high_pool, n_high).into_vec();
    let mut low_ranks = index::sample(&mut rng, n_low_pool, n_low).into_vec();
    high_ranks.sort_unstable();
    low_ranks.sort_unstable();

    let source = spec.contamination_source.as_ref();
    let mut out = Vec::with_capacity(reads.len());
    let (mut hi_rank, mut lo_rank, mut hi_next, mut lo_next) = (0usize, 0usize, 0usize, 0usize);
    for (i, r) in reads.records.iter().enumerate() {
        match read_class[i] {
            None => {
                let mut rec = r.clone();
                for p in 0..rec.len() {
                    let Some(ci) = base_index(rec.bases[p]) else { continue };
                    let hit = if is_high(aligns[i], p) {
                        let h = hi_next < high_ranks.len() && high_ranks[hi_next] == hi_rank;
                        hi_rank += 1;
                        hi_next += usize::from(h);
                        h
                    } else {
                        let h = lo_next < low_ranks.len() && low_ranks[lo_next] == lo_rank;
                        lo_rank += 1;
                        lo_next += usize::from(h);
                        h
                    };
                    if hit {
                        let ni = spec.substitution_matrix.sample(ci, rng.random());
                        let nq = rng.random_range(ERROR_QUAL_MIN..=ERROR_QUAL_MAX);
                        out_truth.ledger.push(Corruption {
                            read_id: rec.id.clone(),
                            pos: p,
                            clean_base: rec.bases[p],
                            noisy_base: BASES[ni],
                            clean_qual: rec.quals[p],
                            noisy_qual: nq,
                            class: NoiseClass::SequencingError,
                        });
                        rec.bases[p] = BASES[ni];
                        rec.quals[p] = nq;
                    }
                }
                out.push(rec);
            }
            Some(NoiseClass::PcrBias) => {
                if rng.random::<bool>() {
                    let mut dup_id = format!("{}_dup", r.id);
                    while out_truth.alignment(&dup_id).is_some() {
                        dup_id.push('x');
                    }
                    out.push(r.clone());
                    out.push(SeqRecord { id: dup_id.clone(), ..r.clone() });
                    out_truth.push_alignment(Alignment {
                        read_id: dup_id.clone(),
                        duplicate_of: Some(r.id.clone()),
                        ..aligns[i].clone()
                    });
                    out_truth.events.push(ReadEvent::Duplicated { read_id: dup_id, source_id: r.id.clone() });
                } else {
                    out_truth.events.push(ReadEvent::Dropped { record: r.clone(), index: i });
                }
            }
            Some(NoiseClass::Contamination) => {
                let src = source.ok_or(SimError::MissingContaminant)?;
                if src.len() < r.len() {
                    return Err(SimError::InvalidSpec("contamination source is shorter than a read".into()));
                }
                let start = rng.random_range(0..=src.len() - r.len());
                let new_bases = src.sequence[start..start + r.len()].to_vec();
                for (p, (&c, &n)) in r.bases.iter().zip(&new_bases).enumerate() {
                    if c != n {
                        out_truth.ledger.push(Corruption {
                            read_id: r.id.clone(),
                            pos: p,
                            clean_base: c,
                            noisy_base: n,
                            clean_qual: r.quals[p],
                            noisy_qual: r.quals[p],
                            class: NoiseClass::Contamination,
                        });
                    }
                }
                out_truth.events.push(ReadEvent::Contaminated {
                    read_id: r.id.clone(),
                    source_start: start,
                    original_bases: r.bases.clone(),
                });
                out.push(SeqRecord { bases: new_bases, ..r.clone() });
            }
            Some(NoiseClass::ProcessingAnomaly) => {
                let mut rec = r.clone();
                if r.len() >= 2 && rng.random::<f64>() < spec.anomaly_rate {
                    let keep = rng.random_range(r.len() / 2..r.len());
                    out_truth.events.push(ReadEvent::Truncated {
                        read_id: r.id.clone(),
                        removed_bases: rec.bases.split_off(keep),
                        removed_quals: rec.quals.split_off(keep),
                    });
                } else {
                    rec.quals.shuffle(&mut rng);
                    out_truth.events.push(ReadEvent::QualityShuffled {
                        read_id: r.id.clone(),
                        original_quals: r.quals.clone(),
                    });
                }
                out.push(rec);
            }
            Some(NoiseClass::SequencingError) => unreachable!("sequencing errors are base-level"),
        }
    }
    Ok((ReadSet::new(out, reads.source_tag.clone()), out_truth))
}
