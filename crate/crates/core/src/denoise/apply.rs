use rayon::prelude::*;

use super::encode::{encode_window, tile};
use super::model::OUT_CHANNELS;
use super::DenoiseModel;
use crate::seqio::{ReadSet, SeqRecord};
use crate::simkit::BASES;

fn denoise_record(model: &DenoiseModel, r: &SeqRecord) -> SeqRecord {
    let w = model.arch.window;
    let mut bases = r.bases.clone();
    for (s, len) in tile(r.len(), w) {
        let x = encode_window(&r.bases[s..s + len], &r.quals[s..s + len], w);
        let z = model.forward(&x).expect("encoded windows match the model");
        for t in 0..len {
            let zt = &z[t * OUT_CHANNELS..(t + 1) * OUT_CHANNELS];
            // sigmoid(z) > 0.5 exactly when z > 0
            if zt[4] > 0.0 {
                // first maximum wins, i.e. A < C < G < T on ties
                let mut best = 0;
                for k in 1..4 {
                    if zt[k] > zt[best] {
                        best = k;
                    }
                }
                bases[s + t] = BASES[best];
            }
        }
    }
    SeqRecord { id: r.id.clone(), bases, quals: r.quals.clone() }
}

/// Replaces each base whose noise probability exceeds 0.5 with the most
/// likely base; qualities, ids and order are preserved.
pub fn denoise_reads(model: &DenoiseModel, reads: &ReadSet) -> ReadSet {
    let records = reads.records.par_iter().map(|r| denoise_record(model, r)).collect();
    ReadSet::new(records, reads.source_tag.clone())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::denoise::Arch;
    use crate::simkit::{gen_reference, simulate_reads};

    #[test]
    fn zero_model_is_identity() {
        let r = gen_reference(1000, 0.5, 1).unwrap();
        let (reads, _) = simulate_reads(&r, 2.0, 90, 1).unwrap();
        let m = DenoiseModel::zeros(Arch::default(), 0);
        assert_eq!(denoise_reads(&m, &reads), reads);
    }

    #[test]
    fn biased_head_rewrites_to_first_max() {
        let mut m = DenoiseModel::zeros(Arch { window: 8, ..Arch::default() }, 0);
        // noise logit +1 everywhere, C and T tied for the top base logit
        m.head.b.data = vec![0.0, 2.0, 1.0, 2.0, 1.0];
        let reads = ReadSet::new(vec![SeqRecord::new("a", b"ACGTACGTAC".to_vec(), vec![30; 10])], "t");
        let out = denoise_reads(&m, &reads);
        assert_eq!(out.records[0].bases, b"CCCCCCCCCC".to_vec());
        assert_eq!(out.records[0].quals, vec![30; 10]);
    }
}
