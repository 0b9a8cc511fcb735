//! Fixtures shared by the benchmarks.

use seqforge_core::seqio::{write_fastq, ReadSet};
use seqforge_core::simkit::{gen_reference, simulate_reads};
use seqforge_core::varfeat::{synth_feature_dataset, FeatureMatrix, SynthConfig};

/// Reads simulated at 10x over a reference of `ref_len` bases.
pub fn reads(ref_len: usize) -> ReadSet {
    let reference = gen_reference(ref_len, 0.45, 1).expect("reference");
    simulate_reads(&reference, 10.0, 100, 2).expect("reads").0
}

pub fn fastq_bytes(reads: &ReadSet) -> Vec<u8> {
    let mut out = Vec::new();
    write_fastq(reads, &mut out).expect("in-memory write");
    out
}

/// The planted variant dataset, shrunk to `n` rows per class.
pub fn features(n: usize) -> FeatureMatrix {
    synth_feature_dataset(&SynthConfig { n_pos: n, n_neg: n, seed: 3, ..SynthConfig::default() }).expect("dataset")
}
