use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion, Throughput};
use seqforge_bench::{fastq_bytes, features, reads};
use seqforge_core::denoise::{denoise_reads, encode_window, Arch, DenoiseModel};
use seqforge_core::ensemble::{train_forest, train_gbt, ForestConfig, GbtConfig};
use seqforge_core::eval::auc;
use seqforge_core::qc::{trim_reads, TrimPolicy};
use seqforge_core::seqio::parse_fastq;

fn io_and_qc(c: &mut Criterion) {
    let set = reads(50_000);
    let bytes = fastq_bytes(&set);
    let mut g = c.benchmark_group("fastq");
    g.throughput(Throughput::Bytes(bytes.len() as u64));
    g.bench_function("parse", |b| b.iter(|| parse_fastq(black_box(bytes.as_slice())).unwrap()));
    g.bench_function("trim", |b| b.iter(|| trim_reads(black_box(&set), &TrimPolicy::default())));
    g.finish();
}

fn denoise(c: &mut Criterion) {
    let model = DenoiseModel::init(Arch::default(), 4).unwrap();
    let x = encode_window(&[b'A'; 64], &[30; 64], 64);
    c.bench_function("denoise/forward_window", |b| b.iter(|| model.forward(black_box(&x)).unwrap()));
    let set = reads(5_000);
    c.bench_function("denoise/apply_500_reads", |b| b.iter(|| denoise_reads(&model, black_box(&set))));
}

fn classifiers(c: &mut Criterion) {
    let m = features(500);
    let mut g = c.benchmark_group("classifier");
    g.sample_size(10);
    g.bench_function("forest_50x8", |b| {
        let cfg = ForestConfig { n_trees: 50, max_depth: 8, ..ForestConfig::default() };
        b.iter(|| train_forest(black_box(&m), &cfg).unwrap())
    });
    g.bench_function("gbt_100", |b| {
        let cfg = GbtConfig { n_rounds: 100, ..GbtConfig::default() };
        b.iter(|| train_gbt(black_box(&m), &cfg).unwrap())
    });
    g.finish();
    let scored: Vec<(f64, u8)> = (0..10_000).map(|i| (((i * 7919) % 1000) as f64, (i % 3 == 0) as u8)).collect();
    c.bench_function("eval/auc_10k", |b| b.iter(|| auc(black_box(&scored)).unwrap()));
}

criterion_group!(benches, io_and_qc, denoise, classifiers);
criterion_main!(benches);
