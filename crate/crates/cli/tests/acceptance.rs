//! Acceptance suite. Prints one `[PASS]`/`[FAIL]` line per criterion and
//! exits non-zero if any fail. Set `ACCEPTANCE_ONLY=AC3,AC7` to run a
//! subset.
//!
//! Oracles here are written independently of the library code they check.

use std::collections::BTreeMap;
use std::panic::{self, AssertUnwindSafe};
use std::path::Path;
use std::time::{Duration, Instant};

use rand::Rng as _;
use seqforge_cli::config::{Config, EnsembleSection};
use seqforge_cli::pipeline;
use seqforge_core::denoise::layers::{Conv1d, Dense, Rnn};
use seqforge_core::denoise::{self, Arch, DenoiseModel, Example, IGNORE};
use seqforge_core::ensemble::{
    cross_validate, fit_pipeline, optimize_fusion_weights, smote, stratified_folds, CvConfig, FusionWeights,
    PipelineConfig, Selection, SmoteConfig, Weighting,
};
use seqforge_core::eval::{self, auc, hypergeom_enrichment, mean_sd};
use seqforge_core::qc::{trim_reads, TrimPolicy};
use seqforge_core::seeds;
use seqforge_core::seqio::{parse_fastq, write_fastq, ReadSet, SeqRecord, MAX_PHRED};
use seqforge_core::simkit::{gen_mosaic_reference, inject_noise, simulate_reads, NoiseSpec, GC_WINDOW};
use seqforge_core::varfeat::{
    rfe_select, synth_feature_dataset, FeatureMatrix, RfeConfig, RowOrigin, SynthConfig, DEFAULT_INFORMATIVE,
};
use seqforge_core::ensemble::ForestConfig;

type Check = Result<String, String>;

fn ensure(ok: bool, msg: impl Into<String>) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg.into())
    }
}

// ---------------------------------------------------------------- AC1

fn ac1_fastq_round_trip() -> Check {
    let mut rng = seeds::rng(101);
    let records: Vec<SeqRecord> = (0..1000)
        .map(|i| {
            let len = rng.random_range(1..=300);
            let bases: Vec<u8> = (0..len).map(|_| b"ACGTN"[rng.random_range(0..5)]).collect();
            let quals: Vec<u8> = (0..len).map(|_| rng.random_range(0..=MAX_PHRED)).collect();
            SeqRecord::new(format!("read_{i}_{}", rng.random::<u32>()), bases, quals)
        })
        .collect();
    let set = ReadSet::new(records, "ac1");
    let mut first = Vec::new();
    write_fastq(&set, &mut first).map_err(|e| e.to_string())?;
    let parsed = parse_fastq(first.as_slice()).map_err(|e| e.to_string())?;
    ensure(parsed.records == set.records, "parsed records differ from the originals")?;
    let mut second = Vec::new();
    write_fastq(&parsed, &mut second).map_err(|e| e.to_string())?;
    ensure(first == second, "second write differs")?;
    Ok(format!("1000 records, {} bytes identical", first.len()))
}

// ---------------------------------------------------------------- AC2

/// Straight re-scan of every window, no running sums.
fn naive_keep(quals: &[u8], window: usize, t: f64) -> usize {
    let n = quals.len();
    let mean = |s: &[u8]| s.iter().map(|&q| f64::from(q)).sum::<f64>() / s.len() as f64;
    if n == 0 {
        return 0;
    }
    if n < window {
        return if mean(quals) < t { 0 } else { n };
    }
    for f in 0..=n - window {
        if mean(&quals[f..f + window]) < t {
            if f == 0 {
                return 0;
            }
            let mut keep = f + window - 1;
            while keep > 0 && f64::from(quals[keep - 1]) < t {
                keep -= 1;
            }
            return keep;
        }
    }
    n
}

fn naive_trim(reads: &ReadSet, p: &TrimPolicy) -> Vec<SeqRecord> {
    reads
        .records
        .iter()
        .filter_map(|r| {
            let k = naive_keep(&r.quals, p.window, p.q_threshold);
            (k >= p.min_length).then(|| SeqRecord::new(r.id.clone(), r.bases[..k].to_vec(), r.quals[..k].to_vec()))
        })
        .collect()
}

fn ac2_trimmer() -> Check {
    let mut rng = seeds::rng(202);
    let mut kept = 0;
    for i in 0..500 {
        let len = rng.random_range(0..160usize);
        // a drifting quality walk with occasional dips
        let mut q: i32 = rng.random_range(15..42);
        let quals: Vec<u8> = (0..len)
            .map(|_| {
                q = (q + rng.random_range(-4..=3)).clamp(2, 41);
                if rng.random::<f64>() < 0.05 {
                    rng.random_range(0..10)
                } else {
                    q as u8
                }
            })
            .collect();
        let bases = vec![b'A'; len];
        let set = ReadSet::new(vec![SeqRecord::new(format!("r{i}"), bases, quals)], "ac2");
        let half = if rng.random::<bool>() { 0.5 } else { 0.0 };
        let p = TrimPolicy {
            window: rng.random_range(1..=8),
            q_threshold: f64::from(rng.random_range(5..28u8)) + half,
            min_length: rng.random_range(1..=40),
        };
        let (out, _) = trim_reads(&set, &p);
        ensure(out.records == naive_trim(&set, &p), format!("case {i}: mismatch with the re-scan oracle ({p:?})"))?;
        let (again, _) = trim_reads(&out, &p);
        ensure(again.records == out.records, format!("case {i}: not idempotent"))?;
        let stricter = TrimPolicy { q_threshold: p.q_threshold + f64::from(rng.random_range(1..8u8)), ..p };
        let (s, _) = trim_reads(&set, &stricter);
        let len_of = |r: &ReadSet| r.records.first().map_or(0, SeqRecord::len);
        ensure(len_of(&s) <= len_of(&out), format!("case {i}: a stricter threshold kept more"))?;
        kept += out.len();
    }
    Ok(format!("500 reads match the oracle ({kept} kept); idempotent and monotone"))
}

// ---------------------------------------------------------------- AC3

fn ac3_noise_calibration() -> Check {
    let segments: Vec<(usize, f64)> = (0..20).map(|i| (5000, if i % 2 == 0 { 0.45 } else { 0.78 })).collect();
    let reference = gen_mosaic_reference(&segments, 31).map_err(|e| e.to_string())?;
    let (clean, truth) = simulate_reads(&reference, 10.0, 100, 32).map_err(|e| e.to_string())?;
    let total = clean.total_bases();
    ensure(total >= 100_000 && total % 10 == 0, format!("unexpected base count {total}"))?;
    let (_, noisy_truth) =
        inject_noise(&clean, &truth, &NoiseSpec::sequencing_only(33), 0.10).map_err(|e| e.to_string())?;
    let corrupted = noisy_truth.ledger.len();
    ensure(corrupted * 10 == total, format!("corrupted {corrupted} of {total} is not exactly 0.100"))?;

    // stratify by GC of the fixed-size reference window, recomputed here
    let seq = &reference.sequence;
    let high_window: Vec<bool> = seq
        .chunks(GC_WINDOW)
        .map(|w| w.iter().filter(|&&b| b == b'G' || b == b'C').count() as f64 / w.len() as f64 > 0.65)
        .collect();
    let starts: BTreeMap<&str, usize> = truth.alignments.iter().map(|a| (a.read_id.as_str(), a.start)).collect();
    let (mut hi_bases, mut lo_bases) = (0u64, 0u64);
    for r in &clean.records {
        let s = starts[r.id.as_str()];
        for p in 0..r.len() {
            if high_window[(s + p) / GC_WINDOW] {
                hi_bases += 1;
            } else {
                lo_bases += 1;
            }
        }
    }
    let (mut hi_err, mut lo_err) = (0u64, 0u64);
    for c in &noisy_truth.ledger {
        if high_window[(starts[c.read_id.as_str()] + c.pos) / GC_WINDOW] {
            hi_err += 1;
        } else {
            lo_err += 1;
        }
    }
    let ratio = (hi_err as f64 / hi_bases as f64) / (lo_err as f64 / lo_bases as f64);
    ensure((ratio - 2.6).abs() <= 0.3, format!("GC error-rate ratio {ratio:.3} outside 2.6 ± 0.3"))?;
    Ok(format!("{corrupted}/{total} bases corrupted (0.100); GC ratio {ratio:.3}"))
}

// ---------------------------------------------------------------- AC4

const EPS: f64 = 1e-4;

fn rel_error(a: &[f64], n: &[f64]) -> f64 {
    let d = a.iter().zip(n).map(|(x, y)| (x - y).powi(2)).sum::<f64>().sqrt();
    let s = a.iter().map(|x| x * x).sum::<f64>().sqrt() + n.iter().map(|x| x * x).sum::<f64>().sqrt();
    if s == 0.0 {
        0.0
    } else {
        d / s
    }
}

fn central(v: &mut [f64], f: &mut dyn FnMut(&[f64]) -> f64) -> Vec<f64> {
    (0..v.len())
        .map(|i| {
            let o = v[i];
            v[i] = o + EPS;
            let up = f(v);
            v[i] = o - EPS;
            let dn = f(v);
            v[i] = o;
            (up - dn) / (2.0 * EPS)
        })
        .collect()
}

fn randn(rng: &mut seeds::Rng, n: usize, scale: f64) -> Vec<f64> {
    (0..n).map(|_| rng.random_range(-1.0..1.0) * scale).collect()
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn ac4_gradients() -> Check {
    let mut rng = seeds::rng(404);
    let mut worst: BTreeMap<&str, f64> = BTreeMap::new();
    let mut note = |name: &'static str, e: f64| {
        let w = worst.entry(name).or_insert(0.0);
        *w = w.max(e);
    };
    for _ in 0..24 {
        // conv1d: scalar loss <r, conv(x)>
        let (ci, co, k, len) = (rng.random_range(1..4), rng.random_range(1..4), [1, 3, 5][rng.random_range(0..3)], rng.random_range(1..7));
        let mut c = Conv1d::zeros(ci, co, k);
        c.w.data = randn(&mut rng, c.w.len(), 0.5);
        c.b.data = randn(&mut rng, c.b.len(), 0.5);
        let mut x = randn(&mut rng, len * ci, 1.0);
        let r = randn(&mut rng, len * co, 1.0);
        let (mut dw, mut db) = (vec![0.0; c.w.len()], vec![0.0; c.b.len()]);
        let dx = c.backward(&x, len, &r, &mut dw, &mut db);
        let nx = central(&mut x, &mut |xv| dot(&r, &c.forward(xv, len)));
        let mut wv = c.w.data.clone();
        let nw = central(&mut wv, &mut |wv| {
            let mut c2 = c.clone();
            c2.w.data = wv.to_vec();
            dot(&r, &c2.forward(&x, len))
        });
        let mut bv = c.b.data.clone();
        let nb = central(&mut bv, &mut |bv| {
            let mut c2 = c.clone();
            c2.b.data = bv.to_vec();
            dot(&r, &c2.forward(&x, len))
        });
        note("conv1d", rel_error(&dx, &nx).max(rel_error(&dw, &nw)).max(rel_error(&db, &nb)));

        // tanh recurrence, gradients through time
        let (ni, nh, len) = (rng.random_range(1..4), rng.random_range(1..5), rng.random_range(1..7));
        let mut rnn = Rnn::zeros(ni, nh);
        rnn.wx.data = randn(&mut rng, rnn.wx.len(), 0.6);
        rnn.wh.data = randn(&mut rng, rnn.wh.len(), 0.6);
        rnn.b.data = randn(&mut rng, rnn.b.len(), 0.3);
        let mut x = randn(&mut rng, len * ni, 1.0);
        let r = randn(&mut rng, len * nh, 1.0);
        let hs = rnn.forward(&x, len);
        let (mut dwx, mut dwh, mut db) = (vec![0.0; rnn.wx.len()], vec![0.0; rnn.wh.len()], vec![0.0; rnn.b.len()]);
        let dx = rnn.backward(&x, &hs, len, &r, &mut dwx, &mut dwh, &mut db);
        let nx = central(&mut x, &mut |xv| dot(&r, &rnn.forward(xv, len)));
        let mut p = rnn.wx.data.clone();
        let nwx = central(&mut p, &mut |v| {
            let mut m = rnn.clone();
            m.wx.data = v.to_vec();
            dot(&r, &m.forward(&x, len))
        });
        let mut p = rnn.wh.data.clone();
        let nwh = central(&mut p, &mut |v| {
            let mut m = rnn.clone();
            m.wh.data = v.to_vec();
            dot(&r, &m.forward(&x, len))
        });
        let mut p = rnn.b.data.clone();
        let nb = central(&mut p, &mut |v| {
            let mut m = rnn.clone();
            m.b.data = v.to_vec();
            dot(&r, &m.forward(&x, len))
        });
        note(
            "rnn",
            rel_error(&dx, &nx).max(rel_error(&dwx, &nwx)).max(rel_error(&dwh, &nwh)).max(rel_error(&db, &nb)),
        );

        // dense head
        let (ni, no, len) = (rng.random_range(1..6), rng.random_range(1..6), rng.random_range(1..5));
        let mut d = Dense::zeros(ni, no);
        d.w.data = randn(&mut rng, d.w.len(), 0.7);
        d.b.data = randn(&mut rng, d.b.len(), 0.7);
        let mut x = randn(&mut rng, len * ni, 1.0);
        let r = randn(&mut rng, len * no, 1.0);
        let (mut dw, mut db) = (vec![0.0; d.w.len()], vec![0.0; d.b.len()]);
        let dx = d.backward(&x, len, &r, &mut dw, &mut db);
        let nx = central(&mut x, &mut |xv| dot(&r, &d.forward(xv, len)));
        let mut p = d.w.data.clone();
        let nw = central(&mut p, &mut |v| {
            let mut m = d.clone();
            m.w.data = v.to_vec();
            dot(&r, &m.forward(&x, len))
        });
        let mut p = d.b.data.clone();
        let nb = central(&mut p, &mut |v| {
            let mut m = d.clone();
            m.b.data = v.to_vec();
            dot(&r, &m.forward(&x, len))
        });
        note("dense", rel_error(&dx, &nx).max(rel_error(&dw, &nw)).max(rel_error(&db, &nb)));

        // the composite loss through the whole model
        let arch = Arch { window: 5, kernel: 3, conv1: 3, conv2: 3, hidden: 3, lambda: rng.random_range(0.0..2.0) };
        let model = DenoiseModel::init(arch, rng.random()).map_err(|e| e.to_string())?;
        let ex = random_example(&mut rng, arch.window);
        let mut grads = model.zero_grads();
        model.accumulate_grads(&ex, 1.0, &mut grads);
        let mut e_model: f64 = 0.0;
        for slot in 0..9 {
            let mut v = model.params()[slot].data.clone();
            let n = central(&mut v, &mut |v| {
                let mut m = model.clone();
                m.params_mut()[slot].data = v.to_vec();
                let l = m.loss(std::slice::from_ref(&ex));
                let scored = ex.target.iter().filter(|&&t| t != IGNORE).count() as f64;
                l.total * scored
            });
            e_model = e_model.max(rel_error(&grads[slot], &n));
        }
        note("model", e_model);
    }
    let bad: Vec<String> = worst.iter().filter(|(_, &e)| !(e < 1e-4)).map(|(n, e)| format!("{n} {e:.2e}")).collect();
    ensure(bad.is_empty(), format!("relative error >= 1e-4: {}", bad.join(", ")))?;
    Ok(format!(
        "24 cases per layer; worst {}",
        worst.iter().map(|(n, e)| format!("{n} {e:.1e}")).collect::<Vec<_>>().join(", ")
    ))
}

fn random_example(rng: &mut seeds::Rng, w: usize) -> Example {
    let bases: Vec<u8> = (0..w).map(|_| b"ACGT"[rng.random_range(0..4)]).collect();
    let quals: Vec<u8> = (0..w).map(|_| rng.random_range(2..41)).collect();
    let target = (0..w).map(|_| if rng.random::<f64>() < 0.15 { IGNORE } else { rng.random_range(0..4) }).collect();
    let flag = (0..w).map(|_| u8::from(rng.random::<f64>() < 0.3)).collect();
    Example { x: denoise::encode_window(&bases, &quals, w), target, flag }
}

// ---------------------------------------------------------------- AC5

fn ac5_loss_decomposition() -> Check {
    let mut rng = seeds::rng(505);
    let mut checked = 0;
    for case in 0..30 {
        let lambda = if case % 3 == 0 { 0.0 } else { rng.random_range(0.01..3.0) };
        let arch = Arch { window: 8, kernel: 3, conv1: 4, conv2: 4, hidden: 4, lambda };
        let model = DenoiseModel::init(arch, rng.random()).map_err(|e| e.to_string())?;
        let batch: Vec<Example> = (0..4).map(|_| random_example(&mut rng, arch.window)).collect();
        let l = model.loss(&batch);
        ensure(l.total == l.ce + lambda * l.penalty, format!("case {case}: total != ce + lambda*penalty"))?;
        // cross-entropy and penalty recomputed from the raw logits
        let (mut ce, mut pen, mut n) = (0.0, 0.0, 0usize);
        for ex in &batch {
            let z = model.forward(&ex.x).map_err(|e| e.to_string())?;
            for (t, &y) in ex.target.iter().enumerate() {
                if y == IGNORE {
                    continue;
                }
                let zt = &z[t * 5..t * 5 + 5];
                let lse = zt[..4].iter().map(|v| v.exp()).sum::<f64>().ln();
                ce += lse - zt[y as usize];
                let s = 1.0 / (1.0 + (-zt[4]).exp());
                pen += (s - f64::from(ex.flag[t])).powi(2);
                n += 1;
            }
        }
        let (ce, pen) = (ce / n as f64, pen / n as f64);
        ensure((l.ce - ce).abs() < 1e-12 && (l.penalty - pen).abs() < 1e-12, format!("case {case}: parts disagree with the oracle"))?;
        if lambda == 0.0 {
            ensure(l.total == l.ce, format!("case {case}: lambda = 0 is not pure cross-entropy"))?;
        }
        checked += 1;
    }
    Ok(format!("{checked} batches: total == ce + λ·penalty bit-exact; λ=0 gives ce"))
}

// ---------------------------------------------------------------- AC6

fn ac6_denoise_efficacy() -> Check {
    let mut cfg = Config::default();
    cfg.simulate.ref_length = 1_000_000;
    cfg.simulate.gc = 0.45;
    cfg.simulate.depth = 20.0;
    cfg.simulate.read_len = 100;
    cfg.simulate.n_snp = 0;
    cfg.simulate.n_indel = 0;
    cfg.noise.level = 0.10;
    cfg.noise.mix = [1.0, 0.0, 0.0, 0.0];
    cfg.noise.substitution_matrix = "illumina_like".into();
    cfg.validate().map_err(|e| e.to_string())?;
    let seed = 6;
    let sim = pipeline::simulate(&cfg, seed, None, None).map_err(|e| e.to_string())?;
    let (model, report) =
        pipeline::train_denoiser(&sim.noisy, &sim.truth, &cfg.denoise, seed).map_err(|e| e.to_string())?;
    let denoised = denoise::denoise_reads(&model, &sim.noisy);
    let rec = eval::recovery_rate(&sim.noisy, &denoised, &sim.truth).map_err(|e| e.to_string())?;
    let snr = eval::snr_report(&sim.noisy, &denoised, &sim.truth).map_err(|e| e.to_string())?;
    let policy = pipeline::trim_policy(&cfg).map_err(|e| e.to_string())?;
    let trimmed = trim_reads(&sim.noisy, &policy).0;
    let rec_trim = eval::recovery_rate(&sim.noisy, &trimmed, &sim.truth).map_err(|e| e.to_string())?;
    let last = report.epochs.last().map_or(f64::NAN, |e| e.val_noise_accuracy);
    let detail = format!(
        "recovery {rec:.4} (trim-only {rec_trim:.4}); SNR {:.2} -> {:.2} dB (+{:.2}); val noise acc {last:.4}",
        snr.before, snr.after, snr.improvement
    );
    ensure(rec >= 0.80 && snr.improvement > 0.0 && rec > rec_trim, detail.clone())?;
    Ok(detail)
}

// ---------------------------------------------------------------- AC7

fn ac7_metric_oracles() -> Check {
    let mut rng = seeds::rng(707);
    for case in 0..200 {
        let n = rng.random_range(2..80);
        let levels = rng.random_range(2..20);
        let mut pairs: Vec<(f64, u8)> =
            (0..n).map(|_| (f64::from(rng.random_range(0..levels)) / 7.0, rng.random_range(0..2u8))).collect();
        if !pairs.iter().any(|p| p.1 == 1) {
            pairs[0].1 = 1;
        }
        if !pairs.iter().any(|p| p.1 == 0) {
            pairs[1].1 = 0;
        }
        let (mut twice, mut n1, mut n0) = (0u64, 0u64, 0u64);
        for &(sp, yp) in &pairs {
            if yp == 1 {
                n1 += 1;
            } else {
                n0 += 1;
            }
            for &(sn, yn) in &pairs {
                if yp == 1 && yn == 0 {
                    twice += if sp > sn { 2 } else if sp == sn { 1 } else { 0 };
                }
            }
        }
        let brute = twice as f64 / (2 * n1 * n0) as f64;
        let got = auc(&pairs).map_err(|e| e.to_string())?;
        ensure(got == brute, format!("AUC case {case}: {got} vs brute force {brute}"))?;
    }

    // exact upper tails from integer hypergeometric counts
    let mut binom = vec![vec![0u128; 61]; 61];
    for a in 0..=60 {
        binom[a][0] = 1;
        for b in 1..=a {
            binom[a][b] = binom[a - 1][b - 1] + if b < a { binom[a - 1][b] } else { 0 };
        }
    }
    let mut instances = 0u64;
    let mut worst: f64 = 0.0;
    for big_n in 1..=60usize {
        for big_k in 0..=big_n {
            for n in 0..=big_n {
                let hi = big_k.min(n);
                let lo = n.saturating_sub(big_n - big_k);
                let denom = binom[big_n][n];
                let mut tail = vec![0u128; hi + 2];
                for x in (lo..=hi).rev() {
                    tail[x] = tail[x + 1] + binom[big_k][x] * binom[big_n - big_k][n - x];
                }
                for x in (0..lo).rev() {
                    tail[x] = tail[x + 1];
                }
                for k in 0..=hi {
                    let exact = tail[k] as f64 / denom as f64;
                    let got = hypergeom_enrichment(k as u64, big_k as u64, n as u64, big_n as u64)
                        .map_err(|e| e.to_string())?;
                    let err = (got - exact).abs();
                    worst = worst.max(err);
                    if err > 1e-12 {
                        return Err(format!("hypergeom k={k} K={big_k} n={n} N={big_n}: {got} vs {exact}"));
                    }
                    instances += 1;
                }
            }
        }
    }
    Ok(format!("200 AUC instances bit-exact; {instances} hypergeometric tails, max error {worst:.1e}"))
}

// ---------------------------------------------------------------- AC8

fn on_segment(s: &[f64], a: &[f64], b: &[f64]) -> bool {
    let d: Vec<f64> = a.iter().zip(b).map(|(x, y)| y - x).collect();
    let dd = dot(&d, &d);
    if dd == 0.0 {
        return s.iter().zip(a).all(|(x, y)| (x - y).abs() <= 1e-9);
    }
    let t = s.iter().zip(a).zip(&d).map(|((x, y), z)| (x - y) * z).sum::<f64>() / dd;
    (-1e-12..=1.0 + 1e-12).contains(&t) && s.iter().zip(a).zip(&d).all(|((x, y), z)| (x - (y + t * z)).abs() <= 1e-9)
}

fn ac8_smote() -> Check {
    let mut rng = seeds::rng(808);
    let mut synthetic = 0;
    for case in 0..6 {
        let d = rng.random_range(2..6);
        let n_maj = rng.random_range(150..320);
        let n_min = rng.random_range(8..120);
        let mut rows = Vec::new();
        let mut labels = Vec::new();
        for i in 0..(n_maj + n_min) {
            let y = u8::from(i % (n_maj + n_min) < n_min);
            rows.push(randn(&mut rng, d, 3.0));
            labels.push(y);
        }
        let m = FeatureMatrix::from_rows(&rows, labels.clone());
        let cfg = SmoteConfig { k: rng.random_range(1..7), target_ratio: 1.0, seed: rng.random() };
        let out = smote(&m, &cfg).map_err(|e| e.to_string())?;
        for i in 0..m.n_rows() {
            ensure(out.row(i) == m.row(i) && out.labels[i] == m.labels[i], format!("case {case}: original row {i} changed"))?;
        }
        let [n0, n1] = out.class_counts();
        ensure(n0 == n1, format!("case {case}: classes {n0}/{n1} after balancing"))?;
        let minority: Vec<&[f64]> = (0..m.n_rows()).filter(|&i| m.labels[i] == 1).map(|i| m.row(i)).collect();
        for i in m.n_rows()..out.n_rows() {
            ensure(out.labels[i] == 1, format!("case {case}: synthetic row {i} has the majority label"))?;
            ensure(matches!(out.origins[i], RowOrigin::Synthetic { .. }), format!("case {case}: row {i} not marked synthetic"))?;
            let s = out.row(i);
            let found = minority.iter().enumerate().any(|(a, ra)| minority[a..].iter().any(|rb| on_segment(s, ra, rb)));
            ensure(found, format!("case {case}: synthetic row {i} lies on no minority segment"))?;
            synthetic += 1;
        }
    }
    Ok(format!("{synthetic} synthetic rows checked against every minority pair; originals intact; ratio exact"))
}

// ---------------------------------------------------------------- AC9

fn planted() -> Result<FeatureMatrix, String> {
    synth_feature_dataset(&SynthConfig { seed: 2024, ..SynthConfig::default() }).map_err(|e| e.to_string())
}

fn ac9_rfe() -> Check {
    let m = planted()?;
    ensure(m.n_rows() == 5000 && m.n_cols() == 63, "planted dataset has the wrong shape")?;
    let cfg = RfeConfig {
        target_k: 17,
        step: 2,
        forest: ForestConfig { n_trees: 50, max_depth: 8, ..ForestConfig::default() },
        cv_folds: 3,
        seed: 9,
    };
    let r = rfe_select(&m, &cfg).map_err(|e| e.to_string())?;
    let hits = DEFAULT_INFORMATIVE.iter().filter(|&&j| r.selected_mask[j]).count();
    let at = |k: usize| r.cv_curve.iter().find(|c| c.0 == k).map(|c| c.1);
    let (a63, a17) = (at(63).ok_or("no CV-AUC at 63")?, at(17).ok_or("no CV-AUC at 17")?);
    let detail = format!("{hits}/17 planted slots; CV-AUC 63 -> {a63:.4}, 17 -> {a17:.4}");
    ensure(hits >= 14 && a17 >= a63 - 0.02, detail.clone())?;
    Ok(detail)
}

// ---------------------------------------------------------------- AC10

fn ac10_fusion() -> Check {
    let w = FusionWeights::default();
    ensure(w.as_array() == [0.45, 0.30, 0.25], "default weights are not (0.45, 0.30, 0.25)")?;
    let p = w.fuse([0.8, 0.6, 0.4]);
    ensure(p == 0.64, format!("fuse(0.8, 0.6, 0.4) = {p}"))?;

    let m = planted()?;
    let folds = stratified_folds(&m.labels, 5, 10).map_err(|e| e.to_string())?;
    let train: Vec<usize> = (0..m.n_rows()).filter(|&i| folds[i] != 0).collect();
    let val: Vec<usize> = (0..m.n_rows()).filter(|&i| folds[i] == 0).collect();
    let cfg = PipelineConfig { selection: Selection::All, weighting: Weighting::Fixed(w), ..PipelineConfig::default() };
    let fitted = fit_pipeline(&m.subset_rows(&train), &cfg, 10).map_err(|e| e.to_string())?;
    let probs: Vec<[f64; 3]> =
        val.iter().map(|&i| fitted.model.component_probs(m.row(i))).collect::<Result<_, _>>().map_err(|e| e.to_string())?;
    let labels: Vec<u8> = val.iter().map(|&i| m.labels[i]).collect();
    let s = optimize_fusion_weights(&probs, &labels, 0.05).map_err(|e| e.to_string())?;
    let scored: Vec<(f64, u8)> = probs.iter().zip(&labels).map(|(p, &y)| (w.fuse(*p), y)).collect();
    let default_auc = auc(&scored).map_err(|e| e.to_string())?;
    let sw = s.weights;
    let detail = format!(
        "fuse = 0.64; search ({:.2}, {:.2}, {:.2}) AUC {:.4} over {} points vs default {default_auc:.4}",
        sw.alpha, sw.beta, sw.gamma, s.val_auc, s.evaluated
    );
    ensure(s.evaluated == 231 && s.val_auc >= default_auc, detail.clone())?;
    Ok(detail)
}

// ---------------------------------------------------------------- AC11

fn ac11_cv() -> Check {
    let m = planted()?;
    let cfg = pipeline::pipeline_config(&EnsembleSection::default(), 17, None).map_err(|e| e.to_string())?;
    let report = cross_validate(&m, &CvConfig { folds: 5, repeats: 10, seed: 11 }, &cfg).map_err(|e| e.to_string())?;
    let failed = report.folds.iter().filter(|f| f.error.is_some()).count();
    ensure(report.folds.len() == 50 && failed == 0, format!("{failed} of {} folds failed", report.folds.len()))?;
    ensure(report.leakage_checked == 50, format!("leakage checked on {} of 50 folds", report.leakage_checked))?;
    let acc: Vec<f64> = report.folds.iter().map(|f| f.metrics(f.weights).accuracy).collect();
    let ms = mean_sd(&acc);
    let detail = format!("accuracy {:.4} ± {:.4} over {} folds; leakage check passed on all", ms.mean, ms.sd, ms.n);
    ensure(ms.mean >= 0.95 && ms.sd <= 0.03, detail.clone())?;
    Ok(detail)
}

// ---------------------------------------------------------------- AC12

fn tree(dir: &Path) -> BTreeMap<String, Vec<u8>> {
    fn walk(base: &Path, dir: &Path, out: &mut BTreeMap<String, Vec<u8>>) {
        for e in std::fs::read_dir(dir).unwrap() {
            let p = e.unwrap().path();
            if p.is_dir() {
                walk(base, &p, out);
            } else {
                out.insert(p.strip_prefix(base).unwrap().display().to_string(), std::fs::read(&p).unwrap());
            }
        }
    }
    let mut out = BTreeMap::new();
    walk(dir, dir, &mut out);
    out
}

fn ac12_determinism() -> Check {
    let tmp = tempfile::tempdir().map_err(|e| e.to_string())?;
    let cfg = tmp.path().join("ci.toml");
    std::fs::write(&cfg, include_str!("../../../configs/ci.toml")).map_err(|e| e.to_string())?;
    let mut trees = Vec::new();
    for threads in ["1", "4"] {
        let out = tmp.path().join(format!("t{threads}"));
        let args = ["seqforge", "benchmark", "--config", cfg.to_str().unwrap(), "--seed", "7", "--threads", threads, "--out-dir"];
        let code = seqforge_cli::run(args.iter().map(|s| s.to_string()).chain([out.display().to_string()]));
        ensure(code == 0, format!("benchmark with --threads {threads} exited {code}"))?;
        trees.push(tree(&out));
    }
    ensure(trees[0].keys().eq(trees[1].keys()), "file lists differ")?;
    let differing: Vec<&String> = trees[0].iter().filter(|(k, v)| trees[1][*k] != **v).map(|(k, _)| k).collect();
    ensure(differing.is_empty(), format!("files differ: {differing:?}"))?;
    let bytes: usize = trees[0].values().map(Vec::len).sum();
    Ok(format!("{} files, {bytes} bytes identical for --threads 1 and 4", trees[0].len()))
}

// ----------------------------------------------------------------

struct Criterion {
    id: &'static str,
    name: &'static str,
    budget: Duration,
    run: fn() -> Check,
}

fn main() {
    let secs = Duration::from_secs;
    let criteria = [
        Criterion { id: "AC1", name: "FASTQ round trip", budget: secs(5), run: ac1_fastq_round_trip },
        Criterion { id: "AC2", name: "trimmer semantics", budget: secs(5), run: ac2_trimmer },
        Criterion { id: "AC3", name: "noise calibration", budget: secs(30), run: ac3_noise_calibration },
        Criterion { id: "AC4", name: "gradient checks", budget: secs(60), run: ac4_gradients },
        Criterion { id: "AC5", name: "loss decomposition", budget: secs(1), run: ac5_loss_decomposition },
        Criterion { id: "AC6", name: "desk-scale denoise efficacy", budget: secs(15 * 60), run: ac6_denoise_efficacy },
        Criterion { id: "AC7", name: "metric oracles", budget: secs(30), run: ac7_metric_oracles },
        Criterion { id: "AC8", name: "SMOTE geometry", budget: secs(10), run: ac8_smote },
        Criterion { id: "AC9", name: "RFE recovery", budget: secs(5 * 60), run: ac9_rfe },
        Criterion { id: "AC10", name: "fusion arithmetic and search", budget: secs(2 * 60), run: ac10_fusion },
        Criterion { id: "AC11", name: "CV protocol", budget: secs(10 * 60), run: ac11_cv },
        Criterion { id: "AC12", name: "determinism", budget: secs(20 * 60), run: ac12_determinism },
    ];
    let only: Option<Vec<String>> =
        std::env::var("ACCEPTANCE_ONLY").ok().map(|s| s.split(',').map(|x| x.trim().to_uppercase()).collect());
    let mut failed = 0;
    for c in &criteria {
        if only.as_ref().is_some_and(|o| !o.iter().any(|x| x == c.id)) {
            continue;
        }
        let t = Instant::now();
        let result = panic::catch_unwind(AssertUnwindSafe(c.run)).unwrap_or_else(|p| {
            let msg = p.downcast_ref::<String>().cloned().or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()));
            Err(format!("panicked: {}", msg.unwrap_or_default()))
        });
        let el = t.elapsed();
        let (ok, detail) = match result {
            Ok(d) if el <= c.budget => (true, d),
            Ok(d) => (false, format!("{d}; over the {} s budget", c.budget.as_secs())),
            Err(e) => (false, e),
        };
        failed += usize::from(!ok);
        println!(
            "[{}] {} {}: {detail} ({:.2} s / {} s)",
            if ok { "PASS" } else { "FAIL" },
            c.id,
            c.name,
            el.as_secs_f64(),
            c.budget.as_secs()
        );
    }
    if failed > 0 {
        println!("{failed} acceptance criteria failed");
        std::process::exit(1);
    }
}
