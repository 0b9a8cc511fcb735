//! In-memory stages. Each subcommand loads its inputs, calls one of these,
//! and commits the returned files; `benchmark` chains them directly.

use std::fmt::Write as _;
use std::io::BufRead;

use rand::seq::SliceRandom;
use seqforge_core::denoise::{self, Arch, DenoiseModel, TrainConfig, TrainReport};
use seqforge_core::ensemble::{
    cross_validate, fit_pipeline, leave_one_out, CvConfig, CvReport, ForestConfig, FusionWeights, GbtConfig, MlpConfig,
    ModelBundle, PipelineConfig, Selection, SmoteConfig, Weighting,
};
use seqforge_core::eval::{self, ClassMetrics, PileupConfig};
use seqforge_core::qc::{trim_reads, TrimPolicy};
use seqforge_core::seeds::{self, derive};
use seqforge_core::seqio::{read_variant_table, write_fastq, write_variant_table, ReadSet};
use seqforge_core::simkit::{
    gen_reference, inject_noise, plant_variants, simulate_reads, write_reference, DonorMap, NoiseSpec, Reference,
    SimTruth, SubstitutionMatrix,
};
use seqforge_core::tsv::{fmt_f64, schema_line};
use seqforge_core::varfeat::{
    rfe_select, synth_feature_dataset, write_selection_tsv, FeatureMatrix, FeatureSchema, Label, RfeConfig, RfeResult,
    SynthConfig, VariantRecord, VariantType,
};

use crate::config::{Config, DenoiseSection, EnsembleSection, FeaturesSection};
use crate::error::{CliError, CliResult};
use crate::output::Outputs;

// Per-stage seed streams, shared by the standalone commands and the
// benchmark so both produce the same artifacts.
pub const STREAM_REFERENCE: u64 = 1;
pub const STREAM_READS: u64 = 2;
pub const STREAM_VARIANTS: u64 = 3;
pub const STREAM_NOISE: u64 = 4;
pub const STREAM_DENOISE_INIT: u64 = 5;
pub const STREAM_DENOISE_TRAIN: u64 = 6;
pub const STREAM_SUBSAMPLE: u64 = 7;
pub const STREAM_FEATURES: u64 = 8;
pub const STREAM_RFE: u64 = 9;
pub const STREAM_CV: u64 = 10;
pub const STREAM_FIT: u64 = 11;

pub fn trim_policy(cfg: &Config) -> CliResult<TrimPolicy> {
    let p = TrimPolicy { window: cfg.qc.window, q_threshold: cfg.qc.qual, min_length: cfg.qc.minlen };
    p.validate().map_err(CliError::Input)?;
    Ok(p)
}

pub fn fastq_bytes(reads: &ReadSet) -> CliResult<Vec<u8>> {
    let mut buf = Vec::new();
    write_fastq(reads, &mut buf).map_err(|e| CliError::Internal(e.to_string()))?;
    Ok(buf)
}

pub fn reference_bytes(r: &Reference) -> Vec<u8> {
    let mut buf = Vec::new();
    write_reference(r, &mut buf).expect("writing to memory");
    buf
}

pub fn variants_bytes(v: &[VariantRecord]) -> CliResult<Vec<u8>> {
    let mut buf = Vec::new();
    write_variant_table(v, &mut buf).map_err(|e| CliError::Internal(e.to_string()))?;
    Ok(buf)
}

pub fn qc(reads: &ReadSet, policy: &TrimPolicy) -> CliResult<(ReadSet, Outputs)> {
    let (trimmed, report) = trim_reads(reads, policy);
    let mut out = Outputs::default();
    out.add("trimmed.fastq", fastq_bytes(&trimmed)?);
    out.add("qc_report.tsv", report.to_tsv());
    out.add("qc_hist.tsv", report.histogram_tsv());
    Ok((trimmed, out))
}

/// A simulated corpus: the clean and noisy read sets with their truths.
#[derive(Debug, Clone)]
pub struct SimData {
    pub reference: Reference,
    /// The reference with planted variants; reads are drawn from it.
    pub donor: Reference,
    pub variants: Vec<VariantRecord>,
    pub clean: ReadSet,
    pub clean_truth: SimTruth,
    pub noisy: ReadSet,
    pub truth: SimTruth,
    pub spec: NoiseSpec,
}

pub fn noise_spec(cfg: &Config, seed: u64, contaminant: Option<Reference>) -> NoiseSpec {
    let n = &cfg.noise;
    NoiseSpec {
        mix: n.mix,
        base_error_rate: n.base_error_rate,
        gc_high_multiplier: n.gc_high_multiplier,
        gc_high_threshold: n.gc_high_threshold,
        substitution_matrix: SubstitutionMatrix::by_name(&n.substitution_matrix).expect("validated"),
        contamination_source: contaminant,
        anomaly_rate: n.anomaly_rate,
        seed: derive(seed, STREAM_NOISE),
        ..NoiseSpec::default()
    }
}

pub fn simulate(cfg: &Config, seed: u64, reference: Option<Reference>, contaminant: Option<Reference>) -> CliResult<SimData> {
    let s = &cfg.simulate;
    let spec = noise_spec(cfg, seed, contaminant);
    spec.validate()?;
    let reference = match reference {
        Some(r) => r,
        None => gen_reference(s.ref_length, s.gc, derive(seed, STREAM_REFERENCE))?,
    };
    let (donor, variants) = plant_variants(&reference, s.n_snp, s.n_indel, derive(seed, STREAM_VARIANTS))?;
    let (clean, clean_truth) = simulate_reads(&donor, s.depth, s.read_len, derive(seed, STREAM_READS))?;
    let (noisy, truth) = inject_noise(&clean, &clean_truth, &spec, cfg.noise.level)?;
    Ok(SimData { reference, donor, variants, clean, clean_truth, noisy, truth, spec })
}

impl SimData {
    pub fn files(&self) -> CliResult<Outputs> {
        let mut out = Outputs::default();
        out.add("reference.fa", reference_bytes(&self.reference));
        out.add("donor.fa", reference_bytes(&self.donor));
        out.add("variants.tsv", variants_bytes(&self.variants)?);
        out.add("clean.fastq", fastq_bytes(&self.clean)?);
        out.add("clean_alignments.tsv", self.clean_truth.alignments_tsv());
        out.add("reads.fastq", fastq_bytes(&self.noisy)?);
        out.add("alignments.tsv", self.truth.alignments_tsv());
        out.add("ledger.tsv", self.truth.ledger_tsv());
        out.add("events.tsv", self.truth.events_tsv());
        out.add("noise.toml", self.spec.to_toml());
        if let Some(c) = &self.spec.contamination_source {
            out.add("contaminant.fa", reference_bytes(c));
        }
        Ok(out)
    }
}

/// Trains on windows from a seeded subsample of reads, capped at
/// `max_windows`.
pub fn train_denoiser(
    reads: &ReadSet,
    truth: &SimTruth,
    cfg: &DenoiseSection,
    seed: u64,
) -> CliResult<(DenoiseModel, TrainReport)> {
    let arch = Arch {
        window: cfg.window,
        kernel: cfg.kernel,
        conv1: cfg.conv1,
        conv2: cfg.conv2,
        hidden: cfg.hidden,
        lambda: cfg.lambda,
    };
    let model = DenoiseModel::init(arch, derive(seed, STREAM_DENOISE_INIT))?;
    let mut order: Vec<usize> = (0..reads.len()).collect();
    order.shuffle(&mut seeds::sub_rng(seed, STREAM_SUBSAMPLE));
    let mut picked = Vec::new();
    let mut windows = 0;
    for i in order {
        if windows >= cfg.max_windows {
            break;
        }
        windows += denoise::tile(reads.records[i].len(), cfg.window).len();
        picked.push(reads.records[i].clone());
    }
    let subset = ReadSet::new(picked, reads.source_tag.clone());
    let ids: std::collections::HashSet<&str> = subset.records.iter().map(|r| r.id.as_str()).collect();
    let mut sub_truth = truth.clone();
    sub_truth.ledger.retain(|c| ids.contains(c.read_id.as_str()));
    let mut dataset = denoise::build_dataset(&subset, &sub_truth, cfg.window)?;
    dataset.truncate(cfg.max_windows);
    if dataset.len() < 2 {
        return Err(CliError::input("too few reads to train a denoiser"));
    }
    let tc = TrainConfig {
        learning_rate: cfg.learning_rate,
        batch_size: cfg.batch_size,
        epochs: cfg.epochs,
        val_fraction: cfg.val_fraction,
        seed: derive(seed, STREAM_DENOISE_TRAIN),
    };
    Ok(denoise::train(model, &dataset, &tc)?)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Method {
    /// The trained denoiser.
    Model,
    /// Quality trimming only.
    TrimOnly,
    /// Reads passed through unchanged.
    Identity,
}

impl Method {
    pub fn name(self) -> &'static str {
        match self {
            Method::Model => "model",
            Method::TrimOnly => "trim-only",
            Method::Identity => "identity",
        }
    }

    pub fn apply(self, reads: &ReadSet, model: Option<&DenoiseModel>, policy: &TrimPolicy) -> CliResult<ReadSet> {
        Ok(match self {
            Method::Model => {
                denoise::denoise_reads(model.ok_or_else(|| CliError::input("method model needs --model"))?, reads)
            }
            Method::TrimOnly => trim_reads(reads, policy).0,
            Method::Identity => reads.clone(),
        })
    }
}

const DENOISE_EVAL_SCHEMA: &str = "seqforge.denoise_eval.v1";
const RECOVERY_SCHEMA: &str = "seqforge.recovery_by_level.v1";
const DETECTION_SCHEMA: &str = "seqforge.variant_detection.v1";

/// Scores each method on the corpus, sweeps the configured noise levels
/// (same noise seed, fresh injection into the clean reads), and scores SNP
/// calls before and after.
pub fn eval_denoise(
    sim: &SimData,
    methods: &[Method],
    model: Option<&DenoiseModel>,
    cfg: &Config,
) -> CliResult<Outputs> {
    let policy = trim_policy(cfg)?;
    let mut out = Outputs::default();
    let mut summary = schema_line(DENOISE_EVAL_SCHEMA);
    summary.push_str("method\tlevel\tsnr_before_db\tsnr_after_db\timprovement_db\trecovery_rate\n");
    let mut outputs = Vec::new();
    for &m in methods {
        let d = m.apply(&sim.noisy, model, &policy)?;
        let snr = eval::snr_report(&sim.noisy, &d, &sim.truth)?;
        let rec = recovery_or_nan(&sim.noisy, &d, &sim.truth)?;
        writeln!(
            summary,
            "{}\t{}\t{}\t{}\t{}\t{}",
            m.name(),
            fmt_f64(cfg.noise.level),
            fmt_f64(snr.before),
            fmt_f64(snr.after),
            fmt_f64(snr.improvement),
            fmt_f64(rec)
        )
        .unwrap();
        let profile = eval::substitution_correction_profile(&sim.noisy, &d, &sim.truth)?;
        out.add(format!("substitution_profile_{}.tsv", m.name()), profile.to_tsv());
        outputs.push((m, d));
    }
    out.add("denoise_eval.tsv", summary);

    let mut levels = schema_line(RECOVERY_SCHEMA);
    levels.push_str("method\tlevel\tcorrupted_units\trecovery_rate\n");
    for &level in &cfg.noise.levels {
        let (noisy, truth) = inject_noise(&sim.clean, &sim.clean_truth, &sim.spec, level)?;
        for &m in methods {
            let d = m.apply(&noisy, model, &policy)?;
            let rec = recovery_or_nan(&noisy, &d, &truth)?;
            let units: usize = truth.class_units().iter().sum();
            writeln!(levels, "{}\t{}\t{}\t{}", m.name(), fmt_f64(level), units, fmt_f64(rec)).unwrap();
        }
    }
    out.add("recovery_by_level.tsv", levels);

    let snp_truth: Vec<VariantRecord> = sim.variants.iter().filter(|v| v.vtype == VariantType::Snp).cloned().collect();
    if !snp_truth.is_empty() {
        let map = DonorMap::new(sim.reference.len(), &sim.variants);
        let pc = PileupConfig::default();
        let mut det = schema_line(DETECTION_SCHEMA);
        det.push_str("reads\ttruth_snps\tcalled\ttp\tfp\tfn\tprecision\tsensitivity\tf1\n");
        let mut row = |name: &str, reads: &ReadSet| {
            let called = eval::call_snps(reads, &sim.truth, &sim.reference, &map, &pc);
            let s = eval::variant_detection_score(&called, &snp_truth);
            writeln!(
                det,
                "{name}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}",
                snp_truth.len(),
                called.len(),
                s.tp,
                s.fp,
                s.fn_,
                fmt_f64(s.precision),
                fmt_f64(s.sensitivity),
                fmt_f64(s.f1)
            )
            .unwrap();
        };
        row("noisy", &sim.noisy);
        for (m, d) in &outputs {
            row(m.name(), d);
        }
        out.add("variant_detection.tsv", det);
    }
    Ok(out)
}

/// A ledger with no recoverable corruptions has no recovery rate.
fn recovery_or_nan(noisy: &ReadSet, d: &ReadSet, truth: &SimTruth) -> CliResult<f64> {
    match eval::recovery_rate(noisy, d, truth) {
        Err(eval::EvalError::EmptyInput) => Ok(f64::NAN),
        r => Ok(r?),
    }
}

/// Synthetic rows as variant records on a pseudo-chromosome.
pub fn matrix_to_records(m: &FeatureMatrix) -> Vec<VariantRecord> {
    (0..m.n_rows())
        .map(|i| VariantRecord {
            chrom: "synth".into(),
            pos: i as u64,
            ref_allele: "A".into(),
            alt_allele: "G".into(),
            vtype: VariantType::Snp,
            label: if m.labels[i] == 1 { Label::Pathogenic } else { Label::Benign },
            features: m.row(i).to_vec(),
            annotations: Vec::new(),
        })
        .collect()
}

pub fn synth_records(f: &FeaturesSection, seed: u64) -> CliResult<Vec<VariantRecord>> {
    let m = synth_feature_dataset(&SynthConfig {
        n_pos: f.n_pos,
        n_neg: f.n_neg,
        effect_size: f.effect_size,
        seed: derive(seed, STREAM_FEATURES),
        ..SynthConfig::default()
    })?;
    Ok(matrix_to_records(&m))
}

pub fn labeled_matrix(records: &[VariantRecord]) -> CliResult<FeatureMatrix> {
    let m = FeatureMatrix::from_variants(records);
    if m.n_rows() == 0 {
        return Err(CliError::input("variant table has no labeled rows"));
    }
    Ok(m)
}

/// RFE over the labeled rows: selection table, CV curve and the schema.
pub fn features(records: &[VariantRecord], f: &FeaturesSection, seed: u64) -> CliResult<(RfeResult, Outputs)> {
    let m = labeled_matrix(records)?;
    let cfg = RfeConfig {
        target_k: f.target_k,
        step: f.rfe_step,
        forest: ForestConfig { n_trees: f.rfe_trees, max_depth: f.rfe_depth, ..ForestConfig::default() },
        cv_folds: f.rfe_cv_folds,
        seed: derive(seed, STREAM_RFE),
    };
    let r = rfe_select(&m, &cfg)?;
    let mut out = Outputs::default();
    out.add("selection.tsv", write_selection_tsv(&r, &m.feature_names));
    let mut curve = schema_line("seqforge.rfe_curve.v1");
    curve.push_str("k\tcv_auc\n");
    for (k, auc) in &r.cv_curve {
        writeln!(curve, "{k}\t{}", fmt_f64(*auc)).unwrap();
    }
    out.add("rfe_curve.tsv", curve);
    out.add("feature_schema.tsv", FeatureSchema::standard().manifest());
    Ok((r, out))
}

/// Selected slots from a selection table: rows never eliminated.
pub fn read_selection_mask<R: BufRead>(src: R, width: usize) -> CliResult<Vec<bool>> {
    let mut mask = vec![false; width];
    let mut header = false;
    for (i, line) in src.lines().enumerate() {
        let line = line.map_err(|e| CliError::input(e.to_string()))?;
        if line.starts_with('#') || line.is_empty() {
            continue;
        }
        if !header {
            header = true;
            continue;
        }
        let f: Vec<&str> = line.split('\t').collect();
        let bad = || CliError::input(format!("line {}: malformed selection row", i + 1));
        if f.len() != 5 {
            return Err(bad());
        }
        let slot: usize = f[1].parse().map_err(|_| bad())?;
        if slot >= width {
            return Err(bad());
        }
        mask[slot] = f[4] == "NA";
    }
    if !mask.contains(&true) {
        return Err(CliError::input("selection selects no features"));
    }
    Ok(mask)
}

pub fn pipeline_config(e: &EnsembleSection, target_k: usize, mask: Option<Vec<bool>>) -> CliResult<PipelineConfig> {
    let selection = match (mask, e.selection.as_str()) {
        (Some(m), _) => Selection::Fixed(m),
        (None, "all") => Selection::All,
        (None, "rfe") => Selection::Rfe(RfeConfig {
            target_k,
            step: e.rfe_step,
            forest: ForestConfig { n_trees: e.rfe_trees, max_depth: e.rfe_depth, ..ForestConfig::default() },
            cv_folds: 0,
            seed: 0,
        }),
        (None, _) => return Err(CliError::input("ensemble.selection = \"file\" needs --selection")),
    };
    let weighting = if e.weighting == "fixed" {
        Weighting::Fixed(FusionWeights::new(e.weights[0], e.weights[1], e.weights[2])?)
    } else {
        Weighting::Search { step: e.grid_step, inner_folds: e.inner_folds, refit: e.refit }
    };
    Ok(PipelineConfig {
        selection,
        smote: e.smote.then(|| SmoteConfig { k: e.smote_k, ..SmoteConfig::default() }),
        gbt: GbtConfig {
            learning_rate: e.gbt_learning_rate,
            max_depth: e.gbt_depth,
            n_rounds: e.gbt_rounds,
            lambda: e.gbt_lambda,
            ..GbtConfig::default()
        },
        forest: ForestConfig { n_trees: e.rf_trees, max_depth: e.rf_depth, ..ForestConfig::default() },
        mlp: MlpConfig {
            hidden: e.mlp_hidden.clone(),
            epochs: e.mlp_epochs,
            batch_size: e.mlp_batch_size,
            lr: e.mlp_learning_rate,
            seed: 0,
        },
        weighting,
    })
}

/// Ablation rows of the CV report: each learner alone, the default fusion,
/// and the fusion with each fold's own weights.
pub fn stages() -> [(&'static str, Option<FusionWeights>); 5] {
    let one = |i: usize| {
        let mut w = [0.0; 3];
        w[i] = 1.0;
        Some(FusionWeights::new(w[0], w[1], w[2]).expect("valid"))
    };
    [("gbt", one(0)), ("rf", one(1)), ("mlp", one(2)), ("fused_default", Some(FusionWeights::default())), ("fused", None)]
}

pub fn cv_report_tsv(r: &CvReport) -> String {
    let mut s = schema_line("seqforge.cv_report.v1");
    s.push_str("stage\tmetric\tmean\tsd\tn_folds\n");
    for (stage, w) in stages() {
        for (metric, ms) in r.summary(w) {
            writeln!(s, "{stage}\t{metric}\t{}\t{}\t{}", fmt_f64(ms.mean), fmt_f64(ms.sd), ms.n).unwrap();
        }
    }
    s
}

pub fn cv_confusion_tsv(r: &CvReport) -> String {
    let mut s = schema_line("seqforge.cv_confusion.v1");
    s.push_str("stage\ttp\tfp\ttn\tfn\taccuracy\tauc\n");
    for (stage, w) in stages() {
        let m = r.pooled(w);
        writeln!(s, "{stage}\t{}\t{}\t{}\t{}\t{}\t{}", m.tp, m.fp, m.tn, m.fn_, fmt_f64(m.accuracy), fmt_f64(m.auc)).unwrap();
    }
    s
}

pub fn cv_folds_tsv(r: &CvReport) -> String {
    let mut s = schema_line("seqforge.cv_folds.v1");
    s.push_str("repeat\tfold\tn_validation\tn_selected\talpha\tbeta\tgamma\ttp\tfp\ttn\tfn\taccuracy\tauc\terror\n");
    for f in &r.folds {
        let n_sel = f.selected_mask.iter().filter(|&&b| b).count();
        let w = f.weights;
        match &f.error {
            None => {
                let m = f.metrics(w);
                writeln!(
                    s,
                    "{}\t{}\t{}\t{n_sel}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t.",
                    f.repeat,
                    f.fold,
                    f.validation.len(),
                    fmt_f64(w.alpha),
                    fmt_f64(w.beta),
                    fmt_f64(w.gamma),
                    m.tp,
                    m.fp,
                    m.tn,
                    m.fn_,
                    fmt_f64(m.accuracy),
                    fmt_f64(m.auc)
                )
                .unwrap();
            }
            Some(e) => {
                writeln!(s, "{}\t{}\t{}\tNA\tNA\tNA\tNA\tNA\tNA\tNA\tNA\tNA\tNA\t{e}", f.repeat, f.fold, f.validation.len())
                    .unwrap();
            }
        }
    }
    s
}

fn metrics_tsv(schema: &str, m: &ClassMetrics) -> String {
    let mut s = schema_line(schema);
    s.push_str("metric\tvalue\n");
    for (k, v) in m.named() {
        writeln!(s, "{k}\t{}", fmt_f64(v)).unwrap();
    }
    for (k, v) in [("tp", m.tp), ("fp", m.fp), ("tn", m.tn), ("fn", m.fn_)] {
        writeln!(s, "{k}\t{v}").unwrap();
    }
    s
}

pub struct ClfRun {
    pub cv: CvReport,
    pub bundle: ModelBundle,
}

/// Repeated stratified CV, then a final fit on every labeled row.
pub fn train_clf(
    records: &[VariantRecord],
    cfg: &Config,
    mask: Option<Vec<bool>>,
    loo: bool,
    seed: u64,
) -> CliResult<(ClfRun, Outputs)> {
    let m = labeled_matrix(records)?;
    let e = &cfg.ensemble;
    let pcfg = pipeline_config(e, cfg.features.target_k, mask)?;
    let cv = cross_validate(&m, &CvConfig { folds: e.folds, repeats: e.repeats, seed: derive(seed, STREAM_CV) }, &pcfg)?;
    let ok = cv.folds.iter().filter(|f| f.error.is_none()).count();
    if ok == 0 {
        return Err(CliError::input("no cross-validation fold could be trained"));
    }
    if cv.leakage_checked != ok {
        return Err(CliError::Internal("leakage check did not run on every fold".into()));
    }
    let fitted = fit_pipeline(&m, &pcfg, derive(seed, STREAM_FIT))?;
    let mut out = Outputs::default();
    out.add("cv_report.tsv", cv_report_tsv(&cv));
    out.add("cv_confusion.tsv", cv_confusion_tsv(&cv));
    out.add("cv_folds.tsv", cv_folds_tsv(&cv));
    if let Some(r) = &fitted.rfe {
        out.add("model_selection.tsv", write_selection_tsv(r, &m.feature_names));
    }
    if let Some(s) = &fitted.search {
        let mut t = schema_line("seqforge.fusion_search.v1");
        t.push_str("alpha\tbeta\tgamma\tvalidation_auc\tgrid_points\n");
        let w = s.weights;
        writeln!(t, "{}\t{}\t{}\t{}\t{}", fmt_f64(w.alpha), fmt_f64(w.beta), fmt_f64(w.gamma), fmt_f64(s.val_auc), s.evaluated)
            .unwrap();
        out.add("fusion_search.tsv", t);
    }
    if loo {
        let r = leave_one_out(&m, &pcfg, derive(seed, STREAM_CV))?;
        let mut t = metrics_tsv("seqforge.loo.v1", &r.metrics);
        writeln!(t, "skipped\t{}", r.skipped.len()).unwrap();
        out.add("loo.tsv", t);
    }
    let bundle = ModelBundle::new(fitted.model, m.feature_names.clone());
    let mut json = bundle.to_json();
    json.push('\n');
    out.add("model.json", json);
    Ok((ClfRun { cv, bundle }, out))
}

pub fn predict(bundle: &ModelBundle, records: &[VariantRecord]) -> CliResult<(Vec<f64>, Outputs)> {
    let mut s = schema_line("seqforge.predictions.v1");
    s.push_str("variant_id\tp_xgb\tp_rf\tp_dnn\tp_fused\tcall\n");
    let mut fused = Vec::with_capacity(records.len());
    for r in records {
        let p = bundle.model.component_probs(&r.features)?;
        let f = bundle.model.weights.fuse(p);
        fused.push(f);
        writeln!(
            s,
            "{}\t{}\t{}\t{}\t{}\t{}",
            r.id(),
            fmt_f64(p[0]),
            fmt_f64(p[1]),
            fmt_f64(p[2]),
            fmt_f64(f),
            u8::from(f >= 0.5)
        )
        .unwrap();
    }
    let mut out = Outputs::default();
    out.add("predictions.tsv", s);
    Ok((fused, out))
}

pub fn read_variants(bytes: &[u8]) -> CliResult<Vec<VariantRecord>> {
    Ok(read_variant_table(bytes)?)
}
