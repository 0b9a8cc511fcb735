//! `seqforge` command line: QC, simulation, denoising, feature selection,
//! the classifier ensemble and an end-to-end benchmark.
//!
//! Exit codes: 0 success, 2 bad input or config, 3 numerical failure
//! (diverged training), 4 internal error.

pub mod config;
pub mod error;
pub mod output;
pub mod pipeline;

use std::ffi::OsString;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use seqforge_core::denoise::{read_model, write_model};
use seqforge_core::ensemble::ModelBundle;
use seqforge_core::seqio::parse_fastq;
use seqforge_core::simkit::{read_reference, NoiseSpec, Reference, SimTruth};

use config::Config;
use error::{CliError, CliResult};
use output::{Inputs, Outputs};
use pipeline::{Method, SimData};

pub const SEED_ENV: &str = "SEQFORGE_SEED";
const DEFAULT_OUT_DIR: &str = "seqforge-out";

#[derive(Debug, Parser)]
#[command(name = "seqforge", version, about = "Sequencing QC, read denoising and variant pathogenicity scoring")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Args)]
pub struct Common {
    /// TOML run configuration.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Master seed (falls back to the config, then $SEQFORGE_SEED, then 0).
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Worker threads; 0 uses every core. Never changes results.
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    #[arg(long, global = true)]
    pub out_dir: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Sliding-window quality trimming with a QC report.
    Qc {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        window: Option<usize>,
        #[arg(long)]
        qual: Option<f64>,
        #[arg(long)]
        minlen: Option<usize>,
    },
    /// Reference, planted variants, reads and injected noise with its ledger.
    Simulate {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        noise_level: Option<f64>,
        #[arg(long)]
        ref_length: Option<usize>,
        #[arg(long)]
        depth: Option<f64>,
        #[arg(long)]
        read_len: Option<usize>,
        /// Use this reference instead of generating one.
        #[arg(long)]
        reference: Option<PathBuf>,
        /// Contaminating genome for the contamination noise class.
        #[arg(long)]
        contamination: Option<PathBuf>,
    },
    /// Train the read denoiser on a simulated corpus.
    TrainDenoise {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        sim_dir: PathBuf,
        #[arg(long)]
        epochs: Option<usize>,
        #[arg(long)]
        max_windows: Option<usize>,
    },
    /// Apply a trained denoiser to a FASTQ file.
    Denoise {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        reads: PathBuf,
    },
    /// Score denoising methods against the ledger of a simulated corpus.
    EvalDenoise {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        sim_dir: PathBuf,
        #[arg(long)]
        model: Option<PathBuf>,
        /// Repeat for side-by-side rows.
        #[arg(long, value_enum, default_values_t = [Method::Model])]
        method: Vec<Method>,
        /// Comma-separated noise levels for the recovery sweep.
        #[arg(long, value_delimiter = ',')]
        levels: Option<Vec<f64>>,
    },
    /// Synthesize (or ingest) variant features and run feature elimination.
    Features {
        #[command(flatten)]
        common: Common,
        /// Labeled variant table to use instead of synthetic data.
        #[arg(long)]
        variants: Option<PathBuf>,
        #[arg(long)]
        n_pos: Option<usize>,
        #[arg(long)]
        n_neg: Option<usize>,
    },
    /// Cross-validate and fit the classifier ensemble.
    TrainClf {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        variants: PathBuf,
        /// Selection table from `features`; fixes the feature mask.
        #[arg(long)]
        selection: Option<PathBuf>,
        #[arg(long)]
        folds: Option<usize>,
        #[arg(long)]
        repeats: Option<usize>,
        /// Also run leave-one-out.
        #[arg(long)]
        loo: bool,
    },
    /// Score a variant table with a trained ensemble.
    Predict {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        variants: PathBuf,
    },
    /// Every stage end to end from one config.
    Benchmark {
        #[command(flatten)]
        common: Common,
    },
}

impl Command {
    fn common(&self) -> &Common {
        match self {
            Command::Qc { common, .. }
            | Command::Simulate { common, .. }
            | Command::TrainDenoise { common, .. }
            | Command::Denoise { common, .. }
            | Command::EvalDenoise { common, .. }
            | Command::Features { common, .. }
            | Command::TrainClf { common, .. }
            | Command::Predict { common, .. }
            | Command::Benchmark { common } => common,
        }
    }

    fn name(&self) -> &'static str {
        match self {
            Command::Qc { .. } => "qc",
            Command::Simulate { .. } => "simulate",
            Command::TrainDenoise { .. } => "train-denoise",
            Command::Denoise { .. } => "denoise",
            Command::EvalDenoise { .. } => "eval-denoise",
            Command::Features { .. } => "features",
            Command::TrainClf { .. } => "train-clf",
            Command::Predict { .. } => "predict",
            Command::Benchmark { .. } => "benchmark",
        }
    }
}

/// Parses arguments (including the program name) and runs; returns the
/// process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    match execute(cli.command) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("seqforge: error: {e}");
            e.exit_code()
        }
    }
}

struct Ctx {
    cfg: Config,
    seed: u64,
    out_dir: PathBuf,
    inputs: Inputs,
}

fn resolve_seed(flag: Option<u64>, cfg: &Config) -> CliResult<u64> {
    if let Some(s) = flag.or(cfg.run.seed) {
        return Ok(s);
    }
    match std::env::var(SEED_ENV) {
        Ok(v) => v.trim().parse().map_err(|_| CliError::input(format!("{SEED_ENV}={v:?} is not an unsigned integer"))),
        Err(_) => Ok(0),
    }
}

fn execute(cmd: Command) -> CliResult<()> {
    let common = cmd.common().clone();
    // The config file itself is covered by the resolved-config digest.
    let cfg = match &common.config {
        Some(p) => Config::parse(&Inputs::default().read_text(p)?).map_err(|e| e.at(p))?,
        None => Config::default(),
    };
    let inputs = Inputs::default();
    let seed = resolve_seed(common.seed, &cfg)?;
    let threads = common.threads.or(cfg.run.threads).unwrap_or(0);
    let out_dir = common.out_dir.clone().or_else(|| cfg.run.out_dir.clone()).unwrap_or_else(|| DEFAULT_OUT_DIR.into());
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| CliError::Internal(format!("thread pool: {e}")))?;
    let name = cmd.name();
    let mut ctx = Ctx { cfg, seed, out_dir, inputs };
    pool.install(|| {
        let out = dispatch(cmd, &mut ctx)?;
        finish(ctx, name, out)
    })
}

fn finish(ctx: Ctx, command: &str, mut out: Outputs) -> CliResult<()> {
    ctx.cfg.validate()?;
    let resolved = ctx.cfg.resolved(ctx.seed);
    out.add("resolved_config.toml", resolved.clone());
    out.commit(&ctx.out_dir, command, ctx.seed, &resolved, ctx.inputs)?;
    Ok(())
}

fn timed<T>(stage: &str, f: impl FnOnce() -> CliResult<T>) -> CliResult<T> {
    let t = Instant::now();
    let r = f();
    eprintln!("seqforge: {stage}: {:.2} s", t.elapsed().as_secs_f64());
    r
}

fn load_reads(inputs: &mut Inputs, path: &Path) -> CliResult<seqforge_core::ReadSet> {
    let bytes = inputs.read(path)?;
    parse_fastq(bytes.as_slice()).map_err(|e| CliError::from(e).at(path))
}

fn load_reference(inputs: &mut Inputs, path: &Path) -> CliResult<Reference> {
    let bytes = inputs.read(path)?;
    read_reference(bytes.as_slice()).map_err(|e| CliError::from(e).at(path))
}

fn load_variants(inputs: &mut Inputs, path: &Path) -> CliResult<Vec<seqforge_core::VariantRecord>> {
    let bytes = inputs.read(path)?;
    pipeline::read_variants(&bytes).map_err(|e| e.at(path))
}

fn load_truth(inputs: &mut Inputs, dir: &Path, reference: Reference, alignments: &str, with_ledger: bool) -> CliResult<SimTruth> {
    let a = inputs.read(&dir.join(alignments))?;
    let empty = SimTruth::new(Reference::new("empty", Vec::new()), Vec::new());
    let (l, e) = if with_ledger {
        (inputs.read(&dir.join("ledger.tsv"))?, inputs.read(&dir.join("events.tsv"))?)
    } else {
        (empty.ledger_tsv().into_bytes(), empty.events_tsv().into_bytes())
    };
    SimTruth::from_tsv(reference, a.as_slice(), l.as_slice(), e.as_slice()).map_err(|e| CliError::from(e).at(dir))
}

/// Reads back everything `simulate` wrote.
fn load_sim(inputs: &mut Inputs, dir: &Path) -> CliResult<SimData> {
    let reference = load_reference(inputs, &dir.join("reference.fa"))?;
    let donor = load_reference(inputs, &dir.join("donor.fa"))?;
    let variants = load_variants(inputs, &dir.join("variants.tsv"))?;
    let clean = load_reads(inputs, &dir.join("clean.fastq"))?;
    let noisy = load_reads(inputs, &dir.join("reads.fastq"))?;
    let clean_truth = load_truth(inputs, dir, donor.clone(), "clean_alignments.tsv", false)?;
    let truth = load_truth(inputs, dir, donor.clone(), "alignments.tsv", true)?;
    let contaminant_path = dir.join("contaminant.fa");
    let contaminant = if contaminant_path.exists() { Some(load_reference(inputs, &contaminant_path)?) } else { None };
    let spec_path = dir.join("noise.toml");
    let spec = NoiseSpec::from_toml(&inputs.read_text(&spec_path)?, contaminant)
        .map_err(|e| CliError::from(e).at(&spec_path))?;
    Ok(SimData { reference, donor, variants, clean, clean_truth, noisy, truth, spec })
}

fn dispatch(cmd: Command, ctx: &mut Ctx) -> CliResult<Outputs> {
    let seed = ctx.seed;
    match cmd {
        Command::Qc { input, window, qual, minlen, .. } => {
            ctx.cfg.qc.window = window.unwrap_or(ctx.cfg.qc.window);
            ctx.cfg.qc.qual = qual.unwrap_or(ctx.cfg.qc.qual);
            ctx.cfg.qc.minlen = minlen.unwrap_or(ctx.cfg.qc.minlen);
            ctx.cfg.validate()?;
            let reads = load_reads(&mut ctx.inputs, &input)?;
            Ok(pipeline::qc(&reads, &pipeline::trim_policy(&ctx.cfg)?)?.1)
        }
        Command::Simulate { noise_level, ref_length, depth, read_len, reference, contamination, .. } => {
            let c = &mut ctx.cfg;
            c.noise.level = noise_level.unwrap_or(c.noise.level);
            c.simulate.ref_length = ref_length.unwrap_or(c.simulate.ref_length);
            c.simulate.depth = depth.unwrap_or(c.simulate.depth);
            c.simulate.read_len = read_len.unwrap_or(c.simulate.read_len);
            if contamination.is_some() {
                c.noise.contamination_source = contamination;
            }
            let reference = reference.map(|p| load_reference(&mut ctx.inputs, &p)).transpose()?;
            if let Some(r) = &reference {
                ctx.cfg.simulate.ref_length = r.len();
            }
            ctx.cfg.validate()?;
            let contaminant = match ctx.cfg.noise.contamination_source.clone() {
                Some(p) => Some(load_reference(&mut ctx.inputs, &p)?),
                None => None,
            };
            pipeline::simulate(&ctx.cfg, seed, reference, contaminant)?.files()
        }
        Command::TrainDenoise { sim_dir, epochs, max_windows, .. } => {
            ctx.cfg.denoise.epochs = epochs.unwrap_or(ctx.cfg.denoise.epochs);
            ctx.cfg.denoise.max_windows = max_windows.unwrap_or(ctx.cfg.denoise.max_windows);
            ctx.cfg.validate()?;
            let donor = load_reference(&mut ctx.inputs, &sim_dir.join("donor.fa"))?;
            let reads = load_reads(&mut ctx.inputs, &sim_dir.join("reads.fastq"))?;
            let truth = load_truth(&mut ctx.inputs, &sim_dir, donor, "alignments.tsv", true)?;
            let (model, report) = pipeline::train_denoiser(&reads, &truth, &ctx.cfg.denoise, seed)?;
            let mut out = Outputs::default();
            out.add("model.sqfd", write_model(&model));
            out.add("train_report.tsv", report.to_tsv());
            Ok(out)
        }
        Command::Denoise { model, reads, .. } => {
            let m = read_model(&ctx.inputs.read(&model)?).map_err(|e| CliError::from(e).at(&model))?;
            let r = load_reads(&mut ctx.inputs, &reads)?;
            let d = seqforge_core::denoise::denoise_reads(&m, &r);
            let mut out = Outputs::default();
            out.add("denoised.fastq", pipeline::fastq_bytes(&d)?);
            Ok(out)
        }
        Command::EvalDenoise { sim_dir, model, method, levels, .. } => {
            if let Some(l) = levels {
                ctx.cfg.noise.levels = l;
            }
            ctx.cfg.validate()?;
            let m = match &model {
                Some(p) => Some(read_model(&ctx.inputs.read(p)?).map_err(|e| CliError::from(e).at(p))?),
                None => None,
            };
            let sim = load_sim(&mut ctx.inputs, &sim_dir)?;
            let mut methods = method;
            methods.dedup();
            pipeline::eval_denoise(&sim, &methods, m.as_ref(), &ctx.cfg)
        }
        Command::Features { variants, n_pos, n_neg, .. } => {
            ctx.cfg.features.n_pos = n_pos.unwrap_or(ctx.cfg.features.n_pos);
            ctx.cfg.features.n_neg = n_neg.unwrap_or(ctx.cfg.features.n_neg);
            ctx.cfg.validate()?;
            let mut out = Outputs::default();
            let records = match variants {
                Some(p) => load_variants(&mut ctx.inputs, &p)?,
                None => {
                    let r = pipeline::synth_records(&ctx.cfg.features, seed)?;
                    out.add("dataset.tsv", pipeline::variants_bytes(&r)?);
                    r
                }
            };
            let (_, files) = pipeline::features(&records, &ctx.cfg.features, seed)?;
            out.extend(files);
            Ok(out)
        }
        Command::TrainClf { variants, selection, folds, repeats, loo, .. } => {
            ctx.cfg.ensemble.folds = folds.unwrap_or(ctx.cfg.ensemble.folds);
            ctx.cfg.ensemble.repeats = repeats.unwrap_or(ctx.cfg.ensemble.repeats);
            ctx.cfg.validate()?;
            let records = load_variants(&mut ctx.inputs, &variants)?;
            let mask = match &selection {
                Some(p) => {
                    let bytes = ctx.inputs.read(p)?;
                    Some(pipeline::read_selection_mask(bytes.as_slice(), seqforge_core::varfeat::N_FEATURES).map_err(|e| e.at(p))?)
                }
                None => None,
            };
            Ok(pipeline::train_clf(&records, &ctx.cfg, mask, loo, seed)?.1)
        }
        Command::Predict { model, variants, .. } => {
            let text = ctx.inputs.read_text(&model)?;
            let bundle = ModelBundle::from_json(&text).map_err(|e| CliError::input(e.to_string()).at(&model))?;
            let records = load_variants(&mut ctx.inputs, &variants)?;
            Ok(pipeline::predict(&bundle, &records)?.1)
        }
        Command::Benchmark { .. } => benchmark(&ctx.cfg, seed, &mut ctx.inputs),
    }
}

/// Simulation and QC, then denoising against the trim-only baseline, then
/// features, the classifier and scoring. Stage wall times go to stderr
/// only, so the output tree depends on nothing but the config and seed.
fn benchmark(cfg: &Config, seed: u64, inputs: &mut Inputs) -> CliResult<Outputs> {
    let mut out = Outputs::default();
    let contaminant = match &cfg.noise.contamination_source {
        Some(p) => Some(load_reference(inputs, p)?),
        None => None,
    };
    let sim = timed("simulate", || pipeline::simulate(cfg, seed, None, contaminant))?;
    out.nest("simulate", sim.files()?);
    let (_, qc) = timed("qc", || pipeline::qc(&sim.noisy, &pipeline::trim_policy(cfg)?))?;
    out.nest("qc", qc);

    let (model, report) = timed("train-denoise", || pipeline::train_denoiser(&sim.noisy, &sim.truth, &cfg.denoise, seed))?;
    let mut dn = Outputs::default();
    dn.add("model.sqfd", write_model(&model));
    dn.add("train_report.tsv", report.to_tsv());
    dn.add("denoised.fastq", pipeline::fastq_bytes(&seqforge_core::denoise::denoise_reads(&model, &sim.noisy))?);
    out.nest("denoise", dn);
    let ev = timed("eval-denoise", || pipeline::eval_denoise(&sim, &[Method::Model, Method::TrimOnly], Some(&model), cfg))?;
    out.nest("eval", ev);

    let records = pipeline::synth_records(&cfg.features, seed)?;
    let (rfe, mut feats) = timed("features", || pipeline::features(&records, &cfg.features, seed))?;
    feats.add("dataset.tsv", pipeline::variants_bytes(&records)?);
    out.nest("features", feats);
    let mask = (cfg.ensemble.selection == "file").then(|| rfe.selected_mask.clone());
    let (clf, files) = timed("train-clf", || pipeline::train_clf(&records, cfg, mask, false, seed))?;
    out.nest("classifier", files);
    let (_, pred) = timed("predict", || pipeline::predict(&clf.bundle, &records))?;
    out.nest("predict", pred);
    Ok(out)
}
