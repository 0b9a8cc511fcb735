//! Run configuration. The file is TOML; every key is optional and unknown
//! keys are rejected. See `docs/config.md` for the full key list.

use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use crate::error::{CliError, CliResult};

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Config {
    pub run: RunSection,
    pub qc: QcSection,
    pub simulate: SimulateSection,
    pub noise: NoiseSection,
    pub denoise: DenoiseSection,
    pub features: FeaturesSection,
    pub ensemble: EnsembleSection,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunSection {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub threads: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub out_dir: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct QcSection {
    pub window: usize,
    pub qual: f64,
    pub minlen: usize,
}

impl Default for QcSection {
    fn default() -> Self {
        QcSection { window: 4, qual: 20.0, minlen: 50 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SimulateSection {
    pub ref_length: usize,
    pub gc: f64,
    pub depth: f64,
    pub read_len: usize,
    pub n_snp: usize,
    pub n_indel: usize,
}

impl Default for SimulateSection {
    fn default() -> Self {
        SimulateSection { ref_length: 100_000, gc: 0.45, depth: 20.0, read_len: 100, n_snp: 40, n_indel: 10 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct NoiseSection {
    pub level: f64,
    /// Levels swept by `eval-denoise`.
    pub levels: Vec<f64>,
    /// Sequencing error, PCR bias, contamination, processing anomaly.
    pub mix: [f64; 4],
    /// `uniform` or `illumina_like`.
    pub substitution_matrix: String,
    pub base_error_rate: f64,
    pub gc_high_multiplier: f64,
    pub gc_high_threshold: f64,
    pub anomaly_rate: f64,
    /// Two-line reference file used as the contaminating genome.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub contamination_source: Option<PathBuf>,
}

impl Default for NoiseSection {
    fn default() -> Self {
        NoiseSection {
            level: 0.10,
            levels: vec![0.05, 0.10, 0.15],
            mix: [1.0, 0.0, 0.0, 0.0],
            substitution_matrix: "illumina_like".into(),
            base_error_rate: 0.0123,
            gc_high_multiplier: 2.6,
            gc_high_threshold: 0.65,
            anomaly_rate: 0.5,
            contamination_source: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct DenoiseSection {
    pub window: usize,
    pub kernel: usize,
    pub conv1: usize,
    pub conv2: usize,
    pub hidden: usize,
    pub lambda: f64,
    pub learning_rate: f64,
    pub batch_size: usize,
    pub epochs: usize,
    pub val_fraction: f64,
    /// Training windows are drawn from a seeded subsample of reads.
    pub max_windows: usize,
}

impl Default for DenoiseSection {
    fn default() -> Self {
        DenoiseSection {
            window: 64,
            kernel: 5,
            conv1: 16,
            conv2: 32,
            hidden: 32,
            lambda: 0.5,
            learning_rate: 3e-3,
            batch_size: 128,
            epochs: 10,
            val_fraction: 0.1,
            max_windows: 15_000,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct FeaturesSection {
    pub n_pos: usize,
    pub n_neg: usize,
    pub effect_size: f64,
    pub target_k: usize,
    pub rfe_step: usize,
    pub rfe_trees: usize,
    pub rfe_depth: usize,
    pub rfe_cv_folds: usize,
}

impl Default for FeaturesSection {
    fn default() -> Self {
        FeaturesSection {
            n_pos: 2500,
            n_neg: 2500,
            effect_size: 25.0,
            target_k: 17,
            rfe_step: 1,
            rfe_trees: 100,
            rfe_depth: 10,
            rfe_cv_folds: 3,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct EnsembleSection {
    pub folds: usize,
    pub repeats: usize,
    /// `rfe` (inside every training split), `all`, or `file` (the mask from
    /// `--selection`).
    pub selection: String,
    pub rfe_step: usize,
    pub rfe_trees: usize,
    pub rfe_depth: usize,
    pub gbt_rounds: usize,
    pub gbt_depth: usize,
    pub gbt_learning_rate: f64,
    pub gbt_lambda: f64,
    pub rf_trees: usize,
    pub rf_depth: usize,
    pub mlp_hidden: Vec<usize>,
    pub mlp_epochs: usize,
    pub mlp_batch_size: usize,
    pub mlp_learning_rate: f64,
    pub smote: bool,
    pub smote_k: usize,
    /// `search` or `fixed`.
    pub weighting: String,
    /// Fusion weights for the GBT, forest and MLP (used when `fixed`).
    pub weights: [f64; 3],
    pub grid_step: f64,
    pub inner_folds: usize,
    pub refit: bool,
}

impl Default for EnsembleSection {
    fn default() -> Self {
        EnsembleSection {
            folds: 5,
            repeats: 10,
            selection: "rfe".into(),
            rfe_step: 8,
            rfe_trees: 50,
            rfe_depth: 8,
            gbt_rounds: 300,
            gbt_depth: 6,
            gbt_learning_rate: 0.05,
            gbt_lambda: 1.0,
            rf_trees: 200,
            rf_depth: 12,
            mlp_hidden: vec![32, 16],
            mlp_epochs: 60,
            mlp_batch_size: 64,
            mlp_learning_rate: 1e-3,
            smote: true,
            smote_k: 5,
            weighting: "search".into(),
            weights: [0.45, 0.30, 0.25],
            grid_step: 0.05,
            inner_folds: 5,
            refit: false,
        }
    }
}

fn check(ok: bool, key: &str, why: &str) -> CliResult<()> {
    if ok {
        Ok(())
    } else {
        Err(CliError::input(format!("config key {key}: {why}")))
    }
}

fn unit(x: f64) -> bool {
    (0.0..=1.0).contains(&x)
}

impl Config {
    pub fn parse(text: &str) -> CliResult<Config> {
        let cfg: Config = toml::from_str(text).map_err(|e| CliError::input(format!("config: {e}")))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> CliResult<()> {
        let q = &self.qc;
        check(q.window >= 1, "qc.window", "must be >= 1")?;
        check(q.minlen >= 1, "qc.minlen", "must be >= 1")?;
        check(q.qual.is_finite(), "qc.qual", "must be finite")?;

        let s = &self.simulate;
        check(s.ref_length >= 1, "simulate.ref_length", "must be >= 1")?;
        check(unit(s.gc), "simulate.gc", "must be in [0, 1]")?;
        check(s.depth.is_finite() && s.depth > 0.0, "simulate.depth", "must be > 0")?;
        check(s.read_len >= 1 && s.read_len <= s.ref_length, "simulate.read_len", "must be in 1..=ref_length")?;

        let n = &self.noise;
        check(unit(n.level), "noise.level", "must be in [0, 1]")?;
        check(!n.levels.is_empty() && n.levels.iter().all(|&l| unit(l)), "noise.levels", "must be non-empty, each in [0, 1]")?;
        check(
            n.mix.iter().all(|w| w.is_finite() && *w >= 0.0) && n.mix.iter().sum::<f64>() > 0.0,
            "noise.mix",
            "weights must be >= 0 with a positive sum",
        )?;
        check(
            seqforge_core::simkit::SubstitutionMatrix::by_name(&n.substitution_matrix).is_some(),
            "noise.substitution_matrix",
            "must be \"uniform\" or \"illumina_like\"",
        )?;
        check(unit(n.base_error_rate), "noise.base_error_rate", "must be in [0, 1]")?;
        check(unit(n.gc_high_threshold), "noise.gc_high_threshold", "must be in [0, 1]")?;
        check(n.gc_high_multiplier > 0.0, "noise.gc_high_multiplier", "must be > 0")?;
        check(unit(n.anomaly_rate), "noise.anomaly_rate", "must be in [0, 1]")?;

        let d = &self.denoise;
        check(d.window >= 1, "denoise.window", "must be >= 1")?;
        check(d.kernel % 2 == 1, "denoise.kernel", "must be odd")?;
        check(d.conv1 >= 1 && d.conv2 >= 1 && d.hidden >= 1, "denoise.conv1/conv2/hidden", "must be >= 1")?;
        check(d.lambda.is_finite() && d.lambda >= 0.0, "denoise.lambda", "must be >= 0")?;
        check(d.learning_rate.is_finite() && d.learning_rate >= 0.0, "denoise.learning_rate", "must be >= 0")?;
        check(d.batch_size >= 1, "denoise.batch_size", "must be >= 1")?;
        check((0.0..1.0).contains(&d.val_fraction), "denoise.val_fraction", "must be in [0, 1)")?;
        check(d.max_windows >= 2, "denoise.max_windows", "must be >= 2")?;

        let f = &self.features;
        check(f.n_pos >= 1 && f.n_neg >= 1, "features.n_pos/n_neg", "must be >= 1")?;
        check(f.effect_size.is_finite() && f.effect_size >= 0.0, "features.effect_size", "must be >= 0")?;
        check((1..=63).contains(&f.target_k), "features.target_k", "must be in 1..=63")?;
        check(f.rfe_step >= 1, "features.rfe_step", "must be >= 1")?;
        check(f.rfe_trees >= 1 && f.rfe_depth >= 1, "features.rfe_trees/rfe_depth", "must be >= 1")?;
        check(f.rfe_cv_folds != 1, "features.rfe_cv_folds", "must be 0 (off) or >= 2")?;

        let e = &self.ensemble;
        check(e.folds >= 2, "ensemble.folds", "must be >= 2")?;
        check(e.repeats >= 1, "ensemble.repeats", "must be >= 1")?;
        check(["rfe", "all", "file"].contains(&e.selection.as_str()), "ensemble.selection", "must be rfe, all or file")?;
        check(e.rfe_step >= 1, "ensemble.rfe_step", "must be >= 1")?;
        check(e.gbt_rounds >= 1 && e.rf_trees >= 1, "ensemble.gbt_rounds/rf_trees", "must be >= 1")?;
        check(e.gbt_learning_rate > 0.0, "ensemble.gbt_learning_rate", "must be > 0")?;
        check(e.mlp_batch_size >= 1, "ensemble.mlp_batch_size", "must be >= 1")?;
        check(e.mlp_learning_rate >= 0.0, "ensemble.mlp_learning_rate", "must be >= 0")?;
        check(e.smote_k >= 1, "ensemble.smote_k", "must be >= 1")?;
        check(["search", "fixed"].contains(&e.weighting.as_str()), "ensemble.weighting", "must be search or fixed")?;
        check(
            e.weights.iter().all(|w| w.is_finite() && *w >= 0.0) && e.weights.iter().sum::<f64>() > 0.0,
            "ensemble.weights",
            "must be >= 0 with a positive sum",
        )?;
        check(e.grid_step > 0.0 && e.grid_step <= 1.0, "ensemble.grid_step", "must be in (0, 1]")?;
        check(e.inner_folds >= 2, "ensemble.inner_folds", "must be >= 2")?;
        Ok(())
    }

    /// The copy written next to outputs: seed filled in, and the keys that
    /// must not affect results (threads, output directory) left out.
    pub fn resolved(&self, seed: u64) -> String {
        let mut c = self.clone();
        c.run = RunSection { seed: Some(seed), threads: None, out_dir: None };
        toml::to_string(&c).expect("config serializes")
    }
}
