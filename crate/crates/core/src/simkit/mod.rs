//! Synthetic references, error-free reads and a calibrated four-class noise
//! model with a complete ground-truth ledger.
//!
//! Noise classes and their default weights: sequencing error 52.3,
//! PCR amplification bias 26.8, sample contamination 12.6, data-processing
//! anomaly 8.3 (normalized). Sequencing errors are inflated by
//! `gc_high_multiplier` in reference windows whose GC fraction exceeds
//! `gc_high_threshold`.

mod noise;
mod reads;
mod reference;
mod truth;
mod variants;

pub use noise::inject_noise;
pub use reads::{simulate_reads, CLEAN_QUAL_MAX, CLEAN_QUAL_MIN, ERROR_QUAL_MAX, ERROR_QUAL_MIN};
pub use reference::{gen_mosaic_reference, gen_reference, read_reference, write_reference, Reference, GC_WINDOW};
pub use truth::{Alignment, Corruption, ReadEvent, SimTruth, LEDGER_SCHEMA, EVENTS_SCHEMA};
pub use variants::{plant_variants, DonorMap};

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum SimError {
    #[error("fraction {0} is outside [0, 1]")]
    BadFraction(f64),
    #[error("invalid length: {0}")]
    InvalidLength(String),
    #[error("contamination weight is positive but no contamination source was given")]
    MissingContaminant,
    #[error("cannot place {requested} variants without overlap in {length} bp")]
    Overcrowded { requested: usize, length: usize },
    #[error("invalid noise spec: {0}")]
    InvalidSpec(String),
    #[error("truth does not describe read {0:?}")]
    TruthMismatch(String),
    #[error("malformed input: {0}")]
    Parse(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub(crate) const BASES: [u8; 4] = *b"ACGT";

pub(crate) fn base_index(b: u8) -> Option<usize> {
    match b {
        b'A' => Some(0),
        b'C' => Some(1),
        b'G' => Some(2),
        b'T' => Some(3),
        _ => None,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum NoiseClass {
    SequencingError,
    PcrBias,
    Contamination,
    ProcessingAnomaly,
}

impl NoiseClass {
    pub const ALL: [NoiseClass; 4] = [
        NoiseClass::SequencingError,
        NoiseClass::PcrBias,
        NoiseClass::Contamination,
        NoiseClass::ProcessingAnomaly,
    ];

    pub fn index(self) -> usize {
        self as usize
    }
}

impl fmt::Display for NoiseClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            NoiseClass::SequencingError => "sequencing_error",
            NoiseClass::PcrBias => "pcr_bias",
            NoiseClass::Contamination => "contamination",
            NoiseClass::ProcessingAnomaly => "processing_anomaly",
        })
    }
}

impl FromStr for NoiseClass {
    type Err = SimError;

    fn from_str(s: &str) -> Result<Self, SimError> {
        NoiseClass::ALL
            .into_iter()
            .find(|c| c.to_string() == s)
            .ok_or_else(|| SimError::Parse(format!("unknown noise class {s:?}")))
    }
}

/// Conditional substitution probabilities: row = clean base (A,C,G,T),
/// column = emitted base. The diagonal is zero and each row sums to one.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SubstitutionMatrix(pub [[f64; 4]; 4]);

impl SubstitutionMatrix {
    pub fn uniform() -> Self {
        let t = 1.0 / 3.0;
        SubstitutionMatrix([[0.0, t, t, t], [t, 0.0, t, t], [t, t, 0.0, t], [t, t, t, 0.0]])
    }

    /// Each clean base has one dominant substitution (A>G, C>A, G>T, T>C);
    /// G>T is the strongest and A>C is a minor channel.
    pub fn illumina_like() -> Self {
        SubstitutionMatrix([
            [0.0, 0.06, 0.88, 0.06],
            [0.88, 0.0, 0.06, 0.06],
            [0.04, 0.04, 0.0, 0.92],
            [0.06, 0.88, 0.06, 0.0],
        ])
    }

    pub fn by_name(name: &str) -> Option<Self> {
        match name {
            "uniform" => Some(Self::uniform()),
            "illumina_like" => Some(Self::illumina_like()),
            _ => None,
        }
    }

    pub fn validate(&self) -> Result<(), SimError> {
        for (i, row) in self.0.iter().enumerate() {
            if row[i] != 0.0 {
                return Err(SimError::InvalidSpec(format!("substitution row {i} has a non-zero diagonal")));
            }
            if row.iter().any(|p| !(0.0..=1.0).contains(p)) {
                return Err(SimError::InvalidSpec(format!("substitution row {i} has a probability outside [0,1]")));
            }
            let s: f64 = row.iter().sum();
            if (s - 1.0).abs() > 1e-9 {
                return Err(SimError::InvalidSpec(format!("substitution row {i} sums to {s}")));
            }
        }
        Ok(())
    }

    pub(crate) fn sample(&self, clean: usize, u: f64) -> usize {
        let row = &self.0[clean];
        let mut acc = 0.0;
        let mut last = clean;
        for (j, &p) in row.iter().enumerate() {
            if p > 0.0 {
                acc += p;
                last = j;
                if u < acc {
                    return j;
                }
            }
        }
        last
    }
}

/// Parameterization of the noise mixture.
#[derive(Debug, Clone, PartialEq)]
pub struct NoiseSpec {
    /// Weights for the classes in [`NoiseClass::ALL`] order; normalized on use.
    pub mix: [f64; 4],
    /// Platform mean per-base error rate, used as the default noise level.
    pub base_error_rate: f64,
    pub gc_high_multiplier: f64,
    pub gc_high_threshold: f64,
    pub substitution_matrix: SubstitutionMatrix,
    pub contamination_source: Option<Reference>,
    /// Probability that a processing anomaly truncates the read rather than
    /// shuffling its quality string.
    pub anomaly_rate: f64,
    pub seed: u64,
    /// Descriptive impact score per class; carried as metadata only.
    pub impact_strength: [f64; 4],
}

impl Default for NoiseSpec {
    fn default() -> Self {
        NoiseSpec {
            mix: [52.3, 26.8, 12.6, 8.3],
            base_error_rate: 0.0123,
            gc_high_multiplier: 2.6,
            gc_high_threshold: 0.65,
            substitution_matrix: SubstitutionMatrix::uniform(),
            contamination_source: None,
            anomaly_rate: 0.5,
            seed: 0,
            impact_strength: [3.8, 2.9, 3.2, 1.7],
        }
    }
}

impl NoiseSpec {
    /// Only sequencing errors, uniform substitutions.
    pub fn sequencing_only(seed: u64) -> Self {
        NoiseSpec { mix: [1.0, 0.0, 0.0, 0.0], seed, ..NoiseSpec::default() }
    }

    pub fn normalized_mix(&self) -> [f64; 4] {
        let s: f64 = self.mix.iter().sum();
        self.mix.map(|w| w / s)
    }

    pub fn validate(&self) -> Result<(), SimError> {
        if self.mix.iter().any(|w| !w.is_finite() || *w < 0.0) || self.mix.iter().sum::<f64>() <= 0.0 {
            return Err(SimError::InvalidSpec("mix weights must be >= 0 with a positive sum".into()));
        }
        for (name, r) in [
            ("base_error_rate", self.base_error_rate),
            ("anomaly_rate", self.anomaly_rate),
            ("gc_high_threshold", self.gc_high_threshold),
        ] {
            if !(0.0..=1.0).contains(&r) {
                return Err(SimError::InvalidSpec(format!("{name} = {r} is outside [0,1]")));
            }
        }
        if !self.gc_high_multiplier.is_finite() || self.gc_high_multiplier <= 0.0 {
            return Err(SimError::InvalidSpec("gc_high_multiplier must be > 0".into()));
        }
        self.substitution_matrix.validate()?;
        if self.mix[NoiseClass::Contamination.index()] > 0.0 && self.contamination_source.is_none() {
            return Err(SimError::MissingContaminant);
        }
        Ok(())
    }

    /// Structured text (TOML) form. The contamination source is recorded by
    /// name only.
    pub fn to_toml(&self) -> String {
        let file = NoiseSpecFile {
            mix: self.mix,
            base_error_rate: self.base_error_rate,
            gc_high_multiplier: self.gc_high_multiplier,
            gc_high_threshold: self.gc_high_threshold,
            substitution_matrix: self.substitution_matrix.0.to_vec(),
            contamination_source: self.contamination_source.as_ref().map(|r| r.name.clone()),
            anomaly_rate: self.anomaly_rate,
            seed: self.seed,
            impact_strength: self.impact_strength,
        };
        toml::to_string(&file).expect("noise spec serializes")
    }

    /// Parses the TOML form; a named contamination source must be supplied
    /// separately through `contamination_source`.
    pub fn from_toml(text: &str, contamination_source: Option<Reference>) -> Result<Self, SimError> {
        let f: NoiseSpecFile = toml::from_str(text).map_err(|e| SimError::Parse(e.to_string()))?;
        if f.substitution_matrix.len() != 4 {
            return Err(SimError::InvalidSpec("substitution_matrix must have 4 rows".into()));
        }
        let mut m = [[0.0; 4]; 4];
        m.copy_from_slice(&f.substitution_matrix);
        Ok(NoiseSpec {
            mix: f.mix,
            base_error_rate: f.base_error_rate,
            gc_high_multiplier: f.gc_high_multiplier,
            gc_high_threshold: f.gc_high_threshold,
            substitution_matrix: SubstitutionMatrix(m),
            contamination_source,
            anomaly_rate: f.anomaly_rate,
            seed: f.seed,
            impact_strength: f.impact_strength,
        })
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct NoiseSpecFile {
    mix: [f64; 4],
    base_error_rate: f64,
    gc_high_multiplier: f64,
    gc_high_threshold: f64,
    substitution_matrix: Vec<[f64; 4]>,
    contamination_source: Option<String>,
    anomaly_rate: f64,
    seed: u64,
    impact_strength: [f64; 4],
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn preset_matrices_valid() {
        SubstitutionMatrix::uniform().validate().unwrap();
        SubstitutionMatrix::illumina_like().validate().unwrap();
        let mut bad = SubstitutionMatrix::uniform();
        bad.0[0][0] = 0.1;
        assert!(bad.validate().is_err());
    }

    #[test]
    fn default_mix_normalizes() {
        let m = NoiseSpec::default().normalized_mix();
        assert!((m.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        assert!((m[0] - 0.523).abs() < 1e-12);
    }

    #[test]
    fn missing_contaminant() {
        assert!(matches!(NoiseSpec::default().validate(), Err(SimError::MissingContaminant)));
        NoiseSpec::sequencing_only(1).validate().unwrap();
    }

    #[test]
    fn toml_round_trip() {
        let s = NoiseSpec { substitution_matrix: SubstitutionMatrix::illumina_like(), ..NoiseSpec::sequencing_only(9) };
        let back = NoiseSpec::from_toml(&s.to_toml(), None).unwrap();
        assert_eq!(back, s);
        assert!(NoiseSpec::from_toml("bogus = 1", None).is_err());
    }

    #[test]
    fn sampling_follows_rows() {
        let m = SubstitutionMatrix::illumina_like();
        assert_eq!(m.sample(2, 0.0), 0);
        assert_eq!(m.sample(2, 0.5), 3);
        assert_eq!(m.sample(2, 0.999_999_999), 3);
    }
}
