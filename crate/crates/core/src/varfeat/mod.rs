//! Variant records, the 63-slot feature schema, synthetic feature data with
//! planted structure, correlation analysis and recursive feature
//! elimination.

mod corr;
mod rfe;
mod schema;
mod synth;

pub use corr::correlation_matrix;
pub use rfe::{rfe_select, write_selection_tsv, RfeConfig, RfeResult};
pub use schema::{FeatureGroup, FeatureSchema, SlotInfo, DEFAULT_INFORMATIVE, FEATURE_SCHEMA_VERSION};
pub use synth::{synth_feature_dataset, SynthConfig};

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

/// Width of a raw variant feature vector.
pub const N_FEATURES: usize = 63;

#[derive(Debug, Error, PartialEq)]
pub enum FeatError {
    #[error("correlation {0} must satisfy |r| < 1")]
    BadCorrelation(f64),
    #[error("feature index {0} out of range")]
    IndexOutOfRange(usize),
    #[error("need at least {needed} features, have {have}")]
    TooFewFeatures { needed: usize, have: usize },
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error(transparent)]
    Ensemble(#[from] crate::ensemble::EnsembleError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum VariantType {
    Snp,
    Ins,
    Del,
    Sv,
}

impl fmt::Display for VariantType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            VariantType::Snp => "SNP",
            VariantType::Ins => "INS",
            VariantType::Del => "DEL",
            VariantType::Sv => "SV",
        })
    }
}

impl FromStr for VariantType {
    type Err = ();

    fn from_str(s: &str) -> Result<Self, ()> {
        match s {
            "SNP" => Ok(VariantType::Snp),
            "INS" => Ok(VariantType::Ins),
            "DEL" => Ok(VariantType::Del),
            "SV" => Ok(VariantType::Sv),
            _ => Err(()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Label {
    Benign,
    Pathogenic,
    Unlabeled,
}

impl Label {
    pub fn as_class(self) -> Option<u8> {
        match self {
            Label::Benign => Some(0),
            Label::Pathogenic => Some(1),
            Label::Unlabeled => None,
        }
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Label::Benign => "0",
            Label::Pathogenic => "1",
            Label::Unlabeled => "?",
        })
    }
}

impl FromStr for Label {
    type Err = ();

    fn from_str(s: &str) -> Result<Self, ()> {
        match s {
            "0" => Ok(Label::Benign),
            "1" => Ok(Label::Pathogenic),
            "?" => Ok(Label::Unlabeled),
            _ => Err(()),
        }
    }
}

/// A variant locus. Positions are 0-based on the reference.
#[derive(Debug, Clone, PartialEq)]
pub struct VariantRecord {
    pub chrom: String,
    pub pos: u64,
    pub ref_allele: String,
    pub alt_allele: String,
    pub vtype: VariantType,
    pub label: Label,
    pub features: Vec<f64>,
    /// Extra table columns carried through untouched.
    pub annotations: Vec<(String, String)>,
}

impl VariantRecord {
    pub fn id(&self) -> String {
        format!("{}:{}:{}>{}", self.chrom, self.pos, self.ref_allele, self.alt_allele)
    }
}

/// Where a matrix row came from; synthetic rows remember both parents.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum RowOrigin {
    Original(u64),
    Synthetic { parent: u64, neighbor: u64 },
}

impl RowOrigin {
    pub fn parents(&self) -> [u64; 2] {
        match *self {
            RowOrigin::Original(id) => [id, id],
            RowOrigin::Synthetic { parent, neighbor } => [parent, neighbor],
        }
    }
}

/// Dense row-major feature matrix with binary labels.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureMatrix {
    data: Vec<f64>,
    n_cols: usize,
    pub labels: Vec<u8>,
    pub feature_names: Vec<String>,
    /// Which columns of the originating matrix survive, when this matrix is
    /// the result of a selection.
    pub selected_mask: Option<Vec<bool>>,
    pub origins: Vec<RowOrigin>,
}

impl FeatureMatrix {
    pub fn new(data: Vec<f64>, n_cols: usize, labels: Vec<u8>, feature_names: Vec<String>) -> Self {
        assert_eq!(feature_names.len(), n_cols, "one name per column");
        assert_eq!(data.len(), labels.len() * n_cols, "data is n_rows x n_cols");
        let origins = (0..labels.len() as u64).map(RowOrigin::Original).collect();
        FeatureMatrix { data, n_cols, labels, feature_names, selected_mask: None, origins }
    }

    pub fn from_rows(rows: &[Vec<f64>], labels: Vec<u8>) -> Self {
        let d = rows.first().map_or(0, Vec::len);
        let names = (0..d).map(|i| format!("f{:02}", i + 1)).collect();
        FeatureMatrix::new(rows.iter().flatten().copied().collect(), d, labels, names)
    }

    /// Labeled records only; unlabeled rows are skipped.
    pub fn from_variants(records: &[VariantRecord]) -> Self {
        let schema = FeatureSchema::standard();
        let mut data = Vec::new();
        let mut labels = Vec::new();
        for r in records {
            if let Some(y) = r.label.as_class() {
                data.extend_from_slice(&r.features);
                labels.push(y);
            }
        }
        FeatureMatrix::new(data, N_FEATURES, labels, schema.names())
    }

    pub fn n_rows(&self) -> usize {
        self.labels.len()
    }

    pub fn n_cols(&self) -> usize {
        self.n_cols
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.n_cols..(i + 1) * self.n_cols]
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.n_cols + j]
    }

    pub fn column(&self, j: usize) -> Vec<f64> {
        (0..self.n_rows()).map(|i| self.get(i, j)).collect()
    }

    pub fn class_counts(&self) -> [usize; 2] {
        let pos = self.labels.iter().filter(|&&y| y == 1).count();
        [self.labels.len() - pos, pos]
    }

    pub fn push_row(&mut self, row: &[f64], label: u8, origin: RowOrigin) {
        assert_eq!(row.len(), self.n_cols);
        self.data.extend_from_slice(row);
        self.labels.push(label);
        self.origins.push(origin);
    }

    pub fn subset_rows(&self, idx: &[usize]) -> FeatureMatrix {
        let mut data = Vec::with_capacity(idx.len() * self.n_cols);
        for &i in idx {
            data.extend_from_slice(self.row(i));
        }
        FeatureMatrix {
            data,
            n_cols: self.n_cols,
            labels: idx.iter().map(|&i| self.labels[i]).collect(),
            feature_names: self.feature_names.clone(),
            selected_mask: self.selected_mask.clone(),
            origins: idx.iter().map(|&i| self.origins[i]).collect(),
        }
    }

    /// Keeps the columns flagged in `mask` (length must equal the current
    /// width). The resulting `selected_mask` is expressed against the
    /// original feature space.
    pub fn select_columns(&self, mask: &[bool]) -> FeatureMatrix {
        assert_eq!(mask.len(), self.n_cols);
        let cols: Vec<usize> = (0..self.n_cols).filter(|&j| mask[j]).collect();
        let mut data = Vec::with_capacity(self.n_rows() * cols.len());
        for i in 0..self.n_rows() {
            let row = self.row(i);
            data.extend(cols.iter().map(|&j| row[j]));
        }
        let selected_mask = match &self.selected_mask {
            None => mask.to_vec(),
            Some(prev) => {
                let mut it = mask.iter();
                prev.iter().map(|&kept| kept && *it.next().unwrap()).collect()
            }
        };
        FeatureMatrix {
            data,
            n_cols: cols.len(),
            labels: self.labels.clone(),
            feature_names: cols.iter().map(|&j| self.feature_names[j].clone()).collect(),
            selected_mask: Some(selected_mask),
            origins: self.origins.clone(),
        }
    }
}
