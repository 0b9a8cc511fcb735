//! FASTQ and variant-table I/O.
//!
//! FASTQ is strictly four lines per record with Phred+33 qualities and `\n`
//! terminators. Qualities are capped at [`MAX_PHRED`] on output.

mod fastq;
mod variant_table;

pub use fastq::{parse_fastq, write_fastq, write_record, FastqReader};
pub use variant_table::{read_variant_table, write_variant_table, VARIANT_SCHEMA};

use std::collections::HashSet;
use thiserror::Error;

/// Highest Phred score the writer will encode.
pub const MAX_PHRED: u8 = 60;

#[derive(Debug, Error)]
pub enum SeqIoError {
    #[error("line {line}: malformed record: {reason}")]
    MalformedRecord { line: usize, reason: String },
    #[error("line {line}: invalid character {ch:?} in {field}")]
    InvalidCharacter { line: usize, ch: char, field: &'static str },
    #[error("line {line}: duplicate read id {id:?}")]
    DuplicateId { line: usize, id: String },
    #[error("read {id:?}: quality {qual} exceeds the encodable maximum {MAX_PHRED}")]
    QualityOutOfRange { id: String, qual: u8 },
    #[error("variant table header mismatch: {0}")]
    HeaderMismatch(String),
    #[error("line {line}: expected {expected} columns, found {found}")]
    RowArity { line: usize, expected: usize, found: usize },
    #[error("line {line}: column {column:?} is not numeric: {value:?}")]
    NonNumericFeature { line: usize, column: String, value: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl SeqIoError {
    /// First offending input line, when the error is tied to one.
    pub fn line(&self) -> Option<usize> {
        match self {
            SeqIoError::MalformedRecord { line, .. }
            | SeqIoError::InvalidCharacter { line, .. }
            | SeqIoError::DuplicateId { line, .. }
            | SeqIoError::RowArity { line, .. }
            | SeqIoError::NonNumericFeature { line, .. } => Some(*line),
            _ => None,
        }
    }
}

/// One sequencing read.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SeqRecord {
    pub id: String,
    /// Uppercase bases over `ACGTN`.
    pub bases: Vec<u8>,
    /// Phred scores, one per base.
    pub quals: Vec<u8>,
}

impl SeqRecord {
    pub fn new(id: impl Into<String>, bases: impl Into<Vec<u8>>, quals: impl Into<Vec<u8>>) -> Self {
        SeqRecord { id: id.into(), bases: bases.into(), quals: quals.into() }
    }

    pub fn len(&self) -> usize {
        self.bases.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bases.is_empty()
    }
}

/// An ordered collection of reads with unique ids.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct ReadSet {
    pub records: Vec<SeqRecord>,
    pub source_tag: String,
}

impl ReadSet {
    pub fn new(records: Vec<SeqRecord>, source_tag: impl Into<String>) -> Self {
        ReadSet { records, source_tag: source_tag.into() }
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn total_bases(&self) -> usize {
        self.records.iter().map(SeqRecord::len).sum()
    }

    pub fn has_unique_ids(&self) -> bool {
        let mut seen = HashSet::with_capacity(self.records.len());
        self.records.iter().all(|r| seen.insert(r.id.as_str()))
    }
}

pub(crate) fn normalize_base(b: u8) -> Option<u8> {
    match b {
        b'A' | b'C' | b'G' | b'T' | b'N' => Some(b),
        b'a' | b'c' | b'g' | b't' | b'n' => Some(b.to_ascii_uppercase()),
        _ => None,
    }
}
