use std::collections::HashMap;
use std::fmt::Write as _;
use std::io::BufRead;

use super::{NoiseClass, Reference, SimError};
use crate::seqio::{ReadSet, SeqRecord};
use crate::tsv::schema_line;
use crate::varfeat::VariantRecord;

pub const LEDGER_SCHEMA: &str = "seqforge.ledger.v1";
pub const ALIGNMENT_SCHEMA: &str = "seqforge.alignments.v1";
pub const EVENTS_SCHEMA: &str = "seqforge.events.v1";

/// Placement of a read on the sequence it was drawn from.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Alignment {
    pub read_id: String,
    pub start: usize,
    pub len: usize,
    /// Set for PCR duplicates: id of the read that was copied.
    pub duplicate_of: Option<String>,
}

/// One corrupted base.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Corruption {
    pub read_id: String,
    pub pos: usize,
    pub clean_base: u8,
    pub noisy_base: u8,
    pub clean_qual: u8,
    pub noisy_qual: u8,
    pub class: NoiseClass,
}

/// Read-granularity noise, with enough payload to undo it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ReadEvent {
    Duplicated { read_id: String, source_id: String },
    Dropped { record: SeqRecord, index: usize },
    Contaminated { read_id: String, source_start: usize, original_bases: Vec<u8> },
    QualityShuffled { read_id: String, original_quals: Vec<u8> },
    Truncated { read_id: String, removed_bases: Vec<u8>, removed_quals: Vec<u8> },
}

impl ReadEvent {
    pub fn class(&self) -> NoiseClass {
        match self {
            ReadEvent::Duplicated { .. } | ReadEvent::Dropped { .. } => NoiseClass::PcrBias,
            ReadEvent::Contaminated { .. } => NoiseClass::Contamination,
            ReadEvent::QualityShuffled { .. } | ReadEvent::Truncated { .. } => NoiseClass::ProcessingAnomaly,
        }
    }
}

/// Ground truth for a simulated read set.
#[derive(Debug, Clone, PartialEq)]
pub struct SimTruth {
    /// The sequence reads were drawn from.
    pub reference: Reference,
    pub alignments: Vec<Alignment>,
    pub ledger: Vec<Corruption>,
    pub events: Vec<ReadEvent>,
    pub planted: Vec<VariantRecord>,
    index: HashMap<String, usize>,
}

impl SimTruth {
    pub fn new(reference: Reference, alignments: Vec<Alignment>) -> Self {
        let index = alignments.iter().enumerate().map(|(i, a)| (a.read_id.clone(), i)).collect();
        SimTruth { reference, alignments, ledger: Vec::new(), events: Vec::new(), planted: Vec::new(), index }
    }

    pub(crate) fn push_alignment(&mut self, a: Alignment) {
        self.index.insert(a.read_id.clone(), self.alignments.len());
        self.alignments.push(a);
    }

    pub fn alignment(&self, read_id: &str) -> Option<&Alignment> {
        self.index.get(read_id).map(|&i| &self.alignments[i])
    }

    /// Error-free bases for a read, at its original (untruncated) length.
    pub fn clean_bases(&self, read_id: &str) -> Option<&[u8]> {
        self.alignment(read_id).map(|a| &self.reference.sequence[a.start..a.start + a.len])
    }

    pub fn is_noisy(&self) -> bool {
        !self.ledger.is_empty() || !self.events.is_empty()
    }

    /// Base-level ledger entries grouped by read.
    pub fn ledger_by_read(&self) -> HashMap<&str, Vec<&Corruption>> {
        let mut m: HashMap<&str, Vec<&Corruption>> = HashMap::new();
        for c in &self.ledger {
            m.entry(c.read_id.as_str()).or_default().push(c);
        }
        m
    }

    /// Corruption budget spent per class, in bases: one per base-level
    /// sequencing error, whole read lengths for read-level events.
    pub fn class_units(&self) -> [usize; 4] {
        let mut u = [0usize; 4];
        for c in &self.ledger {
            if c.class == NoiseClass::SequencingError {
                u[c.class.index()] += 1;
            }
        }
        for e in &self.events {
            let len = match e {
                ReadEvent::Duplicated { source_id, .. } => self.alignment(source_id).map_or(0, |a| a.len),
                ReadEvent::Dropped { record, .. } => record.len(),
                ReadEvent::Contaminated { original_bases, .. } => original_bases.len(),
                ReadEvent::QualityShuffled { original_quals, .. } => original_quals.len(),
                ReadEvent::Truncated { read_id, .. } => self.alignment(read_id).map_or(0, |a| a.len),
            };
            u[e.class().index()] += len;
        }
        u
    }

    /// Undoes every recorded corruption, returning the clean read set in
    /// its original order.
    pub fn restore(&self, noisy: &ReadSet) -> Result<ReadSet, SimError> {
        let mut map: HashMap<&str, SeqRecord> = noisy.records.iter().map(|r| (r.id.as_str(), r.clone())).collect();
        for c in self.ledger.iter().filter(|c| c.class == NoiseClass::SequencingError) {
            let rec = map.get_mut(c.read_id.as_str()).ok_or_else(|| SimError::TruthMismatch(c.read_id.clone()))?;
            if c.pos >= rec.len() || rec.bases[c.pos] != c.noisy_base {
                return Err(SimError::TruthMismatch(c.read_id.clone()));
            }
            rec.bases[c.pos] = c.clean_base;
            rec.quals[c.pos] = c.clean_qual;
        }
        let missing = |id: &str| SimError::TruthMismatch(id.to_string());
        let mut restored_drops: Vec<SeqRecord> = Vec::new();
        for e in self.events.iter().rev() {
            match e {
                ReadEvent::Duplicated { read_id, .. } => {
                    map.remove(read_id.as_str()).ok_or_else(|| missing(read_id))?;
                }
                ReadEvent::Dropped { record, .. } => restored_drops.push(record.clone()),
                ReadEvent::Contaminated { read_id, original_bases, .. } => {
                    map.get_mut(read_id.as_str()).ok_or_else(|| missing(read_id))?.bases = original_bases.clone();
                }
                ReadEvent::QualityShuffled { read_id, original_quals } => {
                    map.get_mut(read_id.as_str()).ok_or_else(|| missing(read_id))?.quals = original_quals.clone();
                }
                ReadEvent::Truncated { read_id, removed_bases, removed_quals } => {
                    let r = map.get_mut(read_id.as_str()).ok_or_else(|| missing(read_id))?;
                    r.bases.extend_from_slice(removed_bases);
                    r.quals.extend_from_slice(removed_quals);
                }
            }
        }
        let mut drops: HashMap<String, SeqRecord> = restored_drops.into_iter().map(|r| (r.id.clone(), r)).collect();
        let mut out = Vec::with_capacity(self.alignments.len());
        for a in self.alignments.iter().filter(|a| a.duplicate_of.is_none()) {
            let rec = match map.remove(a.read_id.as_str()) {
                Some(r) => r,
                None => drops.remove(&a.read_id).ok_or_else(|| missing(&a.read_id))?,
            };
            out.push(rec);
        }
        Ok(ReadSet::new(out, noisy.source_tag.clone()))
    }

    pub fn ledger_tsv(&self) -> String {
        let mut s = schema_line(LEDGER_SCHEMA);
        s.push_str("read_id\tpos\tclean_base\tnoisy_base\tclass\tclean_qual\tnoisy_qual\n");
        for c in &self.ledger {
            writeln!(
                s,
                "{}\t{}\t{}\t{}\t{}\t{}\t{}",
                c.read_id, c.pos, c.clean_base as char, c.noisy_base as char, c.class, c.clean_qual, c.noisy_qual
            )
            .unwrap();
        }
        s
    }

    pub fn alignments_tsv(&self) -> String {
        let mut s = schema_line(ALIGNMENT_SCHEMA);
        s.push_str("read_id\tstart\tlen\tduplicate_of\n");
        for a in &self.alignments {
            writeln!(s, "{}\t{}\t{}\t{}", a.read_id, a.start, a.len, a.duplicate_of.as_deref().unwrap_or(".")).unwrap();
        }
        s
    }

    pub fn events_tsv(&self) -> String {
        fn q(v: &[u8]) -> String {
            v.iter().map(|&x| (x + 33) as char).collect()
        }
        fn b(v: &[u8]) -> String {
            String::from_utf8_lossy(v).into_owned()
        }
        let mut s = schema_line(EVENTS_SCHEMA);
        s.push_str("event\tread_id\targ\tbases\tquals\n");
        for e in &self.events {
            let row = match e {
                ReadEvent::Duplicated { read_id, source_id } => ["duplicated", read_id, source_id, ".", "."].map(String::from),
                ReadEvent::Dropped { record, index } => {
                    ["dropped".into(), record.id.clone(), index.to_string(), b(&record.bases), q(&record.quals)]
                }
                ReadEvent::Contaminated { read_id, source_start, original_bases } => [
                    "contaminated".into(),
                    read_id.clone(),
                    source_start.to_string(),
                    b(original_bases),
                    ".".into(),
                ],
                ReadEvent::QualityShuffled { read_id, original_quals } => {
                    ["quality_shuffled".into(), read_id.clone(), ".".into(), ".".into(), q(original_quals)]
                }
                ReadEvent::Truncated { read_id, removed_bases, removed_quals } => [
                    "truncated".into(),
                    read_id.clone(),
                    ".".into(),
                    b(removed_bases),
                    q(removed_quals),
                ],
            };
            writeln!(s, "{}", row.join("\t")).unwrap();
        }
        s
    }

    /// Rebuilds a truth from its reference and the three TSV files.
    pub fn from_tsv<A: BufRead, L: BufRead, E: BufRead>(
        reference: Reference,
        alignments: A,
        ledger: L,
        events: E,
    ) -> Result<SimTruth, SimError> {
        let mut aligns = Vec::new();
        for f in data_rows(alignments, 4)? {
            aligns.push(Alignment {
                read_id: f[0].clone(),
                start: num(&f[1])?,
                len: num(&f[2])?,
                duplicate_of: (f[3] != ".").then(|| f[3].clone()),
            });
        }
        for a in &aligns {
            if a.start + a.len > reference.len() {
                return Err(SimError::Parse(format!("alignment of {} runs past the reference", a.read_id)));
            }
        }
        let mut truth = SimTruth::new(reference, aligns);
        for f in data_rows(ledger, 7)? {
            truth.ledger.push(Corruption {
                read_id: f[0].clone(),
                pos: num(&f[1])?,
                clean_base: single(&f[2])?,
                noisy_base: single(&f[3])?,
                class: f[4].parse()?,
                clean_qual: num(&f[5])?,
                noisy_qual: num(&f[6])?,
            });
        }
        let quals = |s: &str| -> Vec<u8> { s.bytes().map(|c| c.saturating_sub(33)).collect() };
        for f in data_rows(events, 5)? {
            let ev = match f[0].as_str() {
                "duplicated" => ReadEvent::Duplicated { read_id: f[1].clone(), source_id: f[2].clone() },
                "dropped" => ReadEvent::Dropped {
                    record: SeqRecord::new(f[1].clone(), f[3].as_bytes(), quals(&f[4])),
                    index: num(&f[2])?,
                },
                "contaminated" => ReadEvent::Contaminated {
                    read_id: f[1].clone(),
                    source_start: num(&f[2])?,
                    original_bases: f[3].as_bytes().to_vec(),
                },
                "quality_shuffled" => {
                    ReadEvent::QualityShuffled { read_id: f[1].clone(), original_quals: quals(&f[4]) }
                }
                "truncated" => ReadEvent::Truncated {
                    read_id: f[1].clone(),
                    removed_bases: f[3].as_bytes().to_vec(),
                    removed_quals: quals(&f[4]),
                },
                other => return Err(SimError::Parse(format!("unknown event {other:?}"))),
            };
            truth.events.push(ev);
        }
        Ok(truth)
    }
}

fn data_rows<R: BufRead>(src: R, arity: usize) -> Result<Vec<Vec<String>>, SimError> {
    let mut out = Vec::new();
    let mut header_seen = false;
    for line in src.lines() {
        let line = line?;
        if line.starts_with('#') || line.is_empty() {
            continue;
        }
        if !header_seen {
            header_seen = true;
            continue;
        }
        let f: Vec<String> = line.split('\t').map(String::from).collect();
        if f.len() != arity {
            return Err(SimError::Parse(format!("expected {arity} columns, got {}: {line:?}", f.len())));
        }
        out.push(f);
    }
    Ok(out)
}

fn num<T: std::str::FromStr>(s: &str) -> Result<T, SimError> {
    s.parse().map_err(|_| SimError::Parse(format!("not a number: {s:?}")))
}

fn single(s: &str) -> Result<u8, SimError> {
    match s.as_bytes() {
        [b] => Ok(*b),
        _ => Err(SimError::Parse(format!("expected a single base, got {s:?}"))),
    }
}
