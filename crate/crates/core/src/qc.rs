//! Read quality statistics and sliding-window 3' trimming.

use std::fmt::Write as _;

use crate::seqio::{ReadSet, SeqRecord};
use crate::tsv::{fmt_f64, schema_line};

pub const QC_SCHEMA: &str = "seqforge.qc.v1";
pub const QC_HIST_SCHEMA: &str = "seqforge.qc_hist.v1";

/// Sliding-window policy, `window:q_threshold` plus a minimum kept length.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrimPolicy {
    pub window: usize,
    pub q_threshold: f64,
    pub min_length: usize,
}

impl Default for TrimPolicy {
    fn default() -> Self {
        TrimPolicy { window: 4, q_threshold: 20.0, min_length: 50 }
    }
}

impl TrimPolicy {
    pub fn validate(&self) -> Result<(), String> {
        if self.window == 0 {
            return Err("window must be >= 1".into());
        }
        if self.min_length == 0 {
            return Err("min_length must be >= 1".into());
        }
        if !self.q_threshold.is_finite() {
            return Err("q_threshold must be finite".into());
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct QcReport {
    /// Mean Phred over all bases of the (output) reads.
    pub mean_q: f64,
    pub per_position_mean_q: Vec<f64>,
    pub read_count_before: usize,
    pub read_count_after: usize,
    pub base_count_before: usize,
    pub base_count_after: usize,
    /// Fraction of input bases kept.
    pub base_retention: f64,
    /// Fraction of input reads kept.
    pub read_retention: f64,
}

pub fn quality_stats(reads: &ReadSet) -> QcReport {
    let max_len = reads.records.iter().map(SeqRecord::len).max().unwrap_or(0);
    let mut sums = vec![0u64; max_len];
    let mut counts = vec![0u64; max_len];
    let mut total = 0u64;
    let mut n = 0u64;
    for r in &reads.records {
        for (i, &q) in r.quals.iter().enumerate() {
            sums[i] += q as u64;
            counts[i] += 1;
            total += q as u64;
            n += 1;
        }
    }
    let per_position_mean_q = sums
        .iter()
        .zip(&counts)
        .map(|(&s, &c)| if c == 0 { 0.0 } else { s as f64 / c as f64 })
        .collect();
    let bases = reads.total_bases();
    QcReport {
        mean_q: if n == 0 { 0.0 } else { total as f64 / n as f64 },
        per_position_mean_q,
        read_count_before: reads.len(),
        read_count_after: reads.len(),
        base_count_before: bases,
        base_count_after: bases,
        base_retention: 1.0,
        read_retention: 1.0,
    }
}

fn window_fails(quals: &[u8], threshold: f64) -> bool {
    let sum: u64 = quals.iter().map(|&q| q as u64).sum();
    (sum as f64) < threshold * quals.len() as f64
}

/// Length of the prefix kept by the sliding-window rule (before the
/// min-length filter).
pub fn trimmed_length(quals: &[u8], policy: &TrimPolicy) -> usize {
    let n = quals.len();
    let w = policy.window;
    let t = policy.q_threshold;
    if n == 0 {
        return 0;
    }
    if n < w {
        return if window_fails(quals, t) { 0 } else { n };
    }
    let mut sum: u64 = quals[..w].iter().map(|&q| q as u64).sum();
    let fails = |s: u64| (s as f64) < t * w as f64;
    if fails(sum) {
        return 0;
    }
    for start in 1..=n - w {
        sum = sum + quals[start + w - 1] as u64 - quals[start - 1] as u64;
        if fails(sum) {
            let mut keep = start + w - 1;
            while keep > 0 && (quals[keep - 1] as f64) < t {
                keep -= 1;
            }
            return keep;
        }
    }
    n
}

/// Trims every read's 3' tail and drops reads shorter than `min_length`.
/// The report's quality figures describe the surviving reads.
pub fn trim_reads(reads: &ReadSet, policy: &TrimPolicy) -> (ReadSet, QcReport) {
    let mut kept = Vec::with_capacity(reads.len());
    for r in &reads.records {
        let len = trimmed_length(&r.quals, policy);
        if len >= policy.min_length {
            kept.push(SeqRecord {
                id: r.id.clone(),
                bases: r.bases[..len].to_vec(),
                quals: r.quals[..len].to_vec(),
            });
        }
    }
    let out = ReadSet::new(kept, reads.source_tag.clone());
    let mut report = quality_stats(&out);
    let before = reads.total_bases();
    report.read_count_before = reads.len();
    report.base_count_before = before;
    report.base_retention = if before == 0 { 1.0 } else { report.base_count_after as f64 / before as f64 };
    report.read_retention = if reads.is_empty() { 1.0 } else { out.len() as f64 / reads.len() as f64 };
    (out, report)
}

impl QcReport {
    /// Key/value summary block.
    pub fn to_tsv(&self) -> String {
        let mut s = schema_line(QC_SCHEMA);
        s.push_str("metric\tvalue\n");
        let rows: [(&str, String); 8] = [
            ("mean_q", fmt_f64(self.mean_q)),
            ("read_count_before", self.read_count_before.to_string()),
            ("read_count_after", self.read_count_after.to_string()),
            ("base_count_before", self.base_count_before.to_string()),
            ("base_count_after", self.base_count_after.to_string()),
            ("base_retention", fmt_f64(self.base_retention)),
            ("read_retention", fmt_f64(self.read_retention)),
            ("max_read_length", self.per_position_mean_q.len().to_string()),
        ];
        for (k, v) in rows {
            writeln!(s, "{k}\t{v}").unwrap();
        }
        s
    }

    /// Per-position mean quality, one row per 0-based position.
    pub fn histogram_tsv(&self) -> String {
        let mut s = schema_line(QC_HIST_SCHEMA);
        s.push_str("position\tmean_q\n");
        for (i, q) in self.per_position_mean_q.iter().enumerate() {
            writeln!(s, "{i}\t{}", fmt_f64(*q)).unwrap();
        }
        s
    }
}
