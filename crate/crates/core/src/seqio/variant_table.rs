use std::io::{BufRead, Write};

use super::SeqIoError;
use crate::tsv::fmt_f64;
use crate::varfeat::{Label, VariantRecord, VariantType, N_FEATURES};

pub const VARIANT_SCHEMA: &str = "seqforge.variants.v1";

const FIXED: [&str; 6] = ["chrom", "pos", "ref", "alt", "vtype", "label"];

fn feature_column(i: usize) -> String {
    format!("f{:02}", i + 1)
}

fn expected_header() -> Vec<String> {
    FIXED.iter().map(|s| s.to_string()).chain((0..N_FEATURES).map(feature_column)).collect()
}

/// Reads the tab-separated variant table. Lines starting with `#` before
/// the header are comments; columns past `f63` are kept as annotations.
pub fn read_variant_table<R: BufRead>(stream: R) -> Result<Vec<VariantRecord>, SeqIoError> {
    let expected = expected_header();
    let mut header: Option<Vec<String>> = None;
    let mut out = Vec::new();
    for (idx, line) in stream.lines().enumerate() {
        let line = line?;
        let line_no = idx + 1;
        if header.is_none() {
            if line.starts_with('#') {
                continue;
            }
            let cols: Vec<String> = line.split('\t').map(str::to_string).collect();
            if cols.len() < expected.len() || cols[..expected.len()] != expected[..] {
                let got = cols.iter().take(expected.len()).cloned().collect::<Vec<_>>().join(",");
                return Err(SeqIoError::HeaderMismatch(format!("got [{got}]")));
            }
            header = Some(cols);
            continue;
        }
        if line.is_empty() {
            continue;
        }
        let cols = header.as_ref().unwrap();
        let fields: Vec<&str> = line.split('\t').collect();
        if fields.len() != cols.len() {
            return Err(SeqIoError::RowArity { line: line_no, expected: cols.len(), found: fields.len() });
        }
        let bad = |column: &str, value: &str| SeqIoError::NonNumericFeature {
            line: line_no,
            column: column.to_string(),
            value: value.to_string(),
        };
        let pos: u64 = fields[1].parse().map_err(|_| bad("pos", fields[1]))?;
        let vtype: VariantType = fields[4].parse().map_err(|_| SeqIoError::MalformedRecord {
            line: line_no,
            reason: format!("unknown vtype {:?}", fields[4]),
        })?;
        let label: Label = fields[5].parse().map_err(|_| SeqIoError::MalformedRecord {
            line: line_no,
            reason: format!("unknown label {:?}", fields[5]),
        })?;
        let mut features = Vec::with_capacity(N_FEATURES);
        for (j, value) in fields[6..6 + N_FEATURES].iter().enumerate() {
            let v: f64 = value.parse().map_err(|_| bad(&cols[6 + j], value))?;
            features.push(v);
        }
        let annotations = cols[6 + N_FEATURES..]
            .iter()
            .zip(&fields[6 + N_FEATURES..])
            .map(|(k, v)| (k.clone(), v.to_string()))
            .collect();
        out.push(VariantRecord {
            chrom: fields[0].to_string(),
            pos,
            ref_allele: fields[2].to_string(),
            alt_allele: fields[3].to_string(),
            vtype,
            label,
            features,
            annotations,
        });
    }
    if header.is_none() {
        return Err(SeqIoError::HeaderMismatch("missing header".into()));
    }
    Ok(out)
}

/// Writes records with the schema comment and header. Annotation columns
/// are taken from the first record.
pub fn write_variant_table<W: Write>(records: &[VariantRecord], sink: &mut W) -> Result<(), SeqIoError> {
    let extra: Vec<&str> = records
        .first()
        .map(|r| r.annotations.iter().map(|(k, _)| k.as_str()).collect())
        .unwrap_or_default();
    let mut header = expected_header();
    header.extend(extra.iter().map(|s| s.to_string()));
    write!(sink, "{}", crate::tsv::schema_line(VARIANT_SCHEMA))?;
    writeln!(sink, "{}", header.join("\t"))?;
    for r in records {
        let mut row = vec![
            r.chrom.clone(),
            r.pos.to_string(),
            r.ref_allele.clone(),
            r.alt_allele.clone(),
            r.vtype.to_string(),
            r.label.to_string(),
        ];
        if r.features.len() != N_FEATURES {
            return Err(SeqIoError::RowArity {
                line: 0,
                expected: N_FEATURES,
                found: r.features.len(),
            });
        }
        row.extend(r.features.iter().map(|&v| fmt_f64(v)));
        row.extend(r.annotations.iter().map(|(_, v)| v.clone()));
        writeln!(sink, "{}", row.join("\t"))?;
    }
    Ok(())
}
