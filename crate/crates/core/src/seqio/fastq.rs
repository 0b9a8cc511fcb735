use std::collections::HashSet;
use std::io::{BufRead, Write};

use super::{normalize_base, ReadSet, SeqIoError, SeqRecord, MAX_PHRED};

const QUAL_MIN: u8 = b'!';
const QUAL_MAX: u8 = b'}';

/// Streaming FASTQ reader; holds at most one record in memory.
pub struct FastqReader<R> {
    inner: R,
    line_no: usize,
    buf: Vec<u8>,
    done: bool,
}

impl<R: BufRead> FastqReader<R> {
    pub fn new(inner: R) -> Self {
        FastqReader { inner, line_no: 0, buf: Vec::new(), done: false }
    }

    /// Line number of the most recently consumed line (1-based).
    pub fn line(&self) -> usize {
        self.line_no
    }

    fn next_line(&mut self) -> Result<Option<Vec<u8>>, SeqIoError> {
        self.buf.clear();
        let n = self.inner.read_until(b'\n', &mut self.buf)?;
        if n == 0 {
            return Ok(None);
        }
        self.line_no += 1;
        let mut line = std::mem::take(&mut self.buf);
        if line.last() == Some(&b'\n') {
            line.pop();
        }
        if line.last() == Some(&b'\r') {
            line.pop();
        }
        Ok(Some(line))
    }

    fn read_record(&mut self) -> Result<Option<SeqRecord>, SeqIoError> {
        let header = match self.next_line()? {
            None => return Ok(None),
            Some(h) => h,
        };
        let header_line = self.line_no;
        if header.first() != Some(&b'@') {
            return Err(SeqIoError::MalformedRecord {
                line: header_line,
                reason: "header line must start with '@'".into(),
            });
        }
        let id = String::from_utf8(header[1..].to_vec()).map_err(|_| SeqIoError::MalformedRecord {
            line: header_line,
            reason: "read id is not valid UTF-8".into(),
        })?;

        let truncated = |line| SeqIoError::MalformedRecord { line, reason: "truncated record".into() };
        let seq = self.next_line()?.ok_or_else(|| truncated(header_line))?;
        let seq_line = self.line_no;
        let mut bases = Vec::with_capacity(seq.len());
        for &b in &seq {
            match normalize_base(b) {
                Some(n) => bases.push(n),
                None => {
                    return Err(SeqIoError::InvalidCharacter { line: seq_line, ch: b as char, field: "bases" })
                }
            }
        }

        let plus = self.next_line()?.ok_or_else(|| truncated(seq_line))?;
        if plus.first() != Some(&b'+') {
            return Err(SeqIoError::MalformedRecord {
                line: self.line_no,
                reason: "separator line must start with '+'".into(),
            });
        }
        let plus_line = self.line_no;

        let qual = self.next_line()?.ok_or_else(|| truncated(plus_line))?;
        let qual_line = self.line_no;
        let mut quals = Vec::with_capacity(qual.len());
        for &q in &qual {
            if !(QUAL_MIN..=QUAL_MAX).contains(&q) {
                return Err(SeqIoError::InvalidCharacter { line: qual_line, ch: q as char, field: "qualities" });
            }
            quals.push(q - QUAL_MIN);
        }
        if quals.len() != bases.len() {
            return Err(SeqIoError::MalformedRecord {
                line: qual_line,
                reason: format!("{} bases but {} qualities", bases.len(), quals.len()),
            });
        }
        Ok(Some(SeqRecord { id, bases, quals }))
    }
}

impl<R: BufRead> Iterator for FastqReader<R> {
    type Item = Result<SeqRecord, SeqIoError>;

    fn next(&mut self) -> Option<Self::Item> {
        if self.done {
            return None;
        }
        match self.read_record() {
            Ok(Some(r)) => Some(Ok(r)),
            Ok(None) => {
                self.done = true;
                None
            }
            Err(e) => {
                self.done = true;
                Some(Err(e))
            }
        }
    }
}

/// Parses a whole FASTQ stream, rejecting duplicate read ids.
pub fn parse_fastq<R: BufRead>(stream: R) -> Result<ReadSet, SeqIoError> {
    let mut reader = FastqReader::new(stream);
    let mut records = Vec::new();
    let mut seen = HashSet::new();
    while let Some(rec) = reader.next() {
        let rec = rec?;
        if !seen.insert(rec.id.clone()) {
            return Err(SeqIoError::DuplicateId { line: reader.line() - 3, id: rec.id });
        }
        records.push(rec);
    }
    Ok(ReadSet::new(records, ""))
}

pub fn write_record<W: Write>(rec: &SeqRecord, sink: &mut W) -> Result<usize, SeqIoError> {
    if let Some(&q) = rec.quals.iter().find(|&&q| q > MAX_PHRED) {
        return Err(SeqIoError::QualityOutOfRange { id: rec.id.clone(), qual: q });
    }
    let mut out = Vec::with_capacity(rec.id.len() + 2 * rec.bases.len() + 6);
    out.push(b'@');
    out.extend_from_slice(rec.id.as_bytes());
    out.push(b'\n');
    out.extend_from_slice(&rec.bases);
    out.extend_from_slice(b"\n+\n");
    out.extend(rec.quals.iter().map(|q| q + QUAL_MIN));
    out.push(b'\n');
    sink.write_all(&out)?;
    Ok(out.len())
}

/// Writes every record and returns the number of bytes emitted.
pub fn write_fastq<W: Write>(reads: &ReadSet, sink: &mut W) -> Result<usize, SeqIoError> {
    let mut total = 0;
    for rec in &reads.records {
        total += write_record(rec, sink)?;
    }
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn parse(s: &[u8]) -> Result<ReadSet, SeqIoError> {
        parse_fastq(s)
    }

    #[test]
    fn empty_stream() {
        assert!(parse(b"").unwrap().is_empty());
    }

    #[test]
    fn phred33_decoding() {
        let rs = parse(b"@r1\nACGT\n+\n!!!I\n").unwrap();
        assert_eq!(rs.records, vec![SeqRecord::new("r1", *b"ACGT", vec![0, 0, 0, 40])]);
    }

    #[test]
    fn lowercase_normalized() {
        let rs = parse(b"@r1\nacgtn\n+\nIIIII\n").unwrap();
        assert_eq!(rs.records[0].bases, b"ACGTN");
    }

    #[test]
    fn length_mismatch() {
        let err = parse(b"@r1\nACG\n+\n!!!!\n").unwrap_err();
        assert!(matches!(err, SeqIoError::MalformedRecord { line: 4, .. }), "{err}");
    }

    #[test]
    fn missing_plus_and_truncation() {
        assert!(matches!(parse(b"@r1\nACG\nx\n!!!\n"), Err(SeqIoError::MalformedRecord { line: 3, .. })));
        assert!(matches!(parse(b"@r1\nACG\n+\n"), Err(SeqIoError::MalformedRecord { .. })));
        assert!(matches!(parse(b"r1\nACG\n+\n!!!\n"), Err(SeqIoError::MalformedRecord { line: 1, .. })));
    }

    #[test]
    fn invalid_characters() {
        assert!(matches!(
            parse(b"@r1\nACXT\n+\n!!!!\n"),
            Err(SeqIoError::InvalidCharacter { ch: 'X', line: 2, .. })
        ));
        assert!(matches!(
            parse(b"@r1\nACGT\n+\n!! !\n"),
            Err(SeqIoError::InvalidCharacter { ch: ' ', line: 4, .. })
        ));
    }

    #[test]
    fn duplicate_ids_rejected() {
        let err = parse(b"@r\nA\n+\n!\n@r\nC\n+\n!\n").unwrap_err();
        assert!(matches!(err, SeqIoError::DuplicateId { line: 5, .. }));
    }

    #[test]
    fn no_trailing_newline() {
        let rs = parse(b"@r1\nAC\n+\nII").unwrap();
        assert_eq!(rs.records[0].quals, vec![40, 40]);
    }

    #[test]
    fn write_exact_bytes() {
        let mut out = Vec::new();
        assert_eq!(write_fastq(&ReadSet::default(), &mut out).unwrap(), 0);
        let rs = ReadSet::new(vec![SeqRecord::new("r1", *b"ACGT", vec![0, 0, 0, 40])], "");
        let n = write_fastq(&rs, &mut out).unwrap();
        assert_eq!(out, b"@r1\nACGT\n+\n!!!I\n");
        assert_eq!(n, out.len());
    }

    #[test]
    fn write_rejects_high_quality() {
        let rs = ReadSet::new(vec![SeqRecord::new("r1", *b"A", vec![61])], "");
        assert!(matches!(write_fastq(&rs, &mut Vec::new()), Err(SeqIoError::QualityOutOfRange { qual: 61, .. })));
    }

    fn arb_record() -> impl Strategy<Value = SeqRecord> {
        (0usize..200).prop_flat_map(|len| {
            (
                "[A-Za-z0-9_:.-]{1,20}",
                proptest::collection::vec(prop_oneof![Just(b'A'), Just(b'C'), Just(b'G'), Just(b'T'), Just(b'N')], len),
                proptest::collection::vec(0u8..=MAX_PHRED, len),
            )
                .prop_map(|(id, bases, quals)| SeqRecord { id, bases, quals })
        })
    }

    proptest! {
        #[test]
        fn round_trip(recs in proptest::collection::vec(arb_record(), 0..20)) {
            let mut seen = HashSet::new();
            let recs: Vec<_> = recs.into_iter().filter(|r| seen.insert(r.id.clone())).collect();
            let rs = ReadSet::new(recs, "");
            let mut buf = Vec::new();
            write_fastq(&rs, &mut buf).unwrap();
            prop_assert_eq!(parse(&buf).unwrap(), rs);
        }

        #[test]
        fn never_panics(bytes in proptest::collection::vec(any::<u8>(), 0..400)) {
            let _ = parse(&bytes);
        }

        #[test]
        fn never_panics_on_near_fastq(body in "(@[a-z]{0,3}\n[ACGTNx]{0,5}\n[+-]?\n[!-~ ]{0,5}\n){0,4}") {
            let _ = parse(body.as_bytes());
        }
    }
}
