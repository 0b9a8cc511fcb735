//! Small helpers shared by the TSV writers.

use std::fmt::Write as _;

/// Formats a float for TSV output; non-finite values become `NA`.
pub fn fmt_f64(x: f64) -> String {
    if x.is_finite() {
        let mut s = String::new();
        write!(s, "{x}").unwrap();
        s
    } else {
        "NA".to_string()
    }
}

pub fn schema_line(name: &str) -> String {
    format!("#schema={name}\n")
}
