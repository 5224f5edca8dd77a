//! Shared reporting types and CSV assembly.

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DecayVerdict {
    DecaysBelowTol,
    StallsAboveFloor,
    Inconclusive,
}

/// One pass/fail line of a verification suite.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CheckResult {
    pub name: String,
    pub pass: bool,
    /// Worst observed error or the key statistic of the check.
    pub statistic: f64,
    /// Threshold the statistic was compared against (NaN-free; 0 when
    /// the check is exact/boolean).
    pub threshold: f64,
    pub detail: String,
}

impl CheckResult {
    pub fn new(
        name: impl Into<String>,
        pass: bool,
        statistic: f64,
        threshold: f64,
        detail: impl Into<String>,
    ) -> Self {
        Self {
            name: name.into(),
            pass,
            statistic,
            threshold,
            detail: detail.into(),
        }
    }
}

/// CSV with a versioned comment line, then a header row, then records.
pub fn csv_table(version_tag: &str, header: &[&str], rows: &[Vec<String>]) -> String {
    let mut out = format!("# {version_tag}: {}\n", header.join(";"));
    out.push_str(&header.join(","));
    out.push('\n');
    for row in rows {
        out.push_str(&row.join(","));
        out.push('\n');
    }
    out
}

pub fn fmt_f64(v: f64) -> String {
    format!("{v:.17e}")
}
