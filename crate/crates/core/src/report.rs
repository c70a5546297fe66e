//! Scan outcomes and tabular output shared by every verifier.

use serde::{Deserialize, Serialize};

/// How many violations a report keeps verbatim. The total is always counted.
pub const MAX_LISTED: usize = 10;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Violation {
    pub index: u64,
    pub detail: String,
}

/// Outcome of a coefficient or inequality scan over an index range.
///
/// `passed` is true exactly when no violation was recorded. Findings are
/// informational (e.g. conjecture counterexamples, predicted negativity) and
/// never affect `passed`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanReport {
    pub check: String,
    pub range: (u64, u64),
    pub violation_count: u64,
    pub violations: Vec<Violation>,
    pub findings: Vec<Violation>,
    /// Smallest slack observed; its unit depends on the check.
    pub extremal_margin: Option<f64>,
    pub passed: bool,
}

impl ScanReport {
    pub fn new(check: impl Into<String>, lo: u64, hi: u64) -> Self {
        ScanReport {
            check: check.into(),
            range: (lo, hi),
            violation_count: 0,
            violations: Vec::new(),
            findings: Vec::new(),
            extremal_margin: None,
            passed: true,
        }
    }

    pub fn violation(&mut self, index: u64, detail: impl Into<String>) {
        self.violation_count += 1;
        if self.violations.len() < MAX_LISTED {
            self.violations.push(Violation { index, detail: detail.into() });
        }
        self.passed = false;
    }

    pub fn finding(&mut self, index: u64, detail: impl Into<String>) {
        if self.findings.len() < MAX_LISTED {
            self.findings.push(Violation { index, detail: detail.into() });
        }
    }

    pub fn margin(&mut self, slack: f64) {
        self.extremal_margin = Some(match self.extremal_margin {
            Some(m) if m <= slack => m,
            _ => slack,
        });
    }

    /// Folds another report into this one (violations, findings, margin, range).
    pub fn absorb(&mut self, other: &ScanReport) {
        self.range.0 = self.range.0.min(other.range.0);
        self.range.1 = self.range.1.max(other.range.1);
        for v in &other.violations {
            self.violation(v.index, format!("{}: {}", other.check, v.detail));
        }
        self.violation_count += other.violation_count - other.violations.len() as u64;
        for f in &other.findings {
            self.finding(f.index, format!("{}: {}", other.check, f.detail));
        }
        if let Some(m) = other.extremal_margin {
            self.margin(m);
        }
        self.passed = self.violation_count == 0;
    }

    pub fn first_violation(&self) -> Option<u64> {
        self.violations.iter().map(|v| v.index).min()
    }

    pub fn summary_line(&self) -> String {
        let status = if self.passed { "PASS" } else { "FAIL" };
        let margin = self
            .extremal_margin
            .map(|m| format!("\tmargin={m:.6e}"))
            .unwrap_or_default();
        format!(
            "{status}\t{}\t[{}, {}]\tviolations={}\tfindings={}{margin}",
            self.check,
            self.range.0,
            self.range.1,
            self.violation_count,
            self.findings.len()
        )
    }

    pub fn to_tsv(&self) -> String {
        let mut out = self.summary_line();
        out.push('\n');
        for v in &self.violations {
            out.push_str(&format!("violation\t{}\t{}\n", v.index, v.detail));
        }
        for f in &self.findings {
            out.push_str(&format!("finding\t{}\t{}\n", f.index, f.detail));
        }
        out
    }
}

/// A rectangular table of already-formatted cells.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(columns: &[&str]) -> Self {
        Table {
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    /// Tab-separated with every cell padded to its column width.
    pub fn to_tsv(&self) -> String {
        let mut widths: Vec<usize> = self.columns.iter().map(|c| c.len()).collect();
        for row in &self.rows {
            for (w, cell) in widths.iter_mut().zip(row) {
                *w = (*w).max(cell.len());
            }
        }
        let line = |cells: &[String]| {
            let padded: Vec<String> = cells
                .iter()
                .zip(&widths)
                .map(|(c, &w)| format!("{c:<w$}"))
                .collect();
            padded.join("\t").trim_end().to_string()
        };
        let mut out = line(&self.columns);
        out.push('\n');
        for row in &self.rows {
            out.push_str(&line(row));
            out.push('\n');
        }
        out
    }

    /// Array of objects keyed by column name.
    pub fn to_json(&self) -> serde_json::Value {
        let rows = self
            .rows
            .iter()
            .map(|row| {
                let obj = self
                    .columns
                    .iter()
                    .cloned()
                    .zip(row.iter().map(|c| serde_json::Value::String(c.clone())))
                    .collect::<serde_json::Map<_, _>>();
                serde_json::Value::Object(obj)
            })
            .collect();
        serde_json::Value::Array(rows)
    }
}
