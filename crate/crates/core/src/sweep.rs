//! Tabular sweep output and its CSV form.

use std::fmt::Write as _;
use std::path::Path;

/// One row of a sweep. A failed point keeps its independent variable and
/// leaves the rest as NaN, with the error text in `notes`.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub values: Vec<f64>,
    pub notes: Vec<String>,
    pub failed: bool,
}

/// Column-named table produced by every sweep.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepResult {
    pub columns: Vec<String>,
    /// Name of the trailing free-text column, if the schema has one.
    pub notes_column: Option<String>,
    pub rows: Vec<SweepRow>,
}

impl SweepResult {
    pub fn new(columns: &[&str], notes_column: Option<&str>) -> Self {
        SweepResult {
            columns: columns.iter().map(|c| c.to_string()).collect(),
            notes_column: notes_column.map(str::to_string),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, values: Vec<f64>, notes: Vec<String>) {
        debug_assert_eq!(values.len(), self.columns.len());
        self.rows.push(SweepRow { values, notes, failed: false });
    }

    /// Records a point that could not be computed.
    pub fn push_failure(&mut self, leading: &[f64], error: String) {
        let mut values = leading.to_vec();
        values.resize(self.columns.len(), f64::NAN);
        self.rows.push(SweepRow { values, notes: vec![format!("error: {error}")], failed: true });
    }

    pub fn failures(&self) -> usize {
        self.rows.iter().filter(|r| r.failed).count()
    }

    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let idx = self.columns.iter().position(|c| c == name)?;
        Some(self.rows.iter().map(|r| r.values[idx]).collect())
    }

    /// Prepends a constant column, used to stack sweeps run at several
    /// values of an outer parameter.
    pub fn with_leading_column(mut self, name: &str, value: f64) -> Self {
        self.columns.insert(0, name.to_string());
        for row in &mut self.rows {
            row.values.insert(0, value);
        }
        self
    }

    /// Appends the rows of `other`, which must share this schema.
    pub fn extend(&mut self, other: SweepResult) {
        assert_eq!(self.columns, other.columns, "sweep schemas differ");
        self.rows.extend(other.rows);
    }

    pub fn header(&self) -> String {
        let mut cols = self.columns.clone();
        if let Some(n) = &self.notes_column {
            cols.push(n.clone());
        }
        cols.join(",")
    }

    /// CSV with a header row; numbers carry 12 significant digits and
    /// non-finite values are left empty.
    pub fn to_csv(&self) -> String {
        let mut out = self.header();
        out.push('\n');
        for row in &self.rows {
            let mut first = true;
            for v in &row.values {
                if !first {
                    out.push(',');
                }
                first = false;
                out.push_str(&format_value(*v));
            }
            if self.notes_column.is_some() {
                out.push(',');
                out.push_str(&quote(&row.notes.join("; ")));
            }
            out.push('\n');
        }
        out
    }

    pub fn write_csv(&self, path: &Path) -> std::io::Result<()> {
        std::fs::write(path, self.to_csv())
    }
}

pub fn format_value(v: f64) -> String {
    if v.is_finite() {
        let mut s = String::new();
        let _ = write!(s, "{v:.11e}");
        s
    } else {
        String::new()
    }
}

fn quote(field: &str) -> String {
    if field.contains([',', '"', '\n']) {
        format!("\"{}\"", field.replace('"', "\"\""))
    } else {
        field.to_string()
    }
}
