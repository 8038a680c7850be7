//! Criterion records and CSV tables.

use std::time::Duration;

use super::Suite;
use crate::error::{Error, Result};

/// Identifier written into every CSV row.
pub const BUILD_ID: &str = concat!("phi-calderon-", env!("CARGO_PKG_VERSION"));

/// Outcome of one acceptance criterion.
#[derive(Debug, Clone, PartialEq)]
pub struct Criterion {
    pub key: &'static str,
    pub suite: Suite,
    /// Worst measured quantity; compared against `tolerance` in the direction stated by `detail`.
    pub value: f64,
    pub tolerance: f64,
    pub passed: bool,
    pub detail: String,
    pub elapsed: Duration,
}

impl Criterion {
    pub fn line(&self) -> String {
        format!(
            "{} {:<22} value {:.3e} tol {:.1e}  {}  ({:.2} s)",
            if self.passed { "PASS" } else { "FAIL" },
            self.key,
            self.value,
            self.tolerance,
            self.detail,
            self.elapsed.as_secs_f64()
        )
    }
}

/// A plain table with a fixed column set; every row also carries the build identifier.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub name: String,
    columns: Vec<&'static str>,
    rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(name: impl Into<String>, columns: &[&'static str]) -> Self {
        Self { name: name.into(), columns: columns.to_vec(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<String>) {
        assert_eq!(row.len(), self.columns.len(), "row width of table {}", self.name);
        self.rows.push(row);
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn to_csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        let header = self.columns.iter().copied().chain(["build"]);
        w.write_record(header).map_err(csv_err)?;
        for row in &self.rows {
            w.write_record(row.iter().map(String::as_str).chain([BUILD_ID])).map_err(csv_err)?;
        }
        let bytes = w.into_inner().map_err(|e| Error::Io(e.to_string()))?;
        String::from_utf8(bytes).map_err(|e| Error::Io(e.to_string()))
    }
}

fn csv_err(e: csv::Error) -> Error {
    Error::Io(e.to_string())
}

/// Scientific notation with a fixed number of digits, so that tables are byte-stable.
pub fn sci(x: f64) -> String {
    format!("{x:.6e}")
}
