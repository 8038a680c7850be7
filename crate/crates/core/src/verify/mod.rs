//! Acceptance suites run with fixed seeds.
//!
//! Each suite produces a set of [`Criterion`] outcomes and one long-format table
//! (`criterion, case, quantity, value`). Tables contain no timings, so two runs with the same
//! parameters write byte-identical files.

mod discrete;
mod lab;
mod normal;
mod report;
mod symbols;

use std::path::{Path, PathBuf};
use std::time::Instant;

pub use report::{sci, Criterion, Table, BUILD_ID};

use crate::config::RunParams;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Suite {
    Symbol,
    Lab,
    Normal,
    Discrete,
}

impl Suite {
    pub const ALL: [Suite; 4] = [Suite::Symbol, Suite::Lab, Suite::Normal, Suite::Discrete];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Symbol => "symbol",
            Suite::Lab => "lab",
            Suite::Normal => "normal",
            Suite::Discrete => "discrete",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|x| x.name() == s)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct VerifyOptions {
    pub suites: Vec<Suite>,
    pub params: RunParams,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        Self { suites: Suite::ALL.to_vec(), params: RunParams::default() }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SuiteOutcome {
    pub suite: Suite,
    pub criteria: Vec<Criterion>,
    pub table: Table,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Report {
    pub outcomes: Vec<SuiteOutcome>,
}

impl Report {
    pub fn criteria(&self) -> impl Iterator<Item = &Criterion> {
        self.outcomes.iter().flat_map(|o| o.criteria.iter())
    }

    pub fn passed(&self) -> bool {
        self.criteria().all(|c| c.passed)
    }

    pub fn summary(&self) -> Table {
        let mut t = Table::new("summary", &["suite", "criterion", "value", "tolerance", "passed", "detail"]);
        for c in self.criteria() {
            t.push(vec![
                c.suite.name().into(),
                c.key.into(),
                sci(c.value),
                sci(c.tolerance),
                c.passed.to_string(),
                c.detail.clone(),
            ]);
        }
        t
    }

    /// `(file name, contents)` for every suite table and the summary.
    pub fn files(&self) -> Result<Vec<(String, String)>> {
        let mut out = Vec::new();
        for o in &self.outcomes {
            out.push((format!("{}.csv", o.table.name), o.table.to_csv()?));
        }
        out.push(("summary.csv".into(), self.summary().to_csv()?));
        Ok(out)
    }

    pub fn write(&self, dir: &Path) -> Result<Vec<PathBuf>> {
        std::fs::create_dir_all(dir)?;
        let mut paths = Vec::new();
        for (name, text) in self.files()? {
            let p = dir.join(name);
            std::fs::write(&p, text)?;
            paths.push(p);
        }
        Ok(paths)
    }
}

/// Runs the selected suites in their fixed order.
pub fn verify_all(opts: &VerifyOptions) -> Result<Report> {
    opts.params.validate()?;
    if opts.suites.is_empty() {
        return Err(Error::InvalidArgument("no suite selected".into()));
    }
    let mut suites = opts.suites.clone();
    suites.sort();
    suites.dedup();
    let ctx = Ctx { params: &opts.params };
    let outcomes = suites
        .into_iter()
        .map(|s| match s {
            Suite::Symbol => symbols::run(&ctx),
            Suite::Lab => lab::run(&ctx),
            Suite::Normal => normal::run(&ctx),
            Suite::Discrete => discrete::run(&ctx),
        })
        .collect();
    Ok(Report { outcomes })
}

pub(crate) struct Ctx<'a> {
    params: &'a RunParams,
}

impl Ctx<'_> {
    fn tol(&self, default: f64) -> f64 {
        self.params.tol_override.unwrap_or(default)
    }

    fn seed(&self, offset: u64) -> u64 {
        self.params.seed.wrapping_add(offset)
    }
}

/// What a check measured: worst value, verdict and a deterministic description.
struct Measured {
    value: f64,
    passed: bool,
    detail: String,
}

fn run_check(key: &'static str, suite: Suite, tolerance: f64, check: impl FnOnce() -> Result<Measured>) -> Criterion {
    let start = Instant::now();
    let outcome = check();
    let elapsed = start.elapsed();
    match outcome {
        Ok(m) => Criterion { key, suite, value: m.value, tolerance, passed: m.passed, detail: m.detail, elapsed },
        Err(e) => Criterion { key, suite, value: f64::NAN, tolerance, passed: false, detail: format!("error: {e}"), elapsed },
    }
}

fn row(table: &mut Table, criterion: &str, case: impl Into<String>, quantity: &str, value: f64) {
    table.push(vec![criterion.into(), case.into(), quantity.into(), sci(value)]);
}

const COLUMNS: [&str; 4] = ["criterion", "case", "quantity", "value"];
