//! Scenario reports and the files written next to them.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Comparison {
    #[serde(rename = "<")]
    Less,
    #[serde(rename = "<=")]
    AtMost,
    #[serde(rename = ">")]
    Greater,
    #[serde(rename = ">=")]
    AtLeast,
}

impl std::fmt::Display for Comparison {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Comparison::Less => "<",
            Comparison::AtMost => "<=",
            Comparison::Greater => ">",
            Comparison::AtLeast => ">=",
        })
    }
}

/// One acceptance check with the threshold it was judged against.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub value: f64,
    pub comparison: Comparison,
    pub threshold: f64,
    pub passed: bool,
}

impl Check {
    pub fn new(
        name: impl Into<String>,
        value: f64,
        comparison: Comparison,
        threshold: f64,
    ) -> Self {
        let passed = match comparison {
            Comparison::Less => value < threshold,
            Comparison::AtMost => value <= threshold,
            Comparison::Greater => value > threshold,
            Comparison::AtLeast => value >= threshold,
        };
        Self {
            name: name.into(),
            value,
            comparison,
            threshold,
            passed,
        }
    }

    pub fn below(name: impl Into<String>, value: f64, threshold: f64) -> Self {
        Self::new(name, value, Comparison::Less, threshold)
    }

    /// Boolean check, recorded as 1 ≥ 1 or 0 ≥ 1.
    pub fn holds(name: impl Into<String>, ok: bool) -> Self {
        Self::new(name, if ok { 1.0 } else { 0.0 }, Comparison::AtLeast, 1.0)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub scenario: String,
    pub version: String,
    pub seed: u64,
    /// Parameters after defaults were applied.
    pub inputs: Value,
    pub results: Value,
    pub checks: Vec<Check>,
    /// Side files written next to `report.json`.
    pub artifacts: Vec<String>,
}

impl Report {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn failed_checks(&self) -> Vec<&Check> {
        self.checks.iter().filter(|c| !c.passed).collect()
    }

    pub fn check(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }
}

/// What a scenario produces before it is written to disk.
#[derive(Debug, Default)]
pub struct Outcome {
    pub inputs: Value,
    pub results: Value,
    pub checks: Vec<Check>,
    /// `(file name, contents)` for CSV tables.
    pub tables: Vec<(String, String)>,
    pub polygons: Option<Value>,
}

impl Outcome {
    pub fn table(
        &mut self,
        name: &str,
        write: impl FnOnce(&mut Vec<u8>) -> std::io::Result<()>,
    ) -> Result<(), CliError> {
        let mut buf = Vec::new();
        write(&mut buf).map_err(|e| CliError::Io {
            path: PathBuf::from(name),
            source: e,
        })?;
        self.tables
            .push((name.to_string(), String::from_utf8_lossy(&buf).into_owned()));
        Ok(())
    }
}

fn write_file(dir: &Path, name: &str, contents: &str) -> Result<(), CliError> {
    let path = dir.join(name);
    std::fs::write(&path, contents).map_err(|e| CliError::Io { path, source: e })
}

/// Writes `report.json`, the tables and `polygons.json` into `dir`.
pub fn write_outputs(dir: &Path, report: &Report, outcome: &Outcome) -> Result<(), CliError> {
    std::fs::create_dir_all(dir).map_err(|e| CliError::Io {
        path: dir.to_path_buf(),
        source: e,
    })?;
    for (name, contents) in &outcome.tables {
        write_file(dir, name, contents)?;
    }
    if let Some(p) = &outcome.polygons {
        write_file(dir, "polygons.json", &to_pretty(p))?;
    }
    write_file(dir, "report.json", &to_pretty(report))
}

pub(crate) fn to_pretty<S: Serialize>(value: &S) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("serializable");
    s.push('\n');
    s
}
