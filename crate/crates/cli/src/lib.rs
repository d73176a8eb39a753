//! Scenario runner: JSON configuration in, `report.json` plus CSV and
//! polygon side files out.
//!
//! Randomized sampling uses ChaCha8 (`rand_chacha`) seeded with the
//! configuration's `seed` through `SeedableRng::seed_from_u64`, so the
//! streams can be reproduced by any ChaCha8 implementation.

pub mod config;
pub mod report;
pub mod scenarios;

use std::path::{Path, PathBuf};

use thiserror::Error;

pub use config::{validate, ConfigError, Diagnostic, ScenarioConfig};
pub use report::{Check, Comparison, Outcome, Report};
pub use scenarios::ScenarioId;

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("scenario failed: {0}")]
    Scenario(String),
}

impl CliError {
    pub(crate) fn scenario(e: impl std::fmt::Display) -> Self {
        CliError::Scenario(e.to_string())
    }
}

/// Runs a scenario without touching the file system.
pub fn execute(config: &ScenarioConfig) -> Result<(Report, Outcome), CliError> {
    let outcome = scenarios::execute(config)?;
    let mut artifacts: Vec<String> = outcome.tables.iter().map(|(n, _)| n.clone()).collect();
    if outcome.polygons.is_some() {
        artifacts.push("polygons.json".into());
    }
    let report = Report {
        scenario: config.scenario.name().to_string(),
        version: env!("CARGO_PKG_VERSION").to_string(),
        seed: config.seed,
        inputs: outcome.inputs.clone(),
        results: outcome.results.clone(),
        checks: outcome.checks.clone(),
        artifacts,
    };
    Ok((report, outcome))
}

/// Runs a scenario and writes its outputs into `out` (or the configured
/// output directory).
pub fn run(config: &ScenarioConfig, out: Option<&Path>) -> Result<Report, CliError> {
    let (report, outcome) = execute(config)?;
    let dir = out
        .map(Path::to_path_buf)
        .unwrap_or_else(|| config.output_dir.clone());
    report::write_outputs(&dir, &report, &outcome)?;
    Ok(report)
}
