//! Scenario configuration files.

use std::fmt;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use serde_json::Value;
use thiserror::Error;

use crate::scenarios::ScenarioId;

/// Problem found in a configuration, located by a dotted field path.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Diagnostic {
    pub path: String,
    pub message: String,
}

impl Diagnostic {
    pub fn new(path: impl Into<String>, message: impl Into<String>) -> Self {
        Self {
            path: path.into(),
            message: message.into(),
        }
    }
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.path.is_empty() {
            write!(f, "{}", self.message)
        } else {
            write!(f, "{}: {}", self.path, self.message)
        }
    }
}

#[derive(Debug, Error)]
#[error("invalid configuration: {}", .0.iter().map(|d| d.to_string()).collect::<Vec<_>>().join("; "))]
pub struct ConfigError(pub Vec<Diagnostic>);

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    scenario: String,
    #[serde(default = "empty_object")]
    parameters: Value,
    #[serde(default)]
    seed: u64,
    #[serde(default)]
    output_dir: Option<PathBuf>,
}

fn empty_object() -> Value {
    Value::Object(Default::default())
}

/// Parsed configuration. Parameters stay as JSON until the scenario
/// decodes them against its own schema.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScenarioConfig {
    pub scenario: ScenarioId,
    pub parameters: Value,
    pub seed: u64,
    pub output_dir: PathBuf,
    /// Directory that relative paths in the parameters resolve against.
    #[serde(skip)]
    pub base_dir: PathBuf,
}

impl ScenarioConfig {
    pub fn new(scenario: ScenarioId, parameters: Value, seed: u64) -> Self {
        Self {
            scenario,
            parameters,
            seed,
            output_dir: PathBuf::from("out"),
            base_dir: PathBuf::from("."),
        }
    }

    /// Parses and checks the top-level schema and the scenario parameters.
    pub fn from_json(text: &str, base_dir: &Path) -> Result<Self, ConfigError> {
        let de = &mut serde_json::Deserializer::from_str(text);
        let raw: RawConfig = serde_path_to_error::deserialize(de).map_err(|e| {
            let path = e.path().to_string();
            ConfigError(vec![Diagnostic::new(
                if path == "." { String::new() } else { path },
                e.inner().to_string(),
            )])
        })?;
        let scenario = ScenarioId::parse(&raw.scenario).ok_or_else(|| {
            ConfigError(vec![Diagnostic::new(
                "scenario",
                format!(
                    "unknown scenario id {:?} (expected one of {})",
                    raw.scenario,
                    ScenarioId::names().join(", ")
                ),
            )])
        })?;
        if !raw.parameters.is_object() {
            return Err(ConfigError(vec![Diagnostic::new(
                "parameters",
                "must be an object",
            )]));
        }
        let config = Self {
            scenario,
            parameters: raw.parameters,
            seed: raw.seed,
            output_dir: raw.output_dir.unwrap_or_else(|| PathBuf::from("out")),
            base_dir: base_dir.to_path_buf(),
        };
        let diagnostics = crate::scenarios::check_parameters(&config);
        if diagnostics.is_empty() {
            Ok(config)
        } else {
            Err(ConfigError(diagnostics))
        }
    }

    pub fn load(path: &Path) -> Result<Self, crate::CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| crate::CliError::Io {
            path: path.to_path_buf(),
            source: e,
        })?;
        let base = path.parent().map(Path::to_path_buf).unwrap_or_default();
        Ok(Self::from_json(&text, &base)?)
    }
}

/// Decodes scenario parameters, prefixing error paths with `parameters`.
pub(crate) fn decode<P: serde::de::DeserializeOwned>(value: &Value) -> Result<P, Vec<Diagnostic>> {
    serde_path_to_error::deserialize(value.clone()).map_err(|e| {
        let inner = e.path().to_string();
        let path = if inner == "." {
            "parameters".to_string()
        } else {
            format!("parameters.{inner}")
        };
        vec![Diagnostic::new(path, e.inner().to_string())]
    })
}

/// Schema check of a configuration file, without running it.
pub fn validate(path: &Path) -> Vec<Diagnostic> {
    match ScenarioConfig::load(path) {
        Ok(_) => Vec::new(),
        Err(crate::CliError::Config(ConfigError(d))) => d,
        Err(e) => vec![Diagnostic::new("", e.to_string())],
    }
}
