//! Built-in scenarios.

mod cone_audit;
mod franks;
mod hedlund;
mod linear_flow;
mod mane;
mod mather;
mod rotation_set;
mod tischler;

use std::path::PathBuf;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::config::{decode, Diagnostic, ScenarioConfig};
use crate::report::Outcome;
use crate::CliError;

pub use cone_audit::ConeAuditParams;
pub use franks::FranksParams;
pub use hedlund::HedlundParams;
pub use linear_flow::LinearFlowParams;
pub use mane::ManeParams;
pub use mather::MatherParams;
pub use rotation_set::RotationSetParams;
pub use tischler::TischlerParams;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ScenarioId {
    ManeExample,
    LinearFlow,
    ConeAudit,
    RotationSet,
    FranksExperiment,
    MatherTable,
    HedlundCheck,
    TischlerDemo,
}

impl ScenarioId {
    pub const ALL: [ScenarioId; 8] = [
        ScenarioId::ManeExample,
        ScenarioId::LinearFlow,
        ScenarioId::ConeAudit,
        ScenarioId::RotationSet,
        ScenarioId::FranksExperiment,
        ScenarioId::MatherTable,
        ScenarioId::HedlundCheck,
        ScenarioId::TischlerDemo,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ScenarioId::ManeExample => "mane_example",
            ScenarioId::LinearFlow => "linear_flow",
            ScenarioId::ConeAudit => "cone_audit",
            ScenarioId::RotationSet => "rotation_set",
            ScenarioId::FranksExperiment => "franks_experiment",
            ScenarioId::MatherTable => "mather_table",
            ScenarioId::HedlundCheck => "hedlund_check",
            ScenarioId::TischlerDemo => "tischler_demo",
        }
    }

    pub fn description(self) -> &'static str {
        match self {
            ScenarioId::ManeExample => {
                "Mañé field on T²: closed orbits, rotation of random starts, cone test"
            }
            ScenarioId::LinearFlow => "linear flow: rotation vector and quasi-orbit class",
            ScenarioId::ConeAudit => {
                "fibred flows on T³: stable-norm ratios against the cone bound"
            }
            ScenarioId::RotationSet => "rotation set hull, refinement and GL(2,Z) conjugation",
            ScenarioId::FranksExperiment => {
                "dissipative shear family: interior rational points and periodic orbits"
            }
            ScenarioId::MatherTable => "beta and alpha tables with duality checks",
            ScenarioId::HedlundCheck => {
                "independence of three rotation vectors and the exact irrationality obstruction"
            }
            ScenarioId::TischlerDemo => {
                "rational approximation of a cohomology class and its fibration"
            }
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|id| id.name() == s)
    }

    pub fn names() -> Vec<&'static str> {
        Self::ALL.iter().map(|id| id.name()).collect()
    }
}

pub(crate) struct Context {
    pub seed: u64,
    pub base_dir: PathBuf,
}

pub(crate) trait Scenario: DeserializeOwned + Serialize {
    fn validate(&self) -> Vec<Diagnostic> {
        Vec::new()
    }
    fn run(&self, ctx: &Context) -> Result<Outcome, CliError>;
}

fn check<S: Scenario>(config: &ScenarioConfig) -> Vec<Diagnostic> {
    match decode::<S>(&config.parameters) {
        Ok(p) => p.validate(),
        Err(d) => d,
    }
}

fn dispatch<S: Scenario>(config: &ScenarioConfig) -> Result<Outcome, CliError> {
    let params: S = decode(&config.parameters).map_err(crate::ConfigError)?;
    let diagnostics = params.validate();
    if !diagnostics.is_empty() {
        return Err(crate::ConfigError(diagnostics).into());
    }
    let ctx = Context {
        seed: config.seed,
        base_dir: config.base_dir.clone(),
    };
    let mut outcome = params.run(&ctx)?;
    outcome.inputs = serde_json::to_value(&params).map_err(CliError::scenario)?;
    Ok(outcome)
}

pub(crate) fn check_parameters(config: &ScenarioConfig) -> Vec<Diagnostic> {
    match config.scenario {
        ScenarioId::ManeExample => check::<ManeParams>(config),
        ScenarioId::LinearFlow => check::<LinearFlowParams>(config),
        ScenarioId::ConeAudit => check::<ConeAuditParams>(config),
        ScenarioId::RotationSet => check::<RotationSetParams>(config),
        ScenarioId::FranksExperiment => check::<FranksParams>(config),
        ScenarioId::MatherTable => check::<MatherParams>(config),
        ScenarioId::HedlundCheck => check::<HedlundParams>(config),
        ScenarioId::TischlerDemo => check::<TischlerParams>(config),
    }
}

pub(crate) fn execute(config: &ScenarioConfig) -> Result<Outcome, CliError> {
    match config.scenario {
        ScenarioId::ManeExample => dispatch::<ManeParams>(config),
        ScenarioId::LinearFlow => dispatch::<LinearFlowParams>(config),
        ScenarioId::ConeAudit => dispatch::<ConeAuditParams>(config),
        ScenarioId::RotationSet => dispatch::<RotationSetParams>(config),
        ScenarioId::FranksExperiment => dispatch::<FranksParams>(config),
        ScenarioId::MatherTable => dispatch::<MatherParams>(config),
        ScenarioId::HedlundCheck => dispatch::<HedlundParams>(config),
        ScenarioId::TischlerDemo => dispatch::<TischlerParams>(config),
    }
}

/// Collects "must be positive" diagnostics.
pub(crate) struct Validator(pub Vec<Diagnostic>);

impl Validator {
    pub fn new() -> Self {
        Self(Vec::new())
    }

    pub fn positive(&mut self, field: &str, value: f64) -> &mut Self {
        if !(value > 0.0 && value.is_finite()) {
            self.0.push(Diagnostic::new(
                format!("parameters.{field}"),
                format!("{field} must be positive"),
            ));
        }
        self
    }

    pub fn nonzero(&mut self, field: &str, value: usize) -> &mut Self {
        if value == 0 {
            self.0.push(Diagnostic::new(
                format!("parameters.{field}"),
                format!("{field} must be positive"),
            ));
        }
        self
    }

    pub fn require(&mut self, field: &str, ok: bool, message: &str) -> &mut Self {
        if !ok {
            self.0
                .push(Diagnostic::new(format!("parameters.{field}"), message));
        }
        self
    }

    pub fn finish(&mut self) -> Vec<Diagnostic> {
        std::mem::take(&mut self.0)
    }
}
