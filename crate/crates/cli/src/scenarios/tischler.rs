use rotlab_core::torus::{tischler_fibration, winding_numbers};
use serde::{Deserialize, Serialize};
use serde_json::json;

use super::{Context, Scenario, Validator};
use crate::config::Diagnostic;
use crate::report::{Check, Comparison, Outcome};
use crate::CliError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TischlerParams {
    pub class: Vec<f64>,
    pub eps: f64,
    /// Minimum samples per coordinate loop when counting windings.
    pub winding_samples: usize,
}

impl Default for TischlerParams {
    fn default() -> Self {
        Self {
            class: vec![1.0, 2f64.sqrt(), 3f64.sqrt()],
            eps: 0.01,
            winding_samples: 64,
        }
    }
}

impl Scenario for TischlerParams {
    fn validate(&self) -> Vec<Diagnostic> {
        let mut v = Validator::new();
        v.positive("eps", self.eps)
            .nonzero("winding_samples", self.winding_samples)
            .require("class", !self.class.is_empty(), "class must be non-empty");
        v.finish()
    }

    fn run(&self, _ctx: &Context) -> Result<Outcome, CliError> {
        let fib = tischler_fibration(&self.class, self.eps).map_err(CliError::scenario)?;
        let windings = winding_numbers(&fib, self.winding_samples);
        let components = fib.fibre_components();
        Ok(Outcome {
            results: json!({
                "fibration": fib,
                "windings": windings,
                "fibre_components": components,
            }),
            checks: vec![
                Check::new(
                    "approximation_error",
                    fib.error,
                    Comparison::AtMost,
                    self.eps,
                ),
                Check::new(
                    "denominator_within_dirichlet_bound",
                    fib.denominator as f64,
                    Comparison::AtMost,
                    fib.dirichlet_bound as f64,
                ),
                Check::holds("windings_match_primitive_class", windings == fib.primitive),
                Check::new(
                    "fibre_components",
                    components as f64,
                    Comparison::AtMost,
                    1.0,
                ),
            ],
            ..Outcome::default()
        })
    }
}
