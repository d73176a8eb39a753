use std::io::Write;

use rotlab_core::asymptotic::{quasi_orbit_class, rotation_vector, Closer};
use rotlab_core::flow::{sample_path, LinearFlow};
use serde::{Deserialize, Serialize};
use serde_json::json;

use super::{Context, Scenario, Validator};
use crate::config::Diagnostic;
use crate::report::{Check, Outcome};
use crate::CliError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LinearFlowParams {
    pub velocity: Vec<f64>,
    pub start: Option<Vec<f64>>,
    pub horizon: f64,
    /// Sampling step of the trajectory table.
    pub step: f64,
    pub tolerance: f64,
}

impl Default for LinearFlowParams {
    fn default() -> Self {
        Self {
            velocity: vec![1.0, (5f64.sqrt() - 1.0) / 2.0],
            start: None,
            horizon: 100.0,
            step: 0.5,
            tolerance: 1e-9,
        }
    }
}

impl Scenario for LinearFlowParams {
    fn validate(&self) -> Vec<Diagnostic> {
        let mut v = Validator::new();
        v.positive("horizon", self.horizon)
            .positive("step", self.step)
            .positive("tolerance", self.tolerance)
            .require(
                "velocity",
                !self.velocity.is_empty(),
                "velocity must be non-empty",
            )
            .require(
                "start",
                self.start
                    .as_ref()
                    .is_none_or(|s| s.len() == self.velocity.len()),
                "start must have the dimension of velocity",
            );
        v.finish()
    }

    fn run(&self, _ctx: &Context) -> Result<Outcome, CliError> {
        let n = self.velocity.len();
        let flow = LinearFlow::new(self.velocity.clone());
        let x0 = self.start.clone().unwrap_or_else(|| vec![0.0; n]);
        let path = sample_path(&flow, &x0, self.step, self.horizon);
        let est = rotation_vector(&path, 4).map_err(CliError::scenario)?;
        let rec =
            quasi_orbit_class(&path, &Closer::Flat, self.horizon).map_err(CliError::scenario)?;
        let error = est
            .value
            .iter()
            .zip(&self.velocity)
            .fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));
        let mut out = Outcome {
            results: json!({
                "rotation_vector": est.value,
                "cauchy_gap": est.cauchy_gap,
                "error": error,
                "quasi_orbit": rec,
            }),
            checks: vec![Check::below("rotation_error", error, self.tolerance)],
            ..Outcome::default()
        };
        out.table("trajectory.csv", |w| {
            let head: Vec<String> = (1..=n).map(|i| format!("x{i}")).collect();
            writeln!(w, "t,{}", head.join(","))?;
            for (t, p) in path.times.iter().zip(&path.points) {
                let row: Vec<String> = p.iter().map(|x| x.to_string()).collect();
                writeln!(w, "{t},{}", row.join(","))?;
            }
            Ok(())
        })?;
        Ok(out)
    }
}
