use rotlab_core::mather::{rationality_obstruction, totally_irrational_check, IrrationalVector};
use rotlab_core::rotation::{hedlund_scenario_check, HedlundVerdict, MapKind, TorusMapLift};
use serde::{Deserialize, Serialize};
use serde_json::json;

use super::{Context, Scenario, Validator};
use crate::config::Diagnostic;
use crate::report::{Check, Outcome};
use crate::CliError;

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct HedlundParams {
    /// Measured suspension homologies `(1, σ)`.
    pub rotation_vectors: [[f64; 3]; 3],
    pub map: Option<MapKind>,
    pub max_denominator: i64,
    pub margin: f64,
    pub tolerance: f64,
    pub v1: IrrationalVector,
    pub v2: IrrationalVector,
}

impl Default for HedlundParams {
    fn default() -> Self {
        let basis = ["1", "sqrt2", "sqrt3"];
        Self {
            rotation_vectors: [[1.0, 0.0, 0.0], [1.0, 1.0, 0.0], [1.0, 0.0, 1.0]],
            map: Some(MapKind::TwoParamShear {
                a: 1.0,
                b: 1.0,
                contraction: 0.03,
            }),
            max_denominator: 3,
            margin: 0.0,
            tolerance: 1e-10,
            v1: IrrationalVector::from_integers(
                &basis,
                &[vec![1, 0, 0], vec![0, 1, 0], vec![0, 0, 1]],
            )
            .expect("square coefficients"),
            v2: IrrationalVector::from_integers(
                &basis,
                &[vec![0, 1, 0], vec![1, 0, 0], vec![0, 0, 1]],
            )
            .expect("square coefficients"),
        }
    }
}

fn unit_cases() -> [(&'static str, IrrationalVector, bool); 3] {
    let basis = ["1", "sqrt2", "sqrt3"];
    let v = |rows: &[Vec<i64>]| {
        IrrationalVector::from_integers(&basis, rows).expect("square coefficients")
    };
    [
        (
            "unit_case.basis",
            v(&[vec![1, 0, 0], vec![0, 1, 0], vec![0, 0, 1]]),
            true,
        ),
        (
            "unit_case.rational",
            v(&[vec![1, 0, 0], vec![2, 0, 0], vec![3, 0, 0]]),
            false,
        ),
        (
            "unit_case.dependent",
            v(&[vec![0, 1, 0], vec![0, 2, 0], vec![1, 0, 0]]),
            false,
        ),
    ]
}

impl Scenario for HedlundParams {
    fn validate(&self) -> Vec<Diagnostic> {
        let mut v = Validator::new();
        v.positive("tolerance", self.tolerance)
            .require("margin", self.margin >= 0.0, "margin must be non-negative")
            .require(
                "max_denominator",
                (1..=64).contains(&self.max_denominator),
                "max_denominator must lie in 1..=64",
            )
            .require(
                "map",
                !matches!(self.map, Some(MapKind::Custom { .. })),
                "custom maps have no built-in evaluator",
            )
            .require("v1", self.v1.dim() == 3, "v1 must have three components")
            .require("v2", self.v2.dim() == 3, "v2 must have three components");
        v.finish()
    }

    fn run(&self, _ctx: &Context) -> Result<Outcome, CliError> {
        let map = match &self.map {
            Some(kind) => Some(
                TorusMapLift::<f64>::from_kind(kind.clone())
                    .ok_or_else(|| CliError::scenario("custom maps have no built-in evaluator"))?,
            ),
            None => None,
        };
        let verdict = hedlund_scenario_check(
            &self.rotation_vectors,
            map.as_ref(),
            self.max_denominator,
            self.margin,
        );
        let mut checks = Vec::new();
        let verdict_json = match &verdict {
            HedlundVerdict::IndependentImpliesPeriodicSearch {
                det,
                interior,
                results,
            } => {
                checks.push(Check::holds("rotation_vectors_independent", true));
                if map.is_some() {
                    let found = results
                        .iter()
                        .any(|r| r.found && r.residual < self.tolerance);
                    checks.push(Check::holds("periodic_point_found", found));
                }
                json!({
                    "kind": "independent",
                    "det": det,
                    "interior_points": interior.points,
                    "interior_degenerate": interior.degenerate,
                    "periodic": results,
                })
            }
            HedlundVerdict::Degenerate { det } => {
                checks.push(Check::holds("rotation_vectors_independent", false));
                json!({ "kind": "degenerate", "det": det })
            }
        };

        let obstruction = match rationality_obstruction(&self.v1, &self.v2) {
            Ok(w) => {
                checks.push(Check::holds(
                    "witness_not_totally_irrational",
                    !w.w_totally_irrational,
                ));
                checks.push(Check::holds(
                    "witness_check_consistent",
                    totally_irrational_check(&w.w) == w.w_totally_irrational,
                ));
                json!({
                    "rows": w.rows,
                    "alpha": w.alpha.to_string(),
                    "beta": w.beta.to_string(),
                    "q3": w.q3.to_string(),
                    "w": w.w,
                    "w_totally_irrational": w.w_totally_irrational,
                })
            }
            Err(e) => {
                checks.push(Check::holds("witness_not_totally_irrational", false));
                json!({ "error": e.to_string() })
            }
        };

        let mut cases = serde_json::Map::new();
        for (name, v, expected) in unit_cases() {
            let got = totally_irrational_check(&v);
            checks.push(Check::holds(name, got == expected));
            cases.insert(name.to_string(), json!(got));
        }

        Ok(Outcome {
            results: json!({
                "verdict": verdict_json,
                "obstruction": obstruction,
                "unit_cases": cases,
            }),
            checks,
            ..Outcome::default()
        })
    }
}
