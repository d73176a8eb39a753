use rotlab_core::asymptotic::{
    cone_bound_audit, quadratic_diameter, quadratic_norm, shortest_transverse_class, Closer,
    ConeAudit, ConeAuditSetup,
};
use rotlab_core::flow::LinearFlow;
use rotlab_core::homology::IntHomologyClass;
use rotlab_core::torus::geodesible_tensor;
use serde::{Deserialize, Serialize};
use serde_json::json;

use super::{Context, Scenario, Validator};
use crate::config::Diagnostic;
use crate::report::{Check, Comparison, Outcome};
use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FibredCase {
    /// Flat metric, flow `(1,0,0)` along the fibration `dx₁`.
    Product,
    /// Flow `(1, √2−1, (√3−1)/2)` with the metric making it geodesic.
    Tilted,
}

impl FibredCase {
    fn name(self) -> &'static str {
        match self {
            FibredCase::Product => "product",
            FibredCase::Tilted => "tilted",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ConeAuditParams {
    pub cases: Vec<FibredCase>,
    pub m_max: usize,
    /// Samples per axis for the diameter estimate.
    pub diameter_samples: usize,
    pub tolerance: f64,
}

impl Default for ConeAuditParams {
    fn default() -> Self {
        Self {
            cases: vec![FibredCase::Product, FibredCase::Tilted],
            m_max: 50,
            diameter_samples: 8,
            tolerance: 0.05,
        }
    }
}

fn audit(case: FibredCase, m_max: usize, samples: usize) -> Result<ConeAudit<f64>, CliError> {
    let id = vec![
        vec![1.0, 0.0, 0.0],
        vec![0.0, 1.0, 0.0],
        vec![0.0, 0.0, 1.0],
    ];
    let (velocity, g, base) = match case {
        FibredCase::Product => (vec![1.0, 0.0, 0.0], id, vec![0.0, 0.3, 0.6]),
        FibredCase::Tilted => {
            let x = vec![1.0, 2f64.sqrt() - 1.0, (3f64.sqrt() - 1.0) / 2.0];
            let g = geodesible_tensor(&id, &x, &[1.0, 0.0, 0.0]).map_err(|p| {
                CliError::Scenario(format!(
                    "flow not transverse to the fibration (pairing {p})"
                ))
            })?;
            (x, g, vec![0.0, 0.0, 0.0])
        }
    };
    let axis = match case {
        FibredCase::Product => IntHomologyClass::new(vec![1, 0, 0]),
        FibredCase::Tilted => shortest_transverse_class(&g, &[1, 0, 0]),
    };
    let gn = g.clone();
    let norm = move |v: &[f64]| quadratic_norm(&gn, v);
    let setup = ConeAuditSetup {
        axis,
        base,
        // both flows cross x₁ = const at unit speed
        return_time: 1.0,
        diameter: quadratic_diameter(&g, samples),
        norm: &norm,
        closer: Closer::Quadratic(g.clone()),
    };
    cone_bound_audit(&LinearFlow::new(velocity), &setup, m_max).map_err(CliError::scenario)
}

impl Scenario for ConeAuditParams {
    fn validate(&self) -> Vec<Diagnostic> {
        let mut v = Validator::new();
        v.nonzero("m_max", self.m_max)
            .nonzero("diameter_samples", self.diameter_samples)
            .positive("tolerance", self.tolerance)
            .require("cases", !self.cases.is_empty(), "cases must be non-empty");
        v.finish()
    }

    fn run(&self, _ctx: &Context) -> Result<Outcome, CliError> {
        let mut out = Outcome::default();
        let mut results = serde_json::Map::new();
        for &case in &self.cases {
            let a = audit(case, self.m_max, self.diameter_samples)?;
            let excess = a
                .rows
                .iter()
                .map(|r| -r.slack)
                .fold(f64::NEG_INFINITY, f64::max);
            out.checks.push(Check::new(
                format!("{}.ratio_minus_bound", case.name()),
                excess,
                Comparison::AtMost,
                self.tolerance,
            ));
            out.checks.push(Check::new(
                format!("{}.limsup", case.name()),
                a.limsup,
                Comparison::AtMost,
                3.0 + self.tolerance,
            ));
            out.table(&format!("cone_{}.csv", case.name()), |w| a.write_csv(w))?;
            results.insert(
                case.name().into(),
                json!({
                    "limsup": a.limsup,
                    "diameter": a.diameter,
                    "axis_length": a.axis_length,
                    "max_ratio_minus_bound": excess,
                }),
            );
        }
        out.results = results.into();
        Ok(out)
    }
}
