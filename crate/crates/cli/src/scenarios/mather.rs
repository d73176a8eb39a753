use rotlab_core::hamiltonian::{
    critical_value_mechanical, InlineMetric, MetricSpec, ModelKind, ModelSpec, PotentialSpec,
};
use rotlab_core::mather::{
    alpha, alpha_subdifferential_width, fenchel_young_min, write_alpha_csv, AlphaEvaluation,
    BetaOptions, BetaTable, SampleGrid,
};
use serde::{Deserialize, Serialize};
use serde_json::json;

use super::{Context, Scenario, Validator};
use crate::config::Diagnostic;
use crate::report::{Check, Comparison, Outcome};
use crate::CliError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MatherParams {
    pub model: ModelSpec,
    pub h_half_width: f64,
    pub h_per_axis: usize,
    pub c_half_width: f64,
    pub c_per_axis: usize,
    /// Curve nodes per unit period.
    pub nodes: usize,
    pub seeds: usize,
    pub q_max: i64,
    /// Probe radius of the subdifferential width at `c = 0`.
    pub width_delta: f64,
    /// Grid resolution for the minimum of the potential.
    pub potential_resolution: usize,
    pub beta_tolerance: f64,
    pub alpha_tolerance: f64,
    pub fenchel_tolerance: f64,
}

impl Default for MatherParams {
    fn default() -> Self {
        Self {
            model: ModelSpec::Mechanical {
                dimension: Some(2),
                metric: MetricSpec::Inline(InlineMetric::Flat),
                potential: PotentialSpec::Zero,
            },
            h_half_width: 2.0,
            h_per_axis: 9,
            c_half_width: 1.0,
            c_per_axis: 9,
            nodes: 32,
            seeds: 3,
            q_max: 8,
            width_delta: 0.05,
            potential_resolution: 128,
            beta_tolerance: 1e-3,
            alpha_tolerance: 2e-3,
            fenchel_tolerance: 1e-6,
        }
    }
}

impl MatherParams {
    fn is_flat(&self) -> bool {
        match &self.model {
            ModelSpec::Mechanical {
                metric, potential, ..
            } => {
                let flat_metric = match metric {
                    MetricSpec::Inline(InlineMetric::Flat) => true,
                    MetricSpec::Inline(InlineMetric::Constant(g)) => {
                        g.iter().enumerate().all(|(i, r)| {
                            r.iter()
                                .enumerate()
                                .all(|(j, v)| *v == if i == j { 1.0 } else { 0.0 })
                        })
                    }
                    _ => false,
                };
                flat_metric && *potential == PotentialSpec::Zero
            }
            ModelSpec::Mane { .. } => false,
        }
    }
}

fn half_square(v: &[f64]) -> f64 {
    0.5 * v.iter().map(|x| x * x).sum::<f64>()
}

impl Scenario for MatherParams {
    fn validate(&self) -> Vec<Diagnostic> {
        let mut v = Validator::new();
        v.positive("h_half_width", self.h_half_width)
            .nonzero("h_per_axis", self.h_per_axis)
            .nonzero("c_per_axis", self.c_per_axis)
            .nonzero("seeds", self.seeds)
            .nonzero("potential_resolution", self.potential_resolution)
            .positive("width_delta", self.width_delta)
            .positive("beta_tolerance", self.beta_tolerance)
            .positive("alpha_tolerance", self.alpha_tolerance)
            .positive("fenchel_tolerance", self.fenchel_tolerance)
            .require(
                "c_half_width",
                self.c_half_width >= 0.0,
                "c_half_width must be non-negative",
            )
            .require("nodes", self.nodes >= 16, "nodes must be at least 16")
            .require("q_max", self.q_max >= 1, "q_max must be positive")
            .require(
                "h_per_axis",
                self.h_per_axis >= 3,
                "h_per_axis must be at least 3",
            );
        v.finish()
    }

    fn run(&self, ctx: &Context) -> Result<Outcome, CliError> {
        let model = self
            .model
            .build(&ctx.base_dir)
            .map_err(CliError::scenario)?;
        let dim = model.dim();
        let opts = BetaOptions {
            nodes: self.nodes,
            seeds: self.seeds,
            q_max: self.q_max,
            ..BetaOptions::default()
        };
        let mut table = BetaTable::from_model(model.clone(), opts);
        let hgrid = SampleGrid::cube(dim, self.h_half_width, self.h_per_axis);
        let hpoints = hgrid.points();
        table.prefill(&hpoints).map_err(CliError::scenario)?;

        let mut alphas: Vec<AlphaEvaluation<f64>> = Vec::new();
        let mut failures = Vec::new();
        for c in SampleGrid::cube(dim, self.c_half_width, self.c_per_axis).points() {
            match alpha(&mut table, &hgrid, &c) {
                Ok(a) => alphas.push(a),
                Err(e) => failures.push(json!({ "c": c, "error": e.to_string() })),
            }
        }
        let zero = vec![0.0; dim];
        let alpha0 = alpha(&mut table, &hgrid, &zero).map_err(CliError::scenario)?;
        let directions: Vec<Vec<f64>> = (0..dim)
            .map(|i| (0..dim).map(|j| if i == j { 1.0 } else { 0.0 }).collect())
            .collect();
        let width = alpha_subdifferential_width(
            |c| alpha(&mut table, &hgrid, c).map(|a| a.value),
            &zero,
            &directions,
            self.width_delta,
        )
        .map_err(CliError::scenario)?;

        let samples = table.samples();
        let fy = fenchel_young_min(&alphas, &samples);
        let mut checks = vec![
            Check::holds("alpha_evaluations_complete", failures.is_empty()),
            Check::holds(
                "alpha_refinement_converged",
                alphas.iter().all(|a| a.converged),
            ),
            Check::new(
                "fenchel_young_min",
                fy,
                Comparison::AtLeast,
                -self.fenchel_tolerance,
            ),
        ];
        let mut results = json!({
            "alpha_at_zero": alpha0.value,
            "subdifferential_width_at_zero": width,
            "fenchel_young_min": fy,
            "beta_evaluations": samples.len(),
            "alpha_failures": failures,
        });
        if self.is_flat() {
            let beta_err = hpoints
                .iter()
                .map(|h| table.get(h).map(|b| (b - half_square(h)).abs()))
                .collect::<Result<Vec<f64>, _>>()
                .map_err(CliError::scenario)?
                .into_iter()
                .fold(0.0, f64::max);
            let alpha_err = alphas
                .iter()
                .map(|a| (a.value - half_square(&a.c)).abs())
                .fold(0.0, f64::max);
            checks.push(Check::below(
                "flat_beta_error",
                beta_err,
                self.beta_tolerance,
            ));
            checks.push(Check::below(
                "flat_alpha_error",
                alpha_err,
                self.alpha_tolerance,
            ));
            results["flat_beta_error"] = json!(beta_err);
            results["flat_alpha_error"] = json!(alpha_err);
        }
        if let ModelKind::Mechanical { potential, .. } = model.kind() {
            let critical =
                critical_value_mechanical(&potential.to_grid(dim, self.potential_resolution));
            checks.push(Check::below(
                "alpha_zero_minus_critical_value",
                (alpha0.value - critical).abs(),
                self.alpha_tolerance,
            ));
            results["critical_value"] = json!(critical);
        }
        let mut out = Outcome {
            results,
            checks,
            ..Outcome::default()
        };
        out.table("beta.csv", |w| table.write_csv(w))?;
        out.table("alpha.csv", |w| write_alpha_csv(&alphas, w))?;
        Ok(out)
    }
}
