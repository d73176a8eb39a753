use rotlab_core::rotation::{
    check_equivariance, equivariance_defect, mz_rotation_set, sample_grid, MapKind, TorusMapLift,
};
use serde::{Deserialize, Serialize};
use serde_json::json;

use super::{Context, Scenario, Validator};
use crate::config::Diagnostic;
use crate::report::{Check, Outcome};
use crate::CliError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RotationSetParams {
    pub map: MapKind,
    pub grid: usize,
    pub iterations: usize,
    /// Denser, deeper sampling used as the refinement oracle.
    pub refine_grid: usize,
    pub refine_iterations: usize,
    pub conjugation: [[i64; 2]; 2],
    /// Translation whose hull must collapse to a point.
    pub translation: [f64; 2],
    pub refinement_tolerance: f64,
    pub conjugation_tolerance: f64,
    pub collapse_tolerance: f64,
}

impl Default for RotationSetParams {
    fn default() -> Self {
        Self {
            map: MapKind::SimultaneousShear {
                shift: [0.1, 0.1],
                amplitude: [0.1, 0.1],
            },
            grid: 64,
            iterations: 2000,
            refine_grid: 128,
            refine_iterations: 4000,
            conjugation: [[2, 1], [1, 1]],
            translation: [0.3, (5f64.sqrt() - 1.0) / 2.0],
            refinement_tolerance: 0.02,
            conjugation_tolerance: 1e-6,
            collapse_tolerance: 1e-6,
        }
    }
}

fn diameter(v: &[[f64; 2]]) -> f64 {
    v.iter()
        .flat_map(|a| {
            v.iter()
                .map(move |b| ((a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2)).sqrt())
        })
        .fold(0.0, f64::max)
}

impl Scenario for RotationSetParams {
    fn validate(&self) -> Vec<Diagnostic> {
        let mut v = Validator::new();
        v.nonzero("grid", self.grid)
            .nonzero("iterations", self.iterations)
            .nonzero("refine_grid", self.refine_grid)
            .nonzero("refine_iterations", self.refine_iterations)
            .positive("refinement_tolerance", self.refinement_tolerance)
            .positive("conjugation_tolerance", self.conjugation_tolerance)
            .positive("collapse_tolerance", self.collapse_tolerance);
        let c = self.conjugation;
        v.require(
            "conjugation",
            (c[0][0] * c[1][1] - c[0][1] * c[1][0]).abs() == 1,
            "conjugation must be unimodular",
        );
        v.require(
            "map",
            !matches!(self.map, MapKind::Custom { .. }),
            "custom maps have no evaluator in a configuration file",
        );
        v.finish()
    }

    fn run(&self, _ctx: &Context) -> Result<Outcome, CliError> {
        let f = TorusMapLift::<f64>::from_kind(self.map.clone())
            .ok_or_else(|| CliError::Scenario("map has no built-in evaluator".into()))?;
        let samples = sample_grid::<f64>(10);
        if !check_equivariance(&f, &samples) {
            return Err(CliError::Scenario(format!(
                "map is not homotopic to the identity (equivariance defect {})",
                equivariance_defect(&f, &samples)
            )));
        }
        let hull = mz_rotation_set(&f, self.grid, self.iterations);
        let refined = mz_rotation_set(&f, self.refine_grid, self.refine_iterations);
        let refinement_gap = hull.hausdorff(&refined);

        let a = self.conjugation;
        let g = f
            .conjugate(a)
            .ok_or_else(|| CliError::Scenario("conjugation is not invertible".into()))?;
        let conj = mz_rotation_set(&g, self.grid, self.iterations);
        let af = [
            [a[0][0] as f64, a[0][1] as f64],
            [a[1][0] as f64, a[1][1] as f64],
        ];
        let expected = hull.transform(af);
        let conjugation_gap = conj.hausdorff(&expected);

        let t = TorusMapLift::<f64>::translation(self.translation);
        let point = mz_rotation_set(&t, self.grid, self.iterations);
        let collapse = diameter(&point.vertices);
        let offset = point
            .vertices
            .iter()
            .map(|v| {
                (v[0] - self.translation[0])
                    .abs()
                    .max((v[1] - self.translation[1]).abs())
            })
            .fold(0.0, f64::max);

        Ok(Outcome {
            results: json!({
                "area": hull.area(),
                "vertices": hull.vertices.len(),
                "refinement_hausdorff": refinement_gap,
                "conjugation_hausdorff": conjugation_gap,
                "translation_diameter": collapse,
                "translation_offset": offset,
            }),
            checks: vec![
                Check::below(
                    "translation_collapse",
                    collapse.max(offset),
                    self.collapse_tolerance,
                ),
                Check::below(
                    "refinement_hausdorff",
                    refinement_gap,
                    self.refinement_tolerance,
                ),
                Check::below(
                    "conjugation_hausdorff",
                    conjugation_gap,
                    self.conjugation_tolerance,
                ),
            ],
            polygons: Some(json!({
                "map": hull.to_json(),
                "refinement": refined.to_json(),
                "conjugated": conj.to_json(),
                "conjugated_expected": expected.to_json(),
                "translation": point.to_json(),
            })),
            ..Outcome::default()
        })
    }
}
