use std::io::Write;

use rayon::prelude::*;
use rotlab_core::rotation::{
    find_periodic_point, mz_rotation_set, rational_interior_points, MapKind, PeriodicOrbitResult,
    RotationSet, TorusMapLift,
};
use serde::{Deserialize, Serialize};
use serde_json::json;

use super::{Context, Scenario, Validator};
use crate::config::Diagnostic;
use crate::report::{Check, Comparison, Outcome};
use crate::CliError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FranksParams {
    /// Shear amplitudes `(a, b)`, one map each.
    pub family: Vec<[f64; 2]>,
    pub contraction: f64,
    pub grid: usize,
    pub iterations: usize,
    pub margin: f64,
    pub max_denominator: i64,
    /// Interior points searched per map, in order of denominator.
    pub max_points: usize,
    pub tolerance: f64,
}

impl Default for FranksParams {
    fn default() -> Self {
        Self {
            family: vec![
                [0.5, 0.5],
                [0.5, 1.0],
                [1.0, 0.5],
                [1.0, 1.0],
                [1.0, 1.5],
                [1.5, 1.0],
                [1.5, 1.5],
                [2.0, 1.0],
                [1.0, 2.0],
                [2.0, 2.0],
            ],
            contraction: 0.03,
            grid: 32,
            iterations: 500,
            margin: 0.05,
            max_denominator: 2,
            max_points: 8,
            tolerance: 1e-10,
        }
    }
}

struct MapResult {
    a: f64,
    b: f64,
    hull: RotationSet<f64>,
    origin_margin: f64,
    searched: Vec<(([i64; 2], i64), PeriodicOrbitResult<f64>)>,
    interior_count: usize,
}

impl Scenario for FranksParams {
    fn validate(&self) -> Vec<Diagnostic> {
        let mut v = Validator::new();
        v.nonzero("grid", self.grid)
            .nonzero("iterations", self.iterations)
            .nonzero("max_points", self.max_points)
            .positive("margin", self.margin)
            .positive("tolerance", self.tolerance)
            .require(
                "family",
                !self.family.is_empty(),
                "family must be non-empty",
            )
            .require(
                "max_denominator",
                (1..=64).contains(&self.max_denominator),
                "max_denominator must lie in 1..=64",
            )
            .require(
                "contraction",
                (0.0..1.0 / (8.0 * std::f64::consts::PI)).contains(&self.contraction),
                "contraction must lie in [0, 1/(8π)) to keep the map invertible",
            );
        v.finish()
    }

    fn run(&self, _ctx: &Context) -> Result<Outcome, CliError> {
        let results: Vec<MapResult> = self
            .family
            .par_iter()
            .map(|&[a, b]| {
                let f = TorusMapLift::<f64>::from_kind(MapKind::TwoParamShear {
                    a,
                    b,
                    contraction: self.contraction,
                })
                .expect("built-in map");
                let hull = mz_rotation_set(&f, self.grid, self.iterations);
                let origin_margin = hull.signed_distance([0.0, 0.0]);
                let interior = rational_interior_points(&hull, self.max_denominator, self.margin);
                let searched = interior
                    .points
                    .iter()
                    .take(self.max_points)
                    .map(|&(p, q)| {
                        (
                            (p, q),
                            find_periodic_point(&f, p, q as usize, self.tolerance),
                        )
                    })
                    .collect();
                MapResult {
                    a,
                    b,
                    hull,
                    origin_margin,
                    searched,
                    interior_count: interior.points.len(),
                }
            })
            .collect();

        let mut out = Outcome::default();
        let mut maps = Vec::new();
        let mut polygons = Vec::new();
        for (i, r) in results.iter().enumerate() {
            // f64::MAX when no interior point was available
            let best = r
                .searched
                .iter()
                .map(|(_, s)| s.residual)
                .fold(f64::MAX, f64::min);
            out.checks.push(Check::new(
                format!("map{i}.origin_margin"),
                r.origin_margin,
                Comparison::Greater,
                self.margin,
            ));
            out.checks.push(Check::below(
                format!("map{i}.periodic_residual"),
                best,
                self.tolerance,
            ));
            maps.push(json!({
                "a": r.a,
                "b": r.b,
                "origin_margin": r.origin_margin,
                "area": r.hull.area(),
                "interior_points": r.interior_count,
                "orbits": r.searched.iter().map(|((p, q), s)| json!({
                    "p": p, "q": q, "found": s.found, "point": s.point, "residual": s.residual,
                })).collect::<Vec<_>>(),
            }));
            polygons.push(json!({ "a": r.a, "b": r.b, "vertices": r.hull.vertices }));
        }
        out.table("franks.csv", |w| {
            writeln!(w, "a,b,origin_margin,p1,p2,q,found,residual,x,y")?;
            for r in &results {
                for ((p, q), s) in &r.searched {
                    let x = s.point.coords();
                    writeln!(
                        w,
                        "{},{},{},{},{},{},{},{},{},{}",
                        r.a, r.b, r.origin_margin, p[0], p[1], q, s.found, s.residual, x[0], x[1]
                    )?;
                }
            }
            Ok(())
        })?;
        out.results = json!({ "maps": maps });
        out.polygons = Some(json!({ "family": polygons }));
        Ok(out)
    }
}
