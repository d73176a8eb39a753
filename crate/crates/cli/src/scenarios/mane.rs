use std::io::Write;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use rotlab_core::asymptotic::cluster_vectors;
use rotlab_core::flow::{FieldFlow, LiftedFlow};
use rotlab_core::hamiltonian::{mane_example_field, mane_zero_section_orbits};
use rotlab_core::homology::{minimal_slope, HomologyVector, NormModel, SlopeBound};
use serde::{Deserialize, Serialize};
use serde_json::json;

use super::{Context, Scenario, Validator};
use crate::config::Diagnostic;
use crate::report::{Check, Outcome};
use crate::CliError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ManeParams {
    /// Random starting points on the zero section.
    pub starts: usize,
    pub horizon: f64,
    /// RK4 step of the zero-section flow.
    pub step: f64,
    pub cluster_radius: f64,
    pub tolerance: f64,
}

impl Default for ManeParams {
    fn default() -> Self {
        Self {
            starts: 100,
            horizon: 1e4,
            step: 0.05,
            cluster_radius: 0.05,
            tolerance: 1e-2,
        }
    }
}

fn field(x: &[f64]) -> Vec<f64> {
    mane_example_field(x)
}

impl Scenario for ManeParams {
    fn validate(&self) -> Vec<Diagnostic> {
        let mut v = Validator::new();
        v.nonzero("starts", self.starts)
            .positive("horizon", self.horizon)
            .positive("step", self.step)
            .positive("cluster_radius", self.cluster_radius)
            .positive("tolerance", self.tolerance);
        v.finish()
    }

    fn run(&self, ctx: &Context) -> Result<Outcome, CliError> {
        let orbits = mane_zero_section_orbits::<f64>().map_err(CliError::scenario)?;
        let classes_exact =
            orbits.len() == 2 && orbits[0].class.0 == [0, 1] && orbits[1].class.0 == [0, -1];

        let mut rng = ChaCha8Rng::seed_from_u64(ctx.seed);
        let starts: Vec<Vec<f64>> = (0..self.starts)
            .map(|_| vec![rng.gen::<f64>(), rng.gen::<f64>()])
            .collect();
        let flow = FieldFlow::new(2, self.step, field as fn(&[f64]) -> Vec<f64>);
        let horizon = self.horizon;
        let rotation: Vec<Vec<f64>> = starts
            .par_iter()
            .map(|x| {
                let y = flow.advance(x, horizon);
                y.iter().zip(x).map(|(a, b)| (a - b) / horizon).collect()
            })
            .collect();
        let worst = rotation
            .iter()
            .map(|r| r[0].abs().max((r[1] - 1.0).abs()))
            .fold(0.0f64, f64::max);

        // accumulation set: forward estimates and the closed orbits
        let mut vectors = rotation.clone();
        vectors.extend(
            orbits
                .iter()
                .map(|o| o.class.0.iter().map(|k| *k as f64 / o.period).collect()),
        );
        let clusters = cluster_vectors(&vectors, self.cluster_radius);
        let centers: Vec<HomologyVector<f64>> = clusters
            .iter()
            .map(|c| HomologyVector(c.center.clone()))
            .collect();
        let mut slopes = Vec::new();
        for axis in [[0.0, 1.0], [1.0, 0.0], [0.0, -1.0]] {
            let complement = vec![HomologyVector(vec![-axis[1], axis[0]])];
            let s = minimal_slope(
                &HomologyVector(axis.to_vec()),
                &complement,
                &NormModel::Euclidean,
                &centers,
            )
            .map_err(CliError::scenario)?;
            slopes.push(json!({ "axis": axis, "slope": s }));
        }
        let axis_up = minimal_slope(
            &HomologyVector(vec![0.0, 1.0]),
            &[HomologyVector(vec![1.0, 0.0])],
            &NormModel::Euclidean,
            &centers,
        )
        .map_err(CliError::scenario)?;

        let mut out = Outcome {
            results: json!({
                "closed_orbits": orbits.iter().map(|o| json!({
                    "start": o.start, "period": o.period, "class": o.class, "residual": o.residual,
                })).collect::<Vec<_>>(),
                "max_rotation_error": worst,
                "clusters": clusters,
                "minimal_slope": slopes,
            }),
            checks: vec![
                Check::holds("closed_orbit_classes", classes_exact),
                Check::below("forward_rotation_error", worst, self.tolerance),
                Check::holds("minimal_slope_not_proper", axis_up == SlopeBound::NotProper),
            ],
            ..Outcome::default()
        };
        out.table("mane_rotation.csv", |w| {
            writeln!(w, "x1,x2,rho1,rho2")?;
            for (s, r) in starts.iter().zip(&rotation) {
                writeln!(w, "{},{},{},{}", s[0], s[1], r[0], r[1])?;
            }
            Ok(())
        })?;
        Ok(out)
    }
}
