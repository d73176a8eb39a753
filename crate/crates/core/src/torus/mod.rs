//! Geometry of the flat torus 𝕋ⁿ = ℝⁿ/ℤⁿ: points and lifts, grid-sampled
//! Riemannian metrics, grid geodesic distances and stable norms, and the
//! metric constructions used to straighten flows.

mod constructions;
mod geodesic;
mod metric;
mod tischler;

pub use constructions::{
    geodesible_metric, geodesible_metric_where, geodesible_tensor, maupertuis_metric, OneForm,
};
pub use geodesic::{
    grid_geodesic_distance, stable_norm_integer, stable_norm_real, GeodesicGrid, Stencil,
};
pub use metric::{MetricField, PotentialGrid};
pub use tischler::{tischler_fibration, unimodular_completion, winding_numbers, TischlerFibration};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::scalar::{wrap_unit, Scalar};

#[derive(Debug, Error, Clone)]
pub enum GeometryError {
    #[error("lift step of {step} on axis {axis} at sample {index} is not below 1/2; trajectory undersampled")]
    StepTooLarge {
        index: usize,
        axis: usize,
        step: f64,
    },
    #[error("points span {span} fundamental domains on axis {axis}; window allows at most {max}")]
    OutOfWindow { axis: usize, span: f64, max: usize },
    #[error("metric matrix at node {node} is not symmetric positive definite")]
    NotPositiveDefinite { node: usize },
    #[error("one-form does not pair with the vector field at node {node} (β(X) = {value})")]
    DegeneratePairing { node: usize, value: f64 },
    #[error("energy {energy} is subcritical: e + V = {value} at node {node}")]
    SubcriticalEnergy {
        energy: f64,
        node: usize,
        value: f64,
    },
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("resolution mismatch: {0} vs {1}")]
    ResolutionMismatch(usize, usize),
    #[error("zero homology class has no closed geodesic")]
    ZeroClass,
    #[error("no rational approximation found with denominator up to {searched}")]
    ApproximationNotFound { searched: u64 },
    #[error("invalid metric file: {0}")]
    Format(String),
    #[error(transparent)]
    Io(std::sync::Arc<std::io::Error>),
}

impl From<std::io::Error> for GeometryError {
    fn from(e: std::io::Error) -> Self {
        GeometryError::Io(std::sync::Arc::new(e))
    }
}

/// Point of 𝕋ⁿ with coordinates in `[0,1)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TorusPoint<T>(Vec<T>);

impl<T: Scalar> TorusPoint<T> {
    /// Projects arbitrary real coordinates to the fundamental domain.
    pub fn new(coords: Vec<T>) -> Self {
        TorusPoint(coords.into_iter().map(wrap_unit).collect())
    }

    pub fn coords(&self) -> &[T] {
        &self.0
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn to_lift(&self) -> LiftedPoint<T> {
        LiftedPoint(self.0.clone())
    }
}

/// Point of the universal cover ℝⁿ.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LiftedPoint<T>(pub Vec<T>);

impl<T: Scalar> LiftedPoint<T> {
    pub fn project(&self) -> TorusPoint<T> {
        TorusPoint::new(self.0.clone())
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn translate(&self, k: &[i64]) -> Self {
        LiftedPoint(
            self.0
                .iter()
                .zip(k)
                .map(|(x, &m)| *x + T::of_i64(m))
                .collect(),
        )
    }

    pub fn displacement_to(&self, other: &Self) -> Vec<T> {
        other.0.iter().zip(&self.0).map(|(b, a)| *b - *a).collect()
    }
}

/// Signed difference `b − a` reduced to `[-1/2, 1/2)` per coordinate.
pub fn minimal_difference<T: Scalar>(a: T, b: T) -> T {
    let d = b - a;
    d - d.round()
}

/// Continuous lift of a time-ordered sequence of torus points.
pub fn lift_unwrap<T: Scalar>(
    points: &[TorusPoint<T>],
) -> Result<Vec<LiftedPoint<T>>, GeometryError> {
    let mut out: Vec<LiftedPoint<T>> = Vec::with_capacity(points.len());
    let half = T::lit(0.5);
    for (idx, p) in points.iter().enumerate() {
        match out.last() {
            None => out.push(p.to_lift()),
            Some(prev) => {
                let n = prev.dim();
                if p.dim() != n {
                    return Err(GeometryError::DimensionMismatch {
                        expected: n,
                        got: p.dim(),
                    });
                }
                let mut next = Vec::with_capacity(n);
                for axis in 0..n {
                    let a = wrap_unit(prev.0[axis]);
                    let raw = p.0[axis] - a;
                    let step = raw - raw.round();
                    if step.abs() >= half {
                        return Err(GeometryError::StepTooLarge {
                            index: idx,
                            axis,
                            step: step.abs().as_f64(),
                        });
                    }
                    next.push(prev.0[axis] + step);
                }
                out.push(LiftedPoint(next));
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constant_sequence_has_constant_lift() {
        let pts = vec![TorusPoint::new(vec![0.3, 0.7]); 5];
        let lift = lift_unwrap(&pts).unwrap();
        assert!(lift.iter().all(|l| l.0 == vec![0.3, 0.7]));
    }

    #[test]
    fn winding_is_tracked() {
        let pts: Vec<_> = [0.8, 0.9, 0.0, 0.1]
            .iter()
            .map(|&x| TorusPoint::new(vec![x]))
            .collect();
        let lift = lift_unwrap(&pts).unwrap();
        let got: Vec<f64> = lift.iter().map(|l| l.0[0]).collect();
        for (g, e) in got.iter().zip([0.8, 0.9, 1.0, 1.1]) {
            assert!((g - e).abs() < 1e-12);
        }
    }

    #[test]
    fn linear_flow_lift_displacement() {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let pts: Vec<_> = (0..=1000)
            .map(|i| {
                let t = i as f64 * 0.01;
                TorusPoint::new(vec![t * s, t * s])
            })
            .collect();
        let lift = lift_unwrap(&pts).unwrap();
        let d = lift[0].displacement_to(lift.last().unwrap());
        for x in d {
            assert!((x - 10.0 * s).abs() < 1e-9);
        }
    }

    #[test]
    fn undersampled_is_rejected() {
        let pts = vec![TorusPoint::new(vec![0.0]), TorusPoint::new(vec![0.5])];
        assert!(matches!(
            lift_unwrap(&pts),
            Err(GeometryError::StepTooLarge { .. })
        ));
    }

    #[test]
    fn projection_roundtrip() {
        let l = LiftedPoint(vec![2.25, -0.5]);
        assert_eq!(l.project().coords(), &[0.25, 0.5]);
    }
}
