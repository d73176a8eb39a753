use serde::{Deserialize, Serialize};

use super::hull::{rational_interior_points, InteriorPoints, RotationSet};
use super::maps::TorusMapLift;
use super::periodic::{find_periodic_point, PeriodicOrbitResult};
use crate::linalg;
use crate::scalar::Scalar;

/// Outcome of [`hedlund_scenario_check`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum HedlundVerdict<T> {
    /// The three suspension rotation vectors are independent, so their
    /// fibre parts span a triangle with interior; the rational interior
    /// points were searched for periodic orbits.
    IndependentImpliesPeriodicSearch {
        det: T,
        interior: InteriorPoints,
        results: Vec<PeriodicOrbitResult<T>>,
    },
    Degenerate {
        det: T,
    },
}

/// Independence test on three measured suspension homologies `(1, σᵢ)`.
/// When independent, every rational point of the σ-triangle with
/// denominator at most `max_denominator` (and margin `margin`) is searched
/// with `map`, if given.
pub fn hedlund_scenario_check<T: Scalar>(
    vectors: &[[T; 3]; 3],
    map: Option<&TorusMapLift<T>>,
    max_denominator: i64,
    margin: T,
) -> HedlundVerdict<T> {
    let m: Vec<Vec<T>> = vectors.iter().map(|v| v.to_vec()).collect();
    let det = linalg::det(&m);
    if det.abs() <= T::lit(1e-6) || vectors.iter().any(|v| v[0].abs() <= T::lit(1e-12)) {
        return HedlundVerdict::Degenerate { det };
    }
    let sigma: Vec<[T; 2]> = vectors.iter().map(|v| [v[1] / v[0], v[2] / v[0]]).collect();
    let triangle = RotationSet::from_points(&sigma, 3, 0);
    let interior = rational_interior_points(&triangle, max_denominator, margin);
    let results = match map {
        Some(f) => interior
            .points
            .iter()
            .filter(|(_, q)| *q <= 64)
            .map(|(p, q)| find_periodic_point(f, *p, *q as usize, T::lit(1e-10)))
            .collect(),
        None => Vec::new(),
    };
    HedlundVerdict::IndependentImpliesPeriodicSearch {
        det,
        interior,
        results,
    }
}
