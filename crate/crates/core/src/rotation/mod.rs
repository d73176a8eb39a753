//! Rotation sets of torus maps homotopic to the identity, periodic-point
//! searches, suspensions and first-return maps.

mod hedlund;
mod hull;
mod maps;
mod periodic;
mod suspension;

use thiserror::Error;

pub use hedlund::{hedlund_scenario_check, HedlundVerdict};
pub use hull::{
    convex_hull, displacement_averages, mz_rotation_set, rational_interior_points, InteriorPoints,
    RotationSet,
};
pub use maps::{check_equivariance, equivariance_defect, sample_grid, MapKind, TorusMapLift};
pub use periodic::{default_samples, find_periodic_point, PeriodicOrbitResult, NEWTON_SEEDS};
pub use suspension::{
    poincare_return_map, suspension_homology_set, transversality_margin, ReturnOptions,
    SuspensionFlow, SuspensionHomologySet,
};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum RotationError {
    #[error("flow is not transverse to the fibres (margin {margin})")]
    NotTransverse { margin: f64 },
    #[error("map is not equivariant under ℤ² translations (defect {defect})")]
    NotEquivariant { defect: f64 },
    #[error("return maps are defined for flows on 𝕋³ only")]
    DimensionMismatch,
}

#[cfg(test)]
mod tests;
