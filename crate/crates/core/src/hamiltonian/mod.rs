//! Tonelli Hamiltonians on T*𝕋ⁿ: mechanical and Mañé models, Legendre
//! duality and lift-tracked integration of Hamilton's equations.

mod fourier;
mod integrate;
mod model;
mod spec;

use thiserror::Error;

pub use fourier::{FourierSeries, FourierTerm};
pub use integrate::{
    energy_drift, integrate, IntegratorConfig, LiftedTrajectory, PhaseState, Scheme,
};
pub use model::{
    critical_value_mechanical, mane_example_field, CustomHamiltonian, HamiltonianModel,
    MetricModel, ModelKind, Potential,
};
pub use spec::{InlineMetric, MetricSpec, ModelSpec, PotentialSpec};

use crate::homology::IntHomologyClass;
use crate::scalar::Scalar;
use crate::torus::GeometryError;

#[derive(Debug, Error, Clone)]
pub enum HamiltonianError {
    #[error("Newton iteration for the Legendre transform diverged after {iterations} iterations (residual {residual})")]
    NewtonDiverged { iterations: usize, residual: f64 },
    #[error("energy drift {drift} exceeds {limit} at t = {time}")]
    EnergyDriftExceeded { time: f64, drift: f64, limit: f64 },
    #[error("integration step {0} must lie in (0, 0.1)")]
    InvalidStep(f64),
    #[error("horizon {0} must be finite and non-negative")]
    InvalidHorizon(f64),
    #[error("verlet requires a separable model with constant metric")]
    SchemeUnsupported,
    #[error("Hamiltonian is not fibrewise strictly convex")]
    NotConvex,
    #[error("non-finite state at t = {time}")]
    NonFinite { time: f64 },
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("invalid model specification: {0}")]
    Spec(String),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
}

/// Closed orbit of a model, verified by integration over one period.
#[derive(Debug, Clone, PartialEq)]
pub struct ClosedOrbit<T> {
    pub start: Vec<T>,
    pub period: T,
    pub class: IntHomologyClass,
    /// `|x̃(period) − x̃(0) − class|∞`.
    pub residual: T,
}

/// The two closed orbits of the Mañé example on the zero section: the
/// circles `x₁ = 1/4` (class `(0,1)`) and `x₁ = 3/4` (class `(0,−1)`).
pub fn mane_zero_section_orbits<T: Scalar>() -> Result<Vec<ClosedOrbit<T>>, HamiltonianError> {
    let model = HamiltonianModel::<T>::mane_example();
    let config = IntegratorConfig::new(Scheme::Rk4, T::lit(1e-3), T::lit(1e-8)).sampled(usize::MAX);
    [(T::lit(0.25), 1i64), (T::lit(0.75), -1i64)]
        .into_iter()
        .map(|(x1, dir)| {
            let start = vec![x1, T::zero()];
            let traj = integrate(
                &model,
                &PhaseState::new(start.clone(), vec![T::zero(); 2]),
                T::one(),
                &config,
            )?;
            let end = &traj.states.last().expect("non-empty").x.0;
            let class = IntHomologyClass::new(vec![0, dir]);
            let residual = end
                .iter()
                .zip(&start)
                .zip(&class.0)
                .fold(T::zero(), |m, ((e, s), k)| {
                    m.max((*e - *s - T::of_i64(*k)).abs())
                });
            Ok(ClosedOrbit {
                start,
                period: T::one(),
                class,
                residual,
            })
        })
        .collect()
}
