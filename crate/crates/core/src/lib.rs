//! Numerical laboratory for asymptotic homology on tori.
//!
//! The crate is generic over the floating scalar ([`Scalar`], implemented
//! for `f32` and `f64`); exact computations run over [`num_rational`]
//! rationals and multi-quadratic number fields. Aliases for the common
//! `f64` instantiations live at the crate root.

pub mod asymptotic;
pub mod flow;
pub mod hamiltonian;
pub mod homology;
pub mod linalg;
pub mod mather;
pub mod rotation;
pub mod scalar;
pub mod torus;

pub use scalar::Scalar;

pub type RealHomologyVector = homology::HomologyVector<f64>;
pub type Cone = homology::ConeSpec<f64>;
pub type Metric = torus::MetricField<f64>;
