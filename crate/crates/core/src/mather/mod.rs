//! Mather's α and β functions, and exact tests of total irrationality.

mod alpha;
mod beta;
pub mod exact;
mod irrational;

use thiserror::Error;

pub use alpha::{
    alpha, alpha_subdifferential_width, conjugate_max, fenchel_young_min, write_alpha_csv,
    AlphaEvaluation, BetaTable, SampleGrid,
};
pub use beta::{
    beta, beta_rational, curve_action, rational_approximation, write_beta_csv, BetaEvaluation,
    BetaOptions, PeriodicCurve,
};
pub use exact::QuadraticSurd;
pub use irrational::{
    rationality_obstruction, totally_irrational_check, IrrationalVector, ObstructionWitness,
};

use crate::hamiltonian::HamiltonianError;

#[derive(Debug, Error, Clone)]
pub enum MatherError {
    #[error("action minimization stalled with gradient norm {gradient_norm}")]
    NotConverged { gradient_norm: f64 },
    #[error("conjugate maximizer for c = {c:?} lies on the boundary of the sample box")]
    BoxTooSmall { c: Vec<f64> },
    #[error("{0}")]
    InvalidInput(String),
    #[error(transparent)]
    Hamiltonian(#[from] HamiltonianError),
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ExactError {
    #[error("vectors are parallel")]
    NotIndependent,
    #[error("not applicable: {0}")]
    NotApplicable(String),
    #[error("vector {which} is not totally irrational")]
    NotTotallyIrrational { which: usize },
    #[error("expected {expected} components, got {got}")]
    Dimension { expected: usize, got: usize },
    #[error("coefficient rows must have one entry per basis element ({rows} rows, {basis} basis elements)")]
    Shape { rows: usize, basis: usize },
}

#[cfg(test)]
mod tests;
