use std::io::Write;

use serde::{Deserialize, Serialize};

use super::model::HamiltonianModel;
use super::HamiltonianError;
use crate::flow::{rk4_step, SampledLift};
use crate::scalar::Scalar;
use crate::torus::LiftedPoint;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Scheme {
    /// Störmer–Verlet (kick-drift-kick); separable models only.
    Verlet,
    Rk4,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IntegratorConfig<T> {
    pub scheme: Scheme,
    pub step: T,
    pub max_energy_drift: T,
    /// Keep every `sample_every`-th step (the final state is always kept).
    #[serde(default = "one")]
    pub sample_every: usize,
}

fn one() -> usize {
    1
}

impl<T: Scalar> IntegratorConfig<T> {
    pub fn new(scheme: Scheme, step: T, max_energy_drift: T) -> Self {
        IntegratorConfig {
            scheme,
            step,
            max_energy_drift,
            sample_every: 1,
        }
    }

    pub fn sampled(mut self, every: usize) -> Self {
        self.sample_every = every.max(1);
        self
    }
}

/// Point of T*𝕋ⁿ with the base point kept in the universal cover.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PhaseState<T> {
    pub x: LiftedPoint<T>,
    pub p: Vec<T>,
}

impl<T: Scalar> PhaseState<T> {
    pub fn new(x: Vec<T>, p: Vec<T>) -> Self {
        PhaseState {
            x: LiftedPoint(x),
            p,
        }
    }
}

/// Sampled orbit with per-sample energies.
#[derive(Debug, Clone, PartialEq)]
pub struct LiftedTrajectory<T> {
    pub times: Vec<T>,
    pub states: Vec<PhaseState<T>>,
    pub energy: Vec<T>,
    /// Largest drift observed over every step, sampled or not.
    pub max_drift: T,
}

impl<T: Scalar> SampledLift<T> for LiftedTrajectory<T> {
    fn times(&self) -> &[T] {
        &self.times
    }

    fn lift(&self, i: usize) -> &[T] {
        &self.states[i].x.0
    }
}

impl<T: Scalar> LiftedTrajectory<T> {
    /// CSV with columns `t, x1..xn, p1..pn, H`.
    pub fn write_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        let n = self.states.first().map_or(0, |s| s.p.len());
        let mut header = vec!["t".to_string()];
        header.extend((1..=n).map(|i| format!("x{i}")));
        header.extend((1..=n).map(|i| format!("p{i}")));
        header.push("H".into());
        writeln!(w, "{}", header.join(","))?;
        for ((t, s), h) in self.times.iter().zip(&self.states).zip(&self.energy) {
            let mut row = vec![t.to_string()];
            row.extend(s.x.0.iter().map(|v| v.to_string()));
            row.extend(s.p.iter().map(|v| v.to_string()));
            row.push(h.to_string());
            writeln!(w, "{}", row.join(","))?;
        }
        Ok(())
    }
}

/// Energy drift relative to `|H₀|`, absolute when `|H₀| ≤ 1e-12`.
pub fn energy_drift<T: Scalar>(h0: T, h: T) -> T {
    let d = (h - h0).abs();
    if h0.abs() > T::lit(1e-12) {
        d / h0.abs()
    } else {
        d
    }
}

/// Integrates Hamilton's equations `ẋ = ∂H/∂p`, `ṗ = −∂H/∂x` up to time
/// `horizon ≥ 0`.
pub fn integrate<T: Scalar>(
    model: &HamiltonianModel<T>,
    state0: &PhaseState<T>,
    horizon: T,
    config: &IntegratorConfig<T>,
) -> Result<LiftedTrajectory<T>, HamiltonianError> {
    let n = model.dim();
    if state0.x.0.len() != n || state0.p.len() != n {
        return Err(HamiltonianError::DimensionMismatch {
            expected: n,
            got: state0.x.0.len(),
        });
    }
    if !(config.step > T::zero() && config.step < T::lit(0.1)) {
        return Err(HamiltonianError::InvalidStep(config.step.as_f64()));
    }
    if !(horizon >= T::zero() && horizon.is_finite()) {
        return Err(HamiltonianError::InvalidHorizon(horizon.as_f64()));
    }
    if config.scheme == Scheme::Verlet && !model.is_separable() {
        return Err(HamiltonianError::SchemeUnsupported);
    }
    let steps = (horizon / config.step).ceil().to_usize().unwrap_or(0);
    let h = if steps == 0 {
        T::zero()
    } else {
        horizon / T::of_usize(steps)
    };
    let every = config.sample_every.max(1);

    let mut x = state0.x.0.clone();
    let mut p = state0.p.clone();
    let h0 = model.eval_h(&x, &p);
    let cap = steps / every + 2;
    let mut traj = LiftedTrajectory {
        times: Vec::with_capacity(cap),
        states: Vec::with_capacity(cap),
        energy: Vec::with_capacity(cap),
        max_drift: T::zero(),
    };
    traj.times.push(T::zero());
    traj.states.push(state0.clone());
    traj.energy.push(h0);

    let rhs = |y: &[T]| -> Vec<T> {
        let (gx, gp) = model.grad_h(&y[..n], &y[n..]);
        gp.into_iter().chain(gx.into_iter().map(|g| -g)).collect()
    };
    let half = h * T::lit(0.5);
    let mut force = if config.scheme == Scheme::Verlet {
        model.grad_h(&x, &p).0
    } else {
        Vec::new()
    };
    for k in 1..=steps {
        match config.scheme {
            Scheme::Verlet => {
                for (pi, f) in p.iter_mut().zip(&force) {
                    *pi -= half * *f;
                }
                let (_, v) = model.grad_h(&x, &p);
                for (xi, vi) in x.iter_mut().zip(&v) {
                    *xi += h * *vi;
                }
                force = model.grad_h(&x, &p).0;
                for (pi, f) in p.iter_mut().zip(&force) {
                    *pi -= half * *f;
                }
            }
            Scheme::Rk4 => {
                let mut y = x.clone();
                y.extend_from_slice(&p);
                let y = rk4_step(&rhs, &y, h);
                x.copy_from_slice(&y[..n]);
                p.copy_from_slice(&y[n..]);
            }
        }
        let e = model.eval_h(&x, &p);
        let t = h * T::of_usize(k);
        if !e.is_finite() || x.iter().chain(&p).any(|v| !v.is_finite()) {
            return Err(HamiltonianError::NonFinite { time: t.as_f64() });
        }
        let drift = energy_drift(h0, e);
        traj.max_drift = traj.max_drift.max(drift);
        if drift > config.max_energy_drift {
            return Err(HamiltonianError::EnergyDriftExceeded {
                time: t.as_f64(),
                drift: drift.as_f64(),
                limit: config.max_energy_drift.as_f64(),
            });
        }
        if k % every == 0 || k == steps {
            traj.times.push(t);
            traj.states.push(PhaseState::new(x.clone(), p.clone()));
            traj.energy.push(e);
        }
    }
    Ok(traj)
}
