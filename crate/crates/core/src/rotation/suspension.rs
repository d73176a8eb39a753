use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::hull::{mz_rotation_set, RotationSet};
use super::maps::TorusMapLift;
use super::RotationError;
use crate::flow::LiftedFlow;
use crate::linalg;
use crate::scalar::Scalar;
use crate::torus::{unimodular_completion, TischlerFibration};

/// Suspension of a torus map on 𝕋³ with coordinates `(s, x, y)`.
///
/// Within a period the fibre point moves along the straight-line isotopy
/// `w + θ(F(w) − w)`, `θ = s − ⌊s⌋`, from the point `w` at the last integer
/// crossing; at integer `s` it equals `Fᵏ` of the starting point.
#[derive(Debug, Clone)]
pub struct SuspensionFlow<T> {
    map: TorusMapLift<T>,
}

impl<T: Scalar> SuspensionFlow<T> {
    pub fn new(map: TorusMapLift<T>) -> Self {
        SuspensionFlow { map }
    }

    pub fn map(&self) -> &TorusMapLift<T> {
        &self.map
    }

    fn isotopy(&self, w: [T; 2], theta: T) -> [T; 2] {
        let f = self.map.apply(w);
        [w[0] + theta * (f[0] - w[0]), w[1] + theta * (f[1] - w[1])]
    }

    /// Recovers the fibre point at the last integer crossing.
    fn unwind(&self, z: [T; 2], theta: T) -> [T; 2] {
        if theta.is_zero() {
            return z;
        }
        // fixed point of w = z − θ(F(w) − w)
        let mut w = z;
        for _ in 0..200 {
            let f = self.map.apply(w);
            let next = [z[0] - theta * (f[0] - w[0]), z[1] - theta * (f[1] - w[1])];
            let d = (next[0] - w[0]).abs().max((next[1] - w[1]).abs());
            w = next;
            if d <= T::epsilon() * T::lit(4.0) * (T::one() + z[0].abs().max(z[1].abs())) {
                break;
            }
        }
        w
    }
}

impl<T: Scalar> LiftedFlow<T> for SuspensionFlow<T> {
    fn dim(&self) -> usize {
        3
    }

    fn velocity(&self, x: &[T]) -> Vec<T> {
        let theta = x[0] - x[0].floor();
        let w = self.unwind([x[1], x[2]], theta);
        let f = self.map.apply(w);
        vec![T::one(), f[0] - w[0], f[1] - w[1]]
    }

    fn advance(&self, x: &[T], t: T) -> Vec<T> {
        let k0 = x[0].floor();
        let theta = x[0] - k0;
        let mut w = self.unwind([x[1], x[2]], theta);
        let s = x[0] + t;
        let k1 = s.floor();
        let crossings = (k1 - k0).to_i64().unwrap_or(0);
        if crossings >= 0 {
            for _ in 0..crossings {
                w = self.map.apply(w);
            }
        } else {
            for _ in 0..(-crossings) {
                w = self.map.inverse_apply(w).unwrap_or(w);
            }
        }
        let z = self.isotopy(w, s - k1);
        vec![s, z[0], z[1]]
    }
}

/// Predicted homology set of a suspension per unit period:
/// `{(1, σ) : σ ∈ ρ(F)}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuspensionHomologySet<T> {
    pub fibre_class: [i64; 3],
    pub sigma: RotationSet<T>,
}

pub fn suspension_homology_set<T: Scalar>(
    f: &TorusMapLift<T>,
    g: usize,
    n_iter: usize,
) -> SuspensionHomologySet<T> {
    SuspensionHomologySet {
        fibre_class: [1, 0, 0],
        sigma: mz_rotation_set(f, g, n_iter),
    }
}

/// First-return options for [`poincare_return_map`].
#[derive(Debug, Clone, Copy)]
pub struct ReturnOptions<T> {
    /// Coarse time step used to bracket the crossing.
    pub bracket_step: T,
    /// Bisection tolerance on the crossing time.
    pub time_tol: T,
    /// Give up after this flow time without a return.
    pub max_time: T,
    /// Samples per axis of the transversality check.
    pub check_per_axis: usize,
}

impl<T: Scalar> Default for ReturnOptions<T> {
    fn default() -> Self {
        ReturnOptions {
            bracket_step: T::lit(0.05),
            time_tol: T::lit(1e-10),
            max_time: T::lit(100.0),
            check_per_axis: 8,
        }
    }
}

/// Minimum of `⟨n, v/|v|⟩` with `n = p/|p|` over a grid of 𝕋³; positive
/// values mean the flow crosses the fibres of `x ↦ ⟨p, x⟩` forward.
pub fn transversality_margin<T: Scalar, F: LiftedFlow<T> + ?Sized>(
    flow: &F,
    p: &[i64],
    per_axis: usize,
) -> T {
    let n = flow.dim();
    let pn: Vec<T> = p.iter().map(|&c| T::of_i64(c)).collect();
    let pl = linalg::norm2(&pn);
    let mut worst = T::infinity();
    for code in 0..per_axis.pow(n as u32) {
        let mut c = code;
        let x: Vec<T> = (0..n)
            .map(|_| {
                let i = c % per_axis;
                c /= per_axis;
                (T::of_usize(i) + T::lit(0.5)) / T::of_usize(per_axis)
            })
            .collect();
        let v = flow.velocity(&x);
        let vl = linalg::norm2(&v);
        worst = worst.min(linalg::dot(&pn, &v) / (pl * vl));
    }
    worst
}

/// First-return map of a flow on 𝕋³ to the fibre `⟨p, x⟩ ∈ ℤ` of a
/// Tischler fibration, in coordinates `u = Mx` where `M` is a unimodular
/// completion of `p`.
pub fn poincare_return_map<T: Scalar, F: LiftedFlow<T> + 'static>(
    flow: Arc<F>,
    fibration: &TischlerFibration,
    opts: ReturnOptions<T>,
) -> Result<TorusMapLift<T>, RotationError> {
    if flow.dim() != 3 || fibration.primitive.len() != 3 {
        return Err(RotationError::DimensionMismatch);
    }
    let forward = transversality_margin(&*flow, &fibration.primitive, opts.check_per_axis);
    let reversed: Vec<i64> = fibration.primitive.iter().map(|c| -c).collect();
    let backward = transversality_margin(&*flow, &reversed, opts.check_per_axis);
    let threshold = T::lit(0.1);
    let (p, margin) = if forward > threshold {
        (fibration.primitive.clone(), forward)
    } else if backward > threshold {
        (reversed, backward)
    } else {
        return Err(RotationError::NotTransverse {
            margin: forward.max(backward).as_f64(),
        });
    };
    let m = unimodular_completion(&p).ok_or(RotationError::NotTransverse {
        margin: margin.as_f64(),
    })?;
    let to_t = |rows: &Vec<Vec<i64>>| -> Vec<Vec<T>> {
        rows.iter()
            .map(|r| r.iter().map(|&c| T::of_i64(c)).collect())
            .collect()
    };
    let mt = to_t(&m);
    let minv = linalg::inverse(&mt).expect("unimodular");
    let label = format!("return map of fibration {:?}", p);
    Ok(TorusMapLift::custom(label, move |uv: [T; 2]| {
        let x0 = linalg::mat_vec(&minv, &[T::zero(), uv[0], uv[1]]);
        let level = |x: &[T]| linalg::dot(&mt[0], x);
        let mut t = T::zero();
        let mut x = x0.clone();
        // bracket the first time the level reaches 1
        loop {
            let next = flow.advance(&x, opts.bracket_step);
            if level(&next) >= T::one() || t + opts.bracket_step > opts.max_time {
                break;
            }
            x = next;
            t += opts.bracket_step;
        }
        let (mut a, mut b) = (T::zero(), opts.bracket_step);
        let base = x.clone();
        while b - a > opts.time_tol {
            let mid = (a + b) * T::lit(0.5);
            if level(&flow.advance(&base, mid)) >= T::one() {
                b = mid;
            } else {
                a = mid;
            }
        }
        let end = flow.advance(&base, b);
        let u = linalg::mat_vec(&mt, &end);
        [u[1], u[2]]
    }))
}
