//! Asymptotic homology of orbits: rotation vectors, closed quasi-orbits and
//! the empirical cone-slope audit.

use std::io::Write;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::flow::{LiftedFlow, SampledLift};
use crate::homology::IntHomologyClass;
use crate::linalg;
use crate::scalar::Scalar;
use crate::torus::{GeodesicGrid, GeometryError, TorusPoint};

#[derive(Debug, Error, Clone)]
pub enum AsymptoticError {
    #[error("horizon {horizon} outside the sampled range [0, {max}]")]
    HorizonOutOfRange { horizon: f64, max: f64 },
    #[error("trajectory is empty")]
    Empty,
    #[error(transparent)]
    Geometry(#[from] GeometryError),
}

/// Rotation vector `(x̃(T) − x̃(0))/T` with a dyadic Cauchy gap.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RotationEstimate<T> {
    pub value: Vec<T>,
    pub horizon: T,
    /// Largest ∞-norm spread among the estimates at `T, T/2, …, T/2^{k−1}`.
    pub cauchy_gap: T,
}

/// Rotation vector over the full sampled horizon; `window` dyadic
/// sub-horizons enter the Cauchy gap.
pub fn rotation_vector<T: Scalar, S: SampledLift<T> + ?Sized>(
    traj: &S,
    window: usize,
) -> Result<RotationEstimate<T>, AsymptoticError> {
    if traj.len() < 2 {
        return Err(AsymptoticError::Empty);
    }
    let t0 = traj.times()[0];
    let horizon = traj.times()[traj.len() - 1] - t0;
    let x0 = traj.lift(0);
    let estimate = |span: T| -> Vec<T> {
        traj.lift_at(t0 + span)
            .iter()
            .zip(x0)
            .map(|(a, b)| (*a - *b) / span)
            .collect()
    };
    let estimates: Vec<Vec<T>> = (0..window.max(1))
        .map(|j| estimate(horizon / T::lit(2f64.powi(j as i32))))
        .collect();
    let mut gap = T::zero();
    for a in &estimates {
        for b in &estimates {
            for (x, y) in a.iter().zip(b) {
                gap = gap.max((*x - *y).abs());
            }
        }
    }
    Ok(RotationEstimate {
        value: estimates[0].clone(),
        horizon,
        cauchy_gap: gap,
    })
}

/// Metric used to close an orbit segment back to its base point.
#[derive(Debug, Clone)]
pub enum Closer<'a, T> {
    Flat,
    /// Constant metric `G`.
    Quadratic(Vec<Vec<T>>),
    /// Grid geodesics; `systole` is the shortest non-contractible loop.
    Grid {
        grid: &'a GeodesicGrid<T>,
        systole: T,
    },
}

impl<T: Scalar> Closer<'_, T> {
    /// Shortest closed loop length, whose half is the injectivity radius.
    pub fn systole(&self, n: usize) -> T {
        match self {
            Closer::Flat => T::one(),
            Closer::Quadratic(g) => quadratic_systole(g, n),
            Closer::Grid { systole, .. } => *systole,
        }
    }

    /// Lattice vector `k` minimizing the length of the closing segment from
    /// `end` to `start + k`, with that length.
    pub fn close(&self, start: &[T], end: &[T]) -> Result<(Vec<i64>, T), GeometryError> {
        let disp: Vec<T> = end.iter().zip(start).map(|(e, s)| *e - *s).collect();
        match self {
            Closer::Flat => {
                let k: Vec<i64> = disp.iter().map(|d| d.round_i64()).collect();
                let r: Vec<T> = disp
                    .iter()
                    .zip(&k)
                    .map(|(d, k)| *d - T::of_i64(*k))
                    .collect();
                Ok((k, linalg::norm2(&r)))
            }
            Closer::Quadratic(g) => Ok(nearest_lattice_point(g, &disp)),
            Closer::Grid { grid, .. } => grid.nearest_lift(end, start),
        }
    }
}

/// `√(kᵀ G k)`.
pub fn quadratic_norm<T: Scalar>(g: &[Vec<T>], v: &[T]) -> T {
    linalg::bilinear(g, v, v).max(T::zero()).sqrt()
}

fn offsets(n: usize, r: i64) -> impl Iterator<Item = Vec<i64>> {
    let side = (2 * r + 1) as usize;
    (0..side.pow(n as u32)).map(move |mut code| {
        let mut k = vec![0i64; n];
        for kd in k.iter_mut() {
            *kd = (code % side) as i64 - r;
            code /= side;
        }
        k
    })
}

/// Lattice point nearest to `v` in the norm of `G`, searched in the unit
/// box around the coordinate rounding.
pub fn nearest_lattice_point<T: Scalar>(g: &[Vec<T>], v: &[T]) -> (Vec<i64>, T) {
    let n = v.len();
    let base: Vec<i64> = v.iter().map(|x| x.round_i64()).collect();
    let mut best = (base.clone(), T::infinity());
    for o in offsets(n, 1) {
        let k: Vec<i64> = base.iter().zip(&o).map(|(b, o)| b + o).collect();
        let r: Vec<T> = v.iter().zip(&k).map(|(x, k)| *x - T::of_i64(*k)).collect();
        let d = quadratic_norm(g, &r);
        if d < best.1 {
            best = (k, d);
        }
    }
    best
}

/// Shortest nonzero lattice vector length under `G` (search box ‖k‖∞ ≤ 2).
pub fn quadratic_systole<T: Scalar>(g: &[Vec<T>], n: usize) -> T {
    offsets(n, 2)
        .filter(|k| k.iter().any(|&c| c != 0))
        .map(|k| quadratic_norm(g, &k.iter().map(|&c| T::of_i64(c)).collect::<Vec<_>>()))
        .fold(T::infinity(), |a, b| a.min(b))
}

/// Diameter of `(𝕋ⁿ, G)`: the covering radius of ℤⁿ under `G`, maximised
/// over a `per_axisⁿ` sample of the fundamental domain.
pub fn quadratic_diameter<T: Scalar>(g: &[Vec<T>], per_axis: usize) -> T {
    let n = g.len();
    (0..per_axis.pow(n as u32))
        .into_par_iter()
        .map(|mut code| {
            let x: Vec<T> = (0..n)
                .map(|_| {
                    let c = code % per_axis;
                    code /= per_axis;
                    T::of_usize(c) / T::of_usize(per_axis)
                })
                .collect();
            nearest_lattice_point(g, &x).1
        })
        .reduce(T::zero, |a, b| a.max(b))
}

/// Closed quasi-orbit `c_{x,T}`: the orbit segment from `x` closed by a
/// minimizing segment back to a lift of `x`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuasiOrbitRecord<T> {
    pub base: TorusPoint<T>,
    pub horizon: T,
    pub orbit_displacement: Vec<T>,
    /// Correction of the closing segment relative to rounding the
    /// displacement coordinatewise.
    pub closing_class: IntHomologyClass,
    pub total_class: IntHomologyClass,
    pub closing_length: T,
    /// Closing length reached half the systole, so another lift may be
    /// equally short.
    pub ambiguous: bool,
}

pub fn quasi_orbit_class<T: Scalar, S: SampledLift<T> + ?Sized>(
    traj: &S,
    closer: &Closer<'_, T>,
    horizon: T,
) -> Result<QuasiOrbitRecord<T>, AsymptoticError> {
    if traj.is_empty() {
        return Err(AsymptoticError::Empty);
    }
    let times = traj.times();
    let t0 = times[0];
    let max = times[times.len() - 1] - t0;
    let slack = T::lit(1e-9) * (T::one() + max.abs());
    if horizon < T::zero() || horizon > max + slack {
        return Err(AsymptoticError::HorizonOutOfRange {
            horizon: horizon.as_f64(),
            max: max.as_f64(),
        });
    }
    let start = traj.lift(0).to_vec();
    let end = traj.lift_at(t0 + horizon);
    Ok(close_segment(&start, &end, horizon, closer)?)
}

fn close_segment<T: Scalar>(
    start: &[T],
    end: &[T],
    horizon: T,
    closer: &Closer<'_, T>,
) -> Result<QuasiOrbitRecord<T>, GeometryError> {
    let disp: Vec<T> = end.iter().zip(start).map(|(e, s)| *e - *s).collect();
    let (k, len) = closer.close(start, end)?;
    let rounded = IntHomologyClass::round(&disp);
    let total = IntHomologyClass::new(k);
    Ok(QuasiOrbitRecord {
        base: TorusPoint::new(start.to_vec()),
        horizon,
        closing_class: total.add(&rounded.neg()),
        total_class: total,
        orbit_displacement: disp,
        closing_length: len,
        ambiguous: len >= T::lit(0.5) * closer.systole(start.len()),
    })
}

/// Single-linkage cluster of homology vectors.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Cluster<T> {
    pub center: Vec<T>,
    /// Largest Euclidean distance from the centre to a member.
    pub radius: T,
    pub members: usize,
}

/// Single-linkage clustering at link distance `radius`; clusters ordered by
/// their first member.
pub fn cluster_vectors<T: Scalar>(vectors: &[Vec<T>], radius: T) -> Vec<Cluster<T>> {
    let m = vectors.len();
    let mut parent: Vec<usize> = (0..m).collect();
    fn find(p: &mut [usize], mut i: usize) -> usize {
        while p[i] != i {
            p[i] = p[p[i]];
            i = p[i];
        }
        i
    }
    for i in 0..m {
        for j in (i + 1)..m {
            let d: Vec<T> = vectors[i]
                .iter()
                .zip(&vectors[j])
                .map(|(a, b)| *a - *b)
                .collect();
            if linalg::norm2(&d) <= radius {
                let (a, b) = (find(&mut parent, i), find(&mut parent, j));
                if a != b {
                    parent[a.max(b)] = a.min(b);
                }
            }
        }
    }
    let mut groups: Vec<(usize, Vec<usize>)> = Vec::new();
    for i in 0..m {
        let r = find(&mut parent, i);
        match groups.iter_mut().find(|(root, _)| *root == r) {
            Some((_, g)) => g.push(i),
            None => groups.push((r, vec![i])),
        }
    }
    groups
        .into_iter()
        .map(|(_, idx)| {
            let n = vectors[idx[0]].len();
            let mut center = vec![T::zero(); n];
            for &i in &idx {
                for (c, v) in center.iter_mut().zip(&vectors[i]) {
                    *c += *v;
                }
            }
            let cnt = T::of_usize(idx.len());
            center.iter_mut().for_each(|c| *c /= cnt);
            let radius = idx
                .iter()
                .map(|&i| {
                    let d: Vec<T> = vectors[i]
                        .iter()
                        .zip(&center)
                        .map(|(a, b)| *a - *b)
                        .collect();
                    linalg::norm2(&d)
                })
                .fold(T::zero(), |a, b| a.max(b));
            Cluster {
                center,
                radius,
                members: idx.len(),
            }
        })
        .collect()
}

/// Normalized quasi-orbit classes `total_class / T` of `flow` over all
/// base points and horizons, in (base, horizon) order.
pub fn normalized_classes<T: Scalar, F: LiftedFlow<T> + ?Sized>(
    flow: &F,
    closer: &Closer<'_, T>,
    bases: &[Vec<T>],
    horizons: &[T],
) -> Result<Vec<Vec<T>>, AsymptoticError> {
    let per_base: Result<Vec<Vec<Vec<T>>>, GeometryError> = bases
        .par_iter()
        .map(|x0| {
            let mut out = Vec::with_capacity(horizons.len());
            let mut x = x0.clone();
            let mut t = T::zero();
            for &h in horizons {
                if h < t {
                    x = x0.clone();
                    t = T::zero();
                }
                x = flow.advance(&x, h - t);
                t = h;
                let rec = close_segment(x0, &x, h, closer)?;
                out.push(
                    rec.total_class
                        .0
                        .iter()
                        .map(|&c| T::of_i64(c) / h)
                        .collect(),
                );
            }
            Ok(out)
        })
        .collect();
    Ok(per_base?.into_iter().flatten().collect())
}

/// Accumulation clusters of `{total_class/T}` over base points and
/// horizons, linked at distance `radius` (0.05 by default in the runner).
pub fn homology_accumulation<T: Scalar, F: LiftedFlow<T> + ?Sized>(
    flow: &F,
    closer: &Closer<'_, T>,
    bases: &[Vec<T>],
    horizons: &[T],
    radius: T,
) -> Result<Vec<Cluster<T>>, AsymptoticError> {
    if bases.is_empty() {
        return Err(AsymptoticError::Empty);
    }
    Ok(cluster_vectors(
        &normalized_classes(flow, closer, bases, horizons)?,
        radius,
    ))
}

/// One line of the cone-bound audit.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConeAuditRow<T> {
    pub m: usize,
    pub ratio: T,
    pub bound: T,
    /// `bound − ratio`.
    pub slack: T,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConeAudit<T> {
    pub rows: Vec<ConeAuditRow<T>>,
    /// Largest ratio over `m ∈ [m_max/2, m_max]`.
    pub limsup: T,
    pub diameter: T,
    /// Length of the shortest closed geodesic in the axis class.
    pub axis_length: T,
}

impl<T: Scalar> ConeAudit<T> {
    pub fn write_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "m,ratio,bound,slack")?;
        for r in &self.rows {
            writeln!(w, "{},{},{},{}", r.m, r.ratio, r.bound, r.slack)?;
        }
        Ok(())
    }
}

/// Input of [`cone_bound_audit`].
pub struct ConeAuditSetup<'a, T> {
    /// Axis class `h`, transverse to the fibres.
    pub axis: IntHomologyClass,
    pub base: Vec<T>,
    /// First return time `λ` of `base` to its fibre.
    pub return_time: T,
    pub diameter: T,
    /// Stable norm on integer classes.
    pub norm: &'a (dyn Fn(&[T]) -> T + Sync),
    pub closer: Closer<'a, T>,
}

/// Ratios `‖[c_{x,mλ}]‖ₛ / (m ‖h‖ₛ)` against the bound `3 + 3D/(mℓ)`.
pub fn cone_bound_audit<T: Scalar, F: LiftedFlow<T> + ?Sized>(
    flow: &F,
    setup: &ConeAuditSetup<'_, T>,
    m_max: usize,
) -> Result<ConeAudit<T>, AsymptoticError> {
    let h = setup.axis.to_real::<T>().0;
    let ell = (setup.norm)(&h);
    let mut rows = Vec::with_capacity(m_max);
    let mut x = setup.base.clone();
    for m in 1..=m_max {
        x = flow.advance(&x, setup.return_time);
        let horizon = T::of_usize(m) * setup.return_time;
        let rec = close_segment(&setup.base, &x, horizon, &setup.closer)?;
        let mm = T::of_usize(m);
        let ratio = (setup.norm)(&rec.total_class.to_real::<T>().0) / (mm * ell);
        let bound = T::lit(3.0) + T::lit(3.0) * setup.diameter / (mm * ell);
        rows.push(ConeAuditRow {
            m,
            ratio,
            bound,
            slack: bound - ratio,
        });
    }
    let limsup = rows
        .iter()
        .filter(|r| 2 * r.m >= m_max)
        .fold(T::zero(), |a, r| a.max(r.ratio));
    Ok(ConeAudit {
        rows,
        limsup,
        diameter: setup.diameter,
        axis_length: ell,
    })
}

/// Shortest class `k` with `⟨p, k⟩ ≠ 0` under `G` (search box ‖k‖∞ ≤ 3):
/// the shortest class not carried by the fibres of `x ↦ ⟨p, x⟩`.
pub fn shortest_transverse_class<T: Scalar>(g: &[Vec<T>], fibration: &[i64]) -> IntHomologyClass {
    let n = g.len();
    let best = offsets(n, 3)
        .filter(|k| k.iter().zip(fibration).map(|(a, b)| a * b).sum::<i64>() > 0)
        .map(|k| {
            let v: Vec<T> = k.iter().map(|&c| T::of_i64(c)).collect();
            (quadratic_norm(g, &v), k)
        })
        .fold(None::<(T, Vec<i64>)>, |acc, (d, k)| match acc {
            Some((b, _)) if b <= d => acc,
            _ => Some((d, k)),
        })
        .expect("nonzero fibration");
    IntHomologyClass::new(best.1)
}

#[cfg(test)]
mod tests;
