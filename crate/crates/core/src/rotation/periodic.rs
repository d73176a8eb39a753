use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::maps::{sample_grid, TorusMapLift};
use crate::linalg;
use crate::scalar::Scalar;
use crate::torus::TorusPoint;

/// Outcome of a periodic-point search for `F^q(x) = x + p`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PeriodicOrbitResult<T> {
    pub found: bool,
    /// Best point found (a root when `found`).
    pub point: TorusPoint<T>,
    pub period: usize,
    pub translation: [i64; 2],
    /// `|F^q(x) − x − p|∞` evaluated directly at `point`.
    pub residual: T,
}

/// Number of Newton seeds, on a uniform 4 × 8 grid.
pub const NEWTON_SEEDS: usize = 32;

fn residual<T: Scalar>(f: &TorusMapLift<T>, x: [T; 2], q: usize, p: [T; 2]) -> [T; 2] {
    let y = f.iterate(x, q);
    [y[0] - x[0] - p[0], y[1] - x[1] - p[1]]
}

fn newton<T: Scalar>(
    f: &TorusMapLift<T>,
    seed: [T; 2],
    q: usize,
    p: [T; 2],
    tol: T,
) -> ([T; 2], T) {
    let norm = |r: [T; 2]| r[0].abs().max(r[1].abs());
    let mut x = seed;
    let mut r = residual(f, x, q, p);
    let mut rn = norm(r);
    let h = T::lit(1e-7);
    for _ in 0..80 {
        if rn < tol {
            break;
        }
        let mut j = vec![vec![T::zero(); 2]; 2];
        for c in 0..2 {
            let mut xp = x;
            let mut xm = x;
            xp[c] += h;
            xm[c] -= h;
            let (rp, rm) = (residual(f, xp, q, p), residual(f, xm, q, p));
            for k in 0..2 {
                j[k][c] = (rp[k] - rm[k]) / (h + h);
            }
        }
        let Some(s) = linalg::solve(&j, &r) else {
            break;
        };
        let mut t = T::one();
        let mut improved = false;
        while t > T::lit(1e-6) {
            let cand = [x[0] - t * s[0], x[1] - t * s[1]];
            let rc = residual(f, cand, q, p);
            if norm(rc) < rn {
                x = cand;
                r = rc;
                rn = norm(rc);
                improved = true;
                break;
            }
            t *= T::lit(0.5);
        }
        if !improved {
            break;
        }
    }
    (x, rn)
}

/// Multi-start damped Newton with finite-difference Jacobians on
/// `G(x) = F^q(x) − x − p`. Failure only means no root was located.
pub fn find_periodic_point<T: Scalar>(
    f: &TorusMapLift<T>,
    p: [i64; 2],
    q: usize,
    tol: T,
) -> PeriodicOrbitResult<T> {
    assert!((1..=64).contains(&q), "period must lie in 1..=64");
    let pt = [T::of_i64(p[0]), T::of_i64(p[1])];
    let seeds: Vec<[T; 2]> = (0..NEWTON_SEEDS)
        .map(|i| {
            [
                (T::of_usize(i / 8) + T::lit(0.5)) / T::lit(4.0),
                (T::of_usize(i % 8) + T::lit(0.5)) / T::lit(8.0),
            ]
        })
        .collect();
    let runs: Vec<([T; 2], T)> = seeds
        .par_iter()
        .map(|&s| newton(f, s, q, pt, tol))
        .collect();
    // first success in seed order keeps the result deterministic
    let best = runs
        .iter()
        .find(|(_, r)| *r < tol)
        .or_else(|| {
            runs.iter()
                .min_by(|a, b| a.1.partial_cmp(&b.1).unwrap_or(std::cmp::Ordering::Equal))
        })
        .copied()
        .expect("non-empty seeds");
    let direct = residual(f, best.0, q, pt);
    let res = direct[0].abs().max(direct[1].abs());
    PeriodicOrbitResult {
        found: res < tol,
        point: TorusPoint::new(best.0.to_vec()),
        period: q,
        translation: p,
        residual: res,
    }
}

/// Default sample points for equivariance checks.
pub fn default_samples<T: Scalar>() -> Vec<[T; 2]> {
    sample_grid(7)
}
