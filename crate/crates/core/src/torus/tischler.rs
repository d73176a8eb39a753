//! Rational approximation of a cohomology class and the induced fibration
//! of 𝕋ⁿ over the circle.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::ToPrimitive;
use serde::{Deserialize, Serialize};

use super::GeometryError;
use crate::linalg;
use crate::scalar::{wrap_unit, Scalar};

const MAX_DENOMINATOR: u64 = 10_000_000;

/// Fibration `x ↦ ⟨p, x⟩ mod 1` from the approximation `c ≈ p/q`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TischlerFibration {
    /// Integer covector `p` with `‖c − p/q‖∞ ≤ eps`.
    pub numerator: Vec<i64>,
    /// Smallest positive `q` achieving the tolerance.
    pub denominator: u64,
    /// `p / gcd(p)`; its level sets are connected (n−1)-tori.
    pub primitive: Vec<i64>,
    /// Achieved `‖c − p/q‖∞`.
    pub error: f64,
    /// Dirichlet bound `⌈1/eps⌉ⁿ` on the denominator.
    pub dirichlet_bound: u64,
}

impl TischlerFibration {
    /// Circle coordinate of a point.
    pub fn project<T: Scalar>(&self, x: &[T]) -> T {
        let s: T = self
            .primitive
            .iter()
            .zip(x)
            .map(|(&p, &xi)| T::of_i64(p) * xi)
            .sum();
        wrap_unit(s)
    }

    /// Number of connected components of each fibre, `gcd(p)` for the
    /// primitive covector (always 1).
    pub fn fibre_components(&self) -> i64 {
        self.primitive
            .iter()
            .fold(0, |g, &c| num_integer::gcd(g, c))
    }
}

/// Smallest-denominator simultaneous approximation of `c` within `eps`.
///
/// With `eps = 0` the tolerance is a few ulps of `c`, which recovers exact
/// rationals such as integer classes.
pub fn tischler_fibration<T: Scalar>(c: &[T], eps: T) -> Result<TischlerFibration, GeometryError> {
    if c.is_empty() || c.iter().all(|x| x.is_zero()) {
        return Err(GeometryError::ZeroClass);
    }
    let cf: Vec<f64> = c.iter().map(|x| x.as_f64()).collect();
    let scale = cf.iter().fold(1.0f64, |m, x| m.max(x.abs()));
    let tol = eps.as_f64().max(64.0 * f64::EPSILON * scale);
    let n = cf.len() as u32;
    let dirichlet = (1.0 / tol).ceil().powi(n as i32);
    let dirichlet_bound = if dirichlet.is_finite() && dirichlet < u64::MAX as f64 {
        dirichlet as u64
    } else {
        u64::MAX
    };
    let limit = dirichlet_bound.min(MAX_DENOMINATOR);
    for q in 1..=limit {
        let qf = q as f64;
        let numerator: Vec<i64> = cf.iter().map(|x| (x * qf).round() as i64).collect();
        let error = cf
            .iter()
            .zip(&numerator)
            .fold(0.0f64, |m, (x, &p)| m.max((x - p as f64 / qf).abs()));
        if error <= tol {
            let g = numerator.iter().fold(0i64, |g, &p| num_integer::gcd(g, p));
            if g == 0 {
                continue;
            }
            let primitive = numerator.iter().map(|p| p / g).collect();
            return Ok(TischlerFibration {
                numerator,
                denominator: q,
                primitive,
                error,
                dirichlet_bound,
            });
        }
    }
    Err(GeometryError::ApproximationNotFound { searched: limit })
}

/// Winding number of the fibration along each coordinate loop `t ↦ t·eᵢ`,
/// measured by unwrapping `samples` evaluations of the circle coordinate.
/// At least `4·max|pᵢ| + 1` samples are taken so steps stay below a half
/// turn.
pub fn winding_numbers(fib: &TischlerFibration, samples: usize) -> Vec<i64> {
    let n = fib.primitive.len();
    let k = fib
        .primitive
        .iter()
        .map(|p| p.unsigned_abs())
        .max()
        .unwrap_or(0) as usize;
    let samples = samples.max(4 * k + 1);
    (0..n)
        .map(|axis| {
            let mut total = 0.0f64;
            let mut prev = fib.project(&vec![0.0f64; n]);
            for s in 1..=samples {
                let mut x = vec![0.0f64; n];
                x[axis] = s as f64 / samples as f64;
                let cur = fib.project(&x);
                let d = cur - prev;
                total += d - d.round();
                prev = cur;
            }
            total.round() as i64
        })
        .collect()
}

/// Integer matrix with first row `p` and determinant ±1; `None` unless `p`
/// is primitive.
pub fn unimodular_completion(p: &[i64]) -> Option<Vec<Vec<i64>>> {
    let n = p.len();
    if n == 0 {
        return None;
    }
    let mut r = p.to_vec();
    let mut v: Vec<Vec<i64>> = (0..n)
        .map(|i| (0..n).map(|j| i64::from(i == j)).collect())
        .collect();
    // column operations with r ← r·V
    for i in 1..n {
        while r[i] != 0 {
            let q = r[0].div_euclid(r[i]);
            r[0] -= q * r[i];
            for row in v.iter_mut() {
                row[0] -= q * row[i];
            }
            r.swap(0, i);
            for row in v.iter_mut() {
                row.swap(0, i);
            }
        }
    }
    if r[0].abs() != 1 {
        return None;
    }
    if r[0] == -1 {
        for row in v.iter_mut() {
            row[0] = -row[0];
        }
    }
    let q: Vec<Vec<BigRational>> = v
        .iter()
        .map(|row| {
            row.iter()
                .map(|&x| BigRational::from_integer(BigInt::from(x)))
                .collect()
        })
        .collect();
    let inv = linalg::inverse(&q)?;
    let m: Vec<Vec<i64>> = inv
        .iter()
        .map(|row| {
            row.iter()
                .map(|x| {
                    debug_assert!(x.is_integer());
                    x.to_integer().to_i64().unwrap_or(0)
                })
                .collect()
        })
        .collect();
    debug_assert_eq!(m[0], p);
    debug_assert!(linalg::is_unimodular(&m));
    Some(m)
}
