//! Small dense linear algebra over any field: floats or exact numbers.
//!
//! Matrices are `Vec<Vec<F>>` in row-major order; sizes here are tiny
//! (n ≤ 4 for geometry, m × k for exact rank checks), so no external
//! matrix crate is pulled in.

use std::ops::{Add, Div, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::scalar::Scalar;

/// Element of a field in which Gaussian elimination can be performed.
pub trait FieldElement:
    Clone
    + PartialEq
    + Zero
    + One
    + Neg<Output = Self>
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
{
    /// Magnitude used for partial pivoting.
    fn pivot_size(&self) -> f64;

    /// Whether the value should be treated as zero, given the magnitude of
    /// the entries it was computed from.
    fn is_negligible(&self, scale: f64) -> bool;
}

impl FieldElement for f64 {
    fn pivot_size(&self) -> f64 {
        self.abs()
    }
    fn is_negligible(&self, scale: f64) -> bool {
        self.abs() <= 64.0 * f64::EPSILON * scale.max(f64::MIN_POSITIVE)
    }
}

impl FieldElement for f32 {
    fn pivot_size(&self) -> f64 {
        self.abs() as f64
    }
    fn is_negligible(&self, scale: f64) -> bool {
        (self.abs() as f64) <= 64.0 * f32::EPSILON as f64 * scale.max(f64::MIN_POSITIVE)
    }
}

impl FieldElement for BigRational {
    fn pivot_size(&self) -> f64 {
        if self.is_zero() {
            0.0
        } else {
            1.0
        }
    }
    fn is_negligible(&self, _scale: f64) -> bool {
        self.is_zero()
    }
}

fn matrix_scale<F: FieldElement>(a: &[Vec<F>]) -> f64 {
    a.iter()
        .flat_map(|r| r.iter())
        .map(FieldElement::pivot_size)
        .fold(0.0, f64::max)
}

/// Row-reduces `a` in place; returns the pivot columns.
fn row_reduce<F: FieldElement>(a: &mut [Vec<F>]) -> Vec<usize> {
    let rows = a.len();
    if rows == 0 {
        return Vec::new();
    }
    let cols = a[0].len();
    let scale = matrix_scale(a);
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let (best, size) = (r..rows)
            .map(|i| (i, a[i][c].pivot_size()))
            .fold((r, -1.0), |acc, x| if x.1 > acc.1 { x } else { acc });
        if size <= 0.0 || a[best][c].is_negligible(scale) {
            continue;
        }
        a.swap(r, best);
        let p = a[r][c].clone();
        for j in c..cols {
            a[r][j] = a[r][j].clone() / p.clone();
        }
        for i in 0..rows {
            if i != r && !a[i][c].is_zero() {
                let f = a[i][c].clone();
                for j in c..cols {
                    let v = a[r][j].clone() * f.clone();
                    a[i][j] = a[i][j].clone() - v;
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    pivots
}

/// Rank of a matrix.
pub fn rank<F: FieldElement>(a: &[Vec<F>]) -> usize {
    let mut m = a.to_vec();
    row_reduce(&mut m).len()
}

/// Solves the square system `a · x = b`; `None` when `a` is singular.
pub fn solve<F: FieldElement>(a: &[Vec<F>], b: &[F]) -> Option<Vec<F>> {
    let n = a.len();
    if n == 0 || a.iter().any(|r| r.len() != n) || b.len() != n {
        return None;
    }
    let mut aug: Vec<Vec<F>> = a
        .iter()
        .zip(b)
        .map(|(row, bi)| {
            let mut r = row.clone();
            r.push(bi.clone());
            r
        })
        .collect();
    let pivots = row_reduce(&mut aug);
    if pivots.len() < n || pivots.iter().enumerate().any(|(i, &c)| i != c) {
        return None;
    }
    Some(aug.into_iter().map(|r| r[n].clone()).collect())
}

/// Determinant by elimination.
pub fn det<F: FieldElement>(a: &[Vec<F>]) -> F {
    let n = a.len();
    let mut m = a.to_vec();
    let scale = matrix_scale(&m);
    let mut d = F::one();
    for c in 0..n {
        let (best, size) = (c..n)
            .map(|i| (i, m[i][c].pivot_size()))
            .fold((c, -1.0), |acc, x| if x.1 > acc.1 { x } else { acc });
        if size <= 0.0 || m[best][c].is_negligible(scale) {
            return F::zero();
        }
        if best != c {
            m.swap(best, c);
            d = -d;
        }
        let p = m[c][c].clone();
        d = d * p.clone();
        for i in c + 1..n {
            let f = m[i][c].clone() / p.clone();
            for j in c..n {
                let v = m[c][j].clone() * f.clone();
                m[i][j] = m[i][j].clone() - v;
            }
        }
    }
    d
}

/// Inverse of a square matrix; `None` when singular.
pub fn inverse<F: FieldElement>(a: &[Vec<F>]) -> Option<Vec<Vec<F>>> {
    let n = a.len();
    let mut aug: Vec<Vec<F>> = a
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let mut r = row.clone();
            r.extend((0..n).map(|j| if i == j { F::one() } else { F::zero() }));
            r
        })
        .collect();
    let pivots = row_reduce(&mut aug);
    if pivots.len() < n || pivots.iter().enumerate().any(|(i, &c)| i != c) {
        return None;
    }
    Some(aug.into_iter().map(|r| r[n..].to_vec()).collect())
}

pub fn mat_vec<F: FieldElement>(a: &[Vec<F>], x: &[F]) -> Vec<F> {
    a.iter()
        .map(|row| {
            row.iter()
                .zip(x)
                .fold(F::zero(), |acc, (aij, xj)| acc + aij.clone() * xj.clone())
        })
        .collect()
}

pub fn mat_mul<F: FieldElement>(a: &[Vec<F>], b: &[Vec<F>]) -> Vec<Vec<F>> {
    let inner = b.len();
    let cols = if inner == 0 { 0 } else { b[0].len() };
    a.iter()
        .map(|row| {
            (0..cols)
                .map(|j| {
                    (0..inner).fold(F::zero(), |acc, k| acc + row[k].clone() * b[k][j].clone())
                })
                .collect()
        })
        .collect()
}

pub fn transpose<F: Clone>(a: &[Vec<F>]) -> Vec<Vec<F>> {
    if a.is_empty() {
        return Vec::new();
    }
    (0..a[0].len())
        .map(|j| a.iter().map(|r| r[j].clone()).collect())
        .collect()
}

pub fn identity<F: FieldElement>(n: usize) -> Vec<Vec<F>> {
    (0..n)
        .map(|i| {
            (0..n)
                .map(|j| if i == j { F::one() } else { F::zero() })
                .collect()
        })
        .collect()
}

pub fn dot<T: Scalar>(a: &[T], b: &[T]) -> T {
    a.iter().zip(b).map(|(x, y)| *x * *y).sum()
}

pub fn norm2<T: Scalar>(a: &[T]) -> T {
    dot(a, a).sqrt()
}

pub fn norm_inf<T: Scalar>(a: &[T]) -> T {
    a.iter().fold(T::zero(), |m, x| m.max(x.abs()))
}

/// `xᵀ A y` for a square matrix.
pub fn bilinear<T: Scalar>(a: &[Vec<T>], x: &[T], y: &[T]) -> T {
    a.iter().zip(x).map(|(row, xi)| *xi * dot(row, y)).sum()
}

/// Cholesky factor of a symmetric matrix; `None` unless positive definite.
pub fn cholesky<T: Scalar>(a: &[Vec<T>]) -> Option<Vec<Vec<T>>> {
    let n = a.len();
    let mut l = vec![vec![T::zero(); n]; n];
    for i in 0..n {
        for j in 0..=i {
            let mut s = a[i][j];
            for k in 0..j {
                s -= l[i][k] * l[j][k];
            }
            if i == j {
                if !(s > T::zero()) || !s.is_finite() {
                    return None;
                }
                l[i][i] = s.sqrt();
            } else {
                l[i][j] = s / l[j][j];
            }
        }
    }
    Some(l)
}

/// Integer-matrix helpers used by lattice code.
pub fn int_det(a: &[Vec<i64>]) -> BigInt {
    let q: Vec<Vec<BigRational>> = a
        .iter()
        .map(|r| {
            r.iter()
                .map(|&x| BigRational::from_integer(BigInt::from(x)))
                .collect()
        })
        .collect();
    let d = det(&q);
    debug_assert!(d.is_integer());
    d.to_integer()
}

/// Whether an integer matrix is unimodular (determinant ±1).
pub fn is_unimodular(a: &[Vec<i64>]) -> bool {
    int_det(a).abs().is_one()
}
