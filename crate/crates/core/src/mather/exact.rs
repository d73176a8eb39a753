//! Exact arithmetic in multi-quadratic fields `ℚ(√p₁, …, √pₖ)`.
//!
//! An element is a finite sum `Σ r_d √d` over squarefree radicands `d`
//! with rational coefficients `r_d`. The products `√d` for squarefree `d`
//! are linearly independent over ℚ, so this representation is canonical.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::linalg::FieldElement;

#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct QuadraticSurd {
    terms: BTreeMap<u64, BigRational>,
}

fn factor(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut p = 2;
    while p * p <= n {
        while n.is_multiple_of(p) {
            out.push(p);
            n /= p;
        }
        p += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

/// Writes `n = a² · d` with `d` squarefree.
fn split_square(n: u64) -> (u64, u64) {
    let mut counts: BTreeMap<u64, u32> = BTreeMap::new();
    for p in factor(n) {
        *counts.entry(p).or_default() += 1;
    }
    let (mut a, mut d) = (1, 1);
    for (p, c) in counts {
        a *= p.pow(c / 2);
        if c % 2 == 1 {
            d *= p;
        }
    }
    (a, d)
}

impl QuadraticSurd {
    pub fn rational(r: BigRational) -> Self {
        let mut terms = BTreeMap::new();
        if !r.is_zero() {
            terms.insert(1, r);
        }
        Self { terms }
    }

    pub fn integer(n: i64) -> Self {
        Self::rational(BigRational::from_integer(n.into()))
    }

    /// `√n` for a positive integer `n`, simplified.
    pub fn sqrt(n: u64) -> Option<Self> {
        if n == 0 {
            return Some(Self::zero());
        }
        let (a, d) = split_square(n);
        let mut terms = BTreeMap::new();
        terms.insert(d, BigRational::from_integer(a.into()));
        Some(Self { terms })
    }

    /// Parses a basis label: `1`, an integer, `sqrtN`, `sqrt(N)` or `√N`.
    pub fn parse_label(label: &str) -> Option<Self> {
        let s = label.trim();
        if let Ok(n) = s.parse::<i64>() {
            return Some(Self::integer(n));
        }
        let rest = s
            .strip_prefix("sqrt")
            .or_else(|| s.strip_prefix('√'))?
            .trim_start_matches('(')
            .trim_end_matches(')');
        Self::sqrt(rest.parse().ok()?)
    }

    pub fn is_rational(&self) -> bool {
        self.terms.keys().all(|&d| d == 1)
    }

    pub fn rational_part(&self) -> BigRational {
        self.terms
            .get(&1)
            .cloned()
            .unwrap_or_else(BigRational::zero)
    }

    pub fn coefficient(&self, radicand: u64) -> BigRational {
        self.terms
            .get(&radicand)
            .cloned()
            .unwrap_or_else(BigRational::zero)
    }

    pub fn radicands(&self) -> impl Iterator<Item = u64> + '_ {
        self.terms.keys().copied()
    }

    pub fn to_f64(&self) -> f64 {
        self.terms
            .iter()
            .map(|(&d, r)| r.to_f64().unwrap_or(f64::NAN) * (d as f64).sqrt())
            .sum()
    }

    fn insert(&mut self, d: u64, r: BigRational) {
        let e = self.terms.entry(d).or_insert_with(BigRational::zero);
        *e += r;
        if e.is_zero() {
            self.terms.remove(&d);
        }
    }

    fn scale(&self, r: &BigRational) -> Self {
        let mut out = Self::zero();
        for (&d, c) in &self.terms {
            out.insert(d, c * r);
        }
        out
    }

    /// Multiplicative inverse; `None` for zero.
    pub fn inverse(&self) -> Option<Self> {
        if self.is_zero() {
            return None;
        }
        if self.is_rational() {
            return Some(Self::rational(self.rational_part().recip()));
        }
        // split off the largest prime p: x = u + v√p, x⁻¹ = (u − v√p)/(u² − p v²)
        let p = self
            .terms
            .keys()
            .flat_map(|&d| factor(d))
            .max()
            .expect("irrational term");
        let (mut u, mut v) = (Self::zero(), Self::zero());
        for (&d, c) in &self.terms {
            if d % p == 0 {
                v.insert(d / p, c.clone());
            } else {
                u.insert(d, c.clone());
            }
        }
        let norm = u.clone() * u.clone() - v.clone() * v.clone() * Self::integer(p as i64);
        let conj = u - v * Self::sqrt(p)?;
        Some(conj * norm.inverse()?)
    }

    /// Canonical basis `{√d}` of the smallest multi-quadratic field holding
    /// every element, as sorted radicands.
    pub fn field_basis<'a>(elements: impl IntoIterator<Item = &'a Self>) -> Vec<u64> {
        let primes: BTreeSet<u64> = elements
            .into_iter()
            .flat_map(|e| e.radicands().flat_map(factor).collect::<Vec<_>>())
            .collect();
        let primes: Vec<u64> = primes.into_iter().collect();
        let mut basis: Vec<u64> = (0..1u64 << primes.len())
            .map(|mask| {
                primes
                    .iter()
                    .enumerate()
                    .filter(|(i, _)| mask >> i & 1 == 1)
                    .map(|(_, p)| p)
                    .product()
            })
            .collect();
        basis.sort_unstable();
        basis
    }
}

pub fn radicand_label(d: u64) -> String {
    if d == 1 {
        "1".into()
    } else {
        format!("sqrt{d}")
    }
}

impl fmt::Display for QuadraticSurd {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, (&d, c)) in self.terms.iter().enumerate() {
            let sign = match (i, c.is_negative()) {
                (0, true) => "-",
                (0, false) => "",
                (_, true) => " - ",
                (_, false) => " + ",
            };
            let mag = c.abs();
            match (d, mag.is_one()) {
                (1, _) => write!(f, "{sign}{mag}")?,
                (_, true) => write!(f, "{sign}√{d}")?,
                _ => write!(f, "{sign}{mag}·√{d}")?,
            }
        }
        Ok(())
    }
}

impl Zero for QuadraticSurd {
    fn zero() -> Self {
        Self::default()
    }
    fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }
}

impl One for QuadraticSurd {
    fn one() -> Self {
        Self::integer(1)
    }
}

impl Add for QuadraticSurd {
    type Output = Self;
    fn add(mut self, rhs: Self) -> Self {
        for (d, c) in rhs.terms {
            self.insert(d, c);
        }
        self
    }
}

impl Neg for QuadraticSurd {
    type Output = Self;
    fn neg(self) -> Self {
        self.scale(&-BigRational::one())
    }
}

impl Sub for QuadraticSurd {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        self + (-rhs)
    }
}

impl Mul for QuadraticSurd {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        let mut out = Self::zero();
        for (&a, ca) in &self.terms {
            for (&b, cb) in &rhs.terms {
                // √a·√b = g·√(ab/g²) with g = gcd(a, b)
                let g = a.gcd(&b);
                let d = (a / g) * (b / g);
                out.insert(d, ca * cb * BigRational::from_integer(BigInt::from(g)));
            }
        }
        out
    }
}

impl Div for QuadraticSurd {
    type Output = Self;
    fn div(self, rhs: Self) -> Self {
        self * rhs.inverse().expect("division by zero")
    }
}

impl FieldElement for QuadraticSurd {
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
