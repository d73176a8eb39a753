use serde::{Deserialize, Serialize};

use crate::scalar::{cos_2pi, sin_2pi, Scalar};
use crate::torus::PotentialGrid;

/// `a·cos 2π⟨k,x⟩ + b·sin 2π⟨k,x⟩`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FourierTerm<T> {
    pub k: Vec<i64>,
    #[serde(default)]
    pub cos: T,
    #[serde(default)]
    pub sin: T,
}

/// Finite real trigonometric polynomial on 𝕋ⁿ.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FourierSeries<T> {
    #[serde(default)]
    pub constant: T,
    #[serde(default)]
    pub terms: Vec<FourierTerm<T>>,
}

impl<T: Scalar> FourierSeries<T> {
    pub fn constant(c: T) -> Self {
        FourierSeries {
            constant: c,
            terms: Vec::new(),
        }
    }

    pub fn cos(k: Vec<i64>, a: T) -> Self {
        FourierSeries {
            constant: T::zero(),
            terms: vec![FourierTerm {
                k,
                cos: a,
                sin: T::zero(),
            }],
        }
    }

    pub fn sin(k: Vec<i64>, b: T) -> Self {
        FourierSeries {
            constant: T::zero(),
            terms: vec![FourierTerm {
                k,
                cos: T::zero(),
                sin: b,
            }],
        }
    }

    pub fn plus(mut self, other: Self) -> Self {
        self.constant += other.constant;
        self.terms.extend(other.terms);
        self
    }

    fn phase(k: &[i64], x: &[T]) -> T {
        k.iter().zip(x).map(|(&k, &x)| T::of_i64(k) * x).sum()
    }

    pub fn eval(&self, x: &[T]) -> T {
        self.terms.iter().fold(self.constant, |acc, t| {
            let s = Self::phase(&t.k, x);
            acc + t.cos * cos_2pi(s) + t.sin * sin_2pi(s)
        })
    }

    pub fn gradient(&self, x: &[T]) -> Vec<T> {
        let mut g = vec![T::zero(); x.len()];
        let two_pi = T::TAU();
        for t in &self.terms {
            let s = Self::phase(&t.k, x);
            let d = two_pi * (t.sin * cos_2pi(s) - t.cos * sin_2pi(s));
            for (gi, &k) in g.iter_mut().zip(&t.k) {
                *gi += d * T::of_i64(k);
            }
        }
        g
    }

    pub fn value_and_gradient(&self, x: &[T]) -> (T, Vec<T>) {
        (self.eval(x), self.gradient(x))
    }

    /// Samples on a `resolutionⁿ` grid.
    pub fn to_grid(&self, n: usize, resolution: usize) -> PotentialGrid<T> {
        PotentialGrid::from_fn(n, resolution, |x| self.eval(x))
    }

    /// Largest frequency component `max ‖k‖∞`.
    pub fn max_frequency(&self) -> i64 {
        self.terms
            .iter()
            .flat_map(|t| t.k.iter().map(|k| k.abs()))
            .max()
            .unwrap_or(0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gradient_matches_differences() {
        let f = FourierSeries::<f64>::cos(vec![1, 0], 1.0)
            .plus(FourierSeries::sin(vec![2, -1], 0.3))
            .plus(FourierSeries::constant(0.5));
        let x = [0.37, 0.81];
        let g = f.gradient(&x);
        for a in 0..2 {
            let mut xp = x;
            let mut xm = x;
            xp[a] += 1e-6;
            xm[a] -= 1e-6;
            let fd = (f.eval(&xp) - f.eval(&xm)) / 2e-6;
            assert!((g[a] - fd).abs() < 1e-6 * (1.0 + g[a].abs()));
        }
    }

    #[test]
    fn json_defaults() {
        let f: FourierSeries<f64> =
            serde_json::from_str(r#"{"terms":[{"k":[1,0],"cos":1.0}]}"#).unwrap();
        assert_eq!(f.eval(&[0.5, 0.2]), -1.0);
    }
}
