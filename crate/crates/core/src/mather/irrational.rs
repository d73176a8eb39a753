//! Vectors with coordinates in a declared ℚ-span of reals, and the exact
//! rank test for total irrationality.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::exact::{radicand_label, QuadraticSurd};
use super::ExactError;
use crate::linalg;

/// Component `i` equals `Σⱼ coeffs[i][j] · basis[j]`. The basis is assumed
/// rationally independent; that assumption is never checked.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IrrationalVector {
    pub basis: Vec<String>,
    #[serde(serialize_with = "ser_matrix", deserialize_with = "de_matrix")]
    pub coeffs: Vec<Vec<BigRational>>,
}

#[derive(Deserialize)]
#[serde(untagged)]
enum RawInt {
    Int(i64),
    Str(String),
}

impl RawInt {
    fn big(self) -> Result<BigInt, String> {
        match self {
            RawInt::Int(n) => Ok(n.into()),
            RawInt::Str(s) => s.trim().parse().map_err(|_| format!("bad integer {s:?}")),
        }
    }
}

#[derive(Deserialize)]
#[serde(untagged)]
enum RawRational {
    Pair(RawInt, RawInt),
    Int(i64),
    Str(String),
}

impl RawRational {
    fn value(self) -> Result<BigRational, String> {
        let (n, d) = match self {
            RawRational::Pair(n, d) => (n.big()?, d.big()?),
            RawRational::Int(n) => (n.into(), 1.into()),
            RawRational::Str(s) => match s.split_once('/') {
                Some((n, d)) => (RawInt::Str(n.into()).big()?, RawInt::Str(d.into()).big()?),
                None => (RawInt::Str(s).big()?, 1.into()),
            },
        };
        if d.is_zero() {
            return Err("zero denominator".into());
        }
        Ok(BigRational::new(n, d))
    }
}

fn de_matrix<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<Vec<BigRational>>, D::Error> {
    let raw: Vec<Vec<RawRational>> = Vec::deserialize(d)?;
    raw.into_iter()
        .map(|row| {
            row.into_iter()
                .map(|r| r.value().map_err(D::Error::custom))
                .collect()
        })
        .collect()
}

fn int_json(n: &BigInt) -> serde_json::Value {
    match n.to_i64() {
        Some(v) => v.into(),
        None => n.to_string().into(),
    }
}

fn ser_matrix<S: Serializer>(m: &[Vec<BigRational>], s: S) -> Result<S::Ok, S::Error> {
    let v: Vec<Vec<[serde_json::Value; 2]>> = m
        .iter()
        .map(|row| {
            row.iter()
                .map(|r| [int_json(r.numer()), int_json(r.denom())])
                .collect()
        })
        .collect();
    v.serialize(s)
}

impl IrrationalVector {
    pub fn new(basis: Vec<String>, coeffs: Vec<Vec<BigRational>>) -> Result<Self, ExactError> {
        if coeffs.iter().any(|r| r.len() != basis.len()) {
            return Err(ExactError::Shape {
                rows: coeffs.len(),
                basis: basis.len(),
            });
        }
        Ok(Self { basis, coeffs })
    }

    /// Convenience constructor from small integer coefficients.
    pub fn from_integers(basis: &[&str], coeffs: &[Vec<i64>]) -> Result<Self, ExactError> {
        Self::new(
            basis.iter().map(|s| s.to_string()).collect(),
            coeffs
                .iter()
                .map(|r| {
                    r.iter()
                        .map(|&c| BigRational::from_integer(c.into()))
                        .collect()
                })
                .collect(),
        )
    }

    pub fn dim(&self) -> usize {
        self.coeffs.len()
    }

    /// Components as exact field elements; `None` if some basis label is not
    /// a square root of an integer.
    pub fn to_surds(&self) -> Option<Vec<QuadraticSurd>> {
        let basis: Vec<QuadraticSurd> = self
            .basis
            .iter()
            .map(|l| QuadraticSurd::parse_label(l))
            .collect::<Option<_>>()?;
        Some(
            self.coeffs
                .iter()
                .map(|row| {
                    row.iter()
                        .zip(&basis)
                        .fold(QuadraticSurd::zero(), |acc, (c, b)| {
                            acc + QuadraticSurd::rational(c.clone()) * b.clone()
                        })
                })
                .collect(),
        )
    }

    /// Expresses field elements in the canonical basis of their field.
    pub fn from_surds(values: &[QuadraticSurd]) -> Self {
        let radicands = QuadraticSurd::field_basis(values);
        Self {
            basis: radicands.iter().map(|&d| radicand_label(d)).collect(),
            coeffs: values
                .iter()
                .map(|v| radicands.iter().map(|&d| v.coefficient(d)).collect())
                .collect(),
        }
    }

    pub fn approx(&self) -> Option<Vec<f64>> {
        Some(self.to_surds()?.iter().map(QuadraticSurd::to_f64).collect())
    }

    /// Image under an integer matrix acting on the components.
    pub fn transform(&self, a: &[Vec<i64>]) -> Self {
        let a: Vec<Vec<BigRational>> = a
            .iter()
            .map(|r| {
                r.iter()
                    .map(|&x| BigRational::from_integer(x.into()))
                    .collect()
            })
            .collect();
        Self {
            basis: self.basis.clone(),
            coeffs: linalg::mat_mul(&a, &self.coeffs),
        }
    }
}

/// True iff the components are rationally independent: the coefficient
/// matrix has full row rank over ℚ.
pub fn totally_irrational_check(v: &IrrationalVector) -> bool {
    linalg::rank(&v.coeffs) == v.dim()
}

/// Rational combination `w = αv₁ + βv₂` with two rational coordinates.
#[derive(Clone, Debug, PartialEq)]
pub struct ObstructionWitness {
    /// Coordinates forced to the rational values `Q₁ = Q₂ = 1`.
    pub rows: [usize; 2],
    pub alpha: QuadraticSurd,
    pub beta: QuadraticSurd,
    /// The remaining coordinate of `w`.
    pub q3: QuadraticSurd,
    pub w: IrrationalVector,
    pub w_totally_irrational: bool,
}

/// Solves `αv₁ + βv₂ = (1, 1, Q₃)` exactly on the first invertible pair of
/// coordinates; the result is never totally irrational.
pub fn rationality_obstruction(
    v1: &IrrationalVector,
    v2: &IrrationalVector,
) -> Result<ObstructionWitness, ExactError> {
    for v in [v1, v2] {
        if v.dim() != 3 {
            return Err(ExactError::Dimension {
                expected: 3,
                got: v.dim(),
            });
        }
    }
    for (i, v) in [v1, v2].into_iter().enumerate() {
        if !totally_irrational_check(v) {
            return Err(ExactError::NotTotallyIrrational { which: i + 1 });
        }
    }
    let (Some(a), Some(b)) = (v1.to_surds(), v2.to_surds()) else {
        return Err(ExactError::NotApplicable(
            "basis labels outside the supported quadratic fields".into(),
        ));
    };
    for rows in [[0, 1], [0, 2], [1, 2]] {
        let m = vec![
            vec![a[rows[0]].clone(), b[rows[0]].clone()],
            vec![a[rows[1]].clone(), b[rows[1]].clone()],
        ];
        if linalg::det(&m).is_zero() {
            continue;
        }
        let sol = linalg::solve(&m, &[QuadraticSurd::one(), QuadraticSurd::one()])
            .ok_or_else(|| ExactError::NotApplicable("minor not invertible".into()))?;
        let (alpha, beta) = (sol[0].clone(), sol[1].clone());
        let w: Vec<QuadraticSurd> = (0..3)
            .map(|i| alpha.clone() * a[i].clone() + beta.clone() * b[i].clone())
            .collect();
        let rest = 3 - rows[0] - rows[1];
        let w_vec = IrrationalVector::from_surds(&w);
        return Ok(ObstructionWitness {
            rows,
            alpha,
            beta,
            q3: w[rest].clone(),
            w_totally_irrational: totally_irrational_check(&w_vec),
            w: w_vec,
        });
    }
    Err(ExactError::NotIndependent)
}
