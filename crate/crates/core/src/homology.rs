//! First homology of the n-torus: integer classes, real vectors, norms and
//! cones of bounded slope around an axis.

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::linalg::{self, FieldElement};
use crate::scalar::Scalar;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum HomologyError {
    #[error("axis and complement basis are not of full rank")]
    SingularBasis,
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("empty vector set")]
    Empty,
    #[error("homology vector has non-finite entries")]
    NonFinite,
}

/// Integer class in H₁(𝕋ⁿ, ℤ) ≅ ℤⁿ, coordinates in the standard basis.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct IntHomologyClass(pub Vec<i64>);

impl IntHomologyClass {
    pub fn new(coeffs: Vec<i64>) -> Self {
        assert!(!coeffs.is_empty(), "homology of 𝕋⁰ is not supported");
        IntHomologyClass(coeffs)
    }

    pub fn zero(n: usize) -> Self {
        IntHomologyClass(vec![0; n])
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&c| c == 0)
    }

    pub fn to_real<T: Scalar>(&self) -> HomologyVector<T> {
        HomologyVector(self.0.iter().map(|&c| T::of_i64(c)).collect())
    }

    /// Nearest lattice point to a real vector (componentwise rounding).
    pub fn round<T: Scalar>(v: &[T]) -> Self {
        IntHomologyClass(v.iter().map(|x| x.round_i64()).collect())
    }

    pub fn neg(&self) -> Self {
        IntHomologyClass(self.0.iter().map(|c| -c).collect())
    }

    pub fn add(&self, other: &Self) -> Self {
        IntHomologyClass(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    pub fn scale(&self, m: i64) -> Self {
        IntHomologyClass(self.0.iter().map(|c| c * m).collect())
    }

    pub fn gcd(&self) -> i64 {
        self.0.iter().fold(0i64, |g, &c| num_integer::gcd(g, c))
    }
}

impl fmt::Display for IntHomologyClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, c) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, ")")
    }
}

/// Real homology vector in H₁(𝕋ⁿ, ℝ) ≅ ℝⁿ.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HomologyVector<T>(pub Vec<T>);

impl<T: Scalar> HomologyVector<T> {
    pub fn new(coeffs: Vec<T>) -> Result<Self, HomologyError> {
        if coeffs.iter().any(|c| !c.is_finite()) {
            return Err(HomologyError::NonFinite);
        }
        Ok(HomologyVector(coeffs))
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn basis(n: usize, i: usize) -> Self {
        HomologyVector(
            (0..n)
                .map(|j| if i == j { T::one() } else { T::zero() })
                .collect(),
        )
    }

    pub fn scale(&self, s: T) -> Self {
        HomologyVector(self.0.iter().map(|&c| c * s).collect())
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|c| c.is_zero())
    }

    pub fn as_slice(&self) -> &[T] {
        &self.0
    }
}

type Evaluator<T> = Arc<dyn Fn(&[T]) -> T + Send + Sync>;

/// A norm on H₁(𝕋ⁿ, ℝ).
#[derive(Clone)]
pub enum NormModel<T> {
    Euclidean,
    /// Stable norm of a constant Riemannian metric `G`: `√(vᵀ G v)`.
    Quadratic(Vec<Vec<T>>),
    /// Any other stable-norm evaluator, e.g. backed by a grid metric.
    Stable {
        label: String,
        eval: Evaluator<T>,
    },
}

impl<T: Scalar> NormModel<T> {
    pub fn stable<F>(label: impl Into<String>, eval: F) -> Self
    where
        F: Fn(&[T]) -> T + Send + Sync + 'static,
    {
        NormModel::Stable {
            label: label.into(),
            eval: Arc::new(eval),
        }
    }

    pub fn eval(&self, v: &[T]) -> T {
        match self {
            NormModel::Euclidean => linalg::norm2(v),
            NormModel::Quadratic(g) => linalg::bilinear(g, v, v).max(T::zero()).sqrt(),
            NormModel::Stable { eval, .. } => eval(v),
        }
    }

    pub fn label(&self) -> String {
        match self {
            NormModel::Euclidean => "euclidean".into(),
            NormModel::Quadratic(_) => "quadratic".into(),
            NormModel::Stable { label, .. } => format!("stable:{label}"),
        }
    }
}

impl<T: fmt::Debug> fmt::Debug for NormModel<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            NormModel::Euclidean => write!(f, "Euclidean"),
            NormModel::Quadratic(g) => f.debug_tuple("Quadratic").field(g).finish(),
            NormModel::Stable { label, .. } => write!(f, "Stable({label})"),
        }
    }
}

/// Cone of slope `A` with axis `h` in the splitting H₁ = ⟨h⟩ ⊕ G.
#[derive(Debug, Clone)]
pub struct ConeSpec<T> {
    pub axis: HomologyVector<T>,
    pub complement: Vec<HomologyVector<T>>,
    pub slope: T,
    pub norm: NormModel<T>,
}

impl<T: Scalar> ConeSpec<T> {
    pub fn new(
        axis: HomologyVector<T>,
        complement: Vec<HomologyVector<T>>,
        slope: T,
        norm: NormModel<T>,
    ) -> Result<Self, HomologyError> {
        let n = axis.dim();
        if complement.len() + 1 != n {
            return Err(HomologyError::DimensionMismatch {
                expected: n - 1,
                got: complement.len(),
            });
        }
        if let Some(bad) = complement.iter().find(|g| g.dim() != n) {
            return Err(HomologyError::DimensionMismatch {
                expected: n,
                got: bad.dim(),
            });
        }
        let mut rows = vec![axis.0.clone()];
        rows.extend(complement.iter().map(|g| g.0.clone()));
        if linalg::rank(&rows) < n {
            return Err(HomologyError::SingularBasis);
        }
        Ok(ConeSpec {
            axis,
            complement,
            slope,
            norm,
        })
    }

    /// Uses the coordinate complement: every `eᵢ` except the one along the
    /// axis' largest component.
    pub fn with_coordinate_complement(
        axis: HomologyVector<T>,
        slope: T,
        norm: NormModel<T>,
    ) -> Result<Self, HomologyError> {
        let complement = coordinate_complement(&axis)?;
        Self::new(axis, complement, slope, norm)
    }

    pub fn dim(&self) -> usize {
        self.axis.dim()
    }

    /// Human-readable record of the complement used.
    pub fn complement_description(&self) -> Vec<Vec<f64>> {
        self.complement
            .iter()
            .map(|g| g.0.iter().map(|x| x.as_f64()).collect())
            .collect()
    }
}

pub fn coordinate_complement<T: Scalar>(
    axis: &HomologyVector<T>,
) -> Result<Vec<HomologyVector<T>>, HomologyError> {
    let n = axis.dim();
    let (drop, size) = axis
        .0
        .iter()
        .enumerate()
        .fold((0, T::zero()), |acc, (i, x)| {
            if x.abs() > acc.1 {
                (i, x.abs())
            } else {
                acc
            }
        });
    if size.is_zero() {
        return Err(HomologyError::SingularBasis);
    }
    Ok((0..n)
        .filter(|&i| i != drop)
        .map(|i| HomologyVector::basis(n, i))
        .collect())
}

/// Solves `v = t·axis + Σ sⱼ gⱼ` over any field; returns `(t, w)` with
/// `w = Σ sⱼ gⱼ`.
pub fn decompose_in_basis<F: FieldElement>(
    v: &[F],
    axis: &[F],
    complement: &[Vec<F>],
) -> Result<(F, Vec<F>), HomologyError> {
    let n = axis.len();
    if v.len() != n {
        return Err(HomologyError::DimensionMismatch {
            expected: n,
            got: v.len(),
        });
    }
    // Columns are the basis vectors.
    let a: Vec<Vec<F>> = (0..n)
        .map(|i| {
            std::iter::once(axis[i].clone())
                .chain(complement.iter().map(|g| g[i].clone()))
                .collect()
        })
        .collect();
    let coeffs = linalg::solve(&a, v).ok_or(HomologyError::SingularBasis)?;
    let t = coeffs[0].clone();
    let mut w = vec![F::zero(); n];
    for (s, g) in coeffs[1..].iter().zip(complement) {
        for i in 0..n {
            w[i] = w[i].clone() + s.clone() * g[i].clone();
        }
    }
    Ok((t, w))
}

/// Splits `v = t·h + w` with `w` in the span of the cone's complement.
pub fn decompose<T: Scalar>(
    v: &HomologyVector<T>,
    cone: &ConeSpec<T>,
) -> Result<(T, HomologyVector<T>), HomologyError>
where
    T: FieldElement,
{
    let complement: Vec<Vec<T>> = cone.complement.iter().map(|g| g.0.clone()).collect();
    let (t, w) = decompose_in_basis(&v.0, &cone.axis.0, &complement)?;
    Ok((t, HomologyVector(w)))
}

fn effective_t<T: Scalar>(t: T, v: &HomologyVector<T>, axis: &HomologyVector<T>) -> T {
    let scale = linalg::norm_inf(&v.0) / linalg::norm_inf(&axis.0);
    if t.abs() <= T::lit(1e-13) * scale {
        T::zero()
    } else {
        t
    }
}

/// Membership in 𝔠_A(h). The zero vector lies in every cone.
pub fn cone_contains<T: Scalar + FieldElement>(
    v: &HomologyVector<T>,
    cone: &ConeSpec<T>,
) -> Result<bool, HomologyError> {
    if v.is_zero() {
        return Ok(true);
    }
    let (t, w) = decompose(v, cone)?;
    let t = effective_t(t, v, &cone.axis);
    if t < T::zero() {
        return Ok(false);
    }
    let wn = cone.norm.eval(&w.0);
    if t.is_zero() {
        // infinite slope unless w vanishes too
        return Ok(wn <= T::lit(1e-13) * linalg::norm_inf(&v.0));
    }
    let hn = cone.norm.eval(&cone.axis.scale(t).0);
    Ok(wn <= cone.slope * hn * (T::one() + T::lit(1e-12)))
}

/// Outcome of [`minimal_slope`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum SlopeBound<T> {
    /// Smallest `A` with every vector in 𝔠_A(h).
    Finite(T),
    /// Some vector has `t ≤ 0`: no proper cone with this axis contains the set.
    NotProper,
}

impl<T: Copy> SlopeBound<T> {
    pub fn finite(&self) -> Option<T> {
        match self {
            SlopeBound::Finite(a) => Some(*a),
            SlopeBound::NotProper => None,
        }
    }
}

pub fn minimal_slope<T: Scalar + FieldElement>(
    axis: &HomologyVector<T>,
    complement: &[HomologyVector<T>],
    norm: &NormModel<T>,
    vectors: &[HomologyVector<T>],
) -> Result<SlopeBound<T>, HomologyError> {
    if vectors.is_empty() {
        return Err(HomologyError::Empty);
    }
    let cone = ConeSpec::new(axis.clone(), complement.to_vec(), T::zero(), norm.clone())?;
    let mut worst = T::zero();
    for v in vectors {
        let (t, w) = decompose(v, &cone)?;
        let t = effective_t(t, v, axis);
        if t <= T::zero() {
            return Ok(SlopeBound::NotProper);
        }
        let ratio = norm.eval(&w.0) / norm.eval(&axis.scale(t).0);
        worst = worst.max(ratio);
    }
    Ok(SlopeBound::Finite(worst))
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigInt;
    use num_rational::BigRational;
    use proptest::prelude::*;

    fn hv(v: &[f64]) -> HomologyVector<f64> {
        HomologyVector(v.to_vec())
    }

    fn e1_cone(a: f64) -> ConeSpec<f64> {
        ConeSpec::with_coordinate_complement(hv(&[1.0, 0.0, 0.0]), a, NormModel::Euclidean).unwrap()
    }

    #[test]
    fn decompose_identity_and_negation() {
        let cone = e1_cone(1.0);
        let (t, w) = decompose(&hv(&[1.0, 0.0, 0.0]), &cone).unwrap();
        assert_eq!(t, 1.0);
        assert!(w.is_zero());
        let (t, w) = decompose(&hv(&[-1.0, 0.0, 0.0]), &cone).unwrap();
        assert_eq!(t, -1.0);
        assert!(w.is_zero());
    }

    #[test]
    fn decompose_coordinate_split() {
        let (t, w) = decompose(&hv(&[2.0, 1.0, 0.0]), &e1_cone(1.0)).unwrap();
        assert_eq!(t, 2.0);
        assert_eq!(w.0, vec![0.0, 1.0, 0.0]);
    }

    #[test]
    fn decompose_exact_rational() {
        let q = |n: i64, d: i64| BigRational::new(BigInt::from(n), BigInt::from(d));
        let axis = vec![q(1, 1), q(1, 1)];
        let comp = vec![vec![q(1, 1), q(-1, 1)]];
        let (t, w) = decompose_in_basis(&[q(1, 3), q(0, 1)], &axis, &comp).unwrap();
        assert_eq!(t, q(1, 6));
        assert_eq!(w, vec![q(1, 6), q(-1, 6)]);
    }

    #[test]
    fn singular_basis_rejected() {
        let err = ConeSpec::new(
            hv(&[1.0, 0.0]),
            vec![hv(&[2.0, 0.0])],
            1.0,
            NormModel::Euclidean,
        )
        .unwrap_err();
        assert_eq!(err, HomologyError::SingularBasis);
    }

    #[test]
    fn cone_membership_examples() {
        let cone = e1_cone(1.0);
        assert!(cone_contains(&hv(&[2.0, 1.0, 0.0]), &cone).unwrap());
        assert!(!cone_contains(&hv(&[1.0, 2.0, 0.0]), &cone).unwrap());
        assert!(!cone_contains(&hv(&[-1.0, 0.0, 0.0]), &cone).unwrap());
        assert!(cone_contains(&hv(&[0.0, 0.0, 0.0]), &cone).unwrap());
        // t = 0 with w ≠ 0 has infinite slope
        assert!(!cone_contains(&hv(&[0.0, 1.0, 0.0]), &cone).unwrap());
    }

    #[test]
    fn minimal_slope_examples() {
        let e1 = hv(&[1.0, 0.0]);
        let comp = coordinate_complement(&e1).unwrap();
        let s = minimal_slope(&e1, &comp, &NormModel::Euclidean, &[hv(&[1.0, 0.0])]).unwrap();
        assert_eq!(s, SlopeBound::Finite(0.0));

        let opposite = [hv(&[0.0, 1.0]), hv(&[0.0, -1.0])];
        for axis in [
            hv(&[0.0, 1.0]),
            hv(&[1.0, 0.0]),
            hv(&[0.3, -0.8]),
            hv(&[1.0, 1.0]),
        ] {
            let comp = coordinate_complement(&axis).unwrap();
            let s = minimal_slope(&axis, &comp, &NormModel::Euclidean, &opposite).unwrap();
            assert_eq!(s, SlopeBound::NotProper);
        }

        let e1 = hv(&[1.0, 0.0, 0.0]);
        let comp = coordinate_complement(&e1).unwrap();
        let s = minimal_slope(
            &e1,
            &comp,
            &NormModel::Euclidean,
            &[hv(&[2.0, 1.0, 0.0]), hv(&[3.0, 0.0, 1.0])],
        )
        .unwrap();
        assert_eq!(s, SlopeBound::Finite(0.5));
    }

    #[test]
    fn quadratic_norm_matches_formula() {
        let n: NormModel<f64> = NormModel::Quadratic(vec![vec![4.0, 0.0], vec![0.0, 1.0]]);
        assert_eq!(n.eval(&[1.0, 0.0]), 2.0);
        assert_eq!(n.eval(&[0.0, -3.0]), 3.0);
    }

    #[test]
    fn f32_cone_works() {
        let cone = ConeSpec::with_coordinate_complement(
            HomologyVector(vec![1.0f32, 0.0]),
            0.5,
            NormModel::Euclidean,
        )
        .unwrap();
        assert!(cone_contains(&HomologyVector(vec![2.0f32, 0.9]), &cone).unwrap());
        assert!(!cone_contains(&HomologyVector(vec![2.0f32, 1.1]), &cone).unwrap());
    }

    fn vec3() -> impl Strategy<Value = Vec<f64>> {
        prop::collection::vec(-5.0f64..5.0, 3)
    }

    proptest! {
        #[test]
        fn recompose_reproduces(v in vec3(), g in vec3()) {
            let axis = hv(&[1.0, 0.5, -0.25]);
            let comp = vec![hv(&g), hv(&[0.0, 0.0, 1.0])];
            let Ok(cone) = ConeSpec::new(axis.clone(), comp, 1.0, NormModel::Euclidean) else {
                return Ok(());
            };
            // skip nearly singular bases
            let mut rows = vec![axis.0.clone()];
            rows.extend(cone.complement.iter().map(|c| c.0.clone()));
            prop_assume!(linalg::det(&rows).abs() > 0.1);
            let (t, w) = decompose(&hv(&v), &cone).unwrap();
            let scale = linalg::norm_inf(&v).max(1.0);
            for i in 0..3 {
                prop_assert!((t * axis.0[i] + w.0[i] - v[i]).abs() <= 1e-12 * scale);
            }
        }

        #[test]
        fn membership_is_scale_invariant(v in vec3(), lambda in 0.01f64..100.0, a in 0.0f64..3.0) {
            let cone = e1_cone(a);
            let scaled = hv(&v).scale(lambda);
            prop_assert_eq!(cone_contains(&hv(&v), &cone).unwrap(), cone_contains(&scaled, &cone).unwrap());
        }

        #[test]
        fn cones_are_nested(v in vec3(), a in 0.0f64..3.0, extra in 0.0f64..3.0) {
            if cone_contains(&hv(&v), &e1_cone(a)).unwrap() {
                prop_assert!(cone_contains(&hv(&v), &e1_cone(a + extra)).unwrap());
            }
        }

        #[test]
        fn members_lie_in_half_space(v in vec3(), a in 0.0f64..3.0) {
            let cone = e1_cone(a);
            if cone_contains(&hv(&v), &cone).unwrap() {
                let (t, _) = decompose(&hv(&v), &cone).unwrap();
                prop_assert!(t >= 0.0);
            }
        }
    }
}
