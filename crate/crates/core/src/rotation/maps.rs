use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::linalg;
use crate::scalar::{sin_2pi, Scalar};

/// Parameters of the built-in planar lifts.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum MapKind {
    Identity,
    Translation {
        alpha: [f64; 2],
    },
    /// `(x + a sin 2πy, y)`.
    Shear {
        amplitude: f64,
    },
    /// `(x + s₁ + a₁ sin 2πy, y + s₂ + a₂ sin 2πx)`.
    SimultaneousShear {
        shift: [f64; 2],
        amplitude: [f64; 2],
    },
    /// `C ∘ S₂ ∘ S₁` with `S₁: x += a sin 2πy`, `S₂: y += b sin 2πx` and
    /// `C(x,y) = (x − c sin 8πx, y − c sin 8πy)`.
    TwoParamShear {
        a: f64,
        b: f64,
        contraction: f64,
    },
    /// `x ↦ Ax` for an integer matrix.
    Linear {
        matrix: [[i64; 2]; 2],
    },
    /// `A ∘ F ∘ A⁻¹` for `A ∈ GL(2,ℤ)`.
    Conjugated {
        matrix: [[i64; 2]; 2],
        inner: Box<MapKind>,
    },
    Custom {
        label: String,
    },
}

type Eval<T> = Arc<dyn Fn([T; 2]) -> [T; 2] + Send + Sync>;

/// Lift `F: ℝ² → ℝ²` of a torus map.
#[derive(Clone)]
pub struct TorusMapLift<T> {
    kind: MapKind,
    eval: Eval<T>,
}

impl<T> fmt::Debug for TorusMapLift<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "TorusMapLift({:?})", self.kind)
    }
}

impl<T: Scalar> TorusMapLift<T> {
    /// Built-in lift for `kind`; `None` for [`MapKind::Custom`], which has
    /// no evaluator of its own.
    pub fn from_kind(kind: MapKind) -> Option<Self> {
        let eval: Eval<T> = match &kind {
            MapKind::Identity => Arc::new(|z| z),
            MapKind::Translation { alpha } => {
                let a = [T::lit(alpha[0]), T::lit(alpha[1])];
                Arc::new(move |z| [z[0] + a[0], z[1] + a[1]])
            }
            MapKind::Shear { amplitude } => {
                let a = T::lit(*amplitude);
                Arc::new(move |z| [z[0] + a * sin_2pi(z[1]), z[1]])
            }
            MapKind::SimultaneousShear { shift, amplitude } => {
                let s = [T::lit(shift[0]), T::lit(shift[1])];
                let a = [T::lit(amplitude[0]), T::lit(amplitude[1])];
                Arc::new(move |z| {
                    [
                        z[0] + s[0] + a[0] * sin_2pi(z[1]),
                        z[1] + s[1] + a[1] * sin_2pi(z[0]),
                    ]
                })
            }
            MapKind::TwoParamShear { a, b, contraction } => {
                let (a, b, c) = (T::lit(*a), T::lit(*b), T::lit(*contraction));
                let four = T::lit(4.0);
                Arc::new(move |z| {
                    let x = z[0] + a * sin_2pi(z[1]);
                    let y = z[1] + b * sin_2pi(x);
                    [x - c * sin_2pi(four * x), y - c * sin_2pi(four * y)]
                })
            }
            MapKind::Linear { matrix } => {
                let m = matrix.map(|r| r.map(T::of_i64));
                Arc::new(move |z| {
                    [
                        m[0][0] * z[0] + m[0][1] * z[1],
                        m[1][0] * z[0] + m[1][1] * z[1],
                    ]
                })
            }
            MapKind::Conjugated { matrix, inner } => {
                let inner = TorusMapLift::<T>::from_kind((**inner).clone())?;
                let a = matrix.map(|r| r.map(T::of_i64));
                let det = matrix[0][0] * matrix[1][1] - matrix[0][1] * matrix[1][0];
                let d = T::of_i64(det);
                let inv = [[a[1][1] / d, -a[0][1] / d], [-a[1][0] / d, a[0][0] / d]];
                let apply = |m: [[T; 2]; 2], z: [T; 2]| {
                    [
                        m[0][0] * z[0] + m[0][1] * z[1],
                        m[1][0] * z[0] + m[1][1] * z[1],
                    ]
                };
                Arc::new(move |z| apply(a, inner.apply(apply(inv, z))))
            }
            MapKind::Custom { .. } => return None,
        };
        Some(TorusMapLift { kind, eval })
    }

    fn builtin(kind: MapKind) -> Self {
        Self::from_kind(kind).expect("built-in kind")
    }

    pub fn identity() -> Self {
        Self::builtin(MapKind::Identity)
    }

    pub fn translation(alpha: [f64; 2]) -> Self {
        Self::builtin(MapKind::Translation { alpha })
    }

    pub fn shear(amplitude: f64) -> Self {
        Self::builtin(MapKind::Shear { amplitude })
    }

    pub fn simultaneous_shear(shift: [f64; 2], amplitude: [f64; 2]) -> Self {
        Self::builtin(MapKind::SimultaneousShear { shift, amplitude })
    }

    /// Member of the dissipative two-parameter shear family.
    pub fn two_param_shear(a: f64, b: f64) -> Self {
        Self::builtin(MapKind::TwoParamShear {
            a,
            b,
            contraction: 0.03,
        })
    }

    pub fn linear(matrix: [[i64; 2]; 2]) -> Self {
        Self::builtin(MapKind::Linear { matrix })
    }

    /// `A ∘ self ∘ A⁻¹`; `None` unless `A` is unimodular.
    pub fn conjugate(&self, matrix: [[i64; 2]; 2]) -> Option<Self> {
        let det = matrix[0][0] * matrix[1][1] - matrix[0][1] * matrix[1][0];
        if det.abs() != 1 {
            return None;
        }
        match &self.kind {
            MapKind::Custom { .. } => {
                let inner = self.clone();
                let a = matrix.map(|r| r.map(T::of_i64));
                let d = T::of_i64(det);
                let inv = [[a[1][1] / d, -a[0][1] / d], [-a[1][0] / d, a[0][0] / d]];
                let apply = |m: [[T; 2]; 2], z: [T; 2]| {
                    [
                        m[0][0] * z[0] + m[0][1] * z[1],
                        m[1][0] * z[0] + m[1][1] * z[1],
                    ]
                };
                Some(Self::custom(format!("conjugated {:?}", matrix), move |z| {
                    apply(a, inner.apply(apply(inv, z)))
                }))
            }
            k => Self::from_kind(MapKind::Conjugated {
                matrix,
                inner: Box::new(k.clone()),
            }),
        }
    }

    pub fn custom<F>(label: impl Into<String>, f: F) -> Self
    where
        F: Fn([T; 2]) -> [T; 2] + Send + Sync + 'static,
    {
        TorusMapLift {
            kind: MapKind::Custom {
                label: label.into(),
            },
            eval: Arc::new(f),
        }
    }

    pub fn kind(&self) -> &MapKind {
        &self.kind
    }

    #[inline]
    pub fn apply(&self, z: [T; 2]) -> [T; 2] {
        (self.eval)(z)
    }

    pub fn iterate(&self, z: [T; 2], n: usize) -> [T; 2] {
        (0..n).fold(z, |z, _| self.apply(z))
    }

    /// Central-difference Jacobian.
    pub fn jacobian(&self, z: [T; 2], h: T) -> [[T; 2]; 2] {
        let mut j = [[T::zero(); 2]; 2];
        for c in 0..2 {
            let mut zp = z;
            let mut zm = z;
            zp[c] += h;
            zm[c] -= h;
            let (fp, fm) = (self.apply(zp), self.apply(zm));
            for r in 0..2 {
                j[r][c] = (fp[r] - fm[r]) / (h + h);
            }
        }
        j
    }

    /// Solves `F(w) = z` by damped Newton from `w = z`.
    pub fn inverse_apply(&self, z: [T; 2]) -> Option<[T; 2]> {
        let mut w = z;
        let tol = T::lit(1e3) * T::epsilon() * (T::one() + z[0].abs().max(z[1].abs()));
        for _ in 0..60 {
            let f = self.apply(w);
            let r = [f[0] - z[0], f[1] - z[1]];
            let rn = r[0].abs().max(r[1].abs());
            if rn <= tol {
                return Some(w);
            }
            let j = self.jacobian(w, T::lit(1e-6));
            let m = vec![j[0].to_vec(), j[1].to_vec()];
            let s = linalg::solve(&m, &r)?;
            let mut t = T::one();
            loop {
                let cand = [w[0] - t * s[0], w[1] - t * s[1]];
                let fc = self.apply(cand);
                let rc = (fc[0] - z[0]).abs().max((fc[1] - z[1]).abs());
                if rc < rn || t < T::lit(1e-3) {
                    w = cand;
                    break;
                }
                t *= T::lit(0.5);
            }
        }
        let f = self.apply(w);
        ((f[0] - z[0]).abs().max((f[1] - z[1]).abs()) <= tol.sqrt()).then_some(w)
    }
}

/// Largest `|F(x + k) − F(x) − k|` over the samples and `k ∈ {e₁, e₂}`.
pub fn equivariance_defect<T: Scalar>(f: &TorusMapLift<T>, samples: &[[T; 2]]) -> T {
    let mut worst = T::zero();
    for &x in samples {
        let fx = f.apply(x);
        for k in 0..2 {
            let mut xs = x;
            xs[k] += T::one();
            let fs = f.apply(xs);
            for c in 0..2 {
                let shift = if c == k { T::one() } else { T::zero() };
                worst = worst.max((fs[c] - fx[c] - shift).abs());
            }
        }
    }
    worst
}

/// `F(x + k) = F(x) + k` within 1e-9 on the samples: the lift form of
/// being homotopic to the identity.
pub fn check_equivariance<T: Scalar>(f: &TorusMapLift<T>, samples: &[[T; 2]]) -> bool {
    equivariance_defect(f, samples) < T::lit(1e-9)
}

/// `side × side` grid of sample points in `[0,1)²`, offset from the
/// lattice by half a cell.
pub fn sample_grid<T: Scalar>(side: usize) -> Vec<[T; 2]> {
    let s = T::of_usize(side);
    (0..side * side)
        .map(|i| {
            [
                (T::of_usize(i / side) + T::lit(0.5)) / s,
                (T::of_usize(i % side) + T::lit(0.5)) / s,
            ]
        })
        .collect()
}
