use std::fmt;
use std::sync::Arc;

use super::fourier::FourierSeries;
use super::HamiltonianError;
use crate::linalg;
use crate::scalar::{cos_2pi, sin_2pi, Scalar};
use crate::torus::{MetricField, PotentialGrid};

/// Riemannian metric entering a mechanical Hamiltonian.
#[derive(Debug, Clone)]
pub enum MetricModel<T> {
    /// Constant matrix `g` with cached inverse.
    Constant {
        g: Vec<Vec<T>>,
        inverse: Vec<Vec<T>>,
    },
    /// Diagonal `gᵢᵢ(x) = exp(2 sᵢ(x))`.
    Diagonal(Vec<FourierSeries<T>>),
    /// Multilinearly interpolated grid field.
    Grid(MetricField<T>),
}

impl<T: Scalar> MetricModel<T> {
    pub fn flat(n: usize) -> Self {
        let id = linalg::identity(n);
        MetricModel::Constant {
            g: id.clone(),
            inverse: id,
        }
    }

    pub fn constant(g: Vec<Vec<T>>) -> Result<Self, HamiltonianError> {
        if linalg::cholesky(&g).is_none() {
            return Err(HamiltonianError::NotConvex);
        }
        let inverse = linalg::inverse(&g).ok_or(HamiltonianError::NotConvex)?;
        Ok(MetricModel::Constant { g, inverse })
    }

    pub fn dim(&self) -> usize {
        match self {
            MetricModel::Constant { g, .. } => g.len(),
            MetricModel::Diagonal(s) => s.len(),
            MetricModel::Grid(m) => m.dim(),
        }
    }

    pub fn is_constant(&self) -> bool {
        matches!(self, MetricModel::Constant { .. })
    }

    pub fn metric(&self, x: &[T]) -> Vec<Vec<T>> {
        match self {
            MetricModel::Constant { g, .. } => g.clone(),
            MetricModel::Diagonal(s) => {
                diag(s.iter().map(|s| (T::lit(2.0) * s.eval(x)).exp()).collect())
            }
            MetricModel::Grid(m) => m.eval(x),
        }
    }

    pub fn cometric(&self, x: &[T]) -> Vec<Vec<T>> {
        match self {
            MetricModel::Constant { inverse, .. } => inverse.clone(),
            MetricModel::Diagonal(s) => {
                diag(s.iter().map(|s| (T::lit(-2.0) * s.eval(x)).exp()).collect())
            }
            MetricModel::Grid(m) => {
                linalg::inverse(&m.eval(x)).expect("validated positive definite")
            }
        }
    }

    /// Cometric `g⁻¹(x)` and its partial derivatives.
    pub fn cometric_with_gradient(&self, x: &[T]) -> (Vec<Vec<T>>, Vec<Vec<Vec<T>>>) {
        let n = self.dim();
        match self {
            MetricModel::Constant { inverse, .. } => {
                (inverse.clone(), vec![vec![vec![T::zero(); n]; n]; n])
            }
            MetricModel::Diagonal(s) => {
                let mut inv = vec![vec![T::zero(); n]; n];
                let mut d = vec![vec![vec![T::zero(); n]; n]; n];
                for (i, si) in s.iter().enumerate() {
                    let (v, g) = si.value_and_gradient(x);
                    let e = (T::lit(-2.0) * v).exp();
                    inv[i][i] = e;
                    for a in 0..n {
                        d[a][i][i] = T::lit(-2.0) * g[a] * e;
                    }
                }
                (inv, d)
            }
            MetricModel::Grid(m) => {
                let (g, dg) = m.eval_with_gradient(x);
                let gm: Vec<Vec<T>> = g.chunks(n).map(|r| r.to_vec()).collect();
                let inv = linalg::inverse(&gm).expect("validated positive definite");
                let d = dg
                    .iter()
                    .map(|da| {
                        let dam: Vec<Vec<T>> = da.chunks(n).map(|r| r.to_vec()).collect();
                        let t = linalg::mat_mul(&inv, &linalg::mat_mul(&dam, &inv));
                        t.into_iter()
                            .map(|r| r.into_iter().map(|v| -v).collect())
                            .collect()
                    })
                    .collect();
                (inv, d)
            }
        }
    }
}

fn diag<T: Scalar>(d: Vec<T>) -> Vec<Vec<T>> {
    let n = d.len();
    let mut m = vec![vec![T::zero(); n]; n];
    for (i, v) in d.into_iter().enumerate() {
        m[i][i] = v;
    }
    m
}

/// Potential `V` of a mechanical system.
#[derive(Debug, Clone)]
pub enum Potential<T> {
    Fourier(FourierSeries<T>),
    Grid(PotentialGrid<T>),
}

impl<T: Scalar> Potential<T> {
    pub fn zero() -> Self {
        Potential::Fourier(FourierSeries::constant(T::zero()))
    }

    pub fn eval(&self, x: &[T]) -> T {
        match self {
            Potential::Fourier(f) => f.eval(x),
            Potential::Grid(g) => g.eval(x),
        }
    }

    pub fn gradient(&self, x: &[T]) -> Vec<T> {
        match self {
            Potential::Fourier(f) => f.gradient(x),
            Potential::Grid(g) => g.gradient(x),
        }
    }

    /// Grid sampling used for critical values; grid potentials are returned
    /// as stored.
    pub fn to_grid(&self, n: usize, resolution: usize) -> PotentialGrid<T> {
        match self {
            Potential::Fourier(f) => f.to_grid(n, resolution),
            Potential::Grid(g) => g.clone(),
        }
    }
}

type ScalarFn<T> = Arc<dyn Fn(&[T], &[T]) -> T + Send + Sync>;
type VectorFn<T> = Arc<dyn Fn(&[T], &[T]) -> Vec<T> + Send + Sync>;

/// User-supplied Hamiltonian with analytic gradients.
#[derive(Clone)]
pub struct CustomHamiltonian<T> {
    pub h: ScalarFn<T>,
    pub grad_x: VectorFn<T>,
    pub grad_p: VectorFn<T>,
}

impl<T> fmt::Debug for CustomHamiltonian<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("CustomHamiltonian")
    }
}

#[derive(Debug, Clone)]
pub enum ModelKind<T> {
    /// `H = ½ gⁱʲ(x) pᵢpⱼ − V(x)`.
    Mechanical {
        metric: MetricModel<T>,
        potential: Potential<T>,
    },
    /// `H = ½|p|² + ⟨p, X(x)⟩`.
    Mane {
        field: Vec<FourierSeries<T>>,
    },
    Custom(CustomHamiltonian<T>),
}

/// Tonelli Hamiltonian on T*𝕋ⁿ.
#[derive(Debug, Clone)]
pub struct HamiltonianModel<T> {
    n: usize,
    kind: ModelKind<T>,
}

impl<T: Scalar> HamiltonianModel<T> {
    pub fn mechanical(metric: MetricModel<T>, potential: Potential<T>) -> Self {
        HamiltonianModel {
            n: metric.dim(),
            kind: ModelKind::Mechanical { metric, potential },
        }
    }

    /// Free motion on the flat torus.
    pub fn flat(n: usize) -> Self {
        Self::mechanical(MetricModel::flat(n), Potential::zero())
    }

    /// Flat pendulum `V = cos 2πx₁` on 𝕋ⁿ.
    pub fn pendulum(n: usize) -> Self {
        let mut k = vec![0; n];
        k[0] = 1;
        Self::mechanical(
            MetricModel::flat(n),
            Potential::Fourier(FourierSeries::cos(k, T::one())),
        )
    }

    pub fn mane(field: Vec<FourierSeries<T>>) -> Self {
        HamiltonianModel {
            n: field.len(),
            kind: ModelKind::Mane { field },
        }
    }

    /// Mañé model on 𝕋² with `X = (cos 2πx₁, sin 2πx₁)`.
    pub fn mane_example() -> Self {
        Self::mane(vec![
            FourierSeries::cos(vec![1, 0], T::one()),
            FourierSeries::sin(vec![1, 0], T::one()),
        ])
    }

    /// Custom model; fibre convexity is spot-checked on `samples` points
    /// of the cube `[0,1)ⁿ × [−2,2]ⁿ`.
    pub fn custom(
        n: usize,
        h: CustomHamiltonian<T>,
        samples: &[(Vec<T>, Vec<T>)],
    ) -> Result<Self, HamiltonianError> {
        let model = HamiltonianModel {
            n,
            kind: ModelKind::Custom(h),
        };
        for (x, p) in samples {
            if linalg::cholesky(&model.hess_p(x, p)).is_none() {
                return Err(HamiltonianError::NotConvex);
            }
        }
        Ok(model)
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn kind(&self) -> &ModelKind<T> {
        &self.kind
    }

    /// Kinetic and potential parts split, as needed by leapfrog.
    pub fn is_separable(&self) -> bool {
        matches!(&self.kind, ModelKind::Mechanical { metric, .. } if metric.is_constant())
    }

    /// Vector field `X` of a Mañé model.
    pub fn mane_field(&self, x: &[T]) -> Option<Vec<T>> {
        match &self.kind {
            ModelKind::Mane { field } => Some(field.iter().map(|f| f.eval(x)).collect()),
            _ => None,
        }
    }

    pub fn eval_h(&self, x: &[T], p: &[T]) -> T {
        match &self.kind {
            ModelKind::Mechanical { metric, potential } => {
                T::lit(0.5) * linalg::bilinear(&metric.cometric(x), p, p) - potential.eval(x)
            }
            ModelKind::Mane { field } => {
                let kinetic = T::lit(0.5) * linalg::dot(p, p);
                kinetic
                    + field
                        .iter()
                        .zip(p)
                        .map(|(f, &pi)| pi * f.eval(x))
                        .sum::<T>()
            }
            ModelKind::Custom(c) => (c.h)(x, p),
        }
    }

    /// `(∇ₓH, ∇ₚH)`.
    pub fn grad_h(&self, x: &[T], p: &[T]) -> (Vec<T>, Vec<T>) {
        let n = self.n;
        match &self.kind {
            ModelKind::Mechanical { metric, potential } => {
                let (inv, dinv) = metric.cometric_with_gradient(x);
                let gp = linalg::mat_vec(&inv, p);
                let dv = potential.gradient(x);
                let gx = (0..n)
                    .map(|a| T::lit(0.5) * linalg::bilinear(&dinv[a], p, p) - dv[a])
                    .collect();
                (gx, gp)
            }
            ModelKind::Mane { field } => {
                let mut gx = vec![T::zero(); n];
                let mut gp = p.to_vec();
                for (i, f) in field.iter().enumerate() {
                    let (v, g) = f.value_and_gradient(x);
                    gp[i] += v;
                    for a in 0..n {
                        gx[a] += p[i] * g[a];
                    }
                }
                (gx, gp)
            }
            ModelKind::Custom(c) => ((c.grad_x)(x, p), (c.grad_p)(x, p)),
        }
    }

    /// Fibre Hessian `∂²H/∂p²`; central differences of `∇ₚH` for custom
    /// models.
    pub fn hess_p(&self, x: &[T], p: &[T]) -> Vec<Vec<T>> {
        match &self.kind {
            ModelKind::Mechanical { metric, .. } => metric.cometric(x),
            ModelKind::Mane { .. } => linalg::identity(self.n),
            ModelKind::Custom(c) => {
                let h = T::lit(1e-5);
                let mut m = vec![vec![T::zero(); self.n]; self.n];
                for j in 0..self.n {
                    let mut pp = p.to_vec();
                    let mut pm = p.to_vec();
                    pp[j] += h;
                    pm[j] -= h;
                    let gp = (c.grad_p)(x, &pp);
                    let gm = (c.grad_p)(x, &pm);
                    for i in 0..self.n {
                        m[i][j] = (gp[i] - gm[i]) / (h + h);
                    }
                }
                for i in 0..self.n {
                    for j in 0..i {
                        let s = T::lit(0.5) * (m[i][j] + m[j][i]);
                        m[i][j] = s;
                        m[j][i] = s;
                    }
                }
                m
            }
        }
    }

    /// Legendre transform: the covector `p` with `∇ₚH(x,p) = v`, by damped
    /// Newton iteration.
    pub fn legendre(&self, x: &[T], v: &[T]) -> Result<Vec<T>, HamiltonianError> {
        let mut p = match &self.kind {
            ModelKind::Mechanical { metric, .. } => linalg::mat_vec(&metric.metric(x), v),
            ModelKind::Mane { field } => v.iter().zip(field).map(|(v, f)| *v - f.eval(x)).collect(),
            ModelKind::Custom(_) => v.to_vec(),
        };
        let scale = T::one() + linalg::norm_inf(v);
        let tol = T::lit(64.0) * T::epsilon() * scale;
        let residual = |p: &[T]| -> Vec<T> {
            let (_, gp) = self.grad_h(x, p);
            gp.iter().zip(v).map(|(a, b)| *a - *b).collect()
        };
        let mut r = residual(&p);
        let mut rn = linalg::norm_inf(&r);
        let mut iterations = 0;
        while rn > tol && iterations < 100 {
            iterations += 1;
            let Some(step) = linalg::solve(&self.hess_p(x, &p), &r) else {
                break;
            };
            let mut t = T::one();
            let mut improved = false;
            while t >= T::lit(1e-4) {
                let cand: Vec<T> = p.iter().zip(&step).map(|(p, s)| *p - t * *s).collect();
                let rc = residual(&cand);
                let rcn = linalg::norm_inf(&rc);
                if rcn < rn {
                    p = cand;
                    r = rc;
                    rn = rcn;
                    improved = true;
                    break;
                }
                t *= T::lit(0.5);
            }
            if !improved {
                break;
            }
        }
        if rn.is_finite() && rn <= T::epsilon().sqrt() * scale {
            Ok(p)
        } else {
            Err(HamiltonianError::NewtonDiverged {
                iterations,
                residual: rn.as_f64(),
            })
        }
    }

    /// `L(x,v) = ⟨p,v⟩ − H(x,p)` at the Legendre covector.
    pub fn fenchel_l(&self, x: &[T], v: &[T]) -> Result<T, HamiltonianError> {
        let p = self.legendre(x, v)?;
        Ok(linalg::dot(&p, v) - self.eval_h(x, &p))
    }

    /// `(L, ∂L/∂x, ∂L/∂v)`; by the envelope identity `∂L/∂v = p` and
    /// `∂L/∂x = −∂H/∂x` at the Legendre covector.
    pub fn lagrangian_with_gradient(
        &self,
        x: &[T],
        v: &[T],
    ) -> Result<(T, Vec<T>, Vec<T>), HamiltonianError> {
        let p = self.legendre(x, v)?;
        let (gx, _) = self.grad_h(x, &p);
        let l = linalg::dot(&p, v) - self.eval_h(x, &p);
        Ok((l, gx.into_iter().map(|g| -g).collect(), p))
    }
}

/// Strict critical value of `½|p|²_g − V`: `−min V` over the grid.
pub fn critical_value_mechanical<T: Scalar>(v: &PotentialGrid<T>) -> T {
    -v.min()
}

/// Mañé example vector field `X(x) = (cos 2πx₁, sin 2πx₁)`.
pub fn mane_example_field<T: Scalar>(x: &[T]) -> Vec<T> {
    vec![cos_2pi(x[0]), sin_2pi(x[0])]
}
