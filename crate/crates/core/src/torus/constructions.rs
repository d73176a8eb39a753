//! Metric constructions: the geodesible metric of a flow transverse to a
//! closed 1-form, and the Jacobi (Maupertuis) metric of a mechanical energy
//! level.

use super::metric::{node_coords, MetricField, PotentialGrid};
use super::GeometryError;
use crate::linalg;
use crate::scalar::Scalar;

/// Closed 1-form `β = c + dφ`: a cohomology class plus the differential of a
/// periodic potential. Closedness holds by construction.
#[derive(Debug, Clone)]
pub struct OneForm<T> {
    pub class: Vec<T>,
    pub potential: PotentialGrid<T>,
}

impl<T: Scalar> OneForm<T> {
    /// Constant form `β = c` (zero potential).
    pub fn constant(class: Vec<T>, resolution: usize) -> Self {
        let n = class.len();
        OneForm {
            potential: PotentialGrid::from_fn(n, resolution, |_| T::zero()),
            class,
        }
    }

    pub fn dim(&self) -> usize {
        self.class.len()
    }

    /// Covector at a grid node (central differences of the potential).
    pub fn at_node(&self, node: usize) -> Vec<T> {
        let n = self.dim();
        let res = self.potential.resolution;
        let h = T::one() / T::of_usize(res);
        let mut c = vec![0usize; n];
        node_coords(n, res, node, &mut c);
        let mut out = self.class.clone();
        for d in 0..n {
            let shifted = |delta: i64| {
                let idx = (0..n).fold(0usize, |acc, k| {
                    let ck = if k == d {
                        (c[k] as i64 + delta).rem_euclid(res as i64) as usize
                    } else {
                        c[k]
                    };
                    acc * res + ck
                });
                self.potential.values[idx]
            };
            out[d] += (shifted(1) - shifted(-1)) / (h + h);
        }
        out
    }

    /// Zero-mean periodic part `dφ` at a node.
    pub fn periodic_part(&self, node: usize) -> Vec<T> {
        self.at_node(node)
            .into_iter()
            .zip(&self.class)
            .map(|(b, c)| b - *c)
            .collect()
    }
}

/// `Pᴴᵀ ḡ Pᴴ + Pⱽᵀ ḡ Pⱽ` for the splitting `⟨X⟩ ⊕ ker β`, where
/// `Pᴴ = X βᵀ / β(X)` and `Pⱽ = I − Pᴴ`. Fails when `β(X)` vanishes.
pub fn geodesible_tensor<T: Scalar>(
    base: &[Vec<T>],
    field: &[T],
    beta: &[T],
) -> Result<Vec<Vec<T>>, T> {
    let n = field.len();
    let pairing = linalg::dot(beta, field);
    let scale = linalg::norm2(beta) * linalg::norm2(field);
    if !(pairing.abs() > T::lit(1e-12) * scale) {
        return Err(pairing);
    }
    let ph: Vec<Vec<T>> = (0..n)
        .map(|i| (0..n).map(|j| field[i] * beta[j] / pairing).collect())
        .collect();
    let pv: Vec<Vec<T>> = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| {
                    if i == j {
                        T::one() - ph[i][j]
                    } else {
                        -ph[i][j]
                    }
                })
                .collect()
        })
        .collect();
    let pull = |p: &Vec<Vec<T>>| linalg::mat_mul(&linalg::transpose(p), &linalg::mat_mul(base, p));
    let a = pull(&ph);
    let b = pull(&pv);
    Ok((0..n)
        .map(|i| (0..n).map(|j| a[i][j] + b[i][j]).collect())
        .collect())
}

/// Metric for which `X` is orthogonal to the leaves of `ker β`.
///
/// Orbits of `X` are geodesics of the result when `|X|_ḡ / β(X)` is constant
/// along each leaf; the orthogonality holds at every node regardless.
pub fn geodesible_metric<T, F>(
    base: &MetricField<T>,
    field: F,
    beta: &OneForm<T>,
) -> Result<MetricField<T>, GeometryError>
where
    T: Scalar,
    F: Fn(&[T]) -> Vec<T>,
{
    geodesible_metric_where(base, field, beta, |_| true)
}

/// As [`geodesible_metric`], but only at nodes selected by `region`; other
/// nodes keep the base metric.
pub fn geodesible_metric_where<T, F, R>(
    base: &MetricField<T>,
    field: F,
    beta: &OneForm<T>,
    region: R,
) -> Result<MetricField<T>, GeometryError>
where
    T: Scalar,
    F: Fn(&[T]) -> Vec<T>,
    R: Fn(&[T]) -> bool,
{
    if beta.dim() != base.dim() {
        return Err(GeometryError::DimensionMismatch {
            expected: base.dim(),
            got: beta.dim(),
        });
    }
    if beta.potential.resolution != base.resolution() {
        return Err(GeometryError::ResolutionMismatch(
            base.resolution(),
            beta.potential.resolution,
        ));
    }
    base.map_nodes(|node, g| {
        let x = base.node_position(node);
        if !region(&x) {
            return Ok(g);
        }
        let b = beta.at_node(node);
        geodesible_tensor(&g, &field(&x), &b).map_err(|value| GeometryError::DegeneratePairing {
            node,
            value: value.as_f64(),
        })
    })
}

/// Jacobi metric of the energy level `H = e` of `H = ½ g^{ij} pᵢpⱼ − V`:
/// `g_e = (e + V) g`, so orbits at energy `e` are reparametrised geodesics.
pub fn maupertuis_metric<T: Scalar>(
    metric: &MetricField<T>,
    potential: &PotentialGrid<T>,
    energy: T,
) -> Result<MetricField<T>, GeometryError> {
    if potential.resolution != metric.resolution() {
        return Err(GeometryError::ResolutionMismatch(
            metric.resolution(),
            potential.resolution,
        ));
    }
    if potential.n != metric.dim() {
        return Err(GeometryError::DimensionMismatch {
            expected: metric.dim(),
            got: potential.n,
        });
    }
    if let Some((node, v)) = potential
        .values
        .iter()
        .enumerate()
        .find(|(_, v)| !(energy + **v > T::zero()))
    {
        return Err(GeometryError::SubcriticalEnergy {
            energy: energy.as_f64(),
            node,
            value: (energy + *v).as_f64(),
        });
    }
    metric.map_nodes(|node, g| {
        let k = energy + potential.values[node];
        Ok(g.into_iter()
            .map(|row| row.into_iter().map(|v| v * k).collect())
            .collect())
    })
}
