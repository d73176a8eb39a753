//! Mather's β by minimizing the average action over closed curves.

use std::collections::HashMap;
use std::io::Write;

use serde::Serialize;

use super::MatherError;
use crate::hamiltonian::HamiltonianModel;
use crate::homology::IntHomologyClass;
use crate::scalar::Scalar;

/// Discrete closed curve with `nodes[N] = nodes[0] + winding` implied.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PeriodicCurve<T> {
    pub winding: IntHomologyClass,
    pub nodes: Vec<Vec<T>>,
    pub period: T,
}

impl<T: Scalar> PeriodicCurve<T> {
    pub const MIN_NODES: usize = 16;

    /// Uniform straight line from `start` with the given winding.
    pub fn straight(start: &[T], winding: IntHomologyClass, period: T, n: usize) -> Self {
        let n = n.max(Self::MIN_NODES);
        let nodes = (0..n)
            .map(|i| {
                let s = T::of_usize(i) / T::of_usize(n);
                start
                    .iter()
                    .zip(&winding.0)
                    .map(|(x, k)| *x + s * T::of_i64(*k))
                    .collect()
            })
            .collect();
        Self {
            winding,
            nodes,
            period,
        }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Node `i` for `0 ≤ i ≤ N`, closing up with the winding.
    pub fn node(&self, i: usize) -> Vec<T> {
        if i < self.nodes.len() {
            return self.nodes[i].clone();
        }
        self.nodes[0]
            .iter()
            .zip(&self.winding.0)
            .map(|(x, k)| *x + T::of_i64(*k))
            .collect()
    }

    pub fn rotation_vector(&self) -> Vec<T> {
        self.winding
            .0
            .iter()
            .map(|k| T::of_i64(*k) / self.period)
            .collect()
    }

    fn flat(&self) -> Vec<T> {
        self.nodes.iter().flatten().copied().collect()
    }

    fn with_flat(&self, x: &[T]) -> Self {
        let n = self.winding.dim();
        Self {
            winding: self.winding.clone(),
            nodes: x.chunks(n).map(<[T]>::to_vec).collect(),
            period: self.period,
        }
    }
}

/// Average action `(1/T) ∫ L` by the midpoint rule, with its gradient in
/// the node positions.
pub fn curve_action<T: Scalar>(
    model: &HamiltonianModel<T>,
    curve: &PeriodicCurve<T>,
) -> Result<(T, Vec<Vec<T>>), MatherError> {
    let n = curve.len();
    let dim = curve.winding.dim();
    let tau = curve.period / T::of_usize(n);
    let inv_n = T::one() / T::of_usize(n);
    let half = T::lit(0.5);
    let mut value = T::zero();
    let mut grad = vec![vec![T::zero(); dim]; n];
    for i in 0..n {
        let (a, b) = (curve.node(i), curve.node(i + 1));
        let mid: Vec<T> = a.iter().zip(&b).map(|(a, b)| (*a + *b) * half).collect();
        let v: Vec<T> = a.iter().zip(&b).map(|(a, b)| (*b - *a) / tau).collect();
        let (l, lx, lv) = model.lagrangian_with_gradient(&mid, &v)?;
        value += l * inv_n;
        let j = (i + 1) % n;
        for c in 0..dim {
            grad[i][c] += inv_n * (half * lx[c] - lv[c] / tau);
            grad[j][c] += inv_n * (half * lx[c] + lv[c] / tau);
        }
    }
    Ok((value, grad))
}

pub(crate) struct Minimum<T> {
    pub x: Vec<T>,
    pub value: T,
    pub grad_norm: T,
    pub iterations: usize,
}

fn sup_norm<T: Scalar>(v: &[T]) -> T {
    v.iter().fold(T::zero(), |a, b| a.max(b.abs()))
}

fn dot<T: Scalar>(a: &[T], b: &[T]) -> T {
    a.iter().zip(b).map(|(x, y)| *x * *y).sum()
}

/// Limited-memory BFGS with backtracking line search.
pub(crate) fn minimize<T, F>(
    x0: Vec<T>,
    f: F,
    max_iter: usize,
    gtol: T,
) -> Result<Minimum<T>, MatherError>
where
    T: Scalar,
    F: Fn(&[T]) -> Result<(T, Vec<T>), MatherError>,
{
    const MEMORY: usize = 8;
    let mut x = x0;
    let (mut fx, mut g) = f(&x)?;
    let mut history: Vec<(Vec<T>, Vec<T>, T)> = Vec::new();
    let mut iterations = 0;
    while iterations < max_iter && sup_norm(&g) >= gtol {
        iterations += 1;
        // two-loop recursion
        let mut d: Vec<T> = g.iter().map(|v| -*v).collect();
        let mut alphas = Vec::with_capacity(history.len());
        for (s, y, rho) in history.iter().rev() {
            let a = *rho * dot(s, &d);
            d.iter_mut().zip(y).for_each(|(d, y)| *d -= a * *y);
            alphas.push(a);
        }
        let gamma = match history.last() {
            Some((s, y, _)) => dot(s, y) / dot(y, y),
            None => T::lit(0.01) / sup_norm(&g),
        };
        d.iter_mut().for_each(|d| *d *= gamma);
        for ((s, y, rho), a) in history.iter().zip(alphas.iter().rev()) {
            let b = *rho * dot(y, &d);
            d.iter_mut().zip(s).for_each(|(d, s)| *d += (*a - b) * *s);
        }
        let mut slope = dot(&g, &d);
        if slope >= T::zero() {
            history.clear();
            d = g
                .iter()
                .map(|v| -*v * T::lit(0.01) / sup_norm(&g))
                .collect();
            slope = dot(&g, &d);
        }
        let mut t = T::one();
        let mut accepted = None;
        while t > T::lit(1e-12) {
            let cand: Vec<T> = x.iter().zip(&d).map(|(x, d)| *x + t * *d).collect();
            let (fc, gc) = f(&cand)?;
            let armijo = fc <= fx + T::lit(1e-4) * t * slope;
            // below roundoff the value cannot decide; fall back on the gradient
            let flat = fc <= fx + T::lit(16.0) * T::epsilon() * fx.abs().max(T::one())
                && sup_norm(&gc) < sup_norm(&g);
            if fc.is_finite() && (armijo || flat) {
                accepted = Some((cand, fc, gc));
                break;
            }
            t *= T::lit(0.5);
        }
        let Some((xn, fnew, gn)) = accepted else {
            break;
        };
        let s: Vec<T> = xn.iter().zip(&x).map(|(a, b)| *a - *b).collect();
        let y: Vec<T> = gn.iter().zip(&g).map(|(a, b)| *a - *b).collect();
        let sy = dot(&s, &y);
        if sy > T::zero() {
            history.push((s, y, T::one() / sy));
            if history.len() > MEMORY {
                history.remove(0);
            }
        }
        x = xn;
        fx = fnew;
        g = gn;
    }
    Ok(Minimum {
        grad_norm: sup_norm(&g),
        x,
        value: fx,
        iterations,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BetaOptions<T> {
    /// Curve nodes per unit of period; at least 16 in total.
    pub nodes: usize,
    /// Largest denominator used for the envelope at irrational `h`.
    pub q_max: i64,
    /// Largest denominator for which `h` is treated as rational.
    pub max_period: i64,
    pub max_iterations: usize,
    /// Number of shifted straight-line starts.
    pub seeds: usize,
    pub gradient_tol: T,
}

impl<T: Scalar> Default for BetaOptions<T> {
    fn default() -> Self {
        Self {
            nodes: 32,
            q_max: 8,
            max_period: 64,
            max_iterations: 4000,
            seeds: 3,
            gradient_tol: T::lit(1e-8),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BetaEvaluation<T> {
    pub h: Vec<T>,
    pub value: T,
    /// Minimizing curve; absent when the value comes from the envelope.
    pub optimizer: Option<PeriodicCurve<T>>,
    pub converged: bool,
    pub gradient_norm: T,
    pub iterations: usize,
}

/// `h = k/q` with the smallest `q ≤ max_q`.
pub fn rational_approximation<T: Scalar>(h: &[T], max_q: i64) -> Option<(Vec<i64>, i64)> {
    let scale = T::one() + h.iter().fold(T::zero(), |a, b| a.max(b.abs()));
    let tol = T::lit(1e-9) * scale;
    (1..=max_q).find_map(|q| {
        let qf = T::of_i64(q);
        let k: Vec<i64> = h.iter().map(|x| (*x * qf).round_i64()).collect();
        let ok = h
            .iter()
            .zip(&k)
            .all(|(x, k)| (*x * qf - T::of_i64(*k)).abs() <= tol * qf);
        ok.then_some((k, q))
    })
}

fn seed_offset<T: Scalar>(seed: usize, dim: usize) -> Vec<T> {
    const ROOTS: [f64; 6] = [2.0, 3.0, 5.0, 7.0, 11.0, 13.0];
    (0..dim)
        .map(|i| {
            let theta = ROOTS[i % ROOTS.len()].sqrt().fract();
            T::lit(((seed + 1) as f64 * theta).fract())
        })
        .collect()
}

/// Minimal average action over closed curves with winding `k` and period `q`.
pub fn beta_rational<T: Scalar>(
    model: &HamiltonianModel<T>,
    k: &[i64],
    q: i64,
    opts: &BetaOptions<T>,
) -> Result<BetaEvaluation<T>, MatherError> {
    let dim = model.dim();
    if k.len() != dim {
        return Err(MatherError::InvalidInput(format!(
            "winding has {} components, model {dim}",
            k.len()
        )));
    }
    let period = T::of_i64(q);
    let n = opts
        .nodes
        .saturating_mul(q as usize)
        .max(PeriodicCurve::<T>::MIN_NODES);
    let mut best: Option<BetaEvaluation<T>> = None;
    for seed in 0..opts.seeds.max(1) {
        let start = seed_offset::<T>(seed, dim);
        let curve = PeriodicCurve::straight(&start, IntHomologyClass::new(k.to_vec()), period, n);
        let objective = |x: &[T]| {
            let (v, g) = curve_action(model, &curve.with_flat(x))?;
            Ok((v, g.into_iter().flatten().collect()))
        };
        let m = minimize(
            curve.flat(),
            objective,
            opts.max_iterations,
            opts.gradient_tol,
        )?;
        let eval = BetaEvaluation {
            h: k.iter().map(|k| T::of_i64(*k) / period).collect(),
            value: m.value,
            optimizer: Some(curve.with_flat(&m.x)),
            converged: m.grad_norm < opts.gradient_tol,
            gradient_norm: m.grad_norm,
            iterations: m.iterations,
        };
        if best.as_ref().is_none_or(|b| eval.value < b.value) {
            best = Some(eval);
        }
    }
    let best = best.expect("at least one seed");
    if !best.value.is_finite() || best.gradient_norm > opts.gradient_tol.sqrt() {
        return Err(MatherError::NotConverged {
            gradient_norm: best.gradient_norm.as_f64(),
        });
    }
    Ok(best)
}

/// Upper approximation of `β(h)`: exact curve minimization for rational
/// `h`, otherwise the least multilinear interpolant of rational corners.
pub fn beta<T: Scalar>(
    model: &HamiltonianModel<T>,
    h: &[T],
    opts: &BetaOptions<T>,
) -> Result<BetaEvaluation<T>, MatherError> {
    if h.len() != model.dim() {
        return Err(MatherError::InvalidInput(format!(
            "h has {} components, model {}",
            h.len(),
            model.dim()
        )));
    }
    if let Some((k, q)) = rational_approximation(h, opts.max_period) {
        let mut e = beta_rational(model, &k, q, opts)?;
        e.h = h.to_vec();
        return Ok(e);
    }
    let dim = h.len();
    let mut cache: HashMap<(Vec<i64>, i64), BetaEvaluation<T>> = HashMap::new();
    let mut best: Option<(T, bool)> = None;
    for q in 1..=opts.q_max.max(1) {
        let qf = T::of_i64(q);
        let base: Vec<i64> = h.iter().map(|x| (*x * qf).floor_i64()).collect();
        let frac: Vec<T> = h
            .iter()
            .zip(&base)
            .map(|(x, b)| *x * qf - T::of_i64(*b))
            .collect();
        let (mut total, mut converged) = (T::zero(), true);
        for mask in 0..1usize << dim {
            let mut weight = T::one();
            let mut corner = base.clone();
            for i in 0..dim {
                if mask >> i & 1 == 1 {
                    corner[i] += 1;
                    weight *= frac[i];
                } else {
                    weight *= T::one() - frac[i];
                }
            }
            if weight == T::zero() {
                continue;
            }
            let g = corner.iter().fold(q, |g, c| num_integer::gcd(g, *c));
            let key = (corner.iter().map(|c| c / g).collect::<Vec<_>>(), q / g);
            if !cache.contains_key(&key) {
                let e = beta_rational(model, &key.0, key.1, opts)?;
                cache.insert(key.clone(), e);
            }
            let e = &cache[&key];
            total += weight * e.value;
            converged &= e.converged;
        }
        if best.is_none_or(|(v, _)| total < v) {
            best = Some((total, converged));
        }
    }
    let (value, converged) = best.expect("q_max ≥ 1");
    Ok(BetaEvaluation {
        h: h.to_vec(),
        value,
        optimizer: None,
        converged,
        gradient_norm: T::nan(),
        iterations: 0,
    })
}

/// CSV with columns `h1..hn,value,converged`.
pub fn write_beta_csv<T: Scalar, W: Write>(
    rows: &[BetaEvaluation<T>],
    mut w: W,
) -> std::io::Result<()> {
    let dim = rows.first().map_or(0, |r| r.h.len());
    let head: Vec<String> = (1..=dim).map(|i| format!("h{i}")).collect();
    writeln!(w, "{},value,converged", head.join(","))?;
    for r in rows {
        let h: Vec<String> = r.h.iter().map(|x| x.to_string()).collect();
        writeln!(w, "{},{},{}", h.join(","), r.value, r.converged)?;
    }
    Ok(())
}
