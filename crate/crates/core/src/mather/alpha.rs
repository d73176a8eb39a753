//! Mather's α as the convex conjugate of sampled β values.

use std::collections::BTreeMap;
use std::io::Write;

use rayon::prelude::*;
use serde::Serialize;

use super::beta::{beta, BetaEvaluation, BetaOptions};
use super::MatherError;
use crate::hamiltonian::HamiltonianModel;
use crate::scalar::Scalar;

type BetaFn<T> = dyn Fn(&[T]) -> Result<BetaEvaluation<T>, MatherError> + Send + Sync;

/// Memoized β oracle.
pub struct BetaTable<T> {
    eval: Box<BetaFn<T>>,
    cache: BTreeMap<Vec<u64>, BetaEvaluation<T>>,
}

fn key<T: Scalar>(h: &[T]) -> Vec<u64> {
    h.iter().map(|x| x.as_f64().to_bits()).collect()
}

impl<T: Scalar> BetaTable<T> {
    pub fn from_model(model: HamiltonianModel<T>, opts: BetaOptions<T>) -> Self {
        Self {
            eval: Box::new(move |h| beta(&model, h, &opts)),
            cache: BTreeMap::new(),
        }
    }

    /// Table backed by a closed-form β.
    pub fn from_fn(f: impl Fn(&[T]) -> T + Send + Sync + 'static) -> Self {
        Self {
            eval: Box::new(move |h| {
                Ok(BetaEvaluation {
                    h: h.to_vec(),
                    value: f(h),
                    optimizer: None,
                    converged: true,
                    gradient_norm: T::zero(),
                    iterations: 0,
                })
            }),
            cache: BTreeMap::new(),
        }
    }

    /// Evaluates every missing point, in parallel.
    pub fn prefill(&mut self, points: &[Vec<T>]) -> Result<(), MatherError> {
        let mut missing: Vec<&Vec<T>> = points
            .iter()
            .filter(|h| !self.cache.contains_key(&key(h)))
            .collect();
        missing.dedup_by_key(|h| key(h));
        let eval = &self.eval;
        let done: Vec<BetaEvaluation<T>> = missing
            .par_iter()
            .map(|h| eval(h))
            .collect::<Result<_, _>>()?;
        for e in done {
            self.cache.insert(key(&e.h), e);
        }
        Ok(())
    }

    pub fn get(&mut self, h: &[T]) -> Result<T, MatherError> {
        if let Some(e) = self.cache.get(&key(h)) {
            return Ok(e.value);
        }
        let e = (self.eval)(h)?;
        let v = e.value;
        self.cache.insert(key(h), e);
        Ok(v)
    }

    pub fn evaluations(&self) -> impl Iterator<Item = &BetaEvaluation<T>> {
        self.cache.values()
    }

    pub fn samples(&self) -> Vec<(Vec<T>, T)> {
        self.cache
            .values()
            .map(|e| (e.h.clone(), e.value))
            .collect()
    }

    pub fn write_csv<W: Write>(&self, w: W) -> std::io::Result<()> {
        let rows: Vec<BetaEvaluation<T>> = self.cache.values().cloned().collect();
        super::beta::write_beta_csv(&rows, w)
    }
}

/// Regular sample grid on a box.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SampleGrid<T> {
    pub lo: Vec<T>,
    pub hi: Vec<T>,
    pub per_axis: usize,
}

impl<T: Scalar> SampleGrid<T> {
    pub fn cube(dim: usize, half_width: T, per_axis: usize) -> Self {
        Self {
            lo: vec![-half_width; dim],
            hi: vec![half_width; dim],
            per_axis,
        }
    }

    pub fn spacing(&self) -> Vec<T> {
        let d = T::of_usize(self.per_axis.max(2) - 1);
        self.lo
            .iter()
            .zip(&self.hi)
            .map(|(a, b)| (*b - *a) / d)
            .collect()
    }

    /// Grid points in row-major order, last axis fastest.
    pub fn points(&self) -> Vec<Vec<T>> {
        let dim = self.lo.len();
        let s = self.spacing();
        let total = self.per_axis.pow(dim as u32);
        (0..total)
            .map(|mut idx| {
                let mut p = vec![T::zero(); dim];
                for a in (0..dim).rev() {
                    p[a] = self.lo[a] + s[a] * T::of_usize(idx % self.per_axis);
                    idx /= self.per_axis;
                }
                p
            })
            .collect()
    }
}

/// `max ⟨c,h⟩ − β(h)` over samples, with the index of the maximizer.
pub fn conjugate_max<T: Scalar>(samples: &[(Vec<T>, T)], c: &[T]) -> Option<(T, usize)> {
    samples
        .iter()
        .enumerate()
        .map(|(i, (h, b))| (crate::linalg::dot(c, h) - *b, i))
        .fold(None, |best: Option<(T, usize)>, x| match best {
            Some(b) if b.0 >= x.0 => Some(b),
            _ => Some(x),
        })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AlphaEvaluation<T> {
    pub c: Vec<T>,
    pub value: T,
    pub argmax: Vec<T>,
    pub refinements: usize,
    pub converged: bool,
}

const REFINE_TOL: f64 = 1e-3;
const MAX_REFINEMENTS: usize = 12;

/// `α(c)` from β on `grid`, refined by dyadic windows around the argmax
/// until the value changes by less than `1e-3`.
pub fn alpha<T: Scalar>(
    table: &mut BetaTable<T>,
    grid: &SampleGrid<T>,
    c: &[T],
) -> Result<AlphaEvaluation<T>, MatherError> {
    let dim = grid.lo.len();
    if c.len() != dim {
        return Err(MatherError::InvalidInput(format!(
            "c has {} components, grid {dim}",
            c.len()
        )));
    }
    let points = grid.points();
    table.prefill(&points)?;
    let samples: Vec<(Vec<T>, T)> = points
        .iter()
        .map(|h| Ok((h.clone(), table.get(h)?)))
        .collect::<Result<_, MatherError>>()?;
    let (mut value, idx) =
        conjugate_max(&samples, c).ok_or_else(|| MatherError::InvalidInput("empty grid".into()))?;
    if grid.per_axis > 1 {
        let mut rest = idx;
        for _ in 0..dim {
            let i = rest % grid.per_axis;
            rest /= grid.per_axis;
            if i == 0 || i == grid.per_axis - 1 {
                return Err(MatherError::BoxTooSmall {
                    c: c.iter().map(|x| x.as_f64()).collect(),
                });
            }
        }
    }
    let mut argmax = samples[idx].0.clone();
    let mut spacing = grid.spacing();
    let mut refinements = 0;
    let mut converged = false;
    while refinements < MAX_REFINEMENTS {
        refinements += 1;
        spacing.iter_mut().for_each(|s| *s *= T::lit(0.5));
        let window = SampleGrid {
            lo: argmax
                .iter()
                .zip(&spacing)
                .map(|(a, s)| *a - T::lit(2.0) * *s)
                .collect(),
            hi: argmax
                .iter()
                .zip(&spacing)
                .map(|(a, s)| *a + T::lit(2.0) * *s)
                .collect(),
            per_axis: 5,
        };
        let pts = window.points();
        table.prefill(&pts)?;
        let local: Vec<(Vec<T>, T)> = pts
            .iter()
            .map(|h| Ok((h.clone(), table.get(h)?)))
            .collect::<Result<_, MatherError>>()?;
        let (v, i) = conjugate_max(&local, c).expect("non-empty window");
        let change = v - value;
        if v > value {
            value = v;
            argmax = local[i].0.clone();
        }
        if change < T::lit(REFINE_TOL) {
            converged = true;
            break;
        }
    }
    Ok(AlphaEvaluation {
        c: c.to_vec(),
        value,
        argmax,
        refinements,
        converged,
    })
}

/// Largest second difference `(α(c+δu) + α(c−δu) − 2α(c))/δ` over the
/// directions: the jump between one-sided slopes, `O(δ)` where α is smooth.
pub fn alpha_subdifferential_width<T, F>(
    mut alpha: F,
    c: &[T],
    directions: &[Vec<T>],
    delta: T,
) -> Result<T, MatherError>
where
    T: Scalar,
    F: FnMut(&[T]) -> Result<T, MatherError>,
{
    let a0 = alpha(c)?;
    let mut width = T::zero();
    for u in directions {
        let norm = crate::linalg::norm2(u);
        let plus: Vec<T> = c
            .iter()
            .zip(u)
            .map(|(c, u)| *c + delta * *u / norm)
            .collect();
        let minus: Vec<T> = c
            .iter()
            .zip(u)
            .map(|(c, u)| *c - delta * *u / norm)
            .collect();
        let gap = (alpha(&plus)? + alpha(&minus)? - T::lit(2.0) * a0) / delta;
        width = width.max(gap);
    }
    Ok(width)
}

/// Least value of `α(c) + β(h) − ⟨c,h⟩` over all pairs; never below zero
/// for conjugate functions.
pub fn fenchel_young_min<T: Scalar>(alphas: &[AlphaEvaluation<T>], betas: &[(Vec<T>, T)]) -> T {
    alphas
        .iter()
        .flat_map(|a| {
            betas
                .iter()
                .map(move |(h, b)| a.value + *b - crate::linalg::dot(&a.c, h))
        })
        .fold(T::infinity(), T::min)
}

/// CSV with columns `c1..cn,value,converged`.
pub fn write_alpha_csv<T: Scalar, W: Write>(
    rows: &[AlphaEvaluation<T>],
    mut w: W,
) -> std::io::Result<()> {
    let dim = rows.first().map_or(0, |r| r.c.len());
    let head: Vec<String> = (1..=dim).map(|i| format!("c{i}")).collect();
    writeln!(w, "{},value,converged", head.join(","))?;
    for r in rows {
        let c: Vec<String> = r.c.iter().map(|x| x.to_string()).collect();
        writeln!(w, "{},{},{}", c.join(","), r.value, r.converged)?;
    }
    Ok(())
}
