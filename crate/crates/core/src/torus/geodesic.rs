//! Grid-graph geodesics on the universal cover of 𝕋ⁿ.
//!
//! Nodes are the lifts of the metric grid; edges join each node to every
//! primitive offset of the stencil, weighted by the metric length of the
//! straight segment (3-point Gauss–Legendre quadrature on the interpolated
//! metric). Dijkstra runs on a bounded window of the lift, or on a slab that
//! is periodic in some axes.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use rayon::prelude::*;

use super::metric::{node_coords, node_count, node_index, MetricField};
use super::GeometryError;
use crate::homology::IntHomologyClass;
use crate::linalg;
use crate::scalar::Scalar;

/// Largest window extent, in fundamental domains per axis.
pub const MAX_WINDOW_DOMAINS: usize = 8;

/// Neighbour offsets of the grid graph.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Stencil {
    offsets: Vec<Vec<i64>>,
    radius: i64,
}

impl Stencil {
    /// All primitive integer vectors with sup-norm at most `radius`.
    pub fn primitive(n: usize, radius: i64) -> Self {
        assert!(radius >= 1);
        let side = (2 * radius + 1) as usize;
        let mut offsets = Vec::new();
        for code in 0..side.pow(n as u32) {
            let mut c = code;
            let mut o = vec![0i64; n];
            for d in (0..n).rev() {
                o[d] = (c % side) as i64 - radius;
                c /= side;
            }
            let g = o.iter().fold(0i64, |g, &x| num_integer::gcd(g, x));
            if g == 1 {
                offsets.push(o);
            }
        }
        Stencil { offsets, radius }
    }

    /// 2D: radius 3 (worst angular gap 18.4°, anisotropy ≤ 1.3%);
    /// 3D: radius 2; higher dimensions: the 3ⁿ−1 king moves.
    pub fn default_for(n: usize) -> Self {
        match n {
            1 => Self::primitive(1, 1),
            2 => Self::primitive(2, 3),
            3 => Self::primitive(3, 2),
            _ => Self::primitive(n, 1),
        }
    }

    pub fn offsets(&self) -> &[Vec<i64>] {
        &self.offsets
    }

    pub fn len(&self) -> usize {
        self.offsets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.offsets.is_empty()
    }

    pub fn radius(&self) -> i64 {
        self.radius
    }
}

#[derive(Clone, Copy)]
struct HeapItem<T> {
    dist: T,
    node: usize,
}

impl<T: PartialOrd> PartialEq for HeapItem<T> {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}
impl<T: PartialOrd> Eq for HeapItem<T> {}
impl<T: PartialOrd> PartialOrd for HeapItem<T> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl<T: PartialOrd> Ord for HeapItem<T> {
    // min-heap on (dist, node): lexicographic tie-break
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .dist
            .partial_cmp(&self.dist)
            .unwrap_or(Ordering::Equal)
            .then_with(|| other.node.cmp(&self.node))
    }
}

/// Box of lifted grid nodes; periodic axes wrap instead of ending.
#[derive(Debug, Clone)]
struct Window {
    origin: Vec<i64>,
    len: Vec<usize>,
    periodic: Vec<bool>,
}

impl Window {
    fn size(&self) -> usize {
        self.len.iter().product()
    }

    fn local(&self, global: &[i64]) -> Option<usize> {
        let mut idx = 0usize;
        for d in 0..global.len() {
            let mut c = global[d] - self.origin[d];
            if self.periodic[d] {
                c = c.rem_euclid(self.len[d] as i64);
            } else if c < 0 || c >= self.len[d] as i64 {
                return None;
            }
            idx = idx * self.len[d] + c as usize;
        }
        Some(idx)
    }

    fn decode(&self, mut idx: usize, out: &mut [i64]) {
        for d in (0..out.len()).rev() {
            out[d] = (idx % self.len[d]) as i64;
            idx /= self.len[d];
        }
    }
}

/// Precomputed grid graph of a metric field.
#[derive(Debug, Clone)]
pub struct GeodesicGrid<T> {
    n: usize,
    res: usize,
    stencil: Stencil,
    weights: Vec<T>,
}

const GAUSS3: [(f64, f64); 3] = [
    (0.112_701_665_379_258_3, 5.0 / 18.0),
    (0.5, 8.0 / 18.0),
    (0.887_298_334_620_741_7, 5.0 / 18.0),
];

impl<T: Scalar> GeodesicGrid<T> {
    pub fn new(metric: &MetricField<T>) -> Self {
        Self::with_stencil(metric, Stencil::default_for(metric.dim()))
    }

    pub fn with_stencil(metric: &MetricField<T>, stencil: Stencil) -> Self {
        let n = metric.dim();
        let res = metric.resolution();
        let h = metric.step();
        let noff = stencil.len();
        let nodes = node_count(n, res);
        let weights: Vec<T> = (0..nodes)
            .into_par_iter()
            .flat_map_iter(|node| {
                let x = metric.node_position(node);
                let mut g = vec![T::zero(); n * n];
                let mut p = vec![T::zero(); n];
                let mut row = Vec::with_capacity(noff);
                for o in stencil.offsets() {
                    let ov: Vec<T> = o.iter().map(|&c| T::of_i64(c) * h).collect();
                    let mut len = T::zero();
                    for (s, w) in GAUSS3 {
                        for d in 0..n {
                            p[d] = x[d] + T::lit(s) * ov[d];
                        }
                        metric.eval_into(&p, &mut g);
                        let mut q = T::zero();
                        for i in 0..n {
                            for j in 0..n {
                                q += ov[i] * g[i * n + j] * ov[j];
                            }
                        }
                        len += T::lit(w) * q.max(T::zero()).sqrt();
                    }
                    row.push(len);
                }
                row
            })
            .collect();
        GeodesicGrid {
            n,
            res,
            stencil,
            weights,
        }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn resolution(&self) -> usize {
        self.res
    }

    pub fn stencil(&self) -> &Stencil {
        &self.stencil
    }

    /// Dijkstra from `sources`; stops once every target is settled.
    /// Returns the distance array over the window (infinity if unreached).
    fn dijkstra(&self, window: &Window, sources: &[usize], targets: &[usize]) -> Vec<T> {
        let size = window.size();
        let mut dist = vec![T::infinity(); size];
        let mut done = vec![false; size];
        let mut is_target = vec![false; if targets.is_empty() { 0 } else { size }];
        let mut remaining = 0usize;
        for &t in targets {
            if !is_target[t] {
                is_target[t] = true;
                remaining += 1;
            }
        }
        let mut heap = BinaryHeap::new();
        for &s in sources {
            dist[s] = T::zero();
            heap.push(HeapItem {
                dist: T::zero(),
                node: s,
            });
        }
        let n = self.n;
        let noff = self.stencil.len();
        let mut local = vec![0i64; n];
        let mut global = vec![0i64; n];
        let mut next = vec![0i64; n];
        while let Some(HeapItem { dist: d, node }) = heap.pop() {
            if done[node] {
                continue;
            }
            done[node] = true;
            if !targets.is_empty() && is_target[node] {
                remaining -= 1;
                if remaining == 0 {
                    break;
                }
            }
            window.decode(node, &mut local);
            for k in 0..n {
                global[k] = window.origin[k] + local[k];
            }
            let torus = node_index(self.res, global.iter().copied());
            let wrow = &self.weights[torus * noff..(torus + 1) * noff];
            'offsets: for (o, w) in self.stencil.offsets().iter().zip(wrow) {
                let mut idx = 0usize;
                for k in 0..n {
                    let mut c = local[k] + o[k];
                    let len = window.len[k] as i64;
                    if window.periodic[k] {
                        if c < 0 {
                            c += len;
                        } else if c >= len {
                            c -= len;
                        }
                    } else if c < 0 || c >= len {
                        continue 'offsets;
                    }
                    next[k] = c;
                    idx = idx * window.len[k] + c as usize;
                }
                if done[idx] {
                    continue;
                }
                let nd = d + *w;
                if nd < dist[idx] {
                    dist[idx] = nd;
                    heap.push(HeapItem {
                        dist: nd,
                        node: idx,
                    });
                }
            }
        }
        dist
    }

    fn snap(&self, x: &[T]) -> Vec<i64> {
        let r = T::of_usize(self.res);
        x.iter().map(|&c| (c * r).round_i64()).collect()
    }

    fn check_span(&self, lo: &[i64], hi: &[i64]) -> Result<(), GeometryError> {
        for d in 0..self.n {
            let span = (hi[d] - lo[d]) as f64 / self.res as f64;
            if span > MAX_WINDOW_DOMAINS as f64 + 1e-12 {
                return Err(GeometryError::OutOfWindow {
                    axis: d,
                    span,
                    max: MAX_WINDOW_DOMAINS,
                });
            }
        }
        Ok(())
    }

    /// Grid geodesic distance between two lifted points, each snapped to its
    /// nearest grid node.
    pub fn distance(&self, a: &[T], b: &[T]) -> Result<T, GeometryError> {
        if a.len() != self.n || b.len() != self.n {
            return Err(GeometryError::DimensionMismatch {
                expected: self.n,
                got: a.len().min(b.len()),
            });
        }
        let ga = self.snap(a);
        let gb = self.snap(b);
        let margin = (self.res / 2) as i64;
        let lo: Vec<i64> = (0..self.n).map(|d| ga[d].min(gb[d]) - margin).collect();
        let hi: Vec<i64> = (0..self.n).map(|d| ga[d].max(gb[d]) + margin).collect();
        self.check_span(&lo, &hi)?;
        let window = Window {
            origin: lo.clone(),
            len: (0..self.n).map(|d| (hi[d] - lo[d] + 1) as usize).collect(),
            periodic: vec![false; self.n],
        };
        let s = window.local(&ga).expect("source in window");
        let t = window.local(&gb).expect("target in window");
        Ok(self.dijkstra(&window, &[s], &[t])[t])
    }

    /// Stable norm (minimal closed-loop length) of each integer class.
    ///
    /// A closed loop in class `k` crosses the hyperplane `x_a = 0` for any
    /// axis with `k_a ≠ 0`, so base points are taken on that grid hyperplane.
    /// `k` and `−k` share a value (the weights are symmetric).
    pub fn stable_norms(&self, classes: &[IntHomologyClass]) -> Result<Vec<T>, GeometryError> {
        let n = self.n;
        let mut canonical = Vec::with_capacity(classes.len());
        for k in classes {
            if k.dim() != n {
                return Err(GeometryError::DimensionMismatch {
                    expected: n,
                    got: k.dim(),
                });
            }
            let first =
                k.0.iter()
                    .position(|&c| c != 0)
                    .ok_or(GeometryError::ZeroClass)?;
            let kc = if k.0[first] < 0 { k.neg() } else { k.clone() };
            canonical.push((first, kc));
        }
        let mut out = vec![T::infinity(); classes.len()];
        for axis in 0..n {
            let members: Vec<usize> = (0..canonical.len())
                .filter(|&i| canonical[i].0 == axis)
                .collect();
            if members.is_empty() {
                continue;
            }
            let mut unique: Vec<Vec<i64>> =
                members.iter().map(|&i| canonical[i].1 .0.clone()).collect();
            unique.sort();
            unique.dedup();
            let r = self.res as i64;
            let margin = r / 2;
            let lo: Vec<i64> = (0..n)
                .map(|d| unique.iter().map(|k| k[d]).min().unwrap().min(0) * r - margin)
                .collect();
            let hi: Vec<i64> = (0..n)
                .map(|d| unique.iter().map(|k| k[d]).max().unwrap().max(0) * r + margin)
                .collect();
            self.check_span(&lo, &hi)?;
            let len: Vec<usize> = (0..n).map(|d| (hi[d] - lo[d] + 1) as usize).collect();
            let bases = node_count(n - 1, self.res);
            let per_base: Vec<Vec<T>> = (0..bases)
                .into_par_iter()
                .map(|b| {
                    let mut rest = vec![0usize; n - 1];
                    node_coords(n - 1, self.res, b, &mut rest);
                    let mut base = Vec::with_capacity(n);
                    let mut it = rest.into_iter();
                    for d in 0..n {
                        base.push(if d == axis {
                            0
                        } else {
                            it.next().unwrap() as i64
                        });
                    }
                    let window = Window {
                        origin: (0..n).map(|d| base[d] + lo[d]).collect(),
                        len: len.clone(),
                        periodic: vec![false; n],
                    };
                    let src = window.local(&base).unwrap();
                    let targets: Vec<usize> = unique
                        .iter()
                        .map(|k| {
                            let g: Vec<i64> = (0..n).map(|d| base[d] + k[d] * r).collect();
                            window.local(&g).unwrap()
                        })
                        .collect();
                    let dist = self.dijkstra(&window, &[src], &targets);
                    targets.iter().map(|&t| dist[t]).collect()
                })
                .collect();
            let best: Vec<T> = (0..unique.len())
                .map(|j| per_base.iter().fold(T::infinity(), |m, row| m.min(row[j])))
                .collect();
            for &i in &members {
                let j = unique.binary_search(&canonical[i].1 .0).unwrap();
                out[i] = best[j];
            }
        }
        Ok(out)
    }

    pub fn stable_norm_integer(&self, k: &IntHomologyClass) -> Result<T, GeometryError> {
        Ok(self.stable_norms(std::slice::from_ref(k))?[0])
    }

    /// Homogeneous extension to real vectors through a rational approximant
    /// `k/q`, `q ≤ max_denominator`, rescaled radially onto `v`.
    pub fn stable_norm_real(&self, v: &[T], max_denominator: usize) -> Result<T, GeometryError> {
        if v.iter().all(|x| x.is_zero()) {
            return Err(GeometryError::ZeroClass);
        }
        let mut best: Option<(T, usize, IntHomologyClass)> = None;
        for q in 1..=max_denominator.max(1) {
            let qv: Vec<T> = v.iter().map(|&x| x * T::of_usize(q)).collect();
            let k = IntHomologyClass::round(&qv);
            if k.is_zero() {
                continue;
            }
            let span_ok =
                k.0.iter()
                    .all(|&c| (c.unsigned_abs() as usize) < MAX_WINDOW_DOMAINS);
            if !span_ok {
                break;
            }
            let err = qv
                .iter()
                .zip(&k.0)
                .fold(T::zero(), |m, (x, &c)| m.max((*x - T::of_i64(c)).abs()))
                / T::of_usize(q);
            if best.as_ref().is_none_or(|b| err < b.0 - T::lit(1e-15)) {
                best = Some((err, q, k));
            }
        }
        let (_, _, k) = best.ok_or(GeometryError::OutOfWindow {
            axis: 0,
            span: linalg::norm_inf(v).as_f64(),
            max: MAX_WINDOW_DOMAINS,
        })?;
        let kn = self.stable_norm_integer(&k)?;
        let kr: Vec<T> = k.0.iter().map(|&c| T::of_i64(c)).collect();
        Ok(kn * linalg::norm2(v) / linalg::norm2(&kr))
    }

    /// Distance from the hyperplane `x_axis = 0` to `x_axis = m` in the lift
    /// (other axes periodic).
    pub fn leaf_distance(&self, axis: usize, m: usize) -> T {
        let n = self.n;
        let r = self.res as i64;
        let margin = r / 2;
        let window = Window {
            origin: (0..n)
                .map(|d| if d == axis { -margin } else { 0 })
                .collect(),
            len: (0..n)
                .map(|d| {
                    if d == axis {
                        (m as i64 * r + 2 * margin + 1) as usize
                    } else {
                        self.res
                    }
                })
                .collect(),
            periodic: (0..n).map(|d| d != axis).collect(),
        };
        let on_level = |level: i64| -> Vec<usize> {
            (0..node_count(n - 1, self.res))
                .map(|b| {
                    let mut rest = vec![0usize; n - 1];
                    node_coords(n - 1, self.res, b, &mut rest);
                    let mut it = rest.into_iter();
                    let g: Vec<i64> = (0..n)
                        .map(|d| {
                            if d == axis {
                                level
                            } else {
                                it.next().unwrap() as i64
                            }
                        })
                        .collect();
                    window.local(&g).unwrap()
                })
                .collect()
        };
        let sources = on_level(0);
        let targets = on_level(m as i64 * r);
        let dist = self.dijkstra(&window, &sources, &targets);
        targets.iter().fold(T::infinity(), |a, &t| a.min(dist[t]))
    }

    /// Diameter of the torus graph, maximised over sampled source nodes
    /// (`per_axis` evenly spaced sources per axis).
    pub fn diameter(&self, per_axis: usize) -> T {
        let n = self.n;
        let window = Window {
            origin: vec![0; n],
            len: vec![self.res; n],
            periodic: vec![true; n],
        };
        let per_axis = per_axis.clamp(1, self.res);
        let sources: Vec<usize> = (0..per_axis.pow(n as u32))
            .map(|s| {
                let mut c = vec![0usize; n];
                node_coords(n, per_axis, s, &mut c);
                let g: Vec<i64> = c
                    .iter()
                    .map(|&i| (i * self.res / per_axis) as i64)
                    .collect();
                window.local(&g).unwrap()
            })
            .collect();
        let ecc: Vec<T> = sources
            .par_iter()
            .map(|&s| {
                self.dijkstra(&window, &[s], &[])
                    .into_iter()
                    .fold(T::zero(), |m, d| m.max(d))
            })
            .collect();
        ecc.into_iter().fold(T::zero(), |m, d| m.max(d))
    }

    /// Minimising grid geodesic from `from` (lifted) to the nearest lift of
    /// the torus point `to`: returns the lattice shift `k` with endpoint
    /// `to + k` and the geodesic length.
    pub fn nearest_lift(&self, from: &[T], to: &[T]) -> Result<(Vec<i64>, T), GeometryError> {
        let n = self.n;
        let r = self.res as i64;
        let src = self.snap(from);
        let window = Window {
            origin: src.iter().map(|&c| c - r - r / 2).collect(),
            len: vec![(3 * r + 1) as usize; n],
            periodic: vec![false; n],
        };
        let base = self.snap(to);
        let centre: Vec<i64> = from.iter().map(|c| c.floor_i64()).collect();
        let mut shifts = Vec::new();
        let mut targets = Vec::new();
        for code in 0..5usize.pow(n as u32) {
            let mut c = code;
            let mut k = vec![0i64; n];
            for d in (0..n).rev() {
                k[d] = centre[d] + (c % 5) as i64 - 2;
                c /= 5;
            }
            let g: Vec<i64> = (0..n).map(|d| base[d] + k[d] * r).collect();
            if let Some(l) = window.local(&g) {
                shifts.push(k);
                targets.push(l);
            }
        }
        let s = window.local(&src).unwrap();
        let dist = self.dijkstra(&window, &[s], &targets);
        let (best, len) = targets
            .iter()
            .enumerate()
            .fold((0, T::infinity()), |acc, (i, &t)| {
                if dist[t] < acc.1 {
                    (i, dist[t])
                } else {
                    acc
                }
            });
        Ok((shifts[best].clone(), len))
    }
}

/// One-shot grid geodesic distance on a metric field.
pub fn grid_geodesic_distance<T: Scalar>(
    metric: &MetricField<T>,
    a: &[T],
    b: &[T],
) -> Result<T, GeometryError> {
    GeodesicGrid::new(metric).distance(a, b)
}

pub fn stable_norm_integer<T: Scalar>(
    metric: &MetricField<T>,
    k: &IntHomologyClass,
) -> Result<T, GeometryError> {
    GeodesicGrid::new(metric).stable_norm_integer(k)
}

pub fn stable_norm_real<T: Scalar>(
    metric: &MetricField<T>,
    v: &[T],
    max_denominator: usize,
) -> Result<T, GeometryError> {
    GeodesicGrid::new(metric).stable_norm_real(v, max_denominator)
}
