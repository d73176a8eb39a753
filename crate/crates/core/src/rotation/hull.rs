use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::maps::TorusMapLift;
use crate::scalar::Scalar;

/// Convex polygon (counter-clockwise) approximating a rotation set.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RotationSet<T> {
    pub vertices: Vec<[T; 2]>,
    pub sample_count: usize,
    pub iterate_depth: usize,
}

fn cross<T: Scalar>(o: [T; 2], a: [T; 2], b: [T; 2]) -> T {
    (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])
}

/// Andrew's monotone chain. Points closer than `dedup` are merged and
/// collinear points dropped; the result is counter-clockwise.
pub fn convex_hull<T: Scalar>(points: &[[T; 2]], dedup: T) -> Vec<[T; 2]> {
    let mut pts: Vec<[T; 2]> = points.to_vec();
    pts.sort_by(|a, b| {
        a[0].partial_cmp(&b[0])
            .unwrap_or(std::cmp::Ordering::Equal)
            .then(a[1].partial_cmp(&b[1]).unwrap_or(std::cmp::Ordering::Equal))
    });
    pts.dedup_by(|a, b| (a[0] - b[0]).abs() <= dedup && (a[1] - b[1]).abs() <= dedup);
    if pts.len() < 3 {
        return pts;
    }
    let mut hull: Vec<[T; 2]> = Vec::with_capacity(2 * pts.len());
    for pass in 0..2 {
        let start = hull.len();
        let iter: Box<dyn Iterator<Item = &[T; 2]>> = if pass == 0 {
            Box::new(pts.iter())
        } else {
            Box::new(pts.iter().rev())
        };
        for &p in iter {
            while hull.len() >= start + 2
                && cross(hull[hull.len() - 2], hull[hull.len() - 1], p) <= T::zero()
            {
                hull.pop();
            }
            hull.push(p);
        }
        hull.pop();
    }
    // a sub-dedup tolerance may leave near-duplicates at the seam
    hull.dedup_by(|a, b| (a[0] - b[0]).abs() <= dedup && (a[1] - b[1]).abs() <= dedup);
    if hull.len() > 1 {
        let (f, l) = (hull[0], hull[hull.len() - 1]);
        if (f[0] - l[0]).abs() <= dedup && (f[1] - l[1]).abs() <= dedup {
            hull.pop();
        }
    }
    hull
}

fn segment_distance<T: Scalar>(p: [T; 2], a: [T; 2], b: [T; 2]) -> T {
    let d = [b[0] - a[0], b[1] - a[1]];
    let len2 = d[0] * d[0] + d[1] * d[1];
    let t = if len2.is_zero() {
        T::zero()
    } else {
        (((p[0] - a[0]) * d[0] + (p[1] - a[1]) * d[1]) / len2)
            .max(T::zero())
            .min(T::one())
    };
    let q = [a[0] + t * d[0] - p[0], a[1] + t * d[1] - p[1]];
    (q[0] * q[0] + q[1] * q[1]).sqrt()
}

impl<T: Scalar> RotationSet<T> {
    pub fn from_points(points: &[[T; 2]], sample_count: usize, iterate_depth: usize) -> Self {
        RotationSet {
            vertices: convex_hull(points, T::lit(1e-9)),
            sample_count,
            iterate_depth,
        }
    }

    pub fn area(&self) -> T {
        let v = &self.vertices;
        if v.len() < 3 {
            return T::zero();
        }
        let mut s = T::zero();
        for i in 0..v.len() {
            let j = (i + 1) % v.len();
            s += v[i][0] * v[j][1] - v[j][0] * v[i][1];
        }
        (s * T::lit(0.5)).abs()
    }

    /// Distance from `p` to the boundary, positive inside and negative
    /// outside; lower-dimensional sets are never interior.
    pub fn signed_distance(&self, p: [T; 2]) -> T {
        let v = &self.vertices;
        if v.is_empty() {
            return -T::infinity();
        }
        let n = v.len();
        let boundary = (0..n)
            .map(|i| segment_distance(p, v[i], v[(i + 1) % n]))
            .fold(T::infinity(), |a, b| a.min(b));
        let inside = n >= 3 && (0..n).all(|i| cross(v[i], v[(i + 1) % n], p) > T::zero());
        if inside {
            boundary
        } else {
            -boundary
        }
    }

    /// Euclidean distance from `p` to the filled polygon.
    pub fn distance(&self, p: [T; 2]) -> T {
        self.signed_distance(p).min(T::zero()).abs()
    }

    /// Hausdorff distance between the filled convex polygons.
    pub fn hausdorff(&self, other: &Self) -> T {
        let one = self
            .vertices
            .iter()
            .map(|&p| other.distance(p))
            .fold(T::zero(), |a, b| a.max(b));
        let two = other
            .vertices
            .iter()
            .map(|&p| self.distance(p))
            .fold(T::zero(), |a, b| a.max(b));
        one.max(two)
    }

    /// Image under a linear map.
    pub fn transform(&self, m: [[T; 2]; 2]) -> Self {
        let pts: Vec<[T; 2]> = self
            .vertices
            .iter()
            .map(|v| {
                [
                    m[0][0] * v[0] + m[0][1] * v[1],
                    m[1][0] * v[0] + m[1][1] * v[1],
                ]
            })
            .collect();
        RotationSet::from_points(&pts, self.sample_count, self.iterate_depth)
    }

    /// `{"vertices": [[x, y], …]}`.
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({ "vertices": self.vertices.iter().map(|v| [v[0].as_f64(), v[1].as_f64()]).collect::<Vec<_>>() })
    }
}

/// Displacement averages `(Fⁿ(x) − x)/n` over a `g × g` grid.
pub fn displacement_averages<T: Scalar>(
    f: &TorusMapLift<T>,
    g: usize,
    n_iter: usize,
) -> Vec<[T; 2]> {
    let gs = T::of_usize(g);
    let nn = T::of_usize(n_iter.max(1));
    (0..g * g)
        .into_par_iter()
        .map(|i| {
            let x = [T::of_usize(i / g) / gs, T::of_usize(i % g) / gs];
            let y = f.iterate(x, n_iter.max(1));
            [(y[0] - x[0]) / nn, (y[1] - x[1]) / nn]
        })
        .collect()
}

/// Misiurewicz–Ziemian rotation set estimate: convex hull of the
/// displacement averages over a `g × g` grid at depth `n_iter`.
pub fn mz_rotation_set<T: Scalar>(f: &TorusMapLift<T>, g: usize, n_iter: usize) -> RotationSet<T> {
    RotationSet::from_points(&displacement_averages(f, g, n_iter), g * g, n_iter)
}

/// Rational points `p/q` strictly inside a rotation set.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InteriorPoints {
    /// `(p, q)` in lowest terms, ordered by `q` then lexicographically.
    pub points: Vec<([i64; 2], i64)>,
    /// The set has (numerically) empty interior.
    pub degenerate: bool,
}

/// All `p/q` with `q ≤ max_denominator` at distance greater than `margin`
/// from the boundary, inside the set.
pub fn rational_interior_points<T: Scalar>(
    rs: &RotationSet<T>,
    max_denominator: i64,
    margin: T,
) -> InteriorPoints {
    if rs.area() <= T::lit(1e-9) {
        return InteriorPoints {
            points: Vec::new(),
            degenerate: true,
        };
    }
    let (mut lo, mut hi) = ([T::infinity(); 2], [-T::infinity(); 2]);
    for v in &rs.vertices {
        for c in 0..2 {
            lo[c] = lo[c].min(v[c]);
            hi[c] = hi[c].max(v[c]);
        }
    }
    let scale = lo
        .iter()
        .chain(hi.iter())
        .fold(T::one(), |a, &b| a.max(b.abs()));
    let guard = T::lit(64.0) * T::epsilon() * scale;
    let mut points = Vec::new();
    for q in 1..=max_denominator {
        let qf = T::of_i64(q);
        let range =
            |c: usize| ((lo[c] * qf).floor_i64())..=((hi[c] * qf).ceil().to_i64().unwrap_or(0));
        for p0 in range(0) {
            for p1 in range(1) {
                if num_integer::gcd(num_integer::gcd(p0, p1), q) != 1 {
                    continue;
                }
                let pt = [T::of_i64(p0) / qf, T::of_i64(p1) / qf];
                if rs.signed_distance(pt) > margin + guard {
                    points.push(([p0, p1], q));
                }
            }
        }
    }
    InteriorPoints {
        points,
        degenerate: false,
    }
}
