use std::io::{BufRead, BufReader, Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::GeometryError;
use crate::linalg;
use crate::scalar::{wrap_unit, Scalar};

/// Riemannian metric on 𝕋ⁿ sampled on a uniform `resolutionⁿ` grid and
/// interpolated multilinearly.
///
/// Nodes are stored row-major, the last axis varying fastest; each node holds
/// an `n × n` symmetric positive definite matrix, also row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct MetricField<T> {
    n: usize,
    resolution: usize,
    values: Vec<T>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct Header {
    n: usize,
    resolution: usize,
    interpolation: String,
    #[serde(default = "default_encoding")]
    encoding: String,
}

fn default_encoding() -> String {
    "csv".into()
}

pub(crate) fn node_count(n: usize, res: usize) -> usize {
    res.pow(n as u32)
}

/// Grid coordinates of a node index (last axis fastest).
pub(crate) fn node_coords(n: usize, res: usize, mut idx: usize, out: &mut [usize]) {
    for d in (0..n).rev() {
        out[d] = idx % res;
        idx /= res;
    }
}

pub(crate) fn node_index(res: usize, coords: impl Iterator<Item = i64>) -> usize {
    let r = res as i64;
    coords.fold(0usize, |acc, c| acc * res + c.rem_euclid(r) as usize)
}

/// Multilinear interpolation stencil: up to 2ⁿ (node, weight) pairs.
pub(crate) fn interpolation_stencil<T: Scalar>(n: usize, res: usize, x: &[T]) -> Vec<(usize, T)> {
    let r = T::of_usize(res);
    let mut base = vec![0i64; n];
    let mut frac = vec![T::zero(); n];
    for d in 0..n {
        let s = wrap_unit(x[d]) * r;
        let f = s.floor();
        base[d] = f.floor_i64();
        frac[d] = s - f;
    }
    let mut out = Vec::with_capacity(1 << n);
    for corner in 0..(1usize << n) {
        let mut w = T::one();
        for d in 0..n {
            w *= if corner >> d & 1 == 1 {
                frac[d]
            } else {
                T::one() - frac[d]
            };
        }
        if w.is_zero() {
            continue;
        }
        let idx = node_index(res, (0..n).map(|d| base[d] + (corner >> d & 1) as i64));
        out.push((idx, w));
    }
    out
}

/// Multilinear stencil with weight gradients: `(node, w, ∂w/∂x)`.
pub(crate) fn interpolation_gradient_stencil<T: Scalar>(
    n: usize,
    res: usize,
    x: &[T],
) -> Vec<(usize, T, Vec<T>)> {
    let r = T::of_usize(res);
    let mut base = vec![0i64; n];
    let mut frac = vec![T::zero(); n];
    for d in 0..n {
        let s = wrap_unit(x[d]) * r;
        let f = s.floor();
        base[d] = f.floor_i64();
        frac[d] = s - f;
    }
    (0..(1usize << n))
        .map(|corner| {
            let factor = |d: usize| {
                if corner >> d & 1 == 1 {
                    frac[d]
                } else {
                    T::one() - frac[d]
                }
            };
            let dfactor = |d: usize| if corner >> d & 1 == 1 { r } else { -r };
            let w = (0..n).map(factor).fold(T::one(), |a, b| a * b);
            let dw = (0..n)
                .map(|a| {
                    (0..n)
                        .map(|d| if d == a { dfactor(d) } else { factor(d) })
                        .fold(T::one(), |p, q| p * q)
                })
                .collect();
            let idx = node_index(res, (0..n).map(|d| base[d] + (corner >> d & 1) as i64));
            (idx, w, dw)
        })
        .collect()
}

impl<T: Scalar> MetricField<T> {
    /// Builds a field from per-node matrices, validating symmetry and
    /// positive definiteness.
    pub fn from_values(n: usize, resolution: usize, values: Vec<T>) -> Result<Self, GeometryError> {
        if n == 0 || resolution == 0 {
            return Err(GeometryError::Format(
                "n and resolution must be positive".into(),
            ));
        }
        let expected = node_count(n, resolution) * n * n;
        if values.len() != expected {
            return Err(GeometryError::Format(format!(
                "expected {expected} matrix entries, found {}",
                values.len()
            )));
        }
        let field = MetricField {
            n,
            resolution,
            values,
        };
        field.validate()?;
        Ok(field)
    }

    fn validate(&self) -> Result<(), GeometryError> {
        let nn = self.n * self.n;
        for node in 0..self.node_count() {
            let m = &self.values[node * nn..(node + 1) * nn];
            let scale = m.iter().fold(T::zero(), |a, x| a.max(x.abs()));
            for i in 0..self.n {
                for j in 0..i {
                    if (m[i * self.n + j] - m[j * self.n + i]).abs() > T::lit(1e-9) * scale {
                        return Err(GeometryError::NotPositiveDefinite { node });
                    }
                }
            }
            if linalg::cholesky(&self.matrix_at_node(node)).is_none() {
                return Err(GeometryError::NotPositiveDefinite { node });
            }
        }
        Ok(())
    }

    /// Samples `f(x)` at every node `x = index / resolution`.
    pub fn from_fn<F>(n: usize, resolution: usize, f: F) -> Result<Self, GeometryError>
    where
        F: Fn(&[T]) -> Vec<Vec<T>>,
    {
        let mut values = Vec::with_capacity(node_count(n, resolution) * n * n);
        let mut c = vec![0usize; n];
        let r = T::of_usize(resolution);
        for node in 0..node_count(n, resolution) {
            node_coords(n, resolution, node, &mut c);
            let x: Vec<T> = c.iter().map(|&i| T::of_usize(i) / r).collect();
            let g = f(&x);
            if g.len() != n || g.iter().any(|row| row.len() != n) {
                return Err(GeometryError::DimensionMismatch {
                    expected: n,
                    got: g.len(),
                });
            }
            values.extend(g.into_iter().flatten());
        }
        Self::from_values(n, resolution, values)
    }

    pub fn flat(n: usize, resolution: usize) -> Self {
        Self::from_fn(n, resolution, |_| linalg::identity(n))
            .expect("identity is positive definite")
    }

    /// Conformal metric `e^{2φ(x)} δᵢⱼ`.
    pub fn conformal<F>(n: usize, resolution: usize, phi: F) -> Result<Self, GeometryError>
    where
        F: Fn(&[T]) -> T,
    {
        Self::from_fn(n, resolution, |x| {
            let s = (phi(x) + phi(x)).exp();
            (0..n)
                .map(|i| (0..n).map(|j| if i == j { s } else { T::zero() }).collect())
                .collect()
        })
    }

    pub fn constant(resolution: usize, g: &[Vec<T>]) -> Result<Self, GeometryError> {
        let n = g.len();
        Self::from_fn(n, resolution, |_| g.to_vec())
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn resolution(&self) -> usize {
        self.resolution
    }

    pub fn node_count(&self) -> usize {
        node_count(self.n, self.resolution)
    }

    /// Grid step 1/resolution.
    pub fn step(&self) -> T {
        T::one() / T::of_usize(self.resolution)
    }

    pub fn raw_node(&self, node: usize) -> &[T] {
        let nn = self.n * self.n;
        &self.values[node * nn..(node + 1) * nn]
    }

    pub fn matrix_at_node(&self, node: usize) -> Vec<Vec<T>> {
        self.raw_node(node)
            .chunks(self.n)
            .map(|r| r.to_vec())
            .collect()
    }

    /// Position of a node in `[0,1)ⁿ`.
    pub fn node_position(&self, node: usize) -> Vec<T> {
        let mut c = vec![0usize; self.n];
        node_coords(self.n, self.resolution, node, &mut c);
        let r = T::of_usize(self.resolution);
        c.iter().map(|&i| T::of_usize(i) / r).collect()
    }

    /// Interpolated metric at an arbitrary point (periodic).
    pub fn eval(&self, x: &[T]) -> Vec<Vec<T>> {
        let mut flat = vec![T::zero(); self.n * self.n];
        self.eval_into(x, &mut flat);
        flat.chunks(self.n).map(|r| r.to_vec()).collect()
    }

    pub(crate) fn eval_into(&self, x: &[T], out: &mut [T]) {
        out.iter_mut().for_each(|v| *v = T::zero());
        for (node, w) in interpolation_stencil(self.n, self.resolution, x) {
            for (o, v) in out.iter_mut().zip(self.raw_node(node)) {
                *o += w * *v;
            }
        }
    }

    /// Interpolated metric and its partial derivatives `∂g/∂x_a`, all
    /// row-major `n × n`.
    pub fn eval_with_gradient(&self, x: &[T]) -> (Vec<T>, Vec<Vec<T>>) {
        let nn = self.n * self.n;
        let mut g = vec![T::zero(); nn];
        let mut dg = vec![vec![T::zero(); nn]; self.n];
        for (node, w, dw) in interpolation_gradient_stencil(self.n, self.resolution, x) {
            let m = self.raw_node(node);
            for k in 0..nn {
                g[k] += w * m[k];
                for a in 0..self.n {
                    dg[a][k] += dw[a] * m[k];
                }
            }
        }
        (g, dg)
    }

    /// Length `√(vᵀ g(x) v)` of a tangent vector.
    pub fn length(&self, x: &[T], v: &[T]) -> T {
        let mut g = vec![T::zero(); self.n * self.n];
        self.eval_into(x, &mut g);
        let mut s = T::zero();
        for i in 0..self.n {
            for j in 0..self.n {
                s += v[i] * g[i * self.n + j] * v[j];
            }
        }
        s.max(T::zero()).sqrt()
    }

    /// Applies `f` to every node matrix, keeping the grid.
    pub fn map_nodes<F>(&self, f: F) -> Result<Self, GeometryError>
    where
        F: Fn(usize, Vec<Vec<T>>) -> Result<Vec<Vec<T>>, GeometryError>,
    {
        let mut values = Vec::with_capacity(self.values.len());
        for node in 0..self.node_count() {
            values.extend(f(node, self.matrix_at_node(node))?.into_iter().flatten());
        }
        Self::from_values(self.n, self.resolution, values)
    }

    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<(), GeometryError> {
        let header = Header {
            n: self.n,
            resolution: self.resolution,
            interpolation: "multilinear".into(),
            encoding: "csv".into(),
        };
        writeln!(
            w,
            "{}",
            serde_json::to_string(&header).expect("header serializes")
        )?;
        for node in 0..self.node_count() {
            let row: Vec<String> = self
                .raw_node(node)
                .iter()
                .map(|v| format!("{:e}", v.as_f64()))
                .collect();
            writeln!(w, "{}", row.join(","))?;
        }
        Ok(())
    }

    pub fn write_binary<W: Write>(&self, mut w: W) -> Result<(), GeometryError> {
        let header = Header {
            n: self.n,
            resolution: self.resolution,
            interpolation: "multilinear".into(),
            encoding: "binary".into(),
        };
        writeln!(
            w,
            "{}",
            serde_json::to_string(&header).expect("header serializes")
        )?;
        for v in &self.values {
            w.write_all(&v.as_f64().to_le_bytes())?;
        }
        Ok(())
    }

    /// Reads the JSON-header format (`csv` or `binary` body).
    pub fn read<R: Read>(r: R) -> Result<Self, GeometryError> {
        let mut reader = BufReader::new(r);
        let mut line = String::new();
        reader.read_line(&mut line)?;
        let header: Header = serde_json::from_str(line.trim())
            .map_err(|e| GeometryError::Format(format!("header: {e}")))?;
        if header.interpolation != "multilinear" {
            return Err(GeometryError::Format(format!(
                "unsupported interpolation {:?}",
                header.interpolation
            )));
        }
        let total = node_count(header.n, header.resolution) * header.n * header.n;
        let mut values = Vec::with_capacity(total);
        match header.encoding.as_str() {
            "csv" => {
                for l in reader.lines() {
                    let l = l?;
                    if l.trim().is_empty() {
                        continue;
                    }
                    for tok in l.split(',') {
                        let v: f64 = tok
                            .trim()
                            .parse()
                            .map_err(|e| GeometryError::Format(format!("value {tok:?}: {e}")))?;
                        values.push(T::lit(v));
                    }
                }
            }
            "binary" => {
                let mut bytes = Vec::new();
                reader.read_to_end(&mut bytes)?;
                if bytes.len() != total * 8 {
                    return Err(GeometryError::Format(format!(
                        "binary body has {} bytes, expected {}",
                        bytes.len(),
                        total * 8
                    )));
                }
                values.extend(
                    bytes
                        .chunks_exact(8)
                        .map(|c| T::lit(f64::from_le_bytes(c.try_into().unwrap()))),
                );
            }
            other => return Err(GeometryError::Format(format!("unknown encoding {other:?}"))),
        }
        Self::from_values(header.n, header.resolution, values)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self, GeometryError> {
        Self::read(std::fs::File::open(path)?)
    }
}

/// Scalar potential sampled on a grid, interpolated multilinearly.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PotentialGrid<T> {
    pub n: usize,
    pub resolution: usize,
    pub values: Vec<T>,
}

impl<T: Scalar> PotentialGrid<T> {
    pub fn from_fn<F: Fn(&[T]) -> T>(n: usize, resolution: usize, f: F) -> Self {
        let mut c = vec![0usize; n];
        let r = T::of_usize(resolution);
        let values = (0..node_count(n, resolution))
            .map(|node| {
                node_coords(n, resolution, node, &mut c);
                let x: Vec<T> = c.iter().map(|&i| T::of_usize(i) / r).collect();
                f(&x)
            })
            .collect();
        PotentialGrid {
            n,
            resolution,
            values,
        }
    }

    pub fn eval(&self, x: &[T]) -> T {
        interpolation_stencil(self.n, self.resolution, x)
            .into_iter()
            .map(|(node, w)| w * self.values[node])
            .sum()
    }

    /// Gradient of the multilinear interpolant (one-sided on cell faces).
    pub fn gradient(&self, x: &[T]) -> Vec<T> {
        let mut g = vec![T::zero(); self.n];
        for (node, _, dw) in interpolation_gradient_stencil(self.n, self.resolution, x) {
            for (gi, d) in g.iter_mut().zip(dw) {
                *gi += d * self.values[node];
            }
        }
        g
    }

    pub fn min(&self) -> T {
        self.values.iter().fold(T::infinity(), |m, v| m.min(*v))
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self, GeometryError>
    where
        T: for<'de> Deserialize<'de>,
    {
        let text = std::fs::read_to_string(path)?;
        let grid: Self =
            serde_json::from_str(&text).map_err(|e| GeometryError::Format(e.to_string()))?;
        if grid.values.len() != node_count(grid.n, grid.resolution) {
            return Err(GeometryError::Format("potential grid size mismatch".into()));
        }
        Ok(grid)
    }
}
