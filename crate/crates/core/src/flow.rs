//! Flows on 𝕋ⁿ tracked in the universal cover.

use crate::scalar::Scalar;

/// One classical Runge–Kutta step of `ẏ = f(y)`.
pub fn rk4_step<T: Scalar, F>(f: &F, y: &[T], h: T) -> Vec<T>
where
    F: Fn(&[T]) -> Vec<T> + ?Sized,
{
    let half = h * T::lit(0.5);
    let shifted = |base: &[T], k: &[T], s: T| -> Vec<T> {
        base.iter().zip(k).map(|(b, k)| *b + s * *k).collect()
    };
    let k1 = f(y);
    let k2 = f(&shifted(y, &k1, half));
    let k3 = f(&shifted(y, &k2, half));
    let k4 = f(&shifted(y, &k3, h));
    let sixth = h / T::lit(6.0);
    (0..y.len())
        .map(|i| y[i] + sixth * (k1[i] + T::lit(2.0) * (k2[i] + k3[i]) + k4[i]))
        .collect()
}

/// A flow on 𝕋ⁿ given through its ℤⁿ-equivariant lift to ℝⁿ.
pub trait LiftedFlow<T: Scalar>: Send + Sync {
    fn dim(&self) -> usize;

    /// Generating vector field at a lifted point.
    fn velocity(&self, x: &[T]) -> Vec<T>;

    /// Time-`t` map applied to a lifted point.
    fn advance(&self, x: &[T], t: T) -> Vec<T>;
}

/// Constant-velocity flow `x ↦ x + t·v`.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearFlow<T> {
    pub velocity: Vec<T>,
}

impl<T: Scalar> LinearFlow<T> {
    pub fn new(velocity: Vec<T>) -> Self {
        LinearFlow { velocity }
    }
}

impl<T: Scalar> LiftedFlow<T> for LinearFlow<T> {
    fn dim(&self) -> usize {
        self.velocity.len()
    }

    fn velocity(&self, _x: &[T]) -> Vec<T> {
        self.velocity.clone()
    }

    fn advance(&self, x: &[T], t: T) -> Vec<T> {
        x.iter()
            .zip(&self.velocity)
            .map(|(x, v)| *x + t * *v)
            .collect()
    }
}

/// Flow of a periodic vector field, integrated with fixed-step RK4.
pub struct FieldFlow<T, F> {
    n: usize,
    field: F,
    step: T,
}

impl<T: Scalar, F: Fn(&[T]) -> Vec<T> + Send + Sync> FieldFlow<T, F> {
    pub fn new(n: usize, step: T, field: F) -> Self {
        FieldFlow { n, field, step }
    }

    pub fn step(&self) -> T {
        self.step
    }
}

impl<T: Scalar, F: Fn(&[T]) -> Vec<T> + Send + Sync> LiftedFlow<T> for FieldFlow<T, F> {
    fn dim(&self) -> usize {
        self.n
    }

    fn velocity(&self, x: &[T]) -> Vec<T> {
        (self.field)(x)
    }

    fn advance(&self, x: &[T], t: T) -> Vec<T> {
        if t.is_zero() {
            return x.to_vec();
        }
        let steps = (t.abs() / self.step).ceil().to_usize().unwrap_or(1).max(1);
        let h = t / T::of_usize(steps);
        let mut y = x.to_vec();
        for _ in 0..steps {
            y = rk4_step(&self.field, &y, h);
        }
        y
    }
}

/// Time-sampled lifted curve.
#[derive(Debug, Clone, PartialEq)]
pub struct LiftedPath<T> {
    pub times: Vec<T>,
    pub points: Vec<Vec<T>>,
}

/// Read access to a time-sampled curve in the universal cover.
pub trait SampledLift<T: Scalar> {
    fn times(&self) -> &[T];
    fn lift(&self, i: usize) -> &[T];

    fn len(&self) -> usize {
        self.times().len()
    }

    fn is_empty(&self) -> bool {
        self.times().is_empty()
    }

    fn dim(&self) -> usize {
        if self.is_empty() {
            0
        } else {
            self.lift(0).len()
        }
    }

    /// Lifted position at time `t`, linear between samples and clamped to
    /// the sampled range.
    fn lift_at(&self, t: T) -> Vec<T> {
        let times = self.times();
        let last = times.len() - 1;
        if t <= times[0] {
            return self.lift(0).to_vec();
        }
        if t >= times[last] {
            return self.lift(last).to_vec();
        }
        let i = times.partition_point(|&s| s <= t) - 1;
        let (t0, t1) = (times[i], times[i + 1]);
        let w = (t - t0) / (t1 - t0);
        self.lift(i)
            .iter()
            .zip(self.lift(i + 1))
            .map(|(a, b)| *a + w * (*b - *a))
            .collect()
    }
}

impl<T: Scalar> SampledLift<T> for LiftedPath<T> {
    fn times(&self) -> &[T] {
        &self.times
    }

    fn lift(&self, i: usize) -> &[T] {
        &self.points[i]
    }
}

/// Samples `flow` from `x0` every `dt` up to `horizon` (inclusive, the last
/// interval possibly shorter).
pub fn sample_path<T: Scalar, Fl: LiftedFlow<T> + ?Sized>(
    flow: &Fl,
    x0: &[T],
    dt: T,
    horizon: T,
) -> LiftedPath<T> {
    let steps = (horizon / dt).ceil().to_usize().unwrap_or(0);
    let mut times = Vec::with_capacity(steps + 1);
    let mut points = Vec::with_capacity(steps + 1);
    times.push(T::zero());
    points.push(x0.to_vec());
    let mut t = T::zero();
    let mut x = x0.to_vec();
    for _ in 0..steps {
        let h = dt.min(horizon - t);
        if h <= T::zero() {
            break;
        }
        x = flow.advance(&x, h);
        t += h;
        times.push(t);
        points.push(x.clone());
    }
    LiftedPath { times, points }
}
