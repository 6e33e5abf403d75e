//! Monotone piecewise-cubic (Fritsch–Carlson) interpolation.

use crate::scalar::{lit, Real};

/// Shape-preserving cubic Hermite interpolant on strictly increasing knots.
///
/// Between two knots the interpolant never leaves the range of the knot
/// values, so barriers and wells are not overshot.
#[derive(Debug, Clone, PartialEq)]
pub struct MonotoneCubic<T> {
    x: Vec<T>,
    y: Vec<T>,
    slopes: Vec<T>,
}

impl<T: Real> MonotoneCubic<T> {
    /// Returns `None` unless `x` is strictly increasing, finite and as long as `y`.
    pub fn new(x: Vec<T>, y: Vec<T>) -> Option<Self> {
        let n = x.len();
        if n == 0 || y.len() != n {
            return None;
        }
        if x.iter().chain(y.iter()).any(|v| !v.is_finite()) {
            return None;
        }
        if x.windows(2).any(|w| !(w[1] > w[0])) {
            return None;
        }
        let slopes = if n == 1 {
            vec![T::zero()]
        } else {
            fritsch_carlson(&x, &y)
        };
        Some(Self { x, y, slopes })
    }

    pub fn knots(&self) -> &[T] {
        &self.x
    }

    pub fn values(&self) -> &[T] {
        &self.y
    }

    /// Value at `t`; clamps to the end values outside the knot range.
    pub fn eval(&self, t: T) -> T {
        let n = self.x.len();
        if n == 1 || t <= self.x[0] {
            return self.y[0];
        }
        if t >= self.x[n - 1] {
            return self.y[n - 1];
        }
        let i = match self.x.binary_search_by(|v| v.partial_cmp(&t).unwrap()) {
            Ok(i) => return self.y[i],
            Err(i) => i - 1,
        };
        let h = self.x[i + 1] - self.x[i];
        let s = (t - self.x[i]) / h;
        let s2 = s * s;
        let s3 = s2 * s;
        let two = lit::<T>(2.0);
        let three = lit::<T>(3.0);
        let h00 = two * s3 - three * s2 + T::one();
        let h10 = s3 - two * s2 + s;
        let h01 = -two * s3 + three * s2;
        let h11 = s3 - s2;
        h00 * self.y[i] + h10 * h * self.slopes[i] + h01 * self.y[i + 1] + h11 * h * self.slopes[i + 1]
    }
}

fn fritsch_carlson<T: Real>(x: &[T], y: &[T]) -> Vec<T> {
    let n = x.len();
    let secants: Vec<T> = (0..n - 1)
        .map(|i| (y[i + 1] - y[i]) / (x[i + 1] - x[i]))
        .collect();
    let mut m = vec![T::zero(); n];
    m[0] = secants[0];
    m[n - 1] = secants[n - 2];
    for i in 1..n - 1 {
        let (a, b) = (secants[i - 1], secants[i]);
        m[i] = if a * b <= T::zero() {
            T::zero()
        } else {
            // weighted harmonic mean keeps the interpolant monotone
            let h0 = x[i] - x[i - 1];
            let h1 = x[i + 1] - x[i];
            let w1 = lit::<T>(2.0) * h1 + h0;
            let w2 = h1 + lit::<T>(2.0) * h0;
            (w1 + w2) / (w1 / a + w2 / b)
        };
    }
    for i in 0..n - 1 {
        let d = secants[i];
        if d == T::zero() {
            m[i] = T::zero();
            m[i + 1] = T::zero();
            continue;
        }
        let a = m[i] / d;
        let b = m[i + 1] / d;
        let s = a * a + b * b;
        let nine = lit::<T>(9.0);
        if s > nine {
            let tau = lit::<T>(3.0) / s.sqrt();
            m[i] = tau * a * d;
            m[i + 1] = tau * b * d;
        }
    }
    m
}
