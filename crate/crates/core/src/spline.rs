//! Natural cubic spline interpolation.

use crate::error::{Error, Result};
use crate::scalar::Real;

/// C2 piecewise cubic through a set of knots with zero second derivative at
/// both ends.
#[derive(Debug, Clone, PartialEq)]
pub struct NaturalCubicSpline<T> {
    xs: Vec<T>,
    ys: Vec<T>,
    // second derivatives at the knots
    m: Vec<T>,
}

impl<T: Real> NaturalCubicSpline<T> {
    /// Knots must have strictly increasing positions; at least three are needed.
    pub fn new(knots: &[(T, T)]) -> Result<Self> {
        if knots.len() < 3 {
            return Err(Error::invalid(
                "knots",
                format!("need at least 3 knots, got {}", knots.len()),
            ));
        }
        for w in knots.windows(2) {
            if w[1].0 == w[0].0 {
                return Err(Error::DuplicateKnot {
                    position: w[0].0.to_f64_lossy(),
                });
            }
            if !(w[1].0 > w[0].0) {
                return Err(Error::invalid(
                    "knots",
                    "positions must be strictly increasing",
                ));
            }
        }
        let xs: Vec<T> = knots.iter().map(|k| k.0).collect();
        let ys: Vec<T> = knots.iter().map(|k| k.1).collect();
        let n = xs.len();
        let h: Vec<T> = xs.windows(2).map(|w| w[1] - w[0]).collect();
        let two = T::lit(2.0);
        let six = T::lit(6.0);

        // tridiagonal system for the interior second derivatives, Thomas sweep
        let interior = n - 2;
        let mut diag = vec![T::zero(); interior];
        let mut rhs = vec![T::zero(); interior];
        for i in 0..interior {
            diag[i] = two * (h[i] + h[i + 1]);
            rhs[i] = six * ((ys[i + 2] - ys[i + 1]) / h[i + 1] - (ys[i + 1] - ys[i]) / h[i]);
        }
        for i in 1..interior {
            let factor = h[i] / diag[i - 1];
            diag[i] = diag[i] - factor * h[i];
            rhs[i] = rhs[i] - factor * rhs[i - 1];
        }
        let mut m = vec![T::zero(); n];
        for i in (0..interior).rev() {
            let upper = if i + 1 < interior {
                h[i + 1] * m[i + 2]
            } else {
                T::zero()
            };
            m[i + 1] = (rhs[i] - upper) / diag[i];
        }
        Ok(Self { xs, ys, m })
    }

    fn segment(&self, x: T) -> usize {
        let idx = self.xs.partition_point(|&k| k <= x);
        idx.saturating_sub(1).min(self.xs.len() - 2)
    }

    /// Value at `x`; outside the knot range the end cubics are extended.
    pub fn eval(&self, x: T) -> T {
        let i = self.segment(x);
        let h = self.xs[i + 1] - self.xs[i];
        let a = (self.xs[i + 1] - x) / h;
        let b = (x - self.xs[i]) / h;
        let six = T::lit(6.0);
        a * self.ys[i]
            + b * self.ys[i + 1]
            + ((a * a * a - a) * self.m[i] + (b * b * b - b) * self.m[i + 1]) * h * h / six
    }

    pub fn derivative(&self, x: T) -> T {
        let i = self.segment(x);
        let h = self.xs[i + 1] - self.xs[i];
        let a = (self.xs[i + 1] - x) / h;
        let b = (x - self.xs[i]) / h;
        let three = T::lit(3.0);
        let six = T::lit(6.0);
        (self.ys[i + 1] - self.ys[i]) / h - (three * a * a - T::one()) * h * self.m[i] / six
            + (three * b * b - T::one()) * h * self.m[i + 1] / six
    }

    pub fn second_derivative(&self, x: T) -> T {
        let i = self.segment(x);
        let h = self.xs[i + 1] - self.xs[i];
        let a = (self.xs[i + 1] - x) / h;
        let b = (x - self.xs[i]) / h;
        a * self.m[i] + b * self.m[i + 1]
    }

    pub fn knots(&self) -> impl Iterator<Item = (T, T)> + '_ {
        self.xs.iter().copied().zip(self.ys.iter().copied())
    }
}
