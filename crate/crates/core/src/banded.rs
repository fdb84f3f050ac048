//! Square band matrices and a band LU factorization with partial pivoting.

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Square matrix with `lower` sub-diagonals and `upper` super-diagonals,
/// stored row by row: entry `(i, j)` lives at `i * width + (j + lower - i)`.
#[derive(Debug, Clone, PartialEq)]
pub struct BandMatrix<T> {
    n: usize,
    lower: usize,
    upper: usize,
    data: Vec<T>,
}

impl<T: Real> BandMatrix<T> {
    pub fn zeros(n: usize, lower: usize, upper: usize) -> Self {
        Self {
            n,
            lower,
            upper,
            data: vec![T::zero(); n * (lower + upper + 1)],
        }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn lower(&self) -> usize {
        self.lower
    }

    pub fn upper(&self) -> usize {
        self.upper
    }

    fn width(&self) -> usize {
        self.lower + self.upper + 1
    }

    pub fn in_band(&self, i: usize, j: usize) -> bool {
        i < self.n && j < self.n && j + self.lower >= i && j <= i + self.upper
    }

    /// Entry `(i, j)`, zero outside the band.
    pub fn get(&self, i: usize, j: usize) -> T {
        if self.in_band(i, j) {
            self.data[i * self.width() + j + self.lower - i]
        } else {
            T::zero()
        }
    }

    /// Adds `value` to entry `(i, j)`.
    ///
    /// # Panics
    /// If `(i, j)` lies outside the band.
    pub fn add(&mut self, i: usize, j: usize, value: T) {
        assert!(self.in_band(i, j), "entry ({i}, {j}) outside band");
        let w = self.width();
        let slot = &mut self.data[i * w + j + self.lower - i];
        *slot = *slot + value;
    }

    /// `self * x`.
    pub fn mul_vec(&self, x: &[T]) -> Result<Vec<T>> {
        if x.len() != self.n {
            return Err(Error::Dimension {
                expected: self.n,
                got: x.len(),
            });
        }
        Ok((0..self.n)
            .map(|i| {
                let lo = i.saturating_sub(self.lower);
                let hi = (i + self.upper).min(self.n - 1);
                (lo..=hi).fold(T::zero(), |acc, j| acc + self.get(i, j) * x[j])
            })
            .collect())
    }

    /// `sum_m coeff_m * mats_m`. All operands must share dimension and band shape.
    pub fn combination(terms: &[(T, &BandMatrix<T>)]) -> BandMatrix<T> {
        let first = terms[0].1;
        let mut out = BandMatrix::zeros(first.n, first.lower, first.upper);
        for (c, m) in terms {
            debug_assert_eq!((m.n, m.lower, m.upper), (first.n, first.lower, first.upper));
            for (o, v) in out.data.iter_mut().zip(&m.data) {
                *o = *o + *c * *v;
            }
        }
        out
    }

    /// Principal submatrix on rows and columns `1..n-1` (drops both endpoints).
    pub fn interior(&self) -> BandMatrix<T> {
        let m = self.n.saturating_sub(2);
        let mut out = BandMatrix::zeros(m, self.lower, self.upper);
        for i in 0..m {
            let lo = i.saturating_sub(self.lower);
            let hi = (i + self.upper).min(m.saturating_sub(1));
            for j in lo..=hi {
                out.add(i, j, self.get(i + 1, j + 1));
            }
        }
        out
    }

    pub fn to_dense(&self) -> Vec<Vec<T>> {
        (0..self.n)
            .map(|i| (0..self.n).map(|j| self.get(i, j)).collect())
            .collect()
    }

    /// Largest `|a_ij - a_ji|`.
    pub fn asymmetry(&self) -> T {
        let mut worst = T::zero();
        for i in 0..self.n {
            for j in i.saturating_sub(self.lower)..=(i + self.upper).min(self.n.saturating_sub(1)) {
                worst = worst.max((self.get(i, j) - self.get(j, i)).abs());
            }
        }
        worst
    }

    /// Largest `|i - j|` over nonzero entries.
    pub fn observed_bandwidth(&self) -> usize {
        let mut bw = 0;
        for i in 0..self.n {
            for j in 0..self.n {
                if self.get(i, j) != T::zero() {
                    bw = bw.max(i.abs_diff(j));
                }
            }
        }
        bw
    }
}

/// LU factors `P A = L U` of a band matrix. Row interchanges widen the upper
/// band of `U` to `lower + upper`.
#[derive(Debug, Clone)]
pub struct BandLu<T> {
    n: usize,
    lower: usize,
    upper: usize,
    // rows of U in band form, width `lower + upper + 1`, diagonal first
    u: Vec<T>,
    // multipliers of L, `lower` per column
    l: Vec<T>,
    pivots: Vec<usize>,
}

impl<T: Real> BandLu<T> {
    pub fn factor(a: &BandMatrix<T>) -> Result<Self> {
        let n = a.n;
        let kl = a.lower;
        let ku = a.lower + a.upper;
        let wu = ku + 1;
        // dense working rows over the reachable band, u[i][d] = A(i, i + d - kl_offset)
        // stored as offset from column i - kl so that fill-in fits
        let span = kl + ku + 1;
        let mut work = vec![T::zero(); n * span];
        let at = |i: usize, j: usize| i * span + (j + kl - i);
        for i in 0..n {
            let lo = i.saturating_sub(kl);
            let hi = (i + a.upper).min(n.saturating_sub(1));
            for j in lo..=hi {
                work[at(i, j)] = a.get(i, j);
            }
        }
        let mut pivots = vec![0; n];
        let mut l = vec![T::zero(); n * kl.max(1)];
        let mut max_pivot = T::zero();
        let mut min_pivot = T::infinity();
        for k in 0..n {
            let last_row = (k + kl).min(n - 1);
            let mut p = k;
            let mut best = work[at(k, k)].abs();
            for r in k + 1..=last_row {
                let v = work[at(r, k)].abs();
                if v > best {
                    best = v;
                    p = r;
                }
            }
            pivots[k] = p;
            let last_col = (k + ku).min(n - 1);
            if p != k {
                for j in k..=last_col {
                    work.swap(at(k, j), at(p, j));
                }
            }
            let pivot = work[at(k, k)];
            if !(pivot.abs() > T::zero()) || !pivot.is_finite() {
                return Err(Error::Singular {
                    row: k,
                    pivot: pivot.to_f64_lossy(),
                    condition: f64::INFINITY,
                });
            }
            max_pivot = max_pivot.max(pivot.abs());
            min_pivot = min_pivot.min(pivot.abs());
            for r in k + 1..=last_row {
                let factor = work[at(r, k)] / pivot;
                l[k * kl.max(1) + (r - k - 1)] = factor;
                work[at(r, k)] = T::zero();
                if factor != T::zero() {
                    for j in k + 1..=last_col {
                        work[at(r, j)] = work[at(r, j)] - factor * work[at(k, j)];
                    }
                }
            }
        }
        let condition = max_pivot / min_pivot;
        if condition.to_f64_lossy() > 1.0 / (T::epsilon().to_f64_lossy() * 16.0) {
            return Err(Error::Singular {
                row: n,
                pivot: min_pivot.to_f64_lossy(),
                condition: condition.to_f64_lossy(),
            });
        }
        let mut u = vec![T::zero(); n * wu];
        for i in 0..n {
            for j in i..=(i + ku).min(n - 1) {
                u[i * wu + (j - i)] = work[at(i, j)];
            }
        }
        Ok(Self {
            n,
            lower: kl,
            upper: ku,
            u,
            l,
            pivots,
        })
    }

    /// Solves `A x = b` in place.
    pub fn solve_in_place(&self, b: &mut [T]) -> Result<()> {
        if b.len() != self.n {
            return Err(Error::Dimension {
                expected: self.n,
                got: b.len(),
            });
        }
        let n = self.n;
        let kl = self.lower;
        let stride = kl.max(1);
        for k in 0..n {
            let p = self.pivots[k];
            if p != k {
                b.swap(k, p);
            }
            let last_row = (k + kl).min(n - 1);
            for r in k + 1..=last_row {
                let f = self.l[k * stride + (r - k - 1)];
                b[r] = b[r] - f * b[k];
            }
        }
        let wu = self.upper + 1;
        for i in (0..n).rev() {
            let mut acc = b[i];
            for j in i + 1..=(i + self.upper).min(n - 1) {
                acc = acc - self.u[i * wu + (j - i)] * b[j];
            }
            b[i] = acc / self.u[i * wu];
        }
        Ok(())
    }
}
