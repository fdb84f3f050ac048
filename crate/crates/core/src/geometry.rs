//! Moving interval `(alpha(t), beta(t))` and the change of variables
//! `y = (x - alpha(t)) / gamma(t)` onto the fixed cylinder `(0, 1) x (0, T)`.
//!
//! In reference coordinates the equation picks up an advection coefficient
//! `b1(y, t) = (alpha'(t) + gamma'(t) y) / gamma(t)` and a diffusion scaling
//! `b2(t) = 1 / gamma(t)^2`.

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Scalar function of time.
pub type TimeFn<T> = Arc<dyn Fn(T) -> T + Send + Sync>;

/// What to do when a sampled boundary velocity has the wrong sign
/// (`alpha' >= 0` or `beta' <= 0`).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ExpansionPolicy {
    /// Report the violation as an error.
    #[default]
    Enforce,
    /// Log a warning and continue.
    Warn,
}

#[derive(Clone)]
pub struct BoundaryMotion<T> {
    alpha: TimeFn<T>,
    beta: TimeFn<T>,
    alpha_prime: TimeFn<T>,
    beta_prime: TimeFn<T>,
    final_time: T,
    policy: ExpansionPolicy,
}

impl<T: Real> fmt::Debug for BoundaryMotion<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("BoundaryMotion")
            .field("final_time", &self.final_time)
            .field("policy", &self.policy)
            .finish_non_exhaustive()
    }
}

impl<T: Real> BoundaryMotion<T> {
    /// Builds a motion from the two curves and their analytic derivatives.
    pub fn new(
        alpha: impl Fn(T) -> T + Send + Sync + 'static,
        beta: impl Fn(T) -> T + Send + Sync + 'static,
        alpha_prime: impl Fn(T) -> T + Send + Sync + 'static,
        beta_prime: impl Fn(T) -> T + Send + Sync + 'static,
        final_time: T,
    ) -> Result<Self> {
        if !(final_time > T::zero()) || !final_time.is_finite() {
            return Err(Error::invalid(
                "final_time",
                format!("must be positive and finite, got {final_time}"),
            ));
        }
        Ok(Self {
            alpha: Arc::new(alpha),
            beta: Arc::new(beta),
            alpha_prime: Arc::new(alpha_prime),
            beta_prime: Arc::new(beta_prime),
            final_time,
            policy: ExpansionPolicy::Enforce,
        })
    }

    /// Fixed interval `[left, right]`.
    ///
    /// The zero velocities violate the strict expansion hypothesis, so the
    /// policy is [`ExpansionPolicy::Warn`].
    pub fn stationary(left: T, right: T, final_time: T) -> Result<Self> {
        Ok(Self::new(
            move |_| left,
            move |_| right,
            |_| T::zero(),
            |_| T::zero(),
            final_time,
        )?
        .with_policy(ExpansionPolicy::Warn))
    }

    pub fn with_policy(mut self, policy: ExpansionPolicy) -> Self {
        self.policy = policy;
        self
    }

    /// Same curves on a different horizon.
    pub fn with_final_time(mut self, final_time: T) -> Result<Self> {
        if !(final_time > T::zero()) || !final_time.is_finite() {
            return Err(Error::invalid(
                "final_time",
                format!("must be positive and finite, got {final_time}"),
            ));
        }
        self.final_time = final_time;
        Ok(self)
    }

    pub fn policy(&self) -> ExpansionPolicy {
        self.policy
    }

    pub fn final_time(&self) -> T {
        self.final_time
    }

    fn time_tolerance(&self) -> T {
        let rel = T::lit(1e-12).max(T::epsilon() * T::lit(4.0));
        rel * T::one().max(self.final_time)
    }

    fn check_time(&self, t: T) -> Result<()> {
        let tol = self.time_tolerance();
        if t.is_nan() || t < -tol || t > self.final_time + tol {
            return Err(Error::TimeDomain {
                time: t.to_f64_lossy(),
                final_time: self.final_time.to_f64_lossy(),
            });
        }
        Ok(())
    }

    pub fn alpha(&self, t: T) -> Result<T> {
        self.check_time(t)?;
        Ok((self.alpha)(t))
    }

    pub fn beta(&self, t: T) -> Result<T> {
        self.check_time(t)?;
        Ok((self.beta)(t))
    }

    pub fn alpha_prime(&self, t: T) -> Result<T> {
        self.check_time(t)?;
        Ok((self.alpha_prime)(t))
    }

    pub fn beta_prime(&self, t: T) -> Result<T> {
        self.check_time(t)?;
        Ok((self.beta_prime)(t))
    }

    /// Domain width `beta(t) - alpha(t)`.
    pub fn gamma(&self, t: T) -> Result<T> {
        self.check_time(t)?;
        let width = (self.beta)(t) - (self.alpha)(t);
        if !(width > T::zero()) {
            return Err(Error::NonPositiveWidth {
                width: width.to_f64_lossy(),
                time: t.to_f64_lossy(),
            });
        }
        Ok(width)
    }

    pub fn gamma_prime(&self, t: T) -> Result<T> {
        self.check_time(t)?;
        Ok((self.beta_prime)(t) - (self.alpha_prime)(t))
    }

    /// Advection coefficient of the transformed equation.
    pub fn b1(&self, y: T, t: T) -> Result<T> {
        let (c0, c1) = self.b1_split(t)?;
        Ok(c0 + c1 * y)
    }

    /// `b1(y, t) = c0(t) + c1(t) y` with `c0 = alpha'/gamma`, `c1 = gamma'/gamma`.
    pub fn b1_split(&self, t: T) -> Result<(T, T)> {
        let width = self.gamma(t)?;
        Ok(((self.alpha_prime)(t) / width, self.gamma_prime(t)? / width))
    }

    /// Diffusion scaling `1 / gamma(t)^2`.
    pub fn b2(&self, t: T) -> Result<T> {
        let width = self.gamma(t)?;
        Ok((width * width).recip())
    }

    /// Physical position to reference coordinate.
    pub fn to_fixed(&self, x: T, t: T) -> Result<T> {
        let width = self.gamma(t)?;
        let left = (self.alpha)(t);
        let right = (self.beta)(t);
        let tol = T::lit(1e-12).max(T::epsilon() * T::lit(8.0)) * T::one().max(x.abs());
        if x.is_nan() || x < left - tol || x > right + tol {
            return Err(Error::SpaceDomain {
                position: x.to_f64_lossy(),
                left: left.to_f64_lossy(),
                right: right.to_f64_lossy(),
                time: t.to_f64_lossy(),
            });
        }
        let y = (x - left) / width;
        Ok(y.max(T::zero()).min(T::one()))
    }

    /// Reference coordinate to physical position.
    pub fn to_moving(&self, y: T, t: T) -> Result<T> {
        let width = self.gamma(t)?;
        Ok((self.alpha)(t) + width * y)
    }

    /// Samples the width bound and the expansion signs at the given times.
    ///
    /// A non-positive width is always an error. A wrong-signed velocity is an
    /// error under [`ExpansionPolicy::Enforce`] and a logged warning otherwise.
    pub fn check_hypotheses(&self, times: impl IntoIterator<Item = T>) -> Result<()> {
        let mut first = None;
        let mut count = 0usize;
        for t in times {
            self.gamma(t)?;
            if let Some(detail) = self.expansion_violation(t)? {
                if self.policy == ExpansionPolicy::Enforce {
                    return Err(Error::Monotonicity {
                        time: t.to_f64_lossy(),
                        detail,
                    });
                }
                count += 1;
                first.get_or_insert((t, detail));
            }
        }
        if let Some((t, detail)) = first {
            log::warn!(
                "expansion hypothesis fails at {count} sampled times, first at t = {t}: {detail}"
            );
        }
        Ok(())
    }

    pub(crate) fn expansion_violation(&self, t: T) -> Result<Option<String>> {
        let da = self.alpha_prime(t)?;
        let db = self.beta_prime(t)?;
        let mut issues = Vec::new();
        if !(da < T::zero()) {
            issues.push(format!("alpha' = {da} is not negative"));
        }
        if !(db > T::zero()) {
            issues.push(format!("beta' = {db} is not positive"));
        }
        Ok((!issues.is_empty()).then(|| issues.join(", ")))
    }
}
