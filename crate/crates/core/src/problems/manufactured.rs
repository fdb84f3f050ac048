//! Manufactured solutions of the form `u(x, t) = A(t) P(z)` with `P` a
//! polynomial in the reference coordinate `z = (x - alpha(t)) / gamma(t)`.
//!
//! With `z_t = -(alpha' + gamma' z) / gamma` and `z_x = 1 / gamma`:
//!
//! ```text
//! u_t  = A' P(z) - A P'(z) (alpha' + gamma' z) / gamma
//! u_xx = A P''(z) / gamma^2
//! I(t) = int_alpha^beta u dx = gamma A int_0^1 P(z) dz
//! f_i  = u_t - a_i(I_1, ..., I_ne) u_xx
//! ```

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::geometry::{BoundaryMotion, TimeFn};
use crate::problems::spec::DiffusionLaw;
use crate::scalar::Real;

/// Polynomial with coefficients in increasing powers.
#[derive(Debug, Clone, PartialEq)]
pub struct Polynomial<T> {
    coeffs: Vec<T>,
}

impl<T: Real> Polynomial<T> {
    pub fn new(coeffs: Vec<T>) -> Self {
        Self { coeffs }
    }

    pub fn coeffs(&self) -> &[T] {
        &self.coeffs
    }

    pub fn eval(&self, z: T) -> T {
        self.coeffs
            .iter()
            .rev()
            .fold(T::zero(), |acc, &c| acc * z + c)
    }

    pub fn derivative(&self) -> Self {
        Self::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(m, &c)| c * T::from_count(m))
                .collect(),
        )
    }

    /// `int_0^1 P(z) dz`.
    pub fn unit_integral(&self) -> T {
        self.coeffs
            .iter()
            .enumerate()
            .fold(T::zero(), |acc, (m, &c)| acc + c / T::from_count(m + 1))
    }
}

/// One component `A(t) P(z)`.
#[derive(Clone)]
pub struct ManufacturedComponent<T> {
    pub amplitude: TimeFn<T>,
    pub amplitude_prime: TimeFn<T>,
    pub shape: Polynomial<T>,
}

/// Manufactured system sharing one boundary motion, with the forcing that
/// makes it an exact solution.
#[derive(Clone)]
pub struct ManufacturedSystem<T> {
    motion: BoundaryMotion<T>,
    laws: Vec<DiffusionLaw<T>>,
    components: Vec<(ManufacturedComponent<T>, Polynomial<T>, Polynomial<T>)>,
}

impl<T: Real> ManufacturedSystem<T> {
    pub fn new(
        motion: BoundaryMotion<T>,
        laws: Vec<DiffusionLaw<T>>,
        components: Vec<ManufacturedComponent<T>>,
    ) -> Result<Self> {
        if laws.len() != components.len() {
            return Err(Error::Dimension {
                expected: components.len(),
                got: laws.len(),
            });
        }
        let components = components
            .into_iter()
            .map(|c| {
                let d1 = c.shape.derivative();
                let d2 = d1.derivative();
                (c, d1, d2)
            })
            .collect();
        Ok(Self {
            motion,
            laws,
            components,
        })
    }

    pub fn motion(&self) -> &BoundaryMotion<T> {
        &self.motion
    }

    pub fn laws(&self) -> &[DiffusionLaw<T>] {
        &self.laws
    }

    pub fn ne(&self) -> usize {
        self.components.len()
    }

    fn component(
        &self,
        i: usize,
    ) -> Result<&(ManufacturedComponent<T>, Polynomial<T>, Polynomial<T>)> {
        self.components.get(i).ok_or(Error::Index {
            index: i,
            len: self.components.len(),
        })
    }

    /// Reference coordinate without clamping, so callers may probe slightly
    /// outside the interval (finite differences at the boundary).
    fn z(&self, x: T, t: T) -> Result<T> {
        Ok((x - self.motion.alpha(t)?) / self.motion.gamma(t)?)
    }

    fn check_inside(&self, x: T, t: T) -> Result<()> {
        self.motion.to_fixed(x, t).map(|_| ())
    }

    /// Exact solution `u_i(x, t)`.
    pub fn u(&self, i: usize, x: T, t: T) -> Result<T> {
        let (c, _, _) = self.component(i)?;
        Ok((c.amplitude)(t) * c.shape.eval(self.z(x, t)?))
    }

    /// `int_{alpha(t)}^{beta(t)} u_i(x, t) dx` in closed form.
    pub fn integral(&self, i: usize, t: T) -> Result<T> {
        let (c, _, _) = self.component(i)?;
        Ok(self.motion.gamma(t)? * (c.amplitude)(t) * c.shape.unit_integral())
    }

    pub fn integrals(&self, t: T) -> Result<Vec<T>> {
        (0..self.ne()).map(|j| self.integral(j, t)).collect()
    }

    pub fn u_t(&self, i: usize, x: T, t: T) -> Result<T> {
        let (c, d1, _) = self.component(i)?;
        let z = self.z(x, t)?;
        let width = self.motion.gamma(t)?;
        let dz_dt = -(self.motion.alpha_prime(t)? + self.motion.gamma_prime(t)? * z) / width;
        Ok((c.amplitude_prime)(t) * c.shape.eval(z) + (c.amplitude)(t) * d1.eval(z) * dz_dt)
    }

    pub fn u_xx(&self, i: usize, x: T, t: T) -> Result<T> {
        let (c, _, d2) = self.component(i)?;
        let width = self.motion.gamma(t)?;
        Ok((c.amplitude)(t) * d2.eval(self.z(x, t)?) / (width * width))
    }

    /// Forcing `f_i(x, t)` making the system exact. Errors outside `Q_t`.
    pub fn forcing(&self, i: usize, x: T, t: T) -> Result<T> {
        self.check_inside(x, t)?;
        self.forcing_unchecked(i, x, t)
    }

    pub(crate) fn forcing_unchecked(&self, i: usize, x: T, t: T) -> Result<T> {
        let integrals = self.integrals(t)?;
        let law = self.laws.get(i).ok_or(Error::Index {
            index: i,
            len: self.laws.len(),
        })?;
        Ok(self.u_t(i, x, t)? - law.eval(&integrals) * self.u_xx(i, x, t)?)
    }
}

impl<T: Real> ManufacturedComponent<T> {
    pub fn new(
        amplitude: impl Fn(T) -> T + Send + Sync + 'static,
        amplitude_prime: impl Fn(T) -> T + Send + Sync + 'static,
        shape: Polynomial<T>,
    ) -> Self {
        Self {
            amplitude: Arc::new(amplitude),
            amplitude_prime: Arc::new(amplitude_prime),
            shape,
        }
    }
}
