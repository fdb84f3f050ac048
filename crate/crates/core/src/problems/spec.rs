use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::geometry::BoundaryMotion;
use crate::scalar::Real;

/// Function of `(x, t)` in physical coordinates.
pub type FieldFn<T> = Arc<dyn Fn(T, T) -> T + Send + Sync>;
/// Function of position only.
pub type ProfileFn<T> = Arc<dyn Fn(T) -> T + Send + Sync>;
/// Diffusion law evaluated on the tuple of nonlocal values `l(v_1), ..., l(v_ne)`.
pub type DiffusionFn<T> = Arc<dyn Fn(&[T]) -> T + Send + Sync>;

/// Default bounds used when a law does not declare its own.
pub const DEFAULT_DIFFUSION_BOUNDS: (f64, f64) = (1e-12, 1e12);

/// Nonlocal diffusion law `a_i` with the bounds `[m_a, M_a]` enforced at runtime.
#[derive(Clone)]
pub struct DiffusionLaw<T> {
    law: DiffusionFn<T>,
    lower: T,
    upper: T,
}

impl<T: Real> DiffusionLaw<T> {
    pub fn new(law: impl Fn(&[T]) -> T + Send + Sync + 'static) -> Self {
        Self {
            law: Arc::new(law),
            lower: T::lit(DEFAULT_DIFFUSION_BOUNDS.0),
            upper: T::lit(DEFAULT_DIFFUSION_BOUNDS.1),
        }
    }

    pub fn constant(value: T) -> Self {
        Self::new(move |_| value)
    }

    pub fn with_bounds(mut self, lower: T, upper: T) -> Self {
        self.lower = lower;
        self.upper = upper;
        self
    }

    pub fn bounds(&self) -> (T, T) {
        (self.lower, self.upper)
    }

    /// Raw evaluation without the bound check.
    pub fn eval(&self, nonlocal: &[T]) -> T {
        (self.law)(nonlocal)
    }
}

/// One component of the system: its diffusion law, forcing `f_i(x, t)`,
/// initial profile `u_i0(x)` and, when known, exact solution `u_i(x, t)`.
#[derive(Clone)]
pub struct Equation<T> {
    pub diffusion: DiffusionLaw<T>,
    pub forcing: FieldFn<T>,
    pub initial: ProfileFn<T>,
    pub exact: Option<FieldFn<T>>,
}

impl<T: Real> Equation<T> {
    pub fn new(
        diffusion: DiffusionLaw<T>,
        forcing: impl Fn(T, T) -> T + Send + Sync + 'static,
        initial: impl Fn(T) -> T + Send + Sync + 'static,
    ) -> Self {
        Self {
            diffusion,
            forcing: Arc::new(forcing),
            initial: Arc::new(initial),
            exact: None,
        }
    }

    pub fn with_exact(mut self, exact: impl Fn(T, T) -> T + Send + Sync + 'static) -> Self {
        self.exact = Some(Arc::new(exact));
        self
    }
}

/// A coupled nonlocal system on a moving interval.
#[derive(Clone)]
pub struct ProblemSpec<T> {
    name: String,
    equations: Vec<Equation<T>>,
    motion: BoundaryMotion<T>,
}

impl<T: Real> fmt::Debug for ProblemSpec<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ProblemSpec")
            .field("name", &self.name)
            .field("ne", &self.equations.len())
            .field("motion", &self.motion)
            .finish()
    }
}

impl<T: Real> ProblemSpec<T> {
    pub fn new(
        name: impl Into<String>,
        motion: BoundaryMotion<T>,
        equations: Vec<Equation<T>>,
    ) -> Result<Self> {
        if equations.is_empty() {
            return Err(Error::invalid("equations", "need at least one equation"));
        }
        Ok(Self {
            name: name.into(),
            equations,
            motion,
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    /// Number of equations `ne`.
    pub fn ne(&self) -> usize {
        self.equations.len()
    }

    pub fn equations(&self) -> &[Equation<T>] {
        &self.equations
    }

    pub fn equation(&self, i: usize) -> Result<&Equation<T>> {
        self.equations.get(i).ok_or(Error::Index {
            index: i,
            len: self.equations.len(),
        })
    }

    pub fn motion(&self) -> &BoundaryMotion<T> {
        &self.motion
    }

    pub fn final_time(&self) -> T {
        self.motion.final_time()
    }

    /// Same problem on a different horizon.
    pub fn with_final_time(mut self, final_time: T) -> Result<Self> {
        self.motion = self.motion.with_final_time(final_time)?;
        Ok(self)
    }

    pub fn with_motion(mut self, motion: BoundaryMotion<T>) -> Self {
        self.motion = motion;
        self
    }

    pub fn has_exact(&self) -> bool {
        self.equations.iter().all(|e| e.exact.is_some())
    }

    /// Exact solution of equation `i` at `(x, t)`.
    pub fn exact(&self, i: usize, x: T, t: T) -> Result<T> {
        let eq = self.equation(i)?;
        let u = eq.exact.as_ref().ok_or(Error::MissingExact)?;
        Ok(u(x, t))
    }

    /// Initial profile in reference coordinates, `v_i0(y) = u_i0(alpha(0) + gamma(0) y)`.
    pub fn initial_reference(&self, i: usize, y: T) -> Result<T> {
        let x = self.motion.to_moving(y, T::zero())?;
        Ok((self.equation(i)?.initial)(x))
    }
}
