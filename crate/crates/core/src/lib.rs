//! Galerkin finite elements of arbitrary degree with linearized
//! Crank-Nicolson time stepping for systems of reaction-diffusion equations
//! whose diffusion coefficients depend on the total mass of every component,
//! posed on an interval with moving ends.
//!
//! The moving interval `(alpha(t), beta(t))` is mapped onto `(0, 1)`; the
//! solver works entirely in the fixed coordinate and maps back for output.
//!
//! All numerical code is generic over [`Real`] (`f32` or `f64`); the aliases
//! below fix the scalar to `f64`.
//!
//! ```
//! use nonlocal_fem::analysis::measure;
//! use nonlocal_fem::problems::example1;
//! use nonlocal_fem::{FESpace, Stepper};
//!
//! let problem = example1::<f64>().with_final_time(0.5)?;
//! let space = FESpace::uniform_default(8, 2)?;
//! let stepper = Stepper::new(&problem, &space, 0.01)?;
//! let out = stepper.run(&mut [])?;
//! let state = &out.final_state;
//! let errors = measure(&space, &problem, state.time, &state.current)?;
//! assert!(errors.l2_moving.iter().all(|&e| e < 1e-2));
//! # Ok::<(), nonlocal_fem::Error>(())
//! ```

#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod analysis;
pub mod assembly;
pub mod banded;
pub mod cli;
pub mod error;
pub mod geometry;
pub mod problems;
pub mod quadrature;
pub mod scalar;
pub mod space;
pub mod spline;
pub mod stepper;

pub use error::{Error, Result};
pub use scalar::Real;

pub type BoundaryMotion = geometry::BoundaryMotion<f64>;
pub type FESpace = space::FESpace<f64>;
pub type QuadratureRule = quadrature::QuadratureRule<f64>;
pub type OperatorSet = assembly::OperatorSet<f64>;
pub type ProblemSpec = problems::ProblemSpec<f64>;
pub type SchemeState = stepper::SchemeState<f64>;
pub type Stepper<'a> = stepper::Stepper<'a, f64>;
pub type ErrorMeasurement = analysis::ErrorMeasurement<f64>;
pub type RateFit = analysis::RateFit<f64>;
pub type NaturalCubicSpline = spline::NaturalCubicSpline<f64>;

/// Single-precision variants.
pub mod f32 {
    pub type BoundaryMotion = crate::geometry::BoundaryMotion<f32>;
    pub type FESpace = crate::space::FESpace<f32>;
    pub type ProblemSpec = crate::problems::ProblemSpec<f32>;
    pub type Stepper<'a> = crate::stepper::Stepper<'a, f32>;
}
