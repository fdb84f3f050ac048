//! Two-equation benchmark with a known exact solution on the interval
//! `(-t/(1+t), 1 + 2t/(1+t))`, `T = 3`.
//!
//! The exact pair is a quartic in the reference coordinate
//! `z = (x - alpha(t)) / gamma(t) = (x(1+t) + t) / (1+4t)` times a decaying
//! amplitude:
//!
//! ```text
//! u_1 = (611/70 z - 10513/210 z^2 + 646/7 z^3 - 1070/21 z^4) / (1 + t)
//! u_2 = e^{-t} (2047/140 z - 27701/420 z^2 + 691/7 z^3 - 995/21 z^4)
//! ```
//!
//! Both quartics vanish at `z = 0` and `z = 1`, so the Dirichlet conditions
//! hold on both moving ends. The forcing is generated in closed form by
//! [`ManufacturedSystem`].

use std::sync::Arc;

use crate::error::Result;
use crate::geometry::BoundaryMotion;
use crate::problems::manufactured::{ManufacturedComponent, ManufacturedSystem, Polynomial};
use crate::problems::spec::{DiffusionLaw, Equation, ProblemSpec};
use crate::scalar::Real;

pub const FINAL_TIME: f64 = 3.0;

pub fn motion<T: Real>() -> BoundaryMotion<T> {
    BoundaryMotion::new(
        |t: T| -t / (T::one() + t),
        |t: T| T::one() + T::lit(2.0) * t / (T::one() + t),
        |t: T| -((T::one() + t) * (T::one() + t)).recip(),
        |t: T| T::lit(2.0) / ((T::one() + t) * (T::one() + t)),
        T::lit(FINAL_TIME),
    )
    .expect("valid horizon")
}

/// `a_1(r, s) = 2 - 1/(1+r^2) + 1/(1+s^2)`, with values in `(1, 3]`.
pub fn diffusion_1<T: Real>() -> DiffusionLaw<T> {
    DiffusionLaw::new(|v: &[T]| {
        let (r, s) = (v[0], v[1]);
        T::lit(2.0) - (T::one() + r * r).recip() + (T::one() + s * s).recip()
    })
    .with_bounds(T::one(), T::lit(3.0))
}

/// `a_2(r, s) = 3 + 2/(1+r^2) - 1/(1+s^2)`, with values in `(2, 5)`.
pub fn diffusion_2<T: Real>() -> DiffusionLaw<T> {
    DiffusionLaw::new(|v: &[T]| {
        let (r, s) = (v[0], v[1]);
        T::lit(3.0) + T::lit(2.0) / (T::one() + r * r) - (T::one() + s * s).recip()
    })
    .with_bounds(T::lit(2.0), T::lit(5.0))
}

pub fn shape_1<T: Real>() -> Polynomial<T> {
    Polynomial::new(vec![
        T::zero(),
        T::lit(611.0) / T::lit(70.0),
        -T::lit(10513.0) / T::lit(210.0),
        T::lit(646.0) / T::lit(7.0),
        -T::lit(1070.0) / T::lit(21.0),
    ])
}

pub fn shape_2<T: Real>() -> Polynomial<T> {
    Polynomial::new(vec![
        T::zero(),
        T::lit(2047.0) / T::lit(140.0),
        -T::lit(27701.0) / T::lit(420.0),
        T::lit(691.0) / T::lit(7.0),
        -T::lit(995.0) / T::lit(21.0),
    ])
}

/// The exact pair and its forcing on the given motion.
pub fn system_on<T: Real>(motion: BoundaryMotion<T>) -> ManufacturedSystem<T> {
    ManufacturedSystem::new(
        motion,
        vec![diffusion_1(), diffusion_2()],
        vec![
            ManufacturedComponent::new(
                |t: T| (T::one() + t).recip(),
                |t: T| -((T::one() + t) * (T::one() + t)).recip(),
                shape_1(),
            ),
            ManufacturedComponent::new(|t: T| (-t).exp(), |t: T| -(-t).exp(), shape_2()),
        ],
    )
    .expect("two laws for two components")
}

pub fn system<T: Real>() -> ManufacturedSystem<T> {
    system_on(motion())
}

/// Forcing `f_i(x, t)` of the benchmark; errors outside the space-time domain.
pub fn forcing<T: Real>(i: usize, x: T, t: T) -> Result<T> {
    system().forcing(i, x, t)
}

/// Builds a [`ProblemSpec`] from a manufactured system: forcing, initial data
/// `u_i(x, 0)` and exact solutions all come from the system.
pub fn problem_from_system<T: Real>(name: &str, system: ManufacturedSystem<T>) -> ProblemSpec<T> {
    let system = Arc::new(system);
    let equations = (0..system.ne())
        .map(|i| {
            let (sf, si, se) = (system.clone(), system.clone(), system.clone());
            Equation::new(
                system.laws()[i].clone(),
                move |x, t| sf.forcing_unchecked(i, x, t).unwrap_or(T::nan()),
                move |x| si.u(i, x, T::zero()).unwrap_or(T::nan()),
            )
            .with_exact(move |x, t| se.u(i, x, t).unwrap_or(T::nan()))
        })
        .collect();
    ProblemSpec::new(name, system.motion().clone(), equations).expect("non-empty system")
}

pub fn example1<T: Real>() -> ProblemSpec<T> {
    problem_from_system("example1", system())
}

/// Left end as in [`motion`], right end `1 + t/(1+2t)`.
///
/// With this motion the reference coordinate reduces to
/// `z = (2t+1)(x + tx + t) / (5t^2 + 5t + 1)`.
pub fn slow_motion<T: Real>() -> BoundaryMotion<T> {
    BoundaryMotion::new(
        |t: T| -t / (T::one() + t),
        |t: T| T::one() + t / (T::one() + T::lit(2.0) * t),
        |t: T| -((T::one() + t) * (T::one() + t)).recip(),
        |t: T| {
            let d = T::one() + T::lit(2.0) * t;
            (d * d).recip()
        },
        T::lit(FINAL_TIME),
    )
    .expect("valid horizon")
}

/// The same exact pair carried by [`slow_motion`].
pub fn example1_slow<T: Real>() -> ProblemSpec<T> {
    problem_from_system("example1-slow", system_on(slow_motion()))
}
