//! Two populations on the symmetric expanding interval
//! `alpha(t) = sqrt(2/3) - (t + (2/3)^{3/2})^{1/3}`, `beta = 1 - alpha`, `0 <= t <= 1`,
//! starting from natural cubic spline profiles. No exact solution.

use std::sync::Arc;

use crate::geometry::BoundaryMotion;
use crate::problems::spec::{DiffusionLaw, Equation, ProblemSpec};
use crate::scalar::Real;
use crate::spline::NaturalCubicSpline;

pub const FINAL_TIME: f64 = 1.0;
pub const KNOTS_1: [(f64, f64); 4] = [(0.0, 0.0), (0.2, 1.0), (0.5, 0.5), (1.0, 0.0)];
pub const KNOTS_2: [(f64, f64); 4] = [(0.0, 0.0), (0.6, 0.65), (0.8, 1.0), (1.0, 0.0)];

fn shift<T: Real>() -> T {
    T::lit(2.0 / 3.0).powf(T::lit(1.5))
}

pub fn motion<T: Real>() -> BoundaryMotion<T> {
    let alpha = |t: T| T::lit(2.0 / 3.0).sqrt() - (t + shift::<T>()).cbrt();
    let alpha_prime = |t: T| -(t + shift::<T>()).powf(-T::lit(2.0) / T::lit(3.0)) / T::lit(3.0);
    BoundaryMotion::new(
        alpha,
        move |t: T| T::one() - alpha(t),
        alpha_prime,
        move |t: T| -alpha_prime(t),
        T::lit(FINAL_TIME),
    )
    .expect("valid horizon")
}

pub fn spline<T: Real>(knots: &[(f64, f64)]) -> NaturalCubicSpline<T> {
    let knots: Vec<(T, T)> = knots.iter().map(|&(x, y)| (T::lit(x), T::lit(y))).collect();
    NaturalCubicSpline::new(&knots).expect("fixed knot sets are valid")
}

/// `a_1(r, s) = 2 - 1/(1+s^2)`, values in `[1, 2)`.
pub fn diffusion_1<T: Real>() -> DiffusionLaw<T> {
    DiffusionLaw::new(|v: &[T]| T::lit(2.0) - (T::one() + v[1] * v[1]).recip())
        .with_bounds(T::one(), T::lit(2.0))
}

/// `a_2(r, s) = exp(-r^2)`, values in `(0, 1]`.
pub fn diffusion_2<T: Real>() -> DiffusionLaw<T> {
    DiffusionLaw::new(|v: &[T]| (-v[0] * v[0]).exp()).with_bounds(T::lit(1e-12), T::one())
}

pub fn example2<T: Real>() -> ProblemSpec<T> {
    let s1 = Arc::new(spline::<T>(&KNOTS_1));
    let s2 = Arc::new(spline::<T>(&KNOTS_2));
    let equations = vec![
        Equation::new(
            diffusion_1(),
            |x: T, t: T| T::lit(0.1) * x / (T::one() + t).powi(4),
            move |x| s1.eval(x),
        ),
        Equation::new(
            diffusion_2(),
            |x: T, t: T| (-x * x).exp() / (T::one() + t).powi(6),
            move |x| s2.eval(x),
        ),
    ];
    ProblemSpec::new("example2", motion(), equations).expect("two equations")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn initial_interval_is_unit() {
        let m = motion::<f64>();
        assert!(m.alpha(0.0).unwrap().abs() < 1e-15);
        assert!((m.beta(0.0).unwrap() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn symmetric_and_expanding() {
        let m = motion::<f64>();
        let mut last = 0.0;
        for n in 0..=100 {
            let t = n as f64 / 100.0;
            assert!((m.alpha(t).unwrap() + m.beta(t).unwrap() - 1.0).abs() < 1e-15);
            let g = m.gamma(t).unwrap();
            assert!((g - (1.0 - 2.0 * m.alpha(t).unwrap())).abs() < 1e-15);
            assert!(g > last);
            last = g;
            assert!(m.alpha_prime(t).unwrap() < 0.0 && m.beta_prime(t).unwrap() > 0.0);
        }
    }

    #[test]
    fn analytic_velocity_matches_differences() {
        let m = motion::<f64>();
        let h = 1e-6;
        for n in 1..10 {
            let t = n as f64 / 10.0;
            let fd = (m.alpha(t + h).unwrap() - m.alpha(t - h).unwrap()) / (2.0 * h);
            assert!(((m.alpha_prime(t).unwrap() - fd) / fd).abs() < 1e-6);
        }
    }

    #[test]
    fn spline_data() {
        let p = example2::<f64>();
        assert_eq!((p.equations()[0].initial)(0.2), 1.0);
        assert_eq!((p.equations()[1].initial)(0.8), 1.0);
        assert_eq!(p.equations()[1].diffusion.eval(&[0.0, 3.0]), 1.0);
        assert!(!p.has_exact());
    }
}
