//! Linearized Crank-Nicolson time stepping.
//!
//! Each step solves, per equation and on interior dofs,
//!
//! ```text
//! (M/dt + L/2) V^n = (M/dt - L/2) V^{n-1} + G(t_{n-1/2}),   L = a b2 K - C(t_{n-1/2})
//! ```
//!
//! where the diffusion scalar `a` is frozen from known data: the extrapolation
//! `3/2 V^{n-1} - 1/2 V^{n-2}` for `n >= 2`, and a predictor-corrector pair for
//! the first step (predictor with `a(l(V^0))`, corrector with
//! `a(l((V^{1,0} + V^0)/2))`). Every step is therefore one banded LU solve per
//! equation, and the equations of one step are independent.

use crate::assembly::{assemble_load, diffusion_scalar, OperatorSet};
use crate::banded::{BandLu, BandMatrix};
use crate::error::{Error, Result};
use crate::problems::ProblemSpec;
use crate::scalar::Real;
use crate::space::FESpace;

/// Discrete solution at one time level.
#[derive(Debug, Clone, PartialEq)]
pub struct SchemeState<T> {
    pub step: usize,
    pub time: T,
    /// `V_i^{(n)}` for every equation, boundary dofs included (always zero).
    pub current: Vec<Vec<T>>,
    /// `V_i^{(n-1)}`, absent at `n = 0`.
    pub previous: Option<Vec<Vec<T>>>,
    pub delta: T,
}

/// Read-only hook called with every computed time level, `n = 0` included.
pub trait Observer<T> {
    fn observe(&mut self, step: usize, time: T, coeffs: &[Vec<T>]) -> Result<()>;
}

impl<T, F> Observer<T> for F
where
    F: FnMut(usize, T, &[Vec<T>]),
{
    fn observe(&mut self, step: usize, time: T, coeffs: &[Vec<T>]) -> Result<()> {
        self(step, time, coeffs);
        Ok(())
    }
}

/// Per-step summary kept by [`Stepper::run`].
#[derive(Debug, Clone, PartialEq)]
pub struct StepRecord<T> {
    pub step: usize,
    pub time: T,
    /// `int_{alpha}^{beta} u_i dx` for each equation.
    pub nonlocal: Vec<T>,
    /// `max_j |V_i(P_j)|` for each equation.
    pub max_abs: Vec<T>,
}

#[derive(Debug, Clone)]
pub struct RunOutput<T> {
    pub final_state: SchemeState<T>,
    pub series: Vec<StepRecord<T>>,
}

pub struct Stepper<'a, T> {
    problem: &'a ProblemSpec<T>,
    space: &'a FESpace<T>,
    ops: OperatorSet<T>,
    delta: T,
    steps: usize,
}

impl<'a, T: Real> Stepper<'a, T> {
    /// Assembles the static operators and checks the boundary motion at every
    /// time level and midpoint of the run.
    pub fn new(problem: &'a ProblemSpec<T>, space: &'a FESpace<T>, delta: T) -> Result<Self> {
        let final_time = problem.final_time();
        if !(delta > T::zero()) || !delta.is_finite() {
            return Err(Error::invalid(
                "delta",
                format!("must be positive, got {delta}"),
            ));
        }
        let ratio = (final_time / delta).to_f64_lossy();
        if !(ratio < 1e12) {
            return Err(Error::invalid(
                "delta",
                format!("T / delta = {ratio} is too large"),
            ));
        }
        let nearest = ratio.round();
        let steps = if (ratio - nearest).abs() <= 1e-9 * nearest.max(1.0) {
            nearest.max(1.0) as usize
        } else {
            ratio.ceil() as usize
        };
        let stepper = Self {
            problem,
            space,
            ops: OperatorSet::assemble(space),
            delta,
            steps,
        };
        let half = T::lit(0.5);
        problem
            .motion()
            .check_hypotheses((0..=steps).flat_map(|n| {
                let t = stepper.time_at(n);
                let mid = if n > 0 {
                    (stepper.time_at(n - 1) + t) * half
                } else {
                    t
                };
                [t, mid]
            }))?;
        Ok(stepper)
    }

    pub fn operators(&self) -> &OperatorSet<T> {
        &self.ops
    }

    pub fn space(&self) -> &'a FESpace<T> {
        self.space
    }

    pub fn problem(&self) -> &'a ProblemSpec<T> {
        self.problem
    }

    pub fn delta(&self) -> T {
        self.delta
    }

    /// Number of steps to reach `T`.
    pub fn num_steps(&self) -> usize {
        self.steps
    }

    /// `t_n = n delta`, except that the last level sits exactly on `T`.
    pub fn time_at(&self, n: usize) -> T {
        if n >= self.steps {
            self.problem.final_time()
        } else {
            T::from_count(n) * self.delta
        }
    }

    fn step_is_regular(&self, n: usize) -> bool {
        let dt = self.time_at(n) - self.time_at(n - 1);
        (dt - self.delta).abs() <= self.delta * T::lit(1e-9)
    }

    /// `V_i^{(0)} = I_h v_i0`.
    pub fn initialize(&self) -> Result<SchemeState<T>> {
        let current = (0..self.problem.ne())
            .map(|i| {
                let eq = self.problem.equation(i)?;
                let motion = self.problem.motion();
                let (alpha, width) = (motion.alpha(T::zero())?, motion.gamma(T::zero())?);
                self.space.interpolate(|y| (eq.initial)(alpha + width * y))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(SchemeState {
            step: 0,
            time: T::zero(),
            current,
            previous: None,
            delta: self.delta,
        })
    }

    fn nonlocal_all(&self, levels: &[Vec<T>], t: T) -> Result<Vec<T>> {
        levels
            .iter()
            .map(|v| self.ops.nonlocal_value(v, self.problem.motion(), t))
            .collect()
    }

    fn diffusion_all(&self, nonlocal: &[T]) -> Result<Vec<T>> {
        (0..self.problem.ne())
            .map(|i| diffusion_scalar(self.problem, i, nonlocal))
            .collect()
    }

    /// One Crank-Nicolson solve of equation `i` from `t_lo` to `t_hi` with a
    /// frozen diffusion scalar.
    fn solve_equation(
        &self,
        i: usize,
        prev: &[T],
        diffusion: T,
        t_lo: T,
        t_hi: T,
    ) -> Result<Vec<T>> {
        let motion = self.problem.motion();
        let dt = t_hi - t_lo;
        let t_mid = (t_lo + t_hi) * T::lit(0.5);
        let half = T::lit(0.5);
        let scaled = diffusion * motion.b2(t_mid)?;
        let conv = self.ops.convection(motion, t_mid)?;
        let inv_dt = dt.recip();
        let lhs = BandMatrix::combination(&[
            (inv_dt, &self.ops.mass),
            (half * scaled, &self.ops.stiffness),
            (-half, &conv),
        ]);
        let rhs_op = BandMatrix::combination(&[
            (inv_dt, &self.ops.mass),
            (-half * scaled, &self.ops.stiffness),
            (half, &conv),
        ]);
        let load = assemble_load(self.space, self.problem, i, t_mid)?;
        let rhs: Vec<T> = rhs_op
            .mul_vec(prev)?
            .into_iter()
            .zip(load)
            .map(|(a, b)| a + b)
            .collect();
        let np = self.space.num_dofs();
        let mut interior = rhs[1..np - 1].to_vec();
        if !interior.is_empty() {
            BandLu::factor(&lhs.interior())?.solve_in_place(&mut interior)?;
        }
        let mut out = Vec::with_capacity(np);
        out.push(T::zero());
        out.extend(interior);
        out.push(T::zero());
        if let Some((j, v)) = out.iter().enumerate().find(|(_, v)| !v.is_finite()) {
            return Err(Error::NonFinite {
                what: "solution",
                value: v.to_f64_lossy(),
                location: format!("equation {}, dof {j}", i + 1),
            });
        }
        Ok(out)
    }

    fn solve_all(&self, prev: &[Vec<T>], diffusion: &[T], t_lo: T, t_hi: T) -> Result<Vec<Vec<T>>> {
        prev.iter()
            .zip(diffusion)
            .enumerate()
            .map(|(i, (v, &a))| self.solve_equation(i, v, a, t_lo, t_hi))
            .collect()
    }

    /// Predictor-corrector step from `n = 0` to `n = 1`.
    pub fn bootstrap_first_step(&self, state: &SchemeState<T>) -> Result<SchemeState<T>> {
        if state.step != 0 {
            return Err(Error::invalid("state", "bootstrap starts from n = 0"));
        }
        let (t0, t1) = (self.time_at(0), self.time_at(1));
        let t_mid = (t0 + t1) * T::lit(0.5);
        let run = || -> Result<Vec<Vec<T>>> {
            let frozen = self.diffusion_all(&self.nonlocal_all(&state.current, t0)?)?;
            let predicted = self.solve_all(&state.current, &frozen, t0, t1)?;
            let averaged: Vec<Vec<T>> = predicted
                .iter()
                .zip(&state.current)
                .map(|(p, c)| {
                    p.iter()
                        .zip(c)
                        .map(|(&a, &b)| (a + b) * T::lit(0.5))
                        .collect()
                })
                .collect();
            let corrected = self.diffusion_all(&self.nonlocal_all(&averaged, t_mid)?)?;
            self.solve_all(&state.current, &corrected, t0, t1)
        };
        let next = run().map_err(|e| e.at_step(1))?;
        Ok(SchemeState {
            step: 1,
            time: t1,
            current: next,
            previous: Some(state.current.clone()),
            delta: self.delta,
        })
    }

    /// Extrapolated step from `n - 1` to `n` for `n >= 2`.
    ///
    /// A shortened final step freezes the diffusion at `l(V^{(n-1)})` instead
    /// of extrapolating.
    pub fn advance(&self, state: &SchemeState<T>) -> Result<SchemeState<T>> {
        let previous = state.previous.as_ref().ok_or_else(|| {
            Error::invalid("state", "advance needs two time levels; bootstrap first")
        })?;
        let n = state.step + 1;
        if n > self.steps {
            return Err(Error::invalid("state", "already at the final time"));
        }
        let (t_lo, t_hi) = (self.time_at(n - 1), self.time_at(n));
        let t_mid = (t_lo + t_hi) * T::lit(0.5);
        let run = || -> Result<Vec<Vec<T>>> {
            let extrapolated: Vec<Vec<T>> = if self.step_is_regular(n) {
                let (three_halves, half) = (T::lit(1.5), T::lit(0.5));
                state
                    .current
                    .iter()
                    .zip(previous)
                    .map(|(c, p)| {
                        c.iter()
                            .zip(p)
                            .map(|(&a, &b)| three_halves * a - half * b)
                            .collect()
                    })
                    .collect()
            } else {
                state.current.clone()
            };
            let diffusion = self.diffusion_all(&self.nonlocal_all(&extrapolated, t_mid)?)?;
            self.solve_all(&state.current, &diffusion, t_lo, t_hi)
        };
        let next = run().map_err(|e| e.at_step(n))?;
        Ok(SchemeState {
            step: n,
            time: t_hi,
            current: next,
            previous: Some(state.current.clone()),
            delta: self.delta,
        })
    }

    fn record(&self, state: &SchemeState<T>) -> Result<StepRecord<T>> {
        Ok(StepRecord {
            step: state.step,
            time: state.time,
            nonlocal: self.nonlocal_all(&state.current, state.time)?,
            max_abs: state
                .current
                .iter()
                .map(|v| v.iter().fold(T::zero(), |m, x| m.max(x.abs())))
                .collect(),
        })
    }

    /// Runs from `t = 0` to `T`, handing every level to each observer in order.
    pub fn run(&self, observers: &mut [&mut dyn Observer<T>]) -> Result<RunOutput<T>> {
        let mut state = self.initialize()?;
        let mut series = Vec::with_capacity(self.steps + 1);
        let mut notify = |s: &SchemeState<T>, series: &mut Vec<StepRecord<T>>| -> Result<()> {
            series.push(self.record(s)?);
            for o in observers.iter_mut() {
                o.observe(s.step, s.time, &s.current)?;
            }
            Ok(())
        };
        notify(&state, &mut series)?;
        state = self.bootstrap_first_step(&state)?;
        notify(&state, &mut series)?;
        while state.step < self.steps {
            state = self.advance(&state)?;
            notify(&state, &mut series)?;
        }
        Ok(RunOutput {
            final_state: state,
            series,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{BoundaryMotion, ExpansionPolicy};
    use crate::problems::{DiffusionLaw, Equation};

    fn heat(final_time: f64, initial: fn(f64) -> f64) -> ProblemSpec<f64> {
        let motion = BoundaryMotion::stationary(0.0, 1.0, final_time).unwrap();
        ProblemSpec::new(
            "heat",
            motion,
            vec![Equation::new(
                DiffusionLaw::constant(1.0),
                |_, _| 0.0,
                initial,
            )],
        )
        .unwrap()
    }

    #[test]
    fn zero_is_a_fixed_point() {
        let p = heat(0.1, |_| 0.0);
        let space = FESpace::uniform_default(4, 2).unwrap();
        let out = Stepper::new(&p, &space, 0.01)
            .unwrap()
            .run(&mut [])
            .unwrap();
        assert!(out.final_state.current[0].iter().all(|&v| v == 0.0));
        assert_eq!(out.series.len(), 11);
    }

    #[test]
    fn first_step_decays() {
        let p = heat(0.1, |x| (std::f64::consts::PI * x).sin());
        let space = FESpace::uniform_default(8, 2).unwrap();
        let s = Stepper::new(&p, &space, 0.01).unwrap();
        let s0 = s.initialize().unwrap();
        let s1 = s.bootstrap_first_step(&s0).unwrap();
        let n0 = space.l2_norm(&s0.current[0]).unwrap();
        let n1 = space.l2_norm(&s1.current[0]).unwrap();
        assert!(n1 < n0);
        let ratio = n1 / n0;
        let decay = (-std::f64::consts::PI.powi(2) * 0.01).exp();
        assert!((ratio - decay).abs() < 1e-3, "{ratio} vs {decay}");
    }

    #[test]
    fn step_count_and_final_time() {
        let p = heat(3.0, |_| 0.0);
        let space = FESpace::uniform_default(2, 1).unwrap();
        let s = Stepper::new(&p, &space, 0.01).unwrap();
        assert_eq!(s.num_steps(), 300);
        assert_eq!(s.time_at(300), 3.0);
        assert_eq!(s.time_at(150), 1.5);

        let s = Stepper::new(&p, &space, 0.7).unwrap();
        assert_eq!(s.num_steps(), 5);
        assert_eq!(s.time_at(5), 3.0);
        assert!(!s.step_is_regular(5));
        assert!(s.step_is_regular(4));
        let out = s.run(&mut []).unwrap();
        assert_eq!(out.final_state.time, 3.0);
    }

    #[test]
    fn rejects_bad_delta() {
        let p = heat(1.0, |_| 0.0);
        let space = FESpace::uniform_default(2, 1).unwrap();
        assert!(Stepper::new(&p, &space, 0.0).is_err());
        assert!(Stepper::new(&p, &space, -0.1).is_err());
        assert!(Stepper::new(&p, &space, f64::NAN).is_err());
    }

    #[test]
    fn stationary_domain_rejected_under_enforce() {
        let motion = BoundaryMotion::stationary(0.0, 1.0, 1.0)
            .unwrap()
            .with_policy(ExpansionPolicy::Enforce);
        let p = ProblemSpec::new(
            "still",
            motion,
            vec![Equation::new(
                DiffusionLaw::constant(1.0),
                |_, _| 0.0,
                |_| 0.0,
            )],
        )
        .unwrap();
        let space = FESpace::uniform_default(2, 1).unwrap();
        assert!(matches!(
            Stepper::new(&p, &space, 0.1),
            Err(Error::Monotonicity { .. })
        ));
    }

    #[test]
    fn advance_requires_bootstrap() {
        let p = heat(1.0, |x| x * (1.0 - x));
        let space = FESpace::uniform_default(2, 2).unwrap();
        let s = Stepper::new(&p, &space, 0.1).unwrap();
        let s0 = s.initialize().unwrap();
        assert!(s.advance(&s0).is_err());
        let s1 = s.bootstrap_first_step(&s0).unwrap();
        assert!(s.bootstrap_first_step(&s1).is_err());
        assert!(s.advance(&s1).is_ok());
    }

    #[test]
    fn diffusion_violation_reports_step() {
        let motion = BoundaryMotion::stationary(0.0, 1.0, 1.0).unwrap();
        // a = 1 + l(u) leaves its bounds once the forcing has pumped in mass
        let p = ProblemSpec::new(
            "pumped",
            motion,
            vec![Equation::new(
                DiffusionLaw::new(|v: &[f64]| 1.0 + v[0]).with_bounds(0.5, 1.01),
                |_, _| 1.0,
                |_| 0.0,
            )],
        )
        .unwrap();
        let space = FESpace::uniform_default(4, 1).unwrap();
        let err = Stepper::new(&p, &space, 0.1)
            .unwrap()
            .run(&mut [])
            .unwrap_err();
        match err {
            Error::Step { step, source } => {
                assert!(step >= 1);
                assert!(matches!(*source, Error::DiffusionBounds { .. }));
            }
            other => panic!("unexpected {other}"),
        }
    }
}
