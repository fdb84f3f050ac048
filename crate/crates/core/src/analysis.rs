//! Error measurement against exact solutions and log-log rate fitting.

use std::time::Instant;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::problems::ProblemSpec;
use crate::quadrature::QuadratureRule;
use crate::scalar::Real;
use crate::space::FESpace;
use crate::stepper::{Observer, Stepper};

/// Fits with `r^2` below this are flagged unreliable.
pub const RELIABLE_R_SQUARED: f64 = 0.99;

/// Errors of every equation at one time level.
#[derive(Debug, Clone, PartialEq)]
pub struct ErrorMeasurement<T> {
    pub time: T,
    /// `|| V_i - v_i ||_{L2(0,1)}` in reference coordinates.
    pub l2_fixed: Vec<T>,
    /// `|| V_i - u_i ||_{L2(alpha(t), beta(t))} = sqrt(gamma(t)) * l2_fixed`.
    pub l2_moving: Vec<T>,
    /// `max_j |u_i(P_j, t) - V_i(P_j)|` over all nodes, endpoints included.
    pub max_nodal: Vec<T>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ErrorReport<T> {
    pub measurements: Vec<ErrorMeasurement<T>>,
    pub runtime_seconds: f64,
}

/// Measures the discrete solution `coeffs` against the exact solution at `time`.
///
/// The `L2` error is integrated with `q + 2` Gauss points per element directly
/// against the exact solution.
pub fn measure<T: Real>(
    space: &FESpace<T>,
    problem: &ProblemSpec<T>,
    time: T,
    coeffs: &[Vec<T>],
) -> Result<ErrorMeasurement<T>> {
    if !problem.has_exact() {
        return Err(Error::MissingExact);
    }
    if coeffs.len() != problem.ne() {
        return Err(Error::Dimension {
            expected: problem.ne(),
            got: coeffs.len(),
        });
    }
    let motion = problem.motion();
    let alpha = motion.alpha(time)?;
    let width = motion.gamma(time)?;
    let rule = QuadratureRule::gauss_legendre(space.rule().len() + 2)?;
    let mut l2_fixed = Vec::with_capacity(coeffs.len());
    let mut max_nodal = Vec::with_capacity(coeffs.len());
    for (i, v) in coeffs.iter().enumerate() {
        let exact = problem.equations()[i]
            .exact
            .as_ref()
            .ok_or(Error::MissingExact)?;
        let sq = space.integrate_expansion(v, &rule, |y, value| {
            let d = value - exact(alpha + width * y, time);
            d * d
        })?;
        l2_fixed.push(sq.max(T::zero()).sqrt());
        let worst = space
            .dof_positions()
            .iter()
            .zip(v)
            .fold(T::zero(), |m, (&y, &c)| {
                m.max((exact(alpha + width * y, time) - c).abs())
            });
        max_nodal.push(worst);
    }
    let scale = width.sqrt();
    Ok(ErrorMeasurement {
        time,
        l2_moving: l2_fixed.iter().map(|&e| e * scale).collect(),
        l2_fixed,
        max_nodal,
    })
}

/// Observer that measures errors at selected steps.
pub struct ErrorObserver<'a, T> {
    space: &'a FESpace<T>,
    problem: &'a ProblemSpec<T>,
    steps: Vec<usize>,
    pub measurements: Vec<ErrorMeasurement<T>>,
}

impl<'a, T: Real> ErrorObserver<'a, T> {
    /// Measures at the given step indices.
    pub fn at_steps(
        space: &'a FESpace<T>,
        problem: &'a ProblemSpec<T>,
        mut steps: Vec<usize>,
    ) -> Self {
        steps.sort_unstable();
        steps.dedup();
        Self {
            space,
            problem,
            steps,
            measurements: Vec::new(),
        }
    }

    /// Measures at the levels nearest to each requested time.
    pub fn at_times(stepper: &Stepper<'a, T>, times: &[T]) -> Self {
        let steps = times.iter().map(|&t| nearest_step(stepper, t)).collect();
        Self::at_steps(stepper.space(), stepper.problem(), steps)
    }
}

/// Index of the time level closest to `t`.
pub fn nearest_step<T: Real>(stepper: &Stepper<'_, T>, t: T) -> usize {
    let n = stepper.num_steps();
    let guess = (t / stepper.delta()).round().to_usize().unwrap_or(0).min(n);
    let lo = guess.saturating_sub(1);
    let hi = (guess + 1).min(n);
    (lo..=hi)
        .min_by(|&a, &b| {
            let da = (stepper.time_at(a) - t).abs();
            let db = (stepper.time_at(b) - t).abs();
            da.partial_cmp(&db).unwrap_or(std::cmp::Ordering::Equal)
        })
        .unwrap_or(guess)
}

impl<T: Real> Observer<T> for ErrorObserver<'_, T> {
    fn observe(&mut self, step: usize, time: T, coeffs: &[Vec<T>]) -> Result<()> {
        if self.steps.binary_search(&step).is_ok() {
            self.measurements
                .push(measure(self.space, self.problem, time, coeffs)?);
        }
        Ok(())
    }
}

/// Runs a problem and measures the errors at the final time.
pub fn solve_and_measure<T: Real>(
    problem: &ProblemSpec<T>,
    space: &FESpace<T>,
    delta: T,
) -> Result<ErrorReport<T>> {
    let start = Instant::now();
    let stepper = Stepper::new(problem, space, delta)?;
    let out = stepper.run(&mut [])?;
    let m = measure(
        space,
        problem,
        out.final_state.time,
        &out.final_state.current,
    )?;
    Ok(ErrorReport {
        measurements: vec![m],
        runtime_seconds: start.elapsed().as_secs_f64(),
    })
}

/// Least-squares line through `(log abscissa, log error)`.
#[derive(Debug, Clone, PartialEq)]
pub struct RateFit<T> {
    pub abscissae: Vec<T>,
    pub errors: Vec<T>,
    pub slope: T,
    pub intercept: T,
    pub r_squared: T,
}

impl<T: Real> RateFit<T> {
    pub fn reliable(&self) -> bool {
        self.r_squared.to_f64_lossy() >= RELIABLE_R_SQUARED
    }

    /// Slope between the two finest points, used to spot an error plateau.
    pub fn finest_local_slope(&self) -> T {
        let mut pts: Vec<(T, T)> = self
            .abscissae
            .iter()
            .copied()
            .zip(self.errors.iter().copied())
            .collect();
        pts.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap_or(std::cmp::Ordering::Equal));
        let (a, b) = (pts[0], pts[1]);
        (b.1.ln() - a.1.ln()) / (b.0.ln() - a.0.ln())
    }

    /// True when the finest refinement gains less than half the fitted rate.
    pub fn plateau(&self) -> bool {
        self.finest_local_slope() < self.slope * T::lit(0.5)
    }
}

pub fn fit_slope<T: Real>(points: &[(T, T)]) -> Result<RateFit<T>> {
    if points.len() < 3 {
        return Err(Error::TooFewPoints {
            needed: 3,
            got: points.len(),
        });
    }
    for &(x, e) in points {
        if !(x > T::zero() && e > T::zero()) || !x.is_finite() || !e.is_finite() {
            return Err(Error::NonPositive {
                abscissa: x.to_f64_lossy(),
                value: e.to_f64_lossy(),
            });
        }
    }
    let n = T::from_count(points.len());
    let logs: Vec<(T, T)> = points.iter().map(|&(x, e)| (x.ln(), e.ln())).collect();
    let mx = logs.iter().fold(T::zero(), |a, p| a + p.0) / n;
    let my = logs.iter().fold(T::zero(), |a, p| a + p.1) / n;
    let sxx = logs
        .iter()
        .fold(T::zero(), |a, p| a + (p.0 - mx) * (p.0 - mx));
    let sxy = logs
        .iter()
        .fold(T::zero(), |a, p| a + (p.0 - mx) * (p.1 - my));
    let syy = logs
        .iter()
        .fold(T::zero(), |a, p| a + (p.1 - my) * (p.1 - my));
    if !(sxx > T::zero()) {
        return Err(Error::invalid("points", "abscissae must not all coincide"));
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let r_squared = if syy > T::zero() {
        (sxy * sxy / (sxx * syy)).min(T::one()).max(T::zero())
    } else {
        T::one()
    };
    Ok(RateFit {
        abscissae: points.iter().map(|p| p.0).collect(),
        errors: points.iter().map(|p| p.1).collect(),
        slope,
        intercept,
        r_squared,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Axis {
    Space,
    Time,
}

impl Axis {
    pub fn as_str(self) -> &'static str {
        match self {
            Axis::Space => "space",
            Axis::Time => "time",
        }
    }
}

/// Refinement levels of a study. Each axis varies one parameter and fixes the other.
#[derive(Debug, Clone, PartialEq)]
pub struct StudyPlan<T> {
    pub degrees: Vec<usize>,
    /// Element counts for the spatial axis, run with `space_delta`.
    pub space_elements: Vec<usize>,
    pub space_delta: T,
    /// Time steps for the temporal axis, run on `time_elements` elements.
    pub time_deltas: Vec<T>,
    pub time_elements: usize,
    pub axes: Vec<Axis>,
}

/// One run of a study. Failed runs carry the error message.
#[derive(Debug, Clone, PartialEq)]
pub struct StudyRun<T> {
    pub axis: Axis,
    pub degree: usize,
    pub elements: usize,
    pub h: T,
    pub delta: T,
    pub outcome: std::result::Result<ErrorMeasurement<T>, String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct StudyFit<T> {
    pub axis: Axis,
    pub degree: usize,
    pub equation: usize,
    pub fit: std::result::Result<RateFit<T>, String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct StudyResult<T> {
    pub runs: Vec<StudyRun<T>>,
    pub fits: Vec<StudyFit<T>>,
}

impl<T: Real> StudyResult<T> {
    pub fn all_runs_succeeded(&self) -> bool {
        self.runs.iter().all(|r| r.outcome.is_ok())
    }

    pub fn fit(&self, axis: Axis, degree: usize, equation: usize) -> Option<&StudyFit<T>> {
        self.fits
            .iter()
            .find(|f| f.axis == axis && f.degree == degree && f.equation == equation)
    }
}

/// Runs every refinement level of `plan` and fits one rate per
/// `(axis, degree, equation)`, using up to `jobs` threads. Results are ordered
/// by parameters, not completion. Failed runs are recorded and excluded from
/// the fits.
pub fn convergence_study<T: Real>(
    problem: &ProblemSpec<T>,
    plan: &StudyPlan<T>,
    jobs: usize,
) -> Result<StudyResult<T>> {
    if !problem.has_exact() {
        return Err(Error::MissingExact);
    }
    let mut cases = Vec::new();
    for &axis in &plan.axes {
        for &k in &plan.degrees {
            match axis {
                Axis::Space => {
                    if plan.space_elements.len() < 3 {
                        return Err(Error::TooFewPoints {
                            needed: 3,
                            got: plan.space_elements.len(),
                        });
                    }
                    for &nt in &plan.space_elements {
                        cases.push((axis, k, nt, plan.space_delta));
                    }
                }
                Axis::Time => {
                    if plan.time_deltas.len() < 3 {
                        return Err(Error::TooFewPoints {
                            needed: 3,
                            got: plan.time_deltas.len(),
                        });
                    }
                    for &d in &plan.time_deltas {
                        cases.push((axis, k, plan.time_elements, d));
                    }
                }
            }
        }
    }
    let run_case = |&(axis, k, nt, delta): &(Axis, usize, usize, T)| -> StudyRun<T> {
        let outcome = FESpace::uniform_default(nt, k)
            .and_then(|space| solve_and_measure(problem, &space, delta))
            .map(|mut r| r.measurements.remove(0))
            .map_err(|e| e.to_string());
        StudyRun {
            axis,
            degree: k,
            elements: nt,
            h: T::from_count(nt).recip(),
            delta,
            outcome,
        }
    };
    let runs: Vec<StudyRun<T>> = if jobs > 1 {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(jobs)
            .build()
            .map_err(|e| Error::invalid("jobs", e.to_string()))?;
        pool.install(|| cases.par_iter().map(run_case).collect())
    } else {
        cases.iter().map(run_case).collect()
    };

    let mut fits = Vec::new();
    for &axis in &plan.axes {
        for &k in &plan.degrees {
            for eq in 0..problem.ne() {
                let points: Vec<(T, T)> = runs
                    .iter()
                    .filter(|r| r.axis == axis && r.degree == k)
                    .filter_map(|r| {
                        let m = r.outcome.as_ref().ok()?;
                        let x = match axis {
                            Axis::Space => r.h,
                            Axis::Time => r.delta,
                        };
                        Some((x, m.l2_moving[eq]))
                    })
                    .collect();
                let fit = fit_slope(&points).map_err(|e| e.to_string());
                if let Ok(f) = &fit {
                    if !f.reliable() || f.plateau() {
                        log::warn!(
                            "{} axis, k = {k}, equation {}: fit may be contaminated (r^2 = {}, finest local slope {})",
                            axis.as_str(),
                            eq + 1,
                            f.r_squared,
                            f.finest_local_slope()
                        );
                    }
                }
                fits.push(StudyFit {
                    axis,
                    degree: k,
                    equation: eq,
                    fit,
                });
            }
        }
    }
    Ok(StudyResult { runs, fits })
}
