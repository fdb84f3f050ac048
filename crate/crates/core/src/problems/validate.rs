//! Sampled checks of the standing hypotheses on a problem description.

use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::geometry::ExpansionPolicy;
use crate::problems::spec::ProblemSpec;
use crate::scalar::Real;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Status {
    Pass,
    Warn,
    Fail,
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Status::Pass => "pass",
            Status::Warn => "warn",
            Status::Fail => "fail",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: String,
    pub status: Status,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ValidationReport {
    pub checks: Vec<Check>,
}

impl ValidationReport {
    pub fn worst(&self) -> Status {
        self.checks
            .iter()
            .map(|c| c.status)
            .max()
            .unwrap_or(Status::Pass)
    }

    pub fn passed(&self) -> bool {
        self.worst() != Status::Fail
    }

    pub fn find(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.checks {
            writeln!(f, "{:<4} {:<28} {}", c.status, c.name, c.detail)?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy)]
pub struct ValidationOptions {
    /// Time grid points on `[0, T]`; midpoints are sampled as well.
    pub time_samples: usize,
    /// Nonlocal arguments are sampled on `[-range, range]^ne`.
    pub nonlocal_range: f64,
    pub nonlocal_samples: usize,
    /// Seeds the random points used for initial/exact agreement.
    pub seed: u64,
}

impl Default for ValidationOptions {
    fn default() -> Self {
        Self {
            time_samples: 101,
            nonlocal_range: 4.0,
            nonlocal_samples: 21,
            seed: 0,
        }
    }
}

const BOUNDARY_TOL: f64 = 1e-10;
const EXACT_DIRICHLET_TOL: f64 = 1e-9;
// cap on the number of diffusion-law evaluations per equation
const MAX_GRID: usize = 200_000;

fn check(name: impl Into<String>, status: Status, detail: impl Into<String>) -> Check {
    Check {
        name: name.into(),
        status,
        detail: detail.into(),
    }
}

/// Samples the width bound, the expansion signs, the diffusion bounds and
/// the compatibility of initial and exact data. Never fails; every finding
/// is reported as a [`Check`].
pub fn validate<T: Real>(
    problem: &ProblemSpec<T>,
    options: &ValidationOptions,
) -> ValidationReport {
    let mut checks = Vec::new();
    let motion = problem.motion();
    let final_time = problem.final_time();
    let n = options.time_samples.max(2);
    let times: Vec<T> = (0..2 * n - 1)
        .map(|m| final_time * T::from_count(m) / T::from_count(2 * n - 2))
        .collect();

    // width bounded away from zero
    let widths: Result<Vec<T>, _> = times.iter().map(|&t| motion.gamma(t)).collect();
    checks.push(match widths {
        Ok(w) => {
            let lo = w.iter().copied().fold(T::infinity(), T::min);
            let hi = w.iter().copied().fold(T::neg_infinity(), T::max);
            if lo.is_finite() && hi.is_finite() {
                check(
                    "width bound",
                    Status::Pass,
                    format!("gamma in [{lo:.6e}, {hi:.6e}]"),
                )
            } else {
                check("width bound", Status::Fail, "non-finite width")
            }
        }
        Err(e) => check("width bound", Status::Fail, e.to_string()),
    });

    // monotone expansion
    let mut first_violation = None;
    for &t in &times {
        match motion.expansion_violation(t) {
            Ok(Some(detail)) => {
                first_violation = Some(format!("t = {t}: {detail}"));
                break;
            }
            Ok(None) => {}
            Err(e) => {
                first_violation = Some(e.to_string());
                break;
            }
        }
    }
    checks.push(match first_violation {
        None => check(
            "expansion",
            Status::Pass,
            "alpha' < 0 and beta' > 0 at all samples",
        ),
        Some(d) if motion.policy() == ExpansionPolicy::Warn => check("expansion", Status::Warn, d),
        Some(d) => check("expansion", Status::Fail, d),
    });

    // bounded diffusion on a grid of nonlocal arguments
    let ne = problem.ne();
    let per_axis = {
        let mut s = options.nonlocal_samples.max(2);
        while s > 2
            && s.checked_pow(ne as u32)
                .is_none_or(|total| total > MAX_GRID)
        {
            s -= 1;
        }
        s
    };
    let range = T::lit(options.nonlocal_range);
    let axis: Vec<T> = (0..per_axis)
        .map(|m| -range + T::lit(2.0) * range * T::from_count(m) / T::from_count(per_axis - 1))
        .collect();
    for (i, eq) in problem.equations().iter().enumerate() {
        let (lo, hi) = eq.diffusion.bounds();
        let mut index = vec![0usize; ne];
        let mut args = vec![T::zero(); ne];
        let mut seen = (T::infinity(), T::neg_infinity());
        let mut violation = None;
        'grid: loop {
            for (a, &ix) in args.iter_mut().zip(&index) {
                *a = axis[ix];
            }
            let v = eq.diffusion.eval(&args);
            if !v.is_finite() || v < lo || v > hi {
                violation = Some(format!(
                    "a_{}({:?}) = {v} outside [{lo}, {hi}]",
                    i + 1,
                    args.iter().map(|a| a.to_f64_lossy()).collect::<Vec<_>>()
                ));
                break 'grid;
            }
            seen = (seen.0.min(v), seen.1.max(v));
            let mut d = 0;
            loop {
                if d == ne {
                    break 'grid;
                }
                index[d] += 1;
                if index[d] < per_axis {
                    break;
                }
                index[d] = 0;
                d += 1;
            }
        }
        let name = format!("diffusion bounds a_{}", i + 1);
        checks.push(match violation {
            Some(d) => check(name, Status::Fail, d),
            None => check(
                name,
                Status::Pass,
                format!(
                    "sampled range [{:.6e}, {:.6e}] within [{lo}, {hi}]",
                    seen.0, seen.1
                ),
            ),
        });
    }

    // compatibility of the initial data with the Dirichlet conditions
    let (left, right) = match (motion.alpha(T::zero()), motion.beta(T::zero())) {
        (Ok(l), Ok(r)) => (l, r),
        _ => (T::nan(), T::nan()),
    };
    for (i, eq) in problem.equations().iter().enumerate() {
        let worst = (eq.initial)(left).abs().max((eq.initial)(right).abs());
        let name = format!("initial BC u_{}(., 0)", i + 1);
        checks.push(if worst.to_f64_lossy() <= BOUNDARY_TOL {
            check(
                name,
                Status::Pass,
                format!("max |u0| at ends = {worst:.3e}"),
            )
        } else {
            check(
                name,
                Status::Fail,
                format!("max |u0| at ends = {worst:.3e}"),
            )
        });
    }

    if problem.has_exact() {
        let mut rng = ChaCha8Rng::seed_from_u64(options.seed);
        for (i, eq) in problem.equations().iter().enumerate() {
            let exact = eq.exact.as_ref().expect("checked has_exact");
            let mut worst = T::zero();
            for _ in 0..100 {
                let x = left + (right - left) * T::lit(rng.gen::<f64>());
                worst = worst.max((exact(x, T::zero()) - (eq.initial)(x)).abs());
            }
            let name = format!("exact vs initial u_{}", i + 1);
            let status = if worst.to_f64_lossy() <= BOUNDARY_TOL {
                Status::Pass
            } else {
                Status::Fail
            };
            checks.push(check(name, status, format!("max difference {worst:.3e}")));

            let mut worst = T::zero();
            for &t in &times {
                if let (Ok(a), Ok(b)) = (motion.alpha(t), motion.beta(t)) {
                    worst = worst.max(exact(a, t).abs()).max(exact(b, t).abs());
                }
            }
            let name = format!("exact BC u_{}", i + 1);
            let status = if worst.to_f64_lossy() <= EXACT_DIRICHLET_TOL {
                Status::Pass
            } else {
                Status::Fail
            };
            checks.push(check(
                name,
                status,
                format!("max |u| on moving ends {worst:.3e}"),
            ));
        }
    }

    ValidationReport { checks }
}
