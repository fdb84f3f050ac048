//! Command implementations behind the `nonlocal-fem` binary.
//!
//! Output files are plain CSV with LF line endings. Reals are written with 17
//! significant digits, so every `f64` round-trips.

mod config;

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

pub use config::{parse_config, ProblemSource, RunConfig, StudyAxes};

use crate::analysis::{self, convergence_study, measure, ErrorMeasurement, StudyResult};
use crate::error::Result;
use crate::problems::{validate, ProblemSpec, ValidationOptions, ValidationReport};
use crate::space::FESpace;
use crate::stepper::Stepper;

pub const SNAPSHOTS_FILE: &str = "snapshots.csv";
pub const ERRORS_FILE: &str = "errors.csv";
pub const STUDY_FILE: &str = "study.csv";
pub const RATES_FILE: &str = "rates.csv";

/// 17 significant digits.
pub fn format_real(x: f64) -> String {
    format!("{x:.16e}")
}

/// One stored time level.
#[derive(Debug, Clone, PartialEq)]
pub struct Snapshot {
    pub step: usize,
    pub time: f64,
    pub coeffs: Vec<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolveOutput {
    pub num_steps: usize,
    pub snapshots: Vec<Snapshot>,
    pub errors: Vec<ErrorMeasurement<f64>>,
    pub files: Vec<PathBuf>,
}

/// Solves the configured problem and writes `snapshots.csv` and, when exact
/// solutions are known, `errors.csv` into `out_dir`.
///
/// Snapshots are taken at the time levels nearest to the requested times, or
/// at the final level when none are requested. Errors are measured at the
/// same levels and at the final level.
pub fn cmd_solve(config: &RunConfig, out_dir: &Path) -> Result<SolveOutput> {
    let problem = config.load_problem()?;
    let space = FESpace::uniform(config.nt, config.k, config.q)?;
    let stepper = Stepper::new(&problem, &space, config.delta)?;

    let last = stepper.num_steps();
    let mut snap_steps: Vec<usize> = config
        .snapshots
        .iter()
        .map(|&t| analysis::nearest_step(&stepper, t))
        .collect();
    if snap_steps.is_empty() {
        snap_steps.push(last);
    }
    snap_steps.sort_unstable();
    snap_steps.dedup();
    let mut error_steps = snap_steps.clone();
    if error_steps.last() != Some(&last) {
        error_steps.push(last);
    }

    let mut levels = Vec::new();
    let mut observer = |step: usize, time: f64, coeffs: &[Vec<f64>]| {
        if error_steps.binary_search(&step).is_ok() {
            levels.push(Snapshot {
                step,
                time,
                coeffs: coeffs.to_vec(),
            });
        }
    };
    stepper.run(&mut [&mut observer])?;

    let exact = problem.has_exact();
    let errors = if exact {
        levels
            .iter()
            .map(|l| measure(&space, &problem, l.time, &l.coeffs))
            .collect::<Result<Vec<_>>>()?
    } else {
        Vec::new()
    };
    let snapshots: Vec<Snapshot> = levels
        .into_iter()
        .filter(|l| snap_steps.binary_search(&l.step).is_ok())
        .collect();

    fs::create_dir_all(out_dir)?;
    let mut files = Vec::new();
    let path = out_dir.join(SNAPSHOTS_FILE);
    fs::write(
        &path,
        snapshots_csv(&problem, &space, &snapshots, config.moving)?,
    )?;
    files.push(path);
    if exact {
        let path = out_dir.join(ERRORS_FILE);
        fs::write(&path, errors_csv(&errors))?;
        files.push(path);
    }
    Ok(SolveOutput {
        num_steps: last,
        snapshots,
        errors,
        files,
    })
}

/// `time,equation,y,x,value`, or `time,equation,y,value` without the moving
/// coordinate. Equations are numbered from 1.
pub fn snapshots_csv(
    problem: &ProblemSpec<f64>,
    space: &FESpace<f64>,
    snapshots: &[Snapshot],
    moving: bool,
) -> Result<String> {
    let mut s = String::from(if moving {
        "time,equation,y,x,value\n"
    } else {
        "time,equation,y,value\n"
    });
    for snap in snapshots {
        let t = format_real(snap.time);
        for (i, coeffs) in snap.coeffs.iter().enumerate() {
            for (&y, &v) in space.dof_positions().iter().zip(coeffs) {
                if moving {
                    let x = problem.motion().to_moving(y, snap.time)?;
                    let _ = writeln!(
                        s,
                        "{t},{},{},{},{}",
                        i + 1,
                        format_real(y),
                        format_real(x),
                        format_real(v)
                    );
                } else {
                    let _ = writeln!(s, "{t},{},{},{}", i + 1, format_real(y), format_real(v));
                }
            }
        }
    }
    Ok(s)
}

/// `time,equation,l2_error,max_nodal_error`; the `L2` error is over the moving
/// interval.
pub fn errors_csv(errors: &[ErrorMeasurement<f64>]) -> String {
    let mut s = String::from("time,equation,l2_error,max_nodal_error\n");
    for m in errors {
        for i in 0..m.l2_moving.len() {
            let _ = writeln!(
                s,
                "{},{},{},{}",
                format_real(m.time),
                i + 1,
                format_real(m.l2_moving[i]),
                format_real(m.max_nodal[i])
            );
        }
    }
    s
}

/// `axis,k,h,delta,equation,l2_error,max_nodal_error`; a failed run has
/// `failed` in both error columns.
pub fn study_csv(result: &StudyResult<f64>, equations: usize) -> String {
    let mut s = String::from("axis,k,h,delta,equation,l2_error,max_nodal_error\n");
    for run in &result.runs {
        for i in 0..equations {
            let (l2, nodal) = match &run.outcome {
                Ok(m) => (format_real(m.l2_moving[i]), format_real(m.max_nodal[i])),
                Err(_) => ("failed".to_string(), "failed".to_string()),
            };
            let _ = writeln!(
                s,
                "{},{},{},{},{},{l2},{nodal}",
                run.axis.as_str(),
                run.degree,
                format_real(run.h),
                format_real(run.delta),
                i + 1
            );
        }
    }
    s
}

/// `axis,k,equation,slope,intercept,r_squared,reliable,plateau`.
pub fn rates_csv(result: &StudyResult<f64>) -> String {
    let mut s = String::from("axis,k,equation,slope,intercept,r_squared,reliable,plateau\n");
    for f in &result.fits {
        let cols = match &f.fit {
            Ok(r) => format!(
                "{},{},{},{},{}",
                format_real(r.slope),
                format_real(r.intercept),
                format_real(r.r_squared),
                r.reliable(),
                r.plateau()
            ),
            Err(_) => "failed,failed,failed,false,false".to_string(),
        };
        let _ = writeln!(
            s,
            "{},{},{},{cols}",
            f.axis.as_str(),
            f.degree,
            f.equation + 1
        );
    }
    s
}

/// One line per fit, as printed by the `study` subcommand.
pub fn format_rates(result: &StudyResult<f64>) -> String {
    let mut s = String::new();
    for f in &result.fits {
        let _ = match &f.fit {
            Ok(r) => writeln!(
                s,
                "{:<5} k={} equation {}: slope {:.4} (r^2 = {:.5}{}{})",
                f.axis.as_str(),
                f.degree,
                f.equation + 1,
                r.slope,
                r.r_squared,
                if r.reliable() { "" } else { ", unreliable" },
                if r.plateau() { ", plateau" } else { "" },
            ),
            Err(e) => writeln!(
                s,
                "{:<5} k={} equation {}: no fit ({e})",
                f.axis.as_str(),
                f.degree,
                f.equation + 1
            ),
        };
    }
    s
}

/// Runs the configured convergence study on `jobs` threads and writes
/// `study.csv` and `rates.csv` into `out_dir`.
pub fn cmd_study(config: &RunConfig, out_dir: &Path, jobs: usize) -> Result<StudyResult<f64>> {
    let problem = config.load_problem()?;
    let result = convergence_study(&problem, &config.study_plan(), jobs.max(1))?;
    fs::create_dir_all(out_dir)?;
    fs::write(out_dir.join(STUDY_FILE), study_csv(&result, problem.ne()))?;
    fs::write(out_dir.join(RATES_FILE), rates_csv(&result))?;
    Ok(result)
}

/// Runs the hypothesis checks on the configured problem.
pub fn cmd_validate(config: &RunConfig, seed: u64) -> Result<ValidationReport> {
    let problem = config.load_problem()?;
    let options = ValidationOptions {
        seed,
        ..ValidationOptions::default()
    };
    Ok(validate(&problem, &options))
}
