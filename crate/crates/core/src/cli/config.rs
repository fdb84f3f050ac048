//! Run configuration: whitespace-separated `key=value` tokens, one or more per
//! line, `#` starts a comment.
//!
//! ```text
//! problem=example1 nt=100 k=2 delta=0.01
//! snapshot=0 snapshot=1.5 snapshot=3
//! moving=true
//! # convergence study
//! axis=space study_k=2 study_k=3
//! study_nt=4 study_nt=8 study_nt=16 study_nt=32
//! axis=time study_delta=1/20 study_delta=1/40 study_delta=1/80
//! ```
//!
//! | key           | meaning                                          | default  |
//! |---------------|--------------------------------------------------|----------|
//! | `problem`     | `example1`, `example1-slow`, `example2` or path  | required |
//! | `nt`          | number of elements                               | required |
//! | `k`           | polynomial degree                                | required |
//! | `delta`       | time step                                        | required |
//! | `q`           | Gauss points per element                         | `k + 2`  |
//! | `T`           | final time override (alias `final_time`)         | problem  |
//! | `snapshot`    | output time, repeatable                          | none     |
//! | `out`         | output directory                                 | `.`      |
//! | `moving`      | emit the moving coordinate `x` in snapshots      | `true`   |
//! | `axis`        | `space` or `time`, repeatable                    | none     |
//! | `study_k`     | degree of a study, repeatable                    | `k`      |
//! | `study_nt`    | element counts of the spatial axis, repeatable   | none     |
//! | `study_delta` | time steps of the temporal axis, repeatable      | none     |
//!
//! Real values accept a fraction `a/b`. The spatial axis runs at `delta`, the
//! temporal axis at `nt` elements.

use std::path::{Path, PathBuf};

use crate::analysis::{Axis, StudyPlan};
use crate::error::{Error, Result};
use crate::problems::{self, catalog, ProblemSpec};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ProblemSource {
    Example1,
    Example1Slow,
    Example2,
    File(PathBuf),
}

impl ProblemSource {
    fn parse(value: &str) -> Self {
        match value {
            "example1" => Self::Example1,
            "example1-slow" => Self::Example1Slow,
            "example2" => Self::Example2,
            path => Self::File(PathBuf::from(path)),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct StudyAxes {
    pub axes: Vec<Axis>,
    pub degrees: Vec<usize>,
    pub elements: Vec<usize>,
    pub deltas: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub problem: ProblemSource,
    pub nt: usize,
    pub k: usize,
    pub q: usize,
    pub delta: f64,
    pub final_time: Option<f64>,
    pub snapshots: Vec<f64>,
    pub out: Option<PathBuf>,
    pub moving: bool,
    pub study: StudyAxes,
}

fn config_err(field: &str, message: impl Into<String>) -> Error {
    Error::Config {
        field: field.to_string(),
        message: message.into(),
    }
}

fn parse_err(line: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        line,
        message: message.into(),
    }
}

fn parse_real(line: usize, key: &str, value: &str) -> Result<f64> {
    let parsed = match value.split_once('/') {
        Some((a, b)) => a
            .trim()
            .parse::<f64>()
            .ok()
            .zip(b.trim().parse::<f64>().ok())
            .map(|(a, b)| a / b),
        None => value.parse::<f64>().ok(),
    };
    parsed.ok_or_else(|| parse_err(line, format!("`{key}`: `{value}` is not a number")))
}

fn parse_count(line: usize, key: &str, value: &str) -> Result<usize> {
    value.parse::<usize>().map_err(|_| {
        parse_err(
            line,
            format!("`{key}`: `{value}` is not a non-negative integer"),
        )
    })
}

fn parse_bool(line: usize, key: &str, value: &str) -> Result<bool> {
    match value {
        "true" | "yes" | "1" => Ok(true),
        "false" | "no" | "0" => Ok(false),
        _ => Err(parse_err(
            line,
            format!("`{key}`: `{value}` is not a boolean"),
        )),
    }
}

/// Parses and validates a run configuration. Checks against the problem's
/// final time happen in [`RunConfig::load_problem`].
pub fn parse_config(text: &str) -> Result<RunConfig> {
    let mut problem = None;
    let (mut nt, mut k, mut q, mut delta) = (None, None, None, None);
    let mut final_time = None;
    let mut snapshots = Vec::new();
    let mut out = None;
    let mut moving = true;
    let mut study = StudyAxes::default();

    for (n, raw) in text.lines().enumerate() {
        let line = n + 1;
        let content = raw.split('#').next().unwrap_or("");
        for token in content.split_whitespace() {
            let (key, value) = token
                .split_once('=')
                .ok_or_else(|| parse_err(line, format!("expected `key=value`, got `{token}`")))?;
            if value.is_empty() {
                return Err(parse_err(line, format!("`{key}` has no value")));
            }
            match key {
                "problem" => problem = Some(ProblemSource::parse(value)),
                "nt" => nt = Some(parse_count(line, key, value)?),
                "k" => k = Some(parse_count(line, key, value)?),
                "q" => q = Some(parse_count(line, key, value)?),
                "delta" => delta = Some(parse_real(line, key, value)?),
                "T" | "final_time" => final_time = Some(parse_real(line, key, value)?),
                "snapshot" => snapshots.push(parse_real(line, key, value)?),
                "out" => out = Some(PathBuf::from(value)),
                "moving" => moving = parse_bool(line, key, value)?,
                "axis" => study.axes.push(match value {
                    "space" => Axis::Space,
                    "time" => Axis::Time,
                    _ => return Err(parse_err(line, format!("unknown axis `{value}`"))),
                }),
                "study_k" => study.degrees.push(parse_count(line, key, value)?),
                "study_nt" => study.elements.push(parse_count(line, key, value)?),
                "study_delta" => study.deltas.push(parse_real(line, key, value)?),
                _ => return Err(parse_err(line, format!("unknown key `{key}`"))),
            }
        }
    }

    let problem = problem.ok_or_else(|| config_err("problem", "missing"))?;
    let nt = nt.ok_or_else(|| config_err("nt", "missing"))?;
    let k = k.ok_or_else(|| config_err("k", "missing"))?;
    let delta = delta.ok_or_else(|| config_err("delta", "missing"))?;
    if nt < 1 {
        return Err(config_err("nt", "must be at least 1"));
    }
    if k < 1 {
        return Err(config_err("k", "must be at least 1"));
    }
    if !(delta > 0.0 && delta.is_finite()) {
        return Err(config_err(
            "delta",
            format!("must be positive, got {delta}"),
        ));
    }
    let q = q.unwrap_or(k + 2);
    if q < 1 {
        return Err(config_err("q", "must be at least 1"));
    }
    if let Some(t) = final_time {
        if !(t > 0.0 && t.is_finite()) {
            return Err(config_err("T", format!("must be positive, got {t}")));
        }
    }
    for &s in &snapshots {
        if !(s >= 0.0 && s.is_finite()) || final_time.is_some_and(|t| s > t) {
            return Err(config_err("snapshot", format!("{s} is outside [0, T]")));
        }
    }
    if study.degrees.iter().any(|&d| d < 1) {
        return Err(config_err("study_k", "degrees must be at least 1"));
    }
    if study.elements.iter().any(|&e| e < 1) {
        return Err(config_err("study_nt", "element counts must be at least 1"));
    }
    if study.deltas.iter().any(|&d| !(d > 0.0 && d.is_finite())) {
        return Err(config_err("study_delta", "time steps must be positive"));
    }
    study.axes.dedup();

    Ok(RunConfig {
        problem,
        nt,
        k,
        q,
        delta,
        final_time,
        snapshots,
        out,
        moving,
        study,
    })
}

impl RunConfig {
    /// Reads and parses a configuration file; relative paths inside it are
    /// taken relative to the file's directory.
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        let mut config = parse_config(&text)?;
        if let Some(base) = path.parent() {
            config.rebase(base);
        }
        Ok(config)
    }

    /// Resolves relative problem and output paths against `base`.
    pub fn rebase(&mut self, base: &Path) {
        if let ProblemSource::File(p) = &mut self.problem {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        }
        if let Some(o) = &mut self.out {
            if o.is_relative() {
                *o = base.join(&*o);
            }
        }
    }

    /// Builds the problem, applies the final-time override and checks the
    /// snapshot times against it.
    pub fn load_problem(&self) -> Result<ProblemSpec<f64>> {
        let mut problem = match &self.problem {
            ProblemSource::Example1 => problems::example1(),
            ProblemSource::Example1Slow => problems::example1_slow(),
            ProblemSource::Example2 => problems::example2(),
            ProblemSource::File(path) => {
                let text = std::fs::read_to_string(path)?;
                catalog::parse_problem(&text)?
            }
        };
        if let Some(t) = self.final_time {
            problem = problem.with_final_time(t)?;
        }
        let horizon = problem.final_time();
        for &s in &self.snapshots {
            if s > horizon {
                return Err(config_err(
                    "snapshot",
                    format!("{s} is outside [0, {horizon}]"),
                ));
            }
        }
        Ok(problem)
    }

    /// Study plan with `k`, `nt` and `delta` filling unset lists.
    pub fn study_plan(&self) -> StudyPlan<f64> {
        let degrees = if self.study.degrees.is_empty() {
            vec![self.k]
        } else {
            self.study.degrees.clone()
        };
        StudyPlan {
            degrees,
            space_elements: self.study.elements.clone(),
            space_delta: self.delta,
            time_deltas: self.study.deltas.clone(),
            time_elements: self.nt,
            axes: self.study.axes.clone(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_config() {
        let c = parse_config("problem=example1 nt=100 k=2 delta=0.01").unwrap();
        assert_eq!(c.problem, ProblemSource::Example1);
        assert_eq!((c.nt, c.k, c.q), (100, 2, 4));
        assert_eq!(c.delta, 0.01);
        assert!(c.snapshots.is_empty());
        assert!(c.moving);
        assert_eq!(c.final_time, None);
    }

    #[test]
    fn missing_nt_names_field() {
        match parse_config("problem=example1 k=2 delta=0.01") {
            Err(Error::Config { field, .. }) => assert_eq!(field, "nt"),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn zero_delta_rejected() {
        match parse_config("problem=example1 nt=4 k=2 delta=0") {
            Err(Error::Config { field, .. }) => assert_eq!(field, "delta"),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn parse_error_reports_line() {
        let text = "problem=example1\n# comment\nnt=4 k=two\n";
        match parse_config(text) {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 3),
            other => panic!("{other:?}"),
        }
        match parse_config("problem=example1\n\nbogus\n") {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 3),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn repeatable_keys_and_fractions() {
        let text = "problem=example2 nt=4 k=4 delta=1/1000 # settings\n\
                    snapshot=0 snapshot=0.5\nsnapshot=1\nmoving=false out=results\n\
                    axis=time study_delta=1/20 study_delta=1/40 study_delta=1/80 study_k=3";
        let c = parse_config(text).unwrap();
        assert_eq!(c.delta, 1e-3);
        assert_eq!(c.snapshots, vec![0.0, 0.5, 1.0]);
        assert!(!c.moving);
        assert_eq!(c.out, Some(PathBuf::from("results")));
        let plan = c.study_plan();
        assert_eq!(plan.axes, vec![Axis::Time]);
        assert_eq!(plan.degrees, vec![3]);
        assert_eq!(plan.time_deltas, vec![0.05, 0.025, 0.0125]);
        assert_eq!(plan.time_elements, 4);
    }

    #[test]
    fn snapshot_beyond_horizon() {
        let c = parse_config("problem=example2 nt=4 k=4 delta=0.001 snapshot=2").unwrap();
        match c.load_problem() {
            Err(Error::Config { field, .. }) => assert_eq!(field, "snapshot"),
            other => panic!("{other:?}"),
        }
        assert!(parse_config("problem=example2 nt=4 k=4 delta=0.001 T=0.5 snapshot=0.6").is_err());
        assert!(parse_config("problem=example2 nt=4 k=4 delta=0.001 snapshot=-1").is_err());
    }

    #[test]
    fn final_time_override() {
        let c = parse_config("problem=example1 nt=4 k=2 delta=0.01 T=0.5").unwrap();
        assert_eq!(c.load_problem().unwrap().final_time(), 0.5);
    }
}
