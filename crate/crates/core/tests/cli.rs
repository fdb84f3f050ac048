use std::fs;
use std::process::Command;

use nonlocal_fem::cli::{
    cmd_solve, cmd_study, cmd_validate, parse_config, ERRORS_FILE, RATES_FILE, SNAPSHOTS_FILE,
    STUDY_FILE,
};
use nonlocal_fem::problems::example1;
use nonlocal_fem::Error;

fn rows(text: &str) -> Vec<Vec<String>> {
    text.lines()
        .skip(1)
        .map(|l| l.split(',').map(String::from).collect())
        .collect()
}

#[test]
fn solve_writes_snapshots_matching_initial_data() {
    let dir = tempfile::tempdir().unwrap();
    let config =
        parse_config("problem=example1 nt=100 k=2 delta=0.01\nsnapshot=0 snapshot=1.5").unwrap();
    let out = cmd_solve(&config, dir.path()).unwrap();
    assert_eq!(out.num_steps, 300);

    let text = fs::read_to_string(dir.path().join(SNAPSHOTS_FILE)).unwrap();
    assert!(text.starts_with("time,equation,y,x,value\n"));
    assert!(!text.contains('\r'));
    let data = rows(&text);
    assert_eq!(data.len(), 2 * 2 * 201);
    let sys = example1::system::<f64>();
    for row in data.iter().filter(|r| r[0].parse::<f64>().unwrap() == 0.0) {
        let i: usize = row[1].parse().unwrap();
        let x: f64 = row[3].parse().unwrap();
        let v: f64 = row[4].parse().unwrap();
        assert!((sys.u(i - 1, x, 0.0).unwrap() - v).abs() < 1e-13);
    }
    let times: Vec<f64> = data.iter().map(|r| r[0].parse().unwrap()).collect();
    assert!(times.contains(&1.5));

    let errors = fs::read_to_string(dir.path().join(ERRORS_FILE)).unwrap();
    assert!(errors.starts_with("time,equation,l2_error,max_nodal_error\n"));
    // snapshot levels plus the final level, two equations each
    assert_eq!(rows(&errors).len(), 6);
}

#[test]
fn empty_snapshot_list_emits_final_state_only() {
    let dir = tempfile::tempdir().unwrap();
    let config = parse_config("problem=example1 nt=8 k=2 delta=0.05 T=0.5 moving=false").unwrap();
    let out = cmd_solve(&config, dir.path()).unwrap();
    assert_eq!(out.snapshots.len(), 1);
    assert_eq!(out.snapshots[0].time, 0.5);
    let text = fs::read_to_string(dir.path().join(SNAPSHOTS_FILE)).unwrap();
    assert!(text.starts_with("time,equation,y,value\n"));
    assert!(rows(&text)
        .iter()
        .all(|r| r.len() == 4 && r[0] == "5.0000000000000000e-1"));
    assert_eq!(
        rows(&fs::read_to_string(dir.path().join(ERRORS_FILE)).unwrap()).len(),
        2
    );
}

#[test]
fn no_errors_file_without_exact_solution() {
    let dir = tempfile::tempdir().unwrap();
    let config = parse_config("problem=example2 nt=4 k=4 delta=0.01").unwrap();
    let out = cmd_solve(&config, dir.path()).unwrap();
    assert_eq!(out.files.len(), 1);
    assert!(!dir.path().join(ERRORS_FILE).exists());
}

#[test]
fn solve_output_is_deterministic() {
    let config =
        parse_config("problem=example1 nt=6 k=3 delta=0.02 T=1 snapshot=0.5 snapshot=1").unwrap();
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    cmd_solve(&config, a.path()).unwrap();
    cmd_solve(&config, b.path()).unwrap();
    for f in [SNAPSHOTS_FILE, ERRORS_FILE] {
        assert_eq!(
            fs::read(a.path().join(f)).unwrap(),
            fs::read(b.path().join(f)).unwrap()
        );
    }
}

#[test]
fn spatial_study_slope_near_three() {
    let dir = tempfile::tempdir().unwrap();
    let text = "problem=example1 nt=8 k=2 delta=1/1000 T=0.5\naxis=space study_nt=4 study_nt=8 study_nt=16";
    let result = cmd_study(&parse_config(text).unwrap(), dir.path(), 2).unwrap();
    let slope = result
        .fit(nonlocal_fem::analysis::Axis::Space, 2, 0)
        .unwrap()
        .fit
        .as_ref()
        .unwrap()
        .slope;
    assert!((slope - 3.0).abs() < 0.25, "{slope}");
    let study = fs::read_to_string(dir.path().join(STUDY_FILE)).unwrap();
    assert!(study.starts_with("axis,k,h,delta,equation,l2_error,max_nodal_error\n"));
    assert_eq!(rows(&study).len(), 6);
    let rates = fs::read_to_string(dir.path().join(RATES_FILE)).unwrap();
    let first = &rows(&rates)[0];
    assert_eq!(first[0], "space");
    assert!((first[3].parse::<f64>().unwrap() - slope).abs() < 1e-15);
}

#[test]
fn temporal_study_slope_near_two() {
    let dir = tempfile::tempdir().unwrap();
    let text = "problem=example1 nt=24 k=3 delta=0.01 T=1.5\n\
                axis=time study_delta=1/20 study_delta=1/40 study_delta=1/80";
    let result = cmd_study(&parse_config(text).unwrap(), dir.path(), 1).unwrap();
    for eq in 0..2 {
        let slope = result
            .fit(nonlocal_fem::analysis::Axis::Time, 3, eq)
            .unwrap()
            .fit
            .as_ref()
            .unwrap()
            .slope;
        assert!((slope - 2.0).abs() < 0.25, "equation {eq}: {slope}");
    }
}

#[test]
fn study_is_deterministic_across_thread_counts() {
    let text = "problem=example1 nt=8 k=1 delta=0.05 T=0.5\naxis=space study_nt=2 study_nt=4 study_nt=8 study_k=1 study_k=2";
    let config = parse_config(text).unwrap();
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    cmd_study(&config, a.path(), 1).unwrap();
    cmd_study(&config, b.path(), 3).unwrap();
    for f in [STUDY_FILE, RATES_FILE] {
        assert_eq!(
            fs::read(a.path().join(f)).unwrap(),
            fs::read(b.path().join(f)).unwrap()
        );
    }
}

#[test]
fn single_refinement_level_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let config =
        parse_config("problem=example1 nt=8 k=2 delta=0.01 axis=space study_nt=8").unwrap();
    assert!(matches!(
        cmd_study(&config, dir.path(), 1),
        Err(Error::TooFewPoints { .. })
    ));
}

#[test]
fn validate_reports_benchmarks_as_passing() {
    for name in ["example1", "example1-slow", "example2"] {
        let config = parse_config(&format!("problem={name} nt=4 k=2 delta=0.1")).unwrap();
        let report = cmd_validate(&config, 7).unwrap();
        assert!(report.passed(), "{name}:\n{report}");
    }
}

#[test]
fn user_problem_file_is_resolved_relative_to_config() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(
        dir.path().join("decay.problem"),
        "name = decay\nfinal_time = 0.5\nalpha = poly 0 -0.1\nbeta = poly 1 0.1\n\
         diffusion.1 = constant 1\nforcing.1 = 0 one one\ninitial.1 = poly 0 1 -1\n",
    )
    .unwrap();
    fs::write(
        dir.path().join("run.cfg"),
        "problem=decay.problem nt=8 k=2 delta=0.01 out=results\n",
    )
    .unwrap();
    let config = nonlocal_fem::cli::RunConfig::load(&dir.path().join("run.cfg")).unwrap();
    let out_dir = config.out.clone().unwrap();
    assert_eq!(out_dir, dir.path().join("results"));
    let out = cmd_solve(&config, &out_dir).unwrap();
    assert_eq!(out.snapshots[0].time, 0.5);
    assert!(out_dir.join(SNAPSHOTS_FILE).exists());
}

fn binary() -> Command {
    Command::new(env!("CARGO_BIN_EXE_nonlocal-fem"))
}

#[test]
fn binary_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.cfg");
    fs::write(
        &cfg,
        "problem=example1 nt=4 k=2 delta=0.05 T=0.2 snapshot=0.1\n",
    )
    .unwrap();
    let out = dir.path().join("out");

    let status = binary()
        .args(["solve", "--config"])
        .arg(&cfg)
        .arg("--out")
        .arg(&out)
        .status()
        .unwrap();
    assert!(status.success());
    assert!(out.join(SNAPSHOTS_FILE).exists());

    let validate = binary()
        .args(["validate", "--seed", "3", "--config"])
        .arg(&cfg)
        .output()
        .unwrap();
    assert!(validate.status.success());
    assert!(String::from_utf8_lossy(&validate.stdout).contains("width bound"));

    fs::write(&cfg, "problem=example1 nt=4 k=2 delta=0\n").unwrap();
    let bad = binary()
        .args(["solve", "--config"])
        .arg(&cfg)
        .output()
        .unwrap();
    assert!(!bad.status.success());
    assert!(String::from_utf8_lossy(&bad.stderr).contains("delta"));

    // a diffusion law leaving its declared bounds aborts the run
    fs::write(
        dir.path().join("bad.problem"),
        "alpha = poly 0 -0.1\nbeta = poly 1 0.1\ndiffusion.1 = constant 5\nbounds.1 = 1 2\n\
         forcing.1 = 0 one one\ninitial.1 = poly 0 1 -1\n",
    )
    .unwrap();
    fs::write(&cfg, "problem=bad.problem nt=4 k=2 delta=0.1\n").unwrap();
    let failed = binary()
        .args(["solve", "--config"])
        .arg(&cfg)
        .arg("--out")
        .arg(&out)
        .output()
        .unwrap();
    assert!(!failed.status.success());
}

#[test]
fn binary_study_prints_slopes() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("study.cfg");
    fs::write(&cfg, "problem=example1 nt=8 k=2 delta=0.01 T=0.3\naxis=space study_nt=4 study_nt=8 study_nt=16\n").unwrap();
    let out = binary()
        .args(["study", "--jobs", "2", "--config"])
        .arg(&cfg)
        .arg("--out")
        .arg(dir.path())
        .output()
        .unwrap();
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(stdout.contains("space k=2 equation 1: slope"), "{stdout}");
    assert!(dir.path().join(RATES_FILE).exists());
}
