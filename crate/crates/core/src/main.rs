use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use log::{LevelFilter, Log, Metadata, Record};

use nonlocal_fem::cli::{self, RunConfig};

#[derive(Parser)]
#[command(
    name = "nonlocal-fem",
    version,
    about = "Galerkin solver for nonlocal reaction-diffusion systems on moving intervals"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Print progress and fit diagnostics to stderr.
    #[arg(short, long, global = true)]
    verbose: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Solve one configuration and write snapshots.csv (and errors.csv).
    Solve(Common),
    /// Run a convergence study and write study.csv and rates.csv.
    Study {
        #[command(flatten)]
        common: Common,
        /// Worker threads for independent runs.
        #[arg(long, default_value_t = 1)]
        jobs: usize,
    },
    /// Check the standing hypotheses of the configured problem.
    Validate {
        #[command(flatten)]
        common: Common,
        /// Seed for the sampled test points.
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

#[derive(Args)]
struct Common {
    /// Run configuration file.
    #[arg(long)]
    config: PathBuf,
    /// Output directory; overrides `out` in the configuration.
    #[arg(long)]
    out: Option<PathBuf>,
}

impl Common {
    fn load(&self) -> nonlocal_fem::Result<(RunConfig, PathBuf)> {
        let config = RunConfig::load(&self.config)?;
        let out = self
            .out
            .clone()
            .or_else(|| config.out.clone())
            .unwrap_or_else(|| PathBuf::from("."));
        Ok((config, out))
    }
}

struct StderrLogger;

static LOGGER: StderrLogger = StderrLogger;

impl Log for StderrLogger {
    fn enabled(&self, metadata: &Metadata) -> bool {
        metadata.level() <= log::max_level()
    }

    fn log(&self, record: &Record) {
        if self.enabled(record.metadata()) {
            eprintln!(
                "{}: {}",
                record.level().as_str().to_lowercase(),
                record.args()
            );
        }
    }

    fn flush(&self) {}
}

fn run(cli: Cli) -> nonlocal_fem::Result<bool> {
    match cli.command {
        Command::Solve(common) => {
            let (config, out) = common.load()?;
            let output = cli::cmd_solve(&config, &out)?;
            for m in &output.errors {
                for i in 0..m.l2_moving.len() {
                    println!(
                        "t = {:.6}  u{}: L2 error {:.4e}, max nodal error {:.4e}",
                        m.time,
                        i + 1,
                        m.l2_moving[i],
                        m.max_nodal[i]
                    );
                }
            }
            for f in &output.files {
                println!("wrote {}", f.display());
            }
            Ok(true)
        }
        Command::Study { common, jobs } => {
            let (config, out) = common.load()?;
            let result = cli::cmd_study(&config, &out, jobs)?;
            print!("{}", cli::format_rates(&result));
            for run in result.runs.iter().filter(|r| r.outcome.is_err()) {
                eprintln!(
                    "run failed: {} axis, k = {}, nt = {}, delta = {}: {}",
                    run.axis.as_str(),
                    run.degree,
                    run.elements,
                    run.delta,
                    run.outcome.as_ref().err().map(String::as_str).unwrap_or("")
                );
            }
            Ok(result.all_runs_succeeded() && result.fits.iter().all(|f| f.fit.is_ok()))
        }
        Command::Validate { common, seed } => {
            let (config, _) = common.load()?;
            let report = cli::cmd_validate(&config, seed)?;
            print!("{report}");
            Ok(report.passed())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let _ = log::set_logger(&LOGGER);
    log::set_max_level(if cli.verbose {
        LevelFilter::Info
    } else {
        LevelFilter::Warn
    });
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
