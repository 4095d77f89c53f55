//! `conbandit` — seeded experiment runs, scaling sweeps, and oracle
//! validation for the constrained-bandit library.

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use conbandit_core::harness::{
    execute_run, execute_sweep, parse_experiment_config, parse_sweep_config, RunOptions,
};
use conbandit_core::validation::run_suites;
use conbandit_core::Error;

const EXIT_INVALID_CONFIG: u8 = 2;
const EXIT_INFEASIBLE: u8 = 3;

#[derive(Parser)]
#[command(
    name = "conbandit",
    about = "Constrained multi-armed bandit experiment harness",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run every (horizon, seed) cell of an experiment config.
    Run {
        /// Path to a JSON experiment config.
        #[arg(long)]
        config: PathBuf,
        /// Also write per-round trace CSVs (large at big horizons).
        #[arg(long)]
        traces: bool,
        /// Also write the comparator-membership diagnostics CSV.
        #[arg(long)]
        diagnostics: bool,
        /// Worker threads (default: hardware parallelism).
        #[arg(long)]
        jobs: Option<usize>,
    },
    /// Run a sweep grid and fit scaling exponents.
    Sweep {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        jobs: Option<usize>,
    },
    /// Run the oracle-equivalence suites.
    Validate {
        /// One of: all, projection, lp, corruption, coverage.
        #[arg(long, default_value = "all")]
        suite: String,
    },
}

fn classify(err: &Error) -> u8 {
    match err {
        Error::InfeasibleInstance | Error::SlaterViolation { .. } => EXIT_INFEASIBLE,
        _ => EXIT_INVALID_CONFIG,
    }
}

fn read_config(path: &PathBuf) -> Result<String, u8> {
    fs::read_to_string(path).map_err(|e| {
        eprintln!("error: cannot read {}: {e}", path.display());
        EXIT_INVALID_CONFIG
    })
}

fn cmd_run(config: PathBuf, traces: bool, diagnostics: bool, jobs: Option<usize>) -> u8 {
    let text = match read_config(&config) {
        Ok(t) => t,
        Err(code) => return code,
    };
    let parsed = match parse_experiment_config(&text) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: invalid config {}: {e}", config.display());
            return EXIT_INVALID_CONFIG;
        }
    };
    let options = RunOptions {
        traces,
        diagnostics,
        jobs,
    };
    match execute_run(&parsed, options) {
        Ok(outputs) => {
            println!(
                "wrote {} rows to {}",
                outputs.rows.len(),
                outputs.summary_path.display()
            );
            0
        }
        Err(e) => {
            eprintln!("error: {e}");
            classify(&e)
        }
    }
}

fn cmd_sweep(config: PathBuf, jobs: Option<usize>) -> u8 {
    let text = match read_config(&config) {
        Ok(t) => t,
        Err(code) => return code,
    };
    let parsed = match parse_sweep_config(&text) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: invalid config {}: {e}", config.display());
            return EXIT_INVALID_CONFIG;
        }
    };
    match execute_sweep(&parsed, jobs) {
        Ok(outputs) => {
            println!(
                "wrote {} rows to {} and {} fits to {}",
                outputs.rows.len(),
                outputs.summary_path.display(),
                outputs.fits.len(),
                outputs.fits_path.display()
            );
            0
        }
        Err(e) => {
            eprintln!("error: {e}");
            classify(&e)
        }
    }
}

fn cmd_validate(suite: String) -> u8 {
    let known = ["all", "projection", "lp", "corruption", "coverage"];
    if !known.contains(&suite.as_str()) {
        eprintln!("error: unknown suite {suite:?}; expected one of {known:?}");
        return EXIT_INVALID_CONFIG;
    }
    match run_suites(&suite) {
        Ok(reports) => {
            let mut failed = false;
            for report in &reports {
                let verdict = if report.passed { "PASS" } else { "FAIL" };
                println!(
                    "[{verdict}] {} ({} checks, worst gap {:.3e})",
                    report.suite, report.cases, report.worst
                );
                if !report.passed {
                    failed = true;
                }
            }
            if failed {
                // Machine-readable failure report.
                match serde_json::to_string_pretty(&reports) {
                    Ok(json) => eprintln!("{json}"),
                    Err(e) => eprintln!("error: cannot serialize report: {e}"),
                }
                1
            } else {
                0
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            EXIT_INVALID_CONFIG
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let code = match cli.command {
        Command::Run {
            config,
            traces,
            diagnostics,
            jobs,
        } => cmd_run(config, traces, diagnostics, jobs),
        Command::Sweep { config, jobs } => cmd_sweep(config, jobs),
        Command::Validate { suite } => cmd_validate(suite),
    };
    ExitCode::from(code)
}
