//! Command-line front end: JSON config in, `report.json` and CSV artifacts out.
//!
//! Exit codes: 0 all checks passed, 1 a check failed, 2 config or parse
//! error, 3 physics violation in the input, 4 numerical failure.

pub mod config;
pub mod error;
pub mod output;
pub mod run;

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use config::{load_config, parse_tol_override, resolve, Experiment, Overrides};
use error::{exit, CliError, CliResult};
use thermo_lindblad::Execution;

/// Environment variable fixing the worker-thread count.
pub const THREADS_ENV: &str = "THERMO_LINDBLAD_THREADS";

#[derive(Debug, Parser)]
#[command(name = "thermo-lindblad", version, about = "Build, audit and simulate thermodynamic GKLS generators")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Assemble generators and report their structure.
    Build(CommonArgs),
    /// Run every postulate check on each bath generator.
    Validate(CommonArgs),
    /// Propagate an initial state under the total generator.
    Evolve(CommonArgs),
    /// Compare reduced composite dynamics with free system evolution.
    Theorem1(CommonArgs),
    /// Measure the short-interval expansion of the reduced dynamics.
    TauScan(CommonArgs),
    /// Steady-state heat currents between several baths.
    Transport(CommonArgs),
    /// Run whichever experiment the config names.
    Run(CommonArgs),
}

#[derive(Debug, Args)]
pub struct CommonArgs {
    /// JSON run configuration.
    #[arg(long, short)]
    pub config: PathBuf,
    /// Output prefix. A trailing `/` or an existing directory holds the artifacts.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Tolerance override, `NAME=VALUE`. Repeatable.
    #[arg(long = "tol", value_name = "NAME=VALUE")]
    pub tol: Vec<String>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Force sequential evaluation.
    #[arg(long)]
    pub sequential: bool,
}

impl Command {
    fn split(&self) -> (Option<Experiment>, &CommonArgs) {
        match self {
            Command::Build(a) => (Some(Experiment::Build), a),
            Command::Validate(a) => (Some(Experiment::Validate), a),
            Command::Evolve(a) => (Some(Experiment::Evolve), a),
            Command::Theorem1(a) => (Some(Experiment::Theorem1), a),
            Command::TauScan(a) => (Some(Experiment::TauScan), a),
            Command::Transport(a) => (Some(Experiment::Transport), a),
            Command::Run(a) => (None, a),
        }
    }
}

#[cfg(feature = "parallel")]
fn configure_threads() {
    if let Some(n) = std::env::var(THREADS_ENV).ok().and_then(|v| v.trim().parse::<usize>().ok()) {
        // A second call in the same process keeps the first pool.
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
}

#[cfg(not(feature = "parallel"))]
fn configure_threads() {}

fn execute(command: &Command) -> CliResult<run::RunSummary> {
    let (experiment, args) = command.split();
    let tolerances = args.tol.iter().map(|t| parse_tol_override(t)).collect::<CliResult<Vec<_>>>()?;
    let overrides = Overrides { experiment, output: args.out.clone(), tolerances, seed: args.seed };
    let resolved = resolve(load_config(&args.config)?, &overrides)?;
    let exec = if args.sequential { Execution::Sequential } else { Execution::default() };
    run::run(&resolved, exec)
}

/// Parses `args` (including the program name) and runs the command.
/// Returns the process exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(err) => {
            let _ = err.print();
            return if err.use_stderr() { exit::PARSE } else { exit::PASS };
        }
    };
    configure_threads();
    match execute(&cli.command) {
        Ok(summary) => {
            let failed: Vec<&str> = summary.report["checks"]
                .as_array()
                .map(|checks| {
                    checks
                        .iter()
                        .filter(|c| c["passed"] == false)
                        .filter_map(|c| c["name"].as_str())
                        .collect()
                })
                .unwrap_or_default();
            if let Some(message) = summary.report.get("error").and_then(|e| e.as_str()) {
                eprintln!("error: {message}");
            } else if !failed.is_empty() {
                eprintln!("failed checks: {}", failed.join(", "));
            }
            println!("{}", summary.report_path.display());
            summary.exit_code
        }
        Err(err) => report_error(&err),
    }
}

fn report_error(err: &CliError) -> i32 {
    eprintln!("error: {err}");
    err.exit_code()
}
