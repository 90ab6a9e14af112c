//! `maxspec`: spectra, enclosures and pollution diagnostics for slab-loaded
//! rectangular waveguides.
//!
//! Exit codes: 0 on success, 1 on a validation error, 2 when a numerical
//! routine fails. `MAXSPEC_THREADS` bounds the worker pool.

mod commands;
mod config;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use commands::Failure;
use config::RunConfig;

#[derive(Parser)]
#[command(name = "maxspec", version, about = "Spectral analysis of dissipative Maxwell waveguides")]
struct Cli {
    /// JSON configuration file (`"schema": 1`); flags override its values.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Enclosure parameters as JSON; boundary-curve samples as CSV with --out.
    Enclosure(RunConfig),
    /// Resolvent-norm bound on a grid (CSV).
    ResolventGrid(RunConfig),
    /// Essential spectrum of the half-infinite guide (JSON).
    EssentialSpectrum(RunConfig),
    /// Admissible spectral-pollution set (JSON).
    PollutionSet(RunConfig),
    /// Eigenvalues of the half-infinite guide (CSV).
    Eigs(RunConfig),
    /// Eigenvalues of the guide truncated at --X (CSV).
    EigsTruncated(RunConfig),
    /// Eigenvalue trajectories over --X-list (CSV).
    Sweep(RunConfig),
    /// Classify the limits of a truncation sweep (JSON).
    PollutionReport(RunConfig),
    /// Dirichlet-to-Neumann, Weyl-sequence and Fourier-symbol checks (JSON).
    AppendixChecks(RunConfig),
    /// Write every CSV/JSON input of the figure scripts into --out DIR.
    FigureData(RunConfig),
}

impl Command {
    fn split(self) -> (&'static str, RunConfig, fn(&RunConfig) -> commands::Outcome) {
        match self {
            Self::Enclosure(c) => ("enclosure", c, commands::enclosure),
            Self::ResolventGrid(c) => ("resolvent-grid", c, commands::resolvent_grid),
            Self::EssentialSpectrum(c) => ("essential-spectrum", c, commands::essential_spectrum),
            Self::PollutionSet(c) => ("pollution-set", c, commands::pollution_set),
            Self::Eigs(c) => ("eigs", c, commands::eigs),
            Self::EigsTruncated(c) => ("eigs-truncated", c, commands::eigs_truncated),
            Self::Sweep(c) => ("sweep", c, commands::sweep),
            Self::PollutionReport(c) => ("pollution-report", c, commands::pollution),
            Self::AppendixChecks(c) => ("appendix-checks", c, commands::appendix_checks),
            Self::FigureData(c) => ("figure-data", c, commands::figure_data),
        }
    }
}

fn configure_threads() -> Result<(), Failure> {
    let Ok(v) = std::env::var("MAXSPEC_THREADS") else {
        return Ok(());
    };
    let n: usize = v
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| Failure::Validation(format!("MAXSPEC_THREADS must be a positive integer, got `{v}`")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| Failure::Validation(format!("MAXSPEC_THREADS: {e}")))
}

fn run(cli: Cli) -> Result<String, Failure> {
    configure_threads()?;
    let (name, flags, f) = cli.command.split();
    let cfg = match &cli.config {
        Some(path) => flags.layered_over(RunConfig::load(path)?, name)?,
        None => flags,
    };
    f(&cfg)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    match run(cli) {
        Ok(out) => {
            let mut stdout = std::io::stdout().lock();
            if stdout.write_all(out.as_bytes()).and_then(|_| stdout.flush()).is_err() {
                return ExitCode::from(1);
            }
            ExitCode::SUCCESS
        }
        Err(Failure::Validation(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Numerical(msg)) => {
            eprintln!("numerical failure: {msg}");
            ExitCode::from(2)
        }
    }
}
