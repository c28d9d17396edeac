use std::path::PathBuf;
use std::process::ExitCode;

use arcwave::harness::{self, Outcome, RunConfig};
use arcwave::Error;
use clap::{Parser, Subcommand};

/// Elastic scattering by open arcs and closed curves.
#[derive(Parser)]
#[command(name = "arcwave", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve one formulation; writes density.csv, report.json [, field.csv].
    Solve(Args),
    /// Near-field errors over an N sweep; writes convergence.csv.
    ConvergenceTable(Args),
    /// GMRES iterations over an omega sweep; writes iterations.csv.
    IterationsTable(Args),
    /// All eigenvalues of an operator; writes spectrum.csv and spectrum.json.
    Spectrum(Args),
    /// Thin ellipses versus the flat strip; writes strip_limit.csv/.json.
    StripLimit(Args),
}

#[derive(clap::Args)]
struct Args {
    /// JSON run configuration.
    #[arg(long)]
    config: PathBuf,
}

const EXIT_NOT_CONVERGED: u8 = 2;
const EXIT_BAD_CONFIG: u8 = 3;

fn threads() -> Result<(), Error> {
    let Ok(v) = std::env::var("ARCWAVE_THREADS") else { return Ok(()) };
    let n: usize = v.trim().parse().ok().filter(|&n| n > 0).ok_or_else(|| Error::Config {
        field: "ARCWAVE_THREADS".into(),
        msg: format!("expected a positive integer, got `{v}`"),
    })?;
    rayon::ThreadPoolBuilder::new().num_threads(n).build_global().map_err(|e| Error::Unsupported(e.to_string()))
}

fn run(cli: Cli) -> Result<Outcome, Error> {
    threads()?;
    let (args, cmd): (&Args, fn(&RunConfig) -> Result<Outcome, Error>) = match &cli.command {
        Command::Solve(a) => (a, harness::cmd_solve),
        Command::ConvergenceTable(a) => (a, harness::cmd_convergence_table),
        Command::IterationsTable(a) => (a, harness::cmd_iterations_table),
        Command::Spectrum(a) => (a, harness::cmd_spectrum),
        Command::StripLimit(a) => (a, harness::cmd_strip_limit),
    };
    let cfg = RunConfig::load(&args.config)?;
    cmd(&cfg)
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(Outcome { converged: true }) => ExitCode::SUCCESS,
        Ok(Outcome { converged: false }) => {
            eprintln!("arcwave: did not converge (results written)");
            ExitCode::from(EXIT_NOT_CONVERGED)
        }
        Err(e @ Error::Config { .. }) => {
            eprintln!("arcwave: {e}");
            ExitCode::from(EXIT_BAD_CONFIG)
        }
        Err(e @ (Error::EigenNonConvergence | Error::Breakdown { .. })) => {
            eprintln!("arcwave: {e}");
            ExitCode::from(EXIT_NOT_CONVERGED)
        }
        Err(e) => {
            eprintln!("arcwave: {e}");
            ExitCode::FAILURE
        }
    }
}
