//! `tfd`: thermal ensembles, thermofield-double states and purifications from
//! the command line.
//!
//! Exit codes: 0 on success, 1 when a computed residual exceeds `--tol`,
//! 2 for invalid input, configuration or I/O.

mod commands;
mod config;
mod report;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};

use commands::Outcome;
use config::{load_model, parse_betas, OutputFormat};

#[derive(Parser)]
#[command(
    name = "tfd",
    version,
    about = "Thermofield-double and Schmidt decomposition toolkit"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print the Hamiltonian's eigenvalues in ascending order.
    Spectrum {
        #[command(flatten)]
        model: ModelArgs,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Compare Tr(rho F) with the doubled-space expectation at each beta.
    Verify {
        #[command(flatten)]
        model: ModelArgs,
        /// Observable builder name or matrix file.
        #[arg(long, default_value = "energy")]
        observable: String,
        #[command(flatten)]
        betas: BetaArgs,
        #[arg(long, default_value_t = 1e-10)]
        tol: f64,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Schmidt spectrum and entropy of the thermofield-double state at each beta.
    Tfd {
        #[command(flatten)]
        model: ModelArgs,
        #[command(flatten)]
        betas: BetaArgs,
        /// Also write each state in the state file format.
        #[arg(long)]
        emit_state: Option<PathBuf>,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Purify a density matrix read from a matrix file.
    Purify {
        #[arg(long)]
        input: PathBuf,
        #[arg(long, default_value_t = 1e-10)]
        tol: f64,
        #[arg(long)]
        emit_state: Option<PathBuf>,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Schmidt decomposition of a state file.
    Schmidt {
        #[arg(long)]
        input: PathBuf,
        #[command(flatten)]
        output: OutputArgs,
    },
}

#[derive(Args)]
struct ModelArgs {
    /// Model spec: inline JSON or a path to a JSON file.
    #[arg(long)]
    model: String,
    /// Overrides the seed of a random_hermitian model.
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Args)]
struct BetaArgs {
    /// Comma-separated inverse temperatures.
    #[arg(long, allow_hyphen_values = true)]
    beta: String,
    /// Accept negative beta (population inversion).
    #[arg(long)]
    allow_negative_beta: bool,
}

#[derive(Args)]
struct OutputArgs {
    #[arg(long, value_enum, default_value = "json")]
    format: OutputFormat,
    /// Output file; standard output when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

fn check_tolerance(tol: f64) -> Result<f64> {
    if !tol.is_finite() || tol < 0.0 {
        bail!("--tol must be a finite nonnegative number, got {tol}");
    }
    Ok(tol)
}

fn run(cli: Cli) -> Result<(Outcome, OutputArgs)> {
    Ok(match cli.command {
        Command::Spectrum { model, output } => {
            let spec = load_model(&model.model, model.seed)?;
            (commands::spectrum(&spec, output.format)?, output)
        }
        Command::Verify {
            model,
            observable,
            betas,
            tol,
            output,
        } => {
            let spec = load_model(&model.model, model.seed)?;
            let betas = parse_betas(&betas.beta, betas.allow_negative_beta)?;
            let outcome = commands::verify(
                &spec,
                &observable,
                &betas,
                check_tolerance(tol)?,
                output.format,
            )?;
            (outcome, output)
        }
        Command::Tfd {
            model,
            betas,
            emit_state,
            output,
        } => {
            let spec = load_model(&model.model, model.seed)?;
            let betas = parse_betas(&betas.beta, betas.allow_negative_beta)?;
            let outcome = commands::tfd(&spec, &betas, emit_state.as_deref(), output.format)?;
            (outcome, output)
        }
        Command::Purify {
            input,
            tol,
            emit_state,
            output,
        } => {
            let outcome = commands::purify_file(
                &input,
                check_tolerance(tol)?,
                emit_state.as_deref(),
                output.format,
            )?;
            (outcome, output)
        }
        Command::Schmidt { input, output } => {
            (commands::schmidt_file(&input, output.format)?, output)
        }
    })
}

fn emit(outcome: &Outcome, output: &OutputArgs) -> Result<()> {
    match &output.out {
        Some(path) => std::fs::write(path, &outcome.body)
            .with_context(|| format!("writing {}", path.display())),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(&outcome.body)?;
            stdout.flush()?;
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli).and_then(|(outcome, output)| emit(&outcome, &output).map(|_| outcome.status)) {
        Ok(status) => ExitCode::from(status as u8),
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(2)
        }
    }
}
