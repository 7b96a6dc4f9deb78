//! `pairhmm`: likelihoods, alignment, estimation and divergence experiments
//! for pair hidden Markov models.
//!
//! Exit codes: 0 success, 2 usage or input error, 3 numeric or convergence
//! failure, 4 I/O failure.

mod commands;
mod config;
mod error;
mod manifest;

use clap::{Parser, Subcommand};

use crate::error::{CliError, EXIT_USAGE};

#[derive(Parser, Debug)]
#[command(name = "pairhmm", version, about = "Pair hidden Markov model laboratory")]
struct Cli {
    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    jobs: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Simulate hidden paths and sequence pairs.
    Simulate(commands::SimulateArgs),
    /// Log-likelihood of a pair under one criterion.
    Loglik(commands::LoglikArgs),
    /// Most probable hidden path.
    Viterbi(commands::ViterbiArgs),
    /// Maximum-likelihood estimate of scheme coordinates.
    Mle(commands::MleArgs),
    /// Grid posterior over one scheme coordinate.
    Posterior(commands::PosteriorArgs),
    /// Monte-Carlo rate or divergence estimate.
    Divergence(commands::DivergenceArgs),
    /// Rate estimates over a grid of scheme coordinates.
    Surface(commands::SurfaceArgs),
    /// Run a preset study.
    Experiment(commands::ExperimentArgs),
}

fn run(cli: Cli) -> Result<(), CliError> {
    if let Some(n) = cli.jobs {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n.max(1))
            .build_global()
            .map_err(|e| CliError::Usage(e.to_string()))?;
    }
    match &cli.command {
        Command::Simulate(a) => commands::simulate(a),
        Command::Loglik(a) => commands::loglik(a),
        Command::Viterbi(a) => commands::viterbi(a),
        Command::Mle(a) => commands::mle(a),
        Command::Posterior(a) => commands::posterior(a),
        Command::Divergence(a) => commands::divergence(a),
        Command::Surface(a) => commands::surface(a),
        Command::Experiment(a) => commands::experiment(a),
    }
}

fn main() {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { 0 };
            let _ = e.print();
            std::process::exit(code);
        }
    };
    if let Err(e) = run(cli) {
        eprintln!("error: {e}");
        std::process::exit(e.exit_code());
    }
}
