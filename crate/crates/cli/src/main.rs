//! `sci`: batch runner for spectral towers, gadget checks, decision towers
//! and the tree reduction demo.

mod commands;
mod config;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use commands::{Outcome, RunError};
use config::ExperimentConfig;
use output::Artifacts;

#[derive(Parser)]
#[command(name = "sci", version, about = "Spectral towers on Cantor-space gadgets")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Pseudospectrum or approximate point spectrum tower.
    Spectrum(RunArgs),
    /// Exhaustive invariant checks on one map.
    Gadget(RunArgs),
    /// Bounded-quantifier towers on matrix oracles.
    Xi(RunArgs),
    /// Silver tree to predicted and computed spectra.
    Reduction(RunArgs),
}

#[derive(Args)]
struct RunArgs {
    #[arg(long)]
    config: PathBuf,
    /// Output directory; overrides `output_dir` in the config.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Worker threads for grid evaluation.
    #[arg(long)]
    threads: Option<usize>,
    /// Seed for randomized instance generation.
    #[arg(long)]
    seed: Option<u64>,
}

const EXIT_CONFIG: u8 = 1;
const EXIT_BUDGET: u8 = 2;

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (args, run): (&RunArgs, fn(&ExperimentConfig, &mut Artifacts) -> Result<Outcome, RunError>) =
        match &cli.command {
            Command::Spectrum(a) => (a, commands::spectrum::run),
            Command::Gadget(a) => (a, commands::gadget::run),
            Command::Xi(a) => (a, commands::xi::run),
            Command::Reduction(a) => (a, commands::reduction::run),
        };

    if let Some(n) = args.threads {
        if n == 0 {
            eprintln!("error: --threads must be at least 1");
            return ExitCode::from(EXIT_CONFIG);
        }
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("warning: could not size thread pool: {e}");
        }
    }

    let cfg = match ExperimentConfig::load(&args.config, args.out.as_deref(), args.seed) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(EXIT_CONFIG);
        }
    };
    let mut out = match Artifacts::create(&cfg.output_dir, &cfg.hash) {
        Ok(o) => o,
        Err(e) => {
            eprintln!("error: cannot create {}: {e}", cfg.output_dir.display());
            return ExitCode::from(EXIT_CONFIG);
        }
    };

    match run(&cfg, &mut out) {
        Ok(outcome) => {
            for p in out.written() {
                println!("wrote {}", p.display());
            }
            match &outcome {
                Outcome::Stable => println!("stabilized"),
                Outcome::Unstable => println!("not stabilized within budget"),
                Outcome::InvariantFailed(names) => {
                    for n in names {
                        eprintln!("invariant failed: {n}");
                    }
                }
            }
            ExitCode::from(outcome.exit_code() as u8)
        }
        Err(e) => {
            eprintln!("error: {e}");
            let code = match e {
                RunError::Compute(sci_core::Error::ExhaustiveCapExceeded { .. }) => EXIT_BUDGET,
                _ => EXIT_CONFIG,
            };
            ExitCode::from(code)
        }
    }
}
