//! `eigencond`: batch runs of the nested sampler, the typical-weight
//! ensemble and the critical-energy estimators.

mod commands;
mod config;
mod error;
mod manifest;

use std::path::PathBuf;
use std::process::ExitCode;
use std::sync::atomic::{AtomicBool, Ordering};
use std::sync::Arc;

use clap::{Args, Parser, Subcommand};
use eigencond::critical::CriticalMethod;

use crate::commands::Context;
use crate::config::Config;
use crate::error::{CliError, CliResult};

#[derive(Parser)]
#[command(name = "eigencond", version, about = "Eigenstate condensation of energy-constrained random states")]
struct Cli {
    /// Worker threads (falls back to EIGENCOND_THREADS, then all cores).
    #[arg(long, global = true, env = "EIGENCOND_THREADS")]
    threads: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct RunArgs {
    /// TOML configuration file.
    #[arg(long)]
    config: PathBuf,
    /// Output directory.
    #[arg(long, default_value = "out")]
    out: PathBuf,
    /// Overrides the sampler or probe seed.
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Subcommand)]
enum Command {
    /// Nested sampling on H and on its reflection; writes records and bins.
    Sample(RunArgs),
    /// Critical energies per system size.
    Critical {
        #[command(flatten)]
        run: RunArgs,
        /// exact-sum, stochastic-trace, free-fermion or moment-expansion.
        #[arg(long)]
        method: Option<CriticalMethod>,
    },
    /// Typical-weight ensemble curves, scaling collapse and doublet curves.
    Ensemble(RunArgs),
    /// Model catalog.
    Models {
        #[command(subcommand)]
        action: ModelsAction,
    },
    /// Quick numerical sanity checks.
    Selftest,
    /// Checks the output digests recorded in a run's manifest.
    Verify {
        #[arg(long, default_value = "out")]
        out: PathBuf,
    },
}

#[derive(Subcommand)]
enum ModelsAction {
    List,
}

fn context(run: RunArgs, method: Option<CriticalMethod>) -> CliResult<Context> {
    let config = Config::load(&run.config)?;
    let stop = Arc::new(AtomicBool::new(false));
    let flag = stop.clone();
    // a second handler installation fails harmlessly in tests that call twice
    let _ = ctrlc::set_handler(move || flag.store(true, Ordering::Relaxed));
    Ok(Context {
        config,
        out: run.out,
        seed: run.seed,
        method,
        stop,
    })
}

fn dispatch(cli: Cli) -> CliResult<()> {
    if let Some(n) = cli.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| CliError::Config(format!("thread pool: {e}")))?;
    }
    match cli.command {
        Command::Sample(run) => commands::sample::run(&context(run, None)?),
        Command::Critical { run, method } => commands::critical::run(&context(run, method)?),
        Command::Ensemble(run) => commands::ensemble::run(&context(run, None)?),
        Command::Models {
            action: ModelsAction::List,
        } => {
            commands::models_list();
            Ok(())
        }
        Command::Selftest => commands::selftest(),
        Command::Verify { out } => {
            let m = manifest::verify(&out)?;
            println!("{} outputs verified, status {:?}", m.outputs.len(), m.status);
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
