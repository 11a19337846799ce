mod commands;
mod config;
mod error;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use commands::{explore, finance, territory};
use config::{load, CommonArgs, Run};
use error::{CliError, CliResult};

/// Synthetic territories and hybrid financial series with controlled
/// correlation structure.
#[derive(Debug, Parser)]
#[command(name = "synthcorr", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Grow a population density grid; writes grid.csv and morphology.csv.
    Density {
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Build a road network on a density grid.
    Network {
        #[command(flatten)]
        common: CommonArgs,
        /// Density grid CSV (`x,y,population`).
        #[arg(long)]
        grid: Option<PathBuf>,
    },
    /// Generate one null-model territory.
    Null {
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Run a Latin hypercube campaign (resumable).
    Explore {
        #[command(flatten)]
        common: CommonArgs,
        /// Run the null-model grid instead of the coupled model.
        #[arg(long)]
        null: bool,
        /// Morphology CSV of real territories for the proximity score.
        #[arg(long)]
        reference: Option<PathBuf>,
    },
    /// Sweep the noise correlation and compare effective correlations.
    FinanceSweep {
        #[command(flatten)]
        common: CommonArgs,
        /// Price file (`timestamp,price`); give exactly two.
        #[arg(long = "input")]
        inputs: Vec<PathBuf>,
    },
    /// Autoregressive predictability and lagged correlations.
    FinancePredict {
        #[command(flatten)]
        common: CommonArgs,
        /// Price file (`timestamp,price`); give exactly two.
        #[arg(long = "input")]
        inputs: Vec<PathBuf>,
    },
}

fn with_pool(run: &Run, job: impl FnOnce() -> CliResult<()> + Send) -> CliResult<()> {
    match run.workers {
        None => job(),
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| CliError::Runtime(format!("cannot start worker pool: {e}")))?
            .install(job),
    }
}

fn dispatch(command: Command) -> CliResult<()> {
    match command {
        Command::Density { common } => {
            let cfg: territory::DensityConfig = load(common.config.as_deref())?;
            let run = Run::resolve(&common, cfg.master_seed, cfg.out.clone(), cfg.workers)?;
            with_pool(&run, || territory::density(cfg, &run))
        }
        Command::Network { common, grid } => {
            let cfg: territory::NetworkConfig = load(common.config.as_deref())?;
            let run = Run::resolve(&common, cfg.master_seed, cfg.out.clone(), cfg.workers)?;
            with_pool(&run, || territory::network(cfg, grid, &run))
        }
        Command::Null { common } => {
            let cfg: territory::NullConfig = load(common.config.as_deref())?;
            let run = Run::resolve(&common, cfg.master_seed, cfg.out.clone(), cfg.workers)?;
            with_pool(&run, || territory::null(cfg, &run))
        }
        Command::Explore { common, null, reference } => {
            let cfg: explore::ExploreConfig = load(common.config.as_deref())?;
            let run = Run::resolve(&common, cfg.master_seed, cfg.out.clone(), cfg.workers)?;
            with_pool(&run, || explore::explore(cfg, null, reference, &run))
        }
        Command::FinanceSweep { common, inputs } => {
            let cfg: finance::FinanceConfig = load(common.config.as_deref())?;
            let run = Run::resolve(&common, cfg.master_seed, cfg.out.clone(), cfg.workers)?;
            with_pool(&run, || finance::sweep(cfg, inputs, &run))
        }
        Command::FinancePredict { common, inputs } => {
            let cfg: finance::FinanceConfig = load(common.config.as_deref())?;
            let run = Run::resolve(&common, cfg.master_seed, cfg.out.clone(), cfg.workers)?;
            with_pool(&run, || finance::predict(cfg, inputs, &run))
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
