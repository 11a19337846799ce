use std::fs;
use std::path::{Path, PathBuf};

use serde::de::DeserializeOwned;

use crate::error::{CliError, CliResult};

/// Flags shared by every subcommand; each has a config-file equivalent
/// (`masterSeed`, `out`, `workers`) and takes precedence over it.
#[derive(Debug, Clone, Default, clap::Args)]
pub struct CommonArgs {
    /// JSON configuration file.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Master seed.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Output directory.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Worker threads.
    #[arg(long)]
    pub workers: Option<usize>,
}

/// Resolved run settings.
#[derive(Debug, Clone)]
pub struct Run {
    pub seed: u64,
    pub out: PathBuf,
    pub workers: Option<usize>,
}

pub const DEFAULT_OUT: &str = "synthcorr-out";

impl Run {
    pub fn resolve(
        args: &CommonArgs,
        seed: Option<u64>,
        out: Option<PathBuf>,
        workers: Option<usize>,
    ) -> CliResult<Self> {
        let workers = args.workers.or(workers);
        if workers == Some(0) {
            return Err(CliError::Validation("workers: must be at least 1".into()));
        }
        Ok(Run {
            seed: args.seed.or(seed).unwrap_or(0),
            out: args.out.clone().or(out).unwrap_or_else(|| PathBuf::from(DEFAULT_OUT)),
            workers,
        })
    }
}

/// Reads a JSON config, or the defaults when no file is given.
pub fn load<T: DeserializeOwned + Default>(path: Option<&Path>) -> CliResult<T> {
    let Some(path) = path else {
        return Ok(T::default());
    };
    let text = fs::read_to_string(path).map_err(|e| CliError::read(path, e))?;
    serde_json::from_str(&text)
        .map_err(|e| CliError::Validation(format!("{}: {e}", path.display())))
}
