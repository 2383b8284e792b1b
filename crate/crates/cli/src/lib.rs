//! Batch experiment driver for grafted and flat surfaces.
//!
//! A run reads one TOML config, builds the fixture it describes, runs the
//! named experiment and writes one CSV with a header row. The process exit
//! code reports the outcome, see [`CliError::exit_code`].

pub mod config;
pub mod experiments;

use std::path::{Path, PathBuf};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

pub use config::{ExperimentConfig, ExperimentName};
pub use experiments::{Outcome, Table};

/// Environment variable naming the default output directory.
pub const OUT_DIR_ENV: &str = "GRAFTING_OUT_DIR";

#[derive(Debug, Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),
    #[error("contract violation: {0}")]
    Contract(String),
    #[error("budget exceeded: {0}")]
    Budget(String),
    #[error("i/o error: {0}")]
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Contract(_) => 1,
            CliError::Config(_) => 2,
            CliError::Budget(_) => 3,
            // an unwritable output is a problem with the invocation
            CliError::Io(_) => 2,
        }
    }
}

/// Overrides from the command line.
#[derive(Debug, Clone, Default)]
pub struct RunOptions {
    pub seed: Option<u64>,
    pub out_dir: Option<PathBuf>,
}

/// Output directory: flag, then config, then environment, then `.`.
pub fn resolve_out_dir(flag: Option<&Path>, cfg: &ExperimentConfig, env: Option<&str>) -> PathBuf {
    flag.map(Path::to_path_buf)
        .or_else(|| cfg.output.dir.clone())
        .or_else(|| env.filter(|s| !s.is_empty()).map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("."))
}

pub fn write_csv(path: &Path, table: &Table) -> Result<(), CliError> {
    let io = |e: csv::Error| CliError::Io(format!("{}: {e}", path.display()));
    let mut w = csv::Writer::from_path(path).map_err(io)?;
    w.write_record(&table.header).map_err(io)?;
    for row in &table.rows {
        w.write_record(row).map_err(io)?;
    }
    w.flush().map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
}

/// Result of a completed run.
#[derive(Debug, Clone)]
pub struct RunReport {
    pub csv: PathBuf,
    pub outcome: Outcome,
}

impl RunReport {
    pub fn exit_code(&self) -> i32 {
        if self.outcome.passed() {
            0
        } else {
            1
        }
    }
}

/// Runs the configured experiment and writes its CSV. The CSV is written
/// even when the contract fails, so the numbers can be inspected.
pub fn run_config(cfg: &ExperimentConfig, opts: &RunOptions) -> Result<RunReport, CliError> {
    let env = std::env::var(OUT_DIR_ENV).ok();
    let dir = resolve_out_dir(opts.out_dir.as_deref(), cfg, env.as_deref());
    std::fs::create_dir_all(&dir).map_err(|e| CliError::Io(format!("{}: {e}", dir.display())))?;
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed.unwrap_or(cfg.experiment.seed));
    let outcome = experiments::run_experiment(cfg, &mut rng)?;
    let csv = dir.join(cfg.file_name());
    write_csv(&csv, &outcome.table)?;
    Ok(RunReport { csv, outcome })
}

pub fn run(path: &Path, opts: &RunOptions) -> Result<RunReport, CliError> {
    run_config(&ExperimentConfig::load(path)?, opts)
}

/// Deflates the configured surface and writes the flat-surface text file.
pub fn export_flat(path: &Path, out: &Path) -> Result<(), CliError> {
    let cfg = ExperimentConfig::load(path)?;
    let g = cfg.grafted()?;
    let (flat, _) = grafting::deflate::deflate(&g).map_err(|e| CliError::Config(e.to_string()))?;
    std::fs::write(out, flat.export_text()).map_err(|e| CliError::Io(format!("{}: {e}", out.display())))
}
