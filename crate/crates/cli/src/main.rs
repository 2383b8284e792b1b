use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use grafting_cli::{CliError, ExperimentConfig, RunOptions};

#[derive(Parser)]
#[command(name = "grafting", version, about = "Experiments on grafted and flat surfaces")]
struct Cli {
    /// Overrides the RNG seed of the config.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    jobs: Option<usize>,
    /// Output directory for CSV files (default: config, then $GRAFTING_OUT_DIR).
    #[arg(long, global = true)]
    out_dir: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the experiment described by a config file.
    Run { config: PathBuf },
    /// Check a config file without running it.
    Validate { config: PathBuf },
    /// Deflate the configured surface and write its flat-surface file.
    ExportFlat { config: PathBuf, out: PathBuf },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(jobs) = cli.jobs {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(jobs).build_global() {
            eprintln!("cannot set up {jobs} worker threads: {e}");
            return ExitCode::from(2);
        }
    }
    let result = match &cli.command {
        Command::Run { config } => {
            let opts = RunOptions { seed: cli.seed, out_dir: cli.out_dir.clone() };
            grafting_cli::run(config, &opts).map(|report| {
                for v in &report.outcome.violations {
                    eprintln!("violation: {v}");
                }
                println!(
                    "{}: {} ({} rows)",
                    if report.outcome.passed() { "PASS" } else { "FAIL" },
                    report.csv.display(),
                    report.outcome.table.rows.len()
                );
                report.exit_code()
            })
        }
        Command::Validate { config } => ExperimentConfig::load(config).map(|c| {
            println!("ok: {} experiment", c.experiment.name.as_str());
            0
        }),
        Command::ExportFlat { config, out } => grafting_cli::export_flat(config, out).map(|()| 0),
    };
    match result {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("{e}");
            ExitCode::from(CliError::exit_code(&e) as u8)
        }
    }
}
