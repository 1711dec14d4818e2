use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand};
use lens_lab::registry::listing_text;
use lens_lab::{list_experiments, run_experiment, validate, write_report, ExperimentConfig, LabError};

#[derive(Parser)]
#[command(name = "lens-lab", version, about = "Run lens-core experiments from flat key = value configs")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run an experiment and write its report and CSV series.
    Run {
        config: PathBuf,
        /// Override a config entry; repeatable.
        #[arg(long = "set", value_name = "KEY=VALUE")]
        set: Vec<String>,
    },
    /// List the registry.
    List {
        /// Machine-readable JSON instead of text.
        #[arg(long)]
        json: bool,
    },
    /// Check a config without running it.
    Validate {
        config: PathBuf,
        #[arg(long = "set", value_name = "KEY=VALUE")]
        set: Vec<String>,
    },
}

/// Caps the rayon pool at `LENS_LAB_THREADS` when set.
fn init_threads() -> Result<(), LabError> {
    let Ok(raw) = std::env::var("LENS_LAB_THREADS") else {
        return Ok(());
    };
    let n: usize = raw
        .trim()
        .parse()
        .ok()
        .filter(|n| *n > 0)
        .ok_or_else(|| LabError::InvalidConfig(format!("LENS_LAB_THREADS must be a positive integer, got {raw:?}")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| LabError::InvalidConfig(format!("cannot size the worker pool: {e}")))
}

fn run(cli: Cli) -> Result<bool, LabError> {
    match cli.command {
        Command::List { json } => {
            if json {
                let text = serde_json::to_string_pretty(&list_experiments()).expect("registry is plain data");
                println!("{text}");
            } else {
                print!("{}", listing_text());
            }
            Ok(true)
        }
        Command::Validate { config, set } => {
            let cfg = ExperimentConfig::load(&config, &set)?;
            validate(&cfg)?;
            println!("{}: ok ({})", config.display(), cfg.experiment);
            Ok(true)
        }
        Command::Run { config, set } => {
            init_threads()?;
            let cfg = ExperimentConfig::load(&config, &set)?;
            let start = Instant::now();
            let report = run_experiment(&cfg)?;
            let files = write_report(&report, &cfg.output_dir, start.elapsed())?;
            for v in &report.verdicts {
                println!("{} {}: {}", if v.passed { "PASS" } else { "FAIL" }, v.name, v.detail);
            }
            println!("report: {}", files.report.display());
            for s in &files.series {
                println!("series: {}", s.display());
            }
            Ok(report.passed)
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
