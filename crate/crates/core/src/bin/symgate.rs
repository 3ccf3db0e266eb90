use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;

use symgate::config::{ExperimentConfig, Tolerances};
use symgate::runner::{execute, summary, OutputPaths};
use symgate::suite::emit_reproduction_suite;

/// Run one experiment config and write its JSON report.
#[derive(Debug, Parser)]
#[command(version, about)]
struct Args {
    /// Experiment config (TOML).
    #[arg(long, value_name = "PATH", required_unless_present = "emit_suite")]
    config: Option<PathBuf>,
    /// JSON report path; overrides `[output] json`.
    #[arg(long, value_name = "PATH")]
    out: Option<PathBuf>,
    /// Seed override.
    #[arg(long, value_name = "N")]
    seed: Option<u64>,
    /// Sets every tolerance to this value.
    #[arg(long, value_name = "X")]
    tol: Option<f64>,
    /// No summary on stdout.
    #[arg(long)]
    quiet: bool,
    /// Write the bundled reproduction configs to DIR and exit.
    #[arg(long, value_name = "DIR", conflicts_with = "config")]
    emit_suite: Option<PathBuf>,
}

fn main() -> ExitCode {
    let args = Args::parse();
    let result = (|| -> symgate::Result<Option<String>> {
        if let Some(dir) = &args.emit_suite {
            let n = emit_reproduction_suite(dir)?.len();
            return Ok(Some(format!("wrote {n} configs to {}", dir.display())));
        }
        let path = args.config.as_ref().expect("required by clap");
        let mut cfg = ExperimentConfig::load(path)?;
        if let Some(seed) = args.seed {
            cfg.seed = seed;
        }
        if let Some(tol) = args.tol {
            cfg.tolerances = Tolerances::uniform(tol);
        }
        let report = execute(
            &cfg,
            &OutputPaths {
                json: args.out.clone(),
                csv: None,
            },
        )?;
        Ok(Some(summary(&report)))
    })();
    match result {
        Ok(text) => {
            if let (false, Some(text)) = (args.quiet, text) {
                print!("{text}");
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(u8::try_from(e.code()).unwrap_or(1))
        }
    }
}
