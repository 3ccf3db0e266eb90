//! Run a config file (default: every bundled reproduction config) and print summaries.
//!
//! cargo run --release --example run_config -- configs/suite/03_cnot_obstruction.toml

use std::path::PathBuf;

use symgate::config::ExperimentConfig;
use symgate::runner::{run, summary};

fn main() -> symgate::Result<()> {
    let mut paths: Vec<PathBuf> = std::env::args().skip(1).map(PathBuf::from).collect();
    if paths.is_empty() {
        let dir = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("configs/suite");
        paths = std::fs::read_dir(&dir)
            .map_err(|source| symgate::Error::Io {
                path: dir.display().to_string(),
                source,
            })?
            .filter_map(|e| e.ok().map(|e| e.path()))
            .filter(|p| p.extension().is_some_and(|x| x == "toml"))
            .collect();
        paths.sort();
    }
    for path in paths {
        println!("== {}", path.display());
        let report = run(&ExperimentConfig::load(&path)?)?;
        println!("{}", summary(&report));
    }
    Ok(())
}
