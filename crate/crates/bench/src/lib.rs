//! Shared fixtures for the benchmarks and the acceptance run.

use std::path::PathBuf;

use circle_rds::experiments::ExperimentConfig;
use circle_rds_cli::config;

/// The repository's `configs/` directory.
pub fn configs_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../configs")
}

pub fn config_path(name: &str) -> PathBuf {
    configs_dir().join(name)
}

/// The experiment described by `configs/<name>`; panics on an invalid file.
pub fn experiment(name: &str) -> ExperimentConfig {
    let cfg = config::load(&config_path(name)).unwrap_or_else(|e| panic!("{name}: {e}"));
    match config::validate(&cfg) {
        Ok(built) => built.experiment,
        Err(d) => panic!("{name}: {}", d.join("; ")),
    }
}
