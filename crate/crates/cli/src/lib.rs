//! Experiment front end for `aim-core`: config files, CSV tables, the
//! identity-check suite and the `run` / `sweep` drivers behind the `aim`
//! binary.

pub mod config;
pub mod csv;
pub mod validate;

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use aim_core::sim::run_experiment_detailed;
use aim_core::{ExperimentConfig, SimError};
use thiserror::Error;

pub use config::{parse_config, parse_config_str, ConfigError, Overrides};
pub use csv::{emit_csv, read_csv, render_csv, CsvError, HEADER};
pub use validate::{validate_suite, Hooks, Report};

/// Process exit statuses.
pub mod exit {
    pub const OK: i32 = 0;
    pub const CONFIG: i32 = 2;
    pub const RUN: i32 = 3;
    pub const VALIDATION: i32 = 4;
    pub const IO: i32 = 5;
    pub const USAGE: i32 = 64;
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Run(#[from] SimError),
    #[error(transparent)]
    Csv(#[from] CsvError),
    #[error("cannot create {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("validation failed:\n{0}")]
    Validation(Report),
    #[error("AIM_THREADS must be a nonnegative integer, got {0:?}")]
    Threads(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) | CliError::Threads(_) => exit::CONFIG,
            CliError::Run(_) => exit::RUN,
            CliError::Validation(_) => exit::VALIDATION,
            CliError::Csv(_) | CliError::Io { .. } => exit::IO,
        }
    }
}

/// Worker count from an `AIM_THREADS` value; `0` means one per core.
pub fn parse_threads(value: Option<&str>) -> Result<usize, CliError> {
    match value.map(str::trim) {
        None | Some("") => Ok(0),
        Some(v) => v.parse().map_err(|_| CliError::Threads(v.to_string())),
    }
}

/// Runs `config` and writes its pooled table to `out`.
pub fn run_to_csv(config: &ExperimentConfig, out: &Path) -> Result<(), CliError> {
    let table = aim_core::run_experiment(config)?;
    emit_csv(&table, out)?;
    Ok(())
}

/// Runs `config` and writes into `dir`:
///
/// - `bayesian.csv`, the table pooled over all instances;
/// - `instances.csv`, the arm means of each instance;
/// - `instance_NNNN.csv`, the table of each instance.
///
/// Uniform means change with every replicate, so only `bayesian.csv` is
/// written for them.
pub fn sweep_to_dir(config: &ExperimentConfig, dir: &Path) -> Result<Vec<PathBuf>, CliError> {
    fs::create_dir_all(dir).map_err(|source| CliError::Io { path: dir.to_path_buf(), source })?;
    let result = run_experiment_detailed(config)?;
    let mut written = Vec::new();

    let pooled = dir.join("bayesian.csv");
    emit_csv(&result.pooled(), &pooled)?;
    written.push(pooled);

    if !result.instance_means.is_empty() {
        let mut listing = String::from("instance,means\n");
        for (i, means) in result.instance_means.iter().enumerate() {
            let cols: Vec<String> = means.iter().map(|&m| csv::format_sig9(m)).collect();
            let _ = writeln!(listing, "{i},{}", cols.join(";"));
        }
        let path = dir.join("instances.csv");
        fs::write(&path, listing).map_err(|source| CsvError::Write { path: path.clone(), source })?;
        written.push(path);

        for i in 0..result.instance_means.len() {
            let path = dir.join(format!("instance_{i:04}.csv"));
            emit_csv(&result.for_instance(i as u64), &path)?;
            written.push(path);
        }
    }
    Ok(written)
}

/// Runs the identity suite, failing if any check misses its tolerance.
pub fn run_validation(hooks: &Hooks) -> Result<Report, CliError> {
    let report = validate_suite(hooks);
    if report.passed() {
        Ok(report)
    } else {
        Err(CliError::Validation(report))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn thread_values() {
        assert_eq!(parse_threads(None).unwrap(), 0);
        assert_eq!(parse_threads(Some(" 3 ")).unwrap(), 3);
        let e = parse_threads(Some("-1")).unwrap_err();
        assert_eq!(e.exit_code(), exit::CONFIG);
    }

    #[test]
    fn exit_codes_are_distinct() {
        let codes = [exit::OK, exit::CONFIG, exit::RUN, exit::VALIDATION, exit::IO, exit::USAGE];
        for (i, a) in codes.iter().enumerate() {
            assert!(codes[i + 1..].iter().all(|b| a != b));
        }
        assert_eq!(CliError::Run(SimError::InvalidInstance("x".into())).exit_code(), exit::RUN);
        assert_eq!(CliError::Validation(Report::default()).exit_code(), exit::VALIDATION);
    }
}
