//! Batch driver: parses a config, validates it, runs one experiment and writes CSV tables.

mod build;
pub mod commands;
pub mod config;
pub mod error;
pub mod output;
pub mod validate;

use std::fs;
use std::path::{Path, PathBuf};

pub use config::{RunConfig, Subcommand};
pub use error::CliError;
pub use validate::{validate, Diagnostic};

/// Exit status of a run.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Ok,
    Partial,
}

impl Status {
    pub fn code(self) -> i32 {
        match self {
            Status::Ok => 0,
            Status::Partial => 2,
        }
    }
}

#[derive(Debug)]
pub struct Outcome {
    pub status: Status,
    pub files: Vec<PathBuf>,
}

/// Reads, validates and runs `config_path`.
pub fn run(subcommand: Subcommand, config_path: &Path, out: &Path, verbose: bool) -> Result<Outcome, CliError> {
    let text = fs::read_to_string(config_path).map_err(|e| CliError::io(config_path, e))?;
    let cfg = RunConfig::from_text(subcommand, &text)?;
    run_config(&cfg, out, verbose)
}

/// Validates and runs an already parsed config. Files written before a numeric error are kept.
pub fn run_config(cfg: &RunConfig, out: &Path, verbose: bool) -> Result<Outcome, CliError> {
    let diags = validate(cfg);
    if !diags.is_empty() {
        return Err(CliError::Invalid(diags));
    }
    let mut sink = output::Sink::new(out, cfg.subcommand.name(), &cfg.canonical)?;
    let ctx = commands::Context { cfg, verbose };
    let flagged = match cfg.subcommand {
        Subcommand::Eigen => commands::eigen(&ctx, &mut sink),
        Subcommand::Isometry => commands::isometry(&ctx, &mut sink),
        Subcommand::Sobolev => commands::sobolev(&ctx, &mut sink),
        Subcommand::Rates => commands::rates(&ctx, &mut sink),
        Subcommand::Fiber => commands::fiber(&ctx, &mut sink),
        Subcommand::Solve => commands::solve(&ctx, &mut sink),
        Subcommand::Multiplicity => commands::multiplicity(&ctx, &mut sink),
    }?;
    Ok(Outcome { status: if flagged { Status::Partial } else { Status::Ok }, files: sink.written })
}

/// Usage text listing the subcommands.
pub fn usage() -> String {
    let names: Vec<&str> = Subcommand::ALL.iter().map(|c| c.name()).collect();
    format!(
        "usage: mixfrac <SUBCOMMAND> --config <path> [--out <dir>] [--threads <n>] [--verbose]\nsubcommands: {}",
        names.join(", ")
    )
}
