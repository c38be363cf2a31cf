use std::path::PathBuf;

use thiserror::Error;

use crate::validate::Diagnostic;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("config line {line}: {key}: {message}")]
    Config { line: usize, key: String, message: String },
    #[error("{0}")]
    Usage(String),
    #[error("invalid configuration:\n{}", render(.0))]
    Invalid(Vec<Diagnostic>),
    #[error(transparent)]
    Core(#[from] mixfrac_core::Error),
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
}

fn render(d: &[Diagnostic]) -> String {
    d.iter().map(|x| format!("  {x}")).collect::<Vec<_>>().join("\n")
}

impl CliError {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        CliError::Io { path: path.into(), source }
    }
}
