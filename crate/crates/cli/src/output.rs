//! Deterministic CSV tables and coefficient dumps.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use sha2::{Digest, Sha256};

use mixfrac_core::spectral::{EigenBasis, FractionalParams, SpectralField};

use crate::config::face_name;
use crate::error::CliError;

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// First 16 hex digits of the SHA-256 of the canonical config.
pub fn config_hash(canonical: &str) -> String {
    let digest = Sha256::digest(canonical.as_bytes());
    digest.iter().take(8).fold(String::new(), |mut s, b| {
        let _ = write!(s, "{b:02x}");
        s
    })
}

/// One table cell.
pub enum Cell {
    F(f64),
    I(i64),
    S(String),
}

impl Cell {
    fn render(&self) -> String {
        match self {
            Cell::F(v) => format!("{v:e}"),
            Cell::I(v) => v.to_string(),
            Cell::S(v) => v.clone(),
        }
    }
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::F(v)
    }
}

impl From<usize> for Cell {
    fn from(v: usize) -> Self {
        Cell::I(v as i64)
    }
}

impl From<i64> for Cell {
    fn from(v: i64) -> Self {
        Cell::I(v)
    }
}

impl From<&str> for Cell {
    fn from(v: &str) -> Self {
        Cell::S(v.to_string())
    }
}

impl From<String> for Cell {
    fn from(v: String) -> Self {
        Cell::S(v)
    }
}

impl From<bool> for Cell {
    fn from(v: bool) -> Self {
        Cell::S(v.to_string())
    }
}

/// Builds `vec![Cell, ...]` from mixed values.
#[macro_export]
macro_rules! row {
    ($($x:expr),* $(,)?) => { vec![$($crate::output::Cell::from($x)),*] };
}

pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new<S: Into<String>>(header: impl IntoIterator<Item = S>) -> Self {
        Self { header: header.into_iter().map(Into::into).collect(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn render(&self, provenance: &str) -> String {
        let mut out = format!("# {provenance}\n{}\n", self.header.join(","));
        for r in &self.rows {
            out.push_str(&r.iter().map(Cell::render).collect::<Vec<_>>().join(","));
            out.push('\n');
        }
        out
    }
}

/// Collects files in one output directory, one writer per file.
pub struct Sink {
    pub dir: PathBuf,
    pub provenance: String,
    pub written: Vec<PathBuf>,
}

impl Sink {
    pub fn new(dir: &Path, subcommand: &str, canonical: &str) -> Result<Self, CliError> {
        fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
        Ok(Self {
            dir: dir.to_path_buf(),
            provenance: format!("mixfrac {VERSION} {subcommand} config={}", config_hash(canonical)),
            written: Vec::new(),
        })
    }

    pub fn table(&mut self, name: &str, t: &Table) -> Result<(), CliError> {
        self.text(name, &t.render(&self.provenance))
    }

    fn text(&mut self, name: &str, body: &str) -> Result<(), CliError> {
        let path = self.dir.join(name);
        fs::write(&path, body).map_err(|e| CliError::io(&path, e))?;
        self.written.push(path);
        Ok(())
    }

    /// Coefficients one per line, after a header describing the basis.
    pub fn coefficients(
        &mut self,
        name: &str,
        field: &SpectralField,
        basis: &EigenBasis,
        frac: &FractionalParams,
    ) -> Result<(), CliError> {
        let d = basis.domain();
        let lengths: Vec<String> = d.lengths().iter().map(|l| format!("{l:e}")).collect();
        let dir: Vec<String> = d.dirichlet_faces().into_iter().map(face_name).collect();
        let mut out = format!("# {}\n", self.provenance);
        out.push_str(&format!(
            "# basis dim={} lengths={} dirichlet={} modes_per_axis={} quad_points={} s={:e} order=ascending-eigenvalue count={}\n",
            d.dim(),
            lengths.join(","),
            dir.join(","),
            basis.modes_per_axis(),
            basis.quad_points_per_axis(),
            frac.s,
            field.len()
        ));
        for c in &field.coeffs {
            out.push_str(&format!("{c:e}\n"));
        }
        self.text(name, &out)
    }
}

/// Reads a coefficient dump back.
pub fn read_coefficients(text: &str) -> Result<SpectralField, CliError> {
    let coeffs = text
        .lines()
        .filter(|l| !l.starts_with('#') && !l.trim().is_empty())
        .enumerate()
        .map(|(i, l)| {
            l.trim().parse::<f64>().map_err(|_| CliError::Config {
                line: i + 1,
                key: "coefficient".into(),
                message: format!("`{l}` is not a number"),
            })
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(SpectralField::new(coeffs)?)
}
