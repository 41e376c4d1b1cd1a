use std::fmt;
use std::fs::File;
use std::path::Path;

use qft_core::constants::{DEFAULT_SYM_TOL, KAPPA, SLICING_CONST};
use qft_core::linalg::{read_matrix_csv, SymmetricMatrix};

use crate::output::{Config, Table};
use crate::Format;

pub mod bound;
pub mod compare;
pub mod regression;
pub mod tail;
pub mod verify;

#[derive(Debug)]
pub enum CliError {
    /// Bad flags, unreadable files, malformed input.
    Config(String),
    /// A bound's standing assumption fails for the requested parameters.
    Domain(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) => 2,
            CliError::Domain(_) => 3,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Config(m) | CliError::Domain(m) => f.write_str(m),
        }
    }
}

impl From<qft_core::Error> for CliError {
    fn from(e: qft_core::Error) -> Self {
        if e.is_domain() {
            CliError::Domain(e.to_string())
        } else {
            CliError::Config(e.to_string())
        }
    }
}

pub struct Outcome {
    pub text: String,
    pub violated: bool,
}

impl Outcome {
    pub fn table(t: &Table, format: Option<Format>) -> Self {
        let text = match format.unwrap_or(Format::Csv) {
            Format::Csv => t.to_csv(),
            Format::Json => t.to_json(),
        };
        Self { text, violated: false }
    }
}

pub fn read_matrix(path: &Path, tol: f64) -> Result<SymmetricMatrix, CliError> {
    let file = File::open(path).map_err(|e| CliError::Config(format!("cannot open {}: {e}", path.display())))?;
    read_matrix_csv(file, tol).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
}

pub fn require_list(name: &str, values: &[f64]) -> Result<(), CliError> {
    if values.is_empty() {
        return Err(CliError::Config(format!("--{name} needs at least one value")));
    }
    if let Some(v) = values.iter().find(|v| !v.is_finite()) {
        return Err(CliError::Config(format!("--{name} values must be finite, got {v}")));
    }
    Ok(())
}

/// Header entries shared by every command.
pub fn base_config(command: &str, format: Option<Format>, default: Format, seed: u64) -> Config {
    let mut c = Config::default();
    c.push("command", command)
        .push("format", format.unwrap_or(default).as_str())
        .push("seed", seed)
        .push("kappa", KAPPA)
        .push("slicing_const", SLICING_CONST);
    c
}

pub fn default_sym_tol() -> f64 {
    DEFAULT_SYM_TOL
}
