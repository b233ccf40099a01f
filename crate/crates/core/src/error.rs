use std::path::PathBuf;

use thiserror::Error;

/// Every fallible operation in the crate reports through this enum.
#[derive(Debug, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("configuration error at line {line}: {msg}")]
    ConfigLine { line: usize, msg: String },

    #[error("configuration error: {0}")]
    Config(String),

    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error("negative density {rho:e} at cell ({i}, {j}), t = {t}")]
    NegativeDensity { i: usize, j: usize, t: f64, rho: f64 },

    #[error("degenerate foliation: |grad u| = {grad:e} at cell ({i}, {j})")]
    DegenerateFoliation { i: usize, j: usize, grad: f64 },

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("hypothesis violated at lattice point (t = {t}, u = {u}): lhs {lhs:e} > rhs {rhs:e}")]
    Hypothesis { t: f64, u: f64, lhs: f64, rhs: f64 },

    #[error("grid mismatch: {0}")]
    GridMismatch(String),

    #[error("contour u = {level} leaves the grid at t = {t}")]
    ContourLeavesGrid { level: f64, t: f64 },

    #[error("bad snapshot file {path}: {msg}")]
    Format { path: PathBuf, msg: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    /// Configuration-class errors map to CLI exit code 2.
    pub fn is_config(&self) -> bool {
        matches!(self, Error::ConfigLine { .. } | Error::Config(_))
    }
}

pub type Result<T> = std::result::Result<T, Error>;
