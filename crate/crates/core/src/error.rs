use std::io;

use thiserror::Error;

/// Errors raised anywhere in the laboratory.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    Parameter(String),

    #[error("shape mismatch: {0}")]
    Shape(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error("out of range: {0}")]
    Range(String),

    #[error("symbol is not finite at wavevector {wavevector:?}")]
    Evaluation { wavevector: Vec<f64> },

    #[error("hypothesis validation failed: {}", .0.join("; "))]
    Validation(Vec<String>),

    #[error("exponent consistency violated: {0}")]
    Consistency(String),

    #[error("picard iteration did not converge in {iterations} iterations (last update {last:e})")]
    Divergence {
        iterations: usize,
        last: f64,
        updates: Vec<f64>,
    },

    #[error("numerical blow-up: non-finite value at node {node} (t = {time:e})")]
    Blowup { node: usize, time: f64 },

    #[error("smallness gate failed: {0}")]
    Gate(String),

    #[error("malformed field file: {0}")]
    Format(String),

    #[error(transparent)]
    Io(#[from] io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
