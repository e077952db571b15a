use thiserror::Error;

use crate::engine::Trace;

#[derive(Debug, Error)]
pub enum Error {
    #[error("configuration error: {0}")]
    Config(String),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    Dimension { expected: usize, got: usize },

    #[error("invalid parameter: {0}")]
    Parameter(String),

    #[error("no convergence after {steps} steps (residual {residual:e})")]
    Convergence { steps: usize, residual: f64 },

    #[error("estimation error: {0}")]
    Estimation(String),

    #[error("non-finite iterate at iteration {iteration}")]
    NonFinite { iteration: usize },

    /// A run stopped early; the trace holds every row recorded before the
    /// failure.
    #[error("run aborted at iteration {}: {source}", trace.rows.last().map_or(0, |r| r.k))]
    Aborted {
        trace: Box<Trace>,
        #[source]
        source: Box<Error>,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn check_positive(name: &str, value: f64) -> Result<()> {
    if value > 0.0 && value.is_finite() {
        Ok(())
    } else {
        Err(Error::Parameter(format!("{name} must be positive and finite, got {value}")))
    }
}

pub(crate) fn check_dim(expected: usize, got: usize) -> Result<()> {
    if expected == got {
        Ok(())
    } else {
        Err(Error::Dimension { expected, got })
    }
}
