//! Crate-wide error type.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("invalid input: {0}")]
    Config(String),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    Dimension { expected: usize, got: usize },

    #[error("unknown node: {0}")]
    UnknownNode(String),

    #[error("node index {0} out of range (n = {1})")]
    NodeOutOfRange(usize, usize),

    #[error("eigensolver did not converge after {iterations} matvecs (worst residual {residual:e}){}", cluster.map(|c| format!(" in cluster {c}")).unwrap_or_default())]
    EigNonConvergence {
        iterations: usize,
        residual: f64,
        cluster: Option<usize>,
    },

    #[error("iteration did not converge: {what} (residual {residual:e})")]
    NonConvergence { what: String, residual: f64 },

    #[error("beta {beta} too large: spectral estimate {spectral_norm} requires beta < {}", 1.0 / spectral_norm)]
    BetaTooLarge { beta: f64, spectral_norm: f64 },

    #[error("matrix numerically singular (condition estimate {cond:e}); try a smaller beta")]
    IllConditioned { cond: f64 },

    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error("bad file format: {0}")]
    Format(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// True for errors caused by invalid configuration or inputs, as
    /// opposed to numerical breakdown at runtime.
    pub fn is_config(&self) -> bool {
        matches!(
            self,
            Error::Parse { .. }
                | Error::Config(_)
                | Error::Dimension { .. }
                | Error::UnknownNode(_)
                | Error::NodeOutOfRange(..)
        )
    }
}
