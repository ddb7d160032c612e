use std::io;
use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    /// Input outside the domain where a formula is defined.
    #[error("domain error: {0}")]
    Domain(String),

    /// Adaptive refinement ran out of panels before meeting the target.
    /// The best value and its honest error estimate are kept.
    #[error(
        "quadrature budget exhausted after {subdivisions} panels: value {value:e}, error estimate {error_estimate:e}"
    )]
    BudgetExhausted {
        value: f64,
        error_estimate: f64,
        subdivisions: usize,
    },

    #[error("non-integrable singularity: {0}")]
    NonIntegrable(String),

    #[error("dimension reduction not applicable: {0}")]
    DimensionReduction(String),

    #[error("{kind} hypothesis violated: {predicate}")]
    Hypothesis { kind: String, predicate: String },

    #[error("test function support [{lo}, {hi}] is not inside (0, {limit})")]
    Support { lo: f64, hi: f64, limit: f64 },

    #[error("no sign change: {0}")]
    NoSignChange(String),

    #[error("schema mismatch: {0}")]
    SchemaMismatch(String),

    #[error("precondition failed: {0}")]
    Precondition(String),

    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: io::Error,
    },

    #[error("parse error: {0}")]
    Parse(String),
}

impl Error {
    pub(crate) fn hypothesis(kind: impl Into<String>, predicate: impl Into<String>) -> Self {
        Error::Hypothesis {
            kind: kind.into(),
            predicate: predicate.into(),
        }
    }

    /// True for errors that signal the caller asked for something outside a
    /// theorem's hypotheses (as opposed to a numerical failure).
    pub fn is_hypothesis_violation(&self) -> bool {
        matches!(
            self,
            Error::Hypothesis { .. } | Error::Support { .. } | Error::InvalidParams(_)
        )
    }
}
