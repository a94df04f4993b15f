use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("cannot build a reflector from a zero vector")]
    ZeroVector,

    #[error("reflector dimension must be at least 2, got {0}")]
    DimensionTooSmall(usize),

    #[error("invalid sparse model: {0}")]
    InvalidModel(String),

    #[error("no Householder vector reached |sum(u)| >= {required} in {attempts} attempts (best {best_abs_c})")]
    RetryBudgetExhausted {
        required: f64,
        attempts: usize,
        best_abs_c: f64,
    },

    #[error("ill-conditioned estimate{}: {reason}", step.map(|s| format!(" at step {s}")).unwrap_or_default())]
    IllConditioned { reason: String, step: Option<usize> },

    #[error("singular input: {0}")]
    SingularInput(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{}: {source}", path.display())]
    Csv {
        path: PathBuf,
        #[source]
        source: csv::Error,
    },
}

impl Error {
    pub(crate) fn ill_conditioned(reason: impl Into<String>) -> Self {
        Error::IllConditioned {
            reason: reason.into(),
            step: None,
        }
    }

    /// Attaches the sequential-recovery step index to an ill-conditioning error.
    pub(crate) fn at_step(self, i: usize) -> Self {
        match self {
            Error::IllConditioned { reason, .. } => Error::IllConditioned {
                reason,
                step: Some(i),
            },
            other => other,
        }
    }
}

pub(crate) fn check_dim(expected: usize, found: usize) -> Result<()> {
    if expected == found {
        Ok(())
    } else {
        Err(Error::DimensionMismatch { expected, found })
    }
}
