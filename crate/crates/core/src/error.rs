use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// An argument outside the mathematical domain of an operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// A problem too large for the dense representations used here.
    #[error("resource limit exceeded: {0}")]
    Resource(String),

    /// Factorization failure, PSD violation and similar.
    #[error("numerical failure: {0}")]
    Numerical(String),

    /// The worst-case distribution solver could not produce a feasible point.
    #[error("inner solver failure: {message} (iterate: {iterate:?})")]
    Solver { message: String, iterate: Vec<f64> },

    /// A self-check on a computed quantity failed.
    #[error("internal consistency error: {0}")]
    Internal(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("i/o error at {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("serialization error: {0}")]
    Serialization(String),

    /// The optimizer stopped early; `partial` holds the iterations completed.
    #[error("optimizer aborted after {} iterations: {source}", partial.records.len())]
    Aborted {
        #[source]
        source: Box<Error>,
        partial: Box<crate::optim::OptimizationTrace>,
    },
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// True for failures that originate in floating-point linear algebra or
    /// the inner solver rather than in user input.
    pub fn is_numerical(&self) -> bool {
        match self {
            Error::Numerical(_) | Error::Solver { .. } | Error::Internal(_) => true,
            Error::Aborted { source, .. } => source.is_numerical(),
            _ => false,
        }
    }
}
