use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("invalid parameters: {0}")]
    Params(String),

    #[error("truncation tolerance {tol:e} unattainable with n_max = {n_max}: tail mass {tail:e}")]
    Truncation { tol: f64, n_max: usize, tail: f64 },

    #[error("grid too coarse: norm {norm} deviates from 1 by more than {limit:e}")]
    GridNorm { norm: f64, limit: f64 },

    #[error("fields sampled on different grids")]
    GridMismatch,

    #[error("config line {line}: {msg}")]
    Config { line: usize, msg: String },

    #[error("numeric check failed: {0}")]
    Numeric(String),

    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn config(line: usize, msg: impl Into<String>) -> Self {
        Error::Config {
            line,
            msg: msg.into(),
        }
    }

    /// Process exit code for the CLI: 1 config, 2 numeric, 3 I/O.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Config { .. } | Error::Params(_) | Error::Domain(_) => 1,
            Error::Io { .. } => 3,
            _ => 2,
        }
    }
}
