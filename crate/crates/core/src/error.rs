use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid X-state parameters: {0}")]
    InvalidParams(String),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    Dimension { expected: usize, found: usize },

    #[error("matrix is not Hermitian (max deviation {0:.3e})")]
    NotHermitian(f64),

    #[error("trace deviates from 1 by {0:.3e}")]
    Trace(f64),

    #[error("negative eigenvalue {0:.3e} below the PSD tolerance")]
    NotPositive(f64),

    #[error("channel strength {0} outside [0, 1]")]
    Strength(f64),

    #[error("channel is not trace preserving (max deviation of sum K^dag K from I: {0:.3e})")]
    NotTracePreserving(f64),

    #[error("projective basis is incomplete or not orthogonal (deviation {0:.3e})")]
    IncompleteBasis(f64),

    #[error("coefficients are not normalized (sum |c_i|^2 = {0})")]
    Normalization(f64),

    #[error("overlap matrix is invalid: {0}")]
    Overlap(String),

    #[error("measurement outcome {0} out of range")]
    Outcome(usize),

    #[error("optimizer failure: discord {0:.3e} below tolerance")]
    OptimizerFailure(f64),

    #[error("unknown channel family `{0}` (expected pd, ad or pointer[:theta,phi])")]
    UnknownChannel(String),

    #[error("invalid state spec `{0}`")]
    UnknownState(String),

    #[error("invalid p-grid: {0}")]
    Grid(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("{path}:{line}: {msg}")]
    Parse {
        path: PathBuf,
        line: usize,
        msg: String,
    },

    #[error("data quality: physical projection moved entries by {0:.4} (limit 0.05)")]
    DataQuality(f64),

    #[error("matrix file carries no uncertainties; Monte Carlo needs them")]
    MissingUncertainties,

    #[error("verification suite `{suite}` failed: {failures} of {trials} trials")]
    Verification {
        suite: String,
        trials: usize,
        failures: usize,
    },

    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// Process exit code for the CLI: 1 invalid input, 2 data quality, 3 verification failure.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::DataQuality(_) => 2,
            Error::Verification { .. } => 3,
            _ => 1,
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
