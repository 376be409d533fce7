use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}, line {line}: {msg}")]
    Parse { path: PathBuf, line: u64, msg: String },

    #[error("gold-standard column {0} not found")]
    MissingGold(String),

    #[error("column {0} is not numeric")]
    NonNumericColumn(String),

    #[error("need at least {needed} complete rows, found {found}")]
    TooFewRows { needed: usize, found: usize },

    #[error("no usable score columns besides the gold standard")]
    NoScoreColumns,

    #[error("column {0} has zero variance")]
    ZeroVariance(String),

    #[error("length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },

    #[error("non-finite value in {0}")]
    NonFinite(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("both label classes are required")]
    SingleClass,

    #[error("H^T H is ill-conditioned (condition number {condition:.3e}); use the LARS path instead")]
    IllConditioned { condition: f64 },

    #[error("{dropped} of {total} bootstrap replicates failed")]
    BootstrapFailures { dropped: usize, total: usize },

    #[error("degenerate test: variance is zero")]
    DegenerateTest,
}
