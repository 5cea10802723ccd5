//! Command-line front end for `invariant-curvature`: run configurations,
//! reproducible check suites and JSON/CSV reports.

pub mod args;
pub mod config;
pub mod report;
pub mod run;
pub mod source;
pub mod suites;

pub use config::{RunConfig, Source, Task};
pub use report::{ResidualRow, RunReport, SCHEMA_VERSION};
pub use run::run;

use invariant_curvature::CurvatureError;
use thiserror::Error;

/// Everything that maps to exit code 2.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Invalid(String),
    #[error(transparent)]
    Curvature(#[from] CurvatureError),
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("malformed JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("CSV output failed: {0}")]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, CliError>;

pub(crate) fn invalid(msg: impl Into<String>) -> CliError {
    CliError::Invalid(msg.into())
}
