//! Runs the traplab experiments and writes their reports.

pub mod check;
pub mod config;
pub mod experiments;
pub mod report;
pub mod scan;

use thiserror::Error;

pub use config::{Experiment, ExperimentConfig};
pub use experiments::run;
pub use report::Report;

/// Environment variable holding the worker-thread count.
pub const WORKERS_ENV: &str = "TRAPLAB_WORKERS";

#[derive(Debug, Error)]
pub enum RunError {
    #[error(transparent)]
    Config(#[from] config::ConfigError),
    #[error(transparent)]
    Numerics(#[from] traplab_core::Error),
    #[error("i/o: {0}")]
    Io(#[from] std::io::Error),
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

pub const EXIT_OK: i32 = 0;
pub const EXIT_CONFIG: i32 = 1;
pub const EXIT_NUMERICAL: i32 = 2;
pub const EXIT_CHECK: i32 = 3;

impl RunError {
    pub fn exit_code(&self) -> i32 {
        match self {
            RunError::Config(_) => EXIT_CONFIG,
            RunError::Numerics(e) if !e.is_numerical() => EXIT_CONFIG,
            _ => EXIT_NUMERICAL,
        }
    }
}
