//! Experiment driver: configuration files, named presets, seeded Monte
//! Carlo execution with worker-count-independent results, and CSV/JSON
//! emission.

pub mod experiment;
pub mod output;
pub mod run;

pub use experiment::{
    ExperimentKind, ExperimentSpec, MonteCarlo, ScenarioSettings, Sweep, SweepAxis,
};
pub use output::{ResultRow, ResultTable};
pub use run::{
    run_ber_experiment, run_bound_validation, run_crb_table, run_rate_table,
    run_rmse_experiment, RunOptions,
};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("numerical failure: {0}")]
    Numerical(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl HarnessError {
    /// Process exit code contract: 2 for configuration problems, 3 for
    /// numerical failures.
    pub fn exit_code(&self) -> i32 {
        match self {
            HarnessError::Config(_) | HarnessError::Io(_) => 2,
            HarnessError::Numerical(_) => 3,
        }
    }
}
