//! Seeded experiment runner.
//!
//! An [`ExperimentConfig`] (TOML) names a dataset or synthetic problem, a
//! model, an optimizer and a seed list. [`run_experiment`] trains once per
//! seed and returns one [`RunRecord`] per seed; [`write_outputs`] writes the
//! per-run metrics CSVs, the merged `metrics.csv`, the resolved config and a
//! summary table.
//!
//! Metrics CSV schema, LF line endings, values in `%.17g`:
//!
//! ```text
//! run_id,optimizer,dataset,seed,epoch,split,metric,value
//! boston-tom-s0,tom,boston,0,1,train,mse,1.3647808600702833
//! ```
//!
//! Runs that hit a non-finite loss stop, keep the rows recorded so far, and
//! set [`RunRecord::diverged_at`].

mod config;
mod gradcheck;
mod metrics;
mod run;
mod suite;
mod summary;

use std::fs;
use std::path::Path;

use thiserror::Error;

pub use config::{
    prepare, BatchSize, CsvSource, DatasetSource, ExperimentConfig, ModelSpec, OptimizerSpec, Prepared,
    ProblemSpec, Task,
};
pub use gradcheck::{gradcheck_suite, GradCheckCase, GRADCHECK_FLOOR, GRADCHECK_STEP, GRADCHECK_TOLERANCE};
pub use metrics::{format_g17, metrics_csv, write_metrics, CSV_HEADER};
pub use run::{descend, initial_point, run_experiment, run_id, run_prepared, Metric, MetricRow, RunRecord, Split};
pub use suite::{compare_suite, optimizer_labels, SuiteReport};
pub use summary::{
    default_epochs, mean_std, summarize, Summary, SummaryRow, CLASSIFICATION_EPOCHS, REGRESSION_EPOCHS,
};

use crate::data::DataError;
use crate::model::ModelError;
use crate::optim::OptimError;

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("config error: {0}")]
    Config(String),
    #[error("data error: {0}")]
    Data(#[from] DataError),
    #[error("model error: {0}")]
    Model(#[from] ModelError),
    #[error("optimizer error: {0}")]
    Optim(#[from] OptimError),
    #[error("I/O error: {0}")]
    Io(#[from] std::io::Error),
    #[error("divergence detected in {}", .runs.join(", "))]
    DivergenceDetected { runs: Vec<String> },
    #[error("nothing to summarize")]
    EmptyInput,
}

impl HarnessError {
    /// 1 usage/config, 2 data, 3 divergence.
    pub fn exit_code(&self) -> i32 {
        match self {
            HarnessError::Config(_) | HarnessError::Model(_) | HarnessError::Optim(_) | HarnessError::EmptyInput => 1,
            HarnessError::Data(_) | HarnessError::Io(_) => 2,
            HarnessError::DivergenceDetected { .. } => 3,
        }
    }
}

/// `Err(DivergenceDetected)` naming every diverged run, if any.
pub fn check_divergence(records: &[RunRecord]) -> Result<(), HarnessError> {
    let runs: Vec<String> = records
        .iter()
        .filter(|r| r.diverged_at.is_some())
        .map(|r| r.run_id.clone())
        .collect();
    if runs.is_empty() {
        Ok(())
    } else {
        Err(HarnessError::DivergenceDetected { runs })
    }
}

/// Write `<run_id>.csv` per run, `metrics.csv` with every run, `config.toml`
/// (when given) and `summary.txt`.
pub fn write_outputs(
    dir: &Path,
    resolved: Option<&str>,
    records: &[RunRecord],
    summary: &Summary,
) -> Result<(), HarnessError> {
    fs::create_dir_all(dir)?;
    for r in records {
        fs::write(dir.join(format!("{}.csv", r.run_id)), metrics_csv(std::slice::from_ref(r)))?;
    }
    fs::write(dir.join("metrics.csv"), metrics_csv(records))?;
    if let Some(text) = resolved {
        fs::write(dir.join("config.toml"), text)?;
    }
    fs::write(dir.join("summary.txt"), summary.render())?;
    Ok(())
}
