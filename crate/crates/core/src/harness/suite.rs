use rayon::prelude::*;

use super::config::{prepare, ExperimentConfig};
use super::run::{run_prepared, RunRecord};
use super::summary::{default_epochs, summarize, Summary};
use super::HarnessError;
use crate::optim::OptimizerConfig;

#[derive(Debug, Clone)]
pub struct SuiteReport {
    pub records: Vec<RunRecord>,
    /// Mean ± std at the default epoch columns.
    pub summary: Summary,
    /// Mean ± std at the final epoch only.
    pub final_epoch: Summary,
}

/// Labels for an optimizer list: the kind name, suffixed `-2`, `-3`, ...
/// when a kind repeats.
pub fn optimizer_labels(optimizers: &[OptimizerConfig]) -> Vec<String> {
    optimizers
        .iter()
        .enumerate()
        .map(|(i, c)| {
            let seen = optimizers[..i].iter().filter(|o| o.kind == c.kind).count();
            if seen == 0 {
                c.kind.name().to_owned()
            } else {
                format!("{}-{}", c.kind.name(), seen + 1)
            }
        })
        .collect()
}

/// Every problem crossed with every optimizer, each over `seeds`. The
/// optimizer and seed list of each problem config are replaced.
pub fn compare_suite(
    problems: &[ExperimentConfig],
    optimizers: &[OptimizerConfig],
    seeds: &[u64],
) -> Result<SuiteReport, HarnessError> {
    if problems.is_empty() || optimizers.is_empty() || seeds.is_empty() {
        return Err(HarnessError::EmptyInput);
    }
    let labels = optimizer_labels(optimizers);
    let jobs: Vec<(ExperimentConfig, &str)> = problems
        .iter()
        .flat_map(|p| {
            optimizers.iter().zip(&labels).map(move |(o, label)| {
                let config = ExperimentConfig {
                    optimizer: (*o).into(),
                    seeds: seeds.to_vec(),
                    ..p.clone()
                };
                (config, label.as_str())
            })
        })
        .collect();
    let runs: Vec<Vec<RunRecord>> = jobs
        .par_iter()
        .map(|(config, label)| run_prepared(&prepare(config)?, label))
        .collect::<Result<_, _>>()?;
    let records: Vec<RunRecord> = runs.into_iter().flatten().collect();
    let summary = summarize(&records, &default_epochs(&records))?;
    let last = records.iter().map(RunRecord::last_epoch).max().unwrap_or(0);
    let final_epoch = summarize(&records, &[last])?;
    Ok(SuiteReport { records, summary, final_epoch })
}
