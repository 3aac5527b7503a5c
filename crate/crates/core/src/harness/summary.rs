use std::collections::BTreeMap;
use std::fmt::Write as _;

use super::run::{Metric, RunRecord, Split};
use super::HarnessError;

pub const REGRESSION_EPOCHS: [usize; 4] = [50, 100, 150, 200];
pub const CLASSIFICATION_EPOCHS: [usize; 4] = [10, 30, 75, 100];

#[derive(Debug, Clone, PartialEq)]
pub struct SummaryRow {
    pub dataset: String,
    pub optimizer: String,
    pub split: Split,
    pub metric: Metric,
    pub epoch: usize,
    pub mean: f64,
    /// Sample standard deviation; 0 when `n == 1`.
    pub std: f64,
    pub n: usize,
    /// Best mean among optimizers for this (dataset, split, metric, epoch).
    pub best: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Summary {
    pub epochs: Vec<usize>,
    pub rows: Vec<SummaryRow>,
}

/// Sample mean and standard deviation with the `n − 1` denominator.
pub fn mean_std(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    if values.len() < 2 {
        return (mean, 0.0);
    }
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, var.sqrt())
}

/// The epoch columns used when none are requested: the regression or
/// classification set, clipped to the epochs run, with the final epoch always
/// present.
pub fn default_epochs(records: &[RunRecord]) -> Vec<usize> {
    let last = records.iter().map(RunRecord::last_epoch).max().unwrap_or(0);
    let regression = records.iter().any(|r| r.rows.iter().any(|row| row.metric == Metric::Mse));
    let base: &[usize] = if regression { &REGRESSION_EPOCHS } else { &CLASSIFICATION_EPOCHS };
    let mut epochs: Vec<usize> = base.iter().copied().filter(|&e| e <= last).collect();
    if last > 0 && !epochs.contains(&last) {
        epochs.push(last);
    }
    epochs
}

pub fn summarize(records: &[RunRecord], epochs: &[usize]) -> Result<Summary, HarnessError> {
    if records.is_empty() {
        return Err(HarnessError::EmptyInput);
    }
    type Key = (String, Split, Metric, usize, String);
    let mut cells: BTreeMap<Key, Vec<f64>> = BTreeMap::new();
    let mut optimizer_order: Vec<String> = Vec::new();
    for r in records {
        if !optimizer_order.contains(&r.optimizer) {
            optimizer_order.push(r.optimizer.clone());
        }
        for row in r.rows.iter().filter(|row| epochs.contains(&row.epoch)) {
            cells
                .entry((r.dataset.clone(), row.split, row.metric, row.epoch, r.optimizer.clone()))
                .or_default()
                .push(row.value);
        }
    }
    let mut rows: Vec<SummaryRow> = cells
        .into_iter()
        .map(|((dataset, split, metric, epoch, optimizer), values)| {
            let (mean, std) = mean_std(&values);
            SummaryRow { dataset, optimizer, split, metric, epoch, mean, std, n: values.len(), best: false }
        })
        .collect();
    // keep optimizers in the order the records listed them
    rows.sort_by_key(|r| {
        let rank = optimizer_order.iter().position(|o| *o == r.optimizer).unwrap_or(usize::MAX);
        (r.dataset.clone(), r.split, r.metric, r.epoch, rank)
    });
    for group in rows.chunk_by_mut(|a, b| (&a.dataset, a.split, a.metric, a.epoch) == (&b.dataset, b.split, b.metric, b.epoch)) {
        let higher = group[0].metric.higher_is_better();
        let best = group
            .iter()
            .map(|r| r.mean)
            .fold(if higher { f64::NEG_INFINITY } else { f64::INFINITY }, |acc, m| {
                if higher { acc.max(m) } else { acc.min(m) }
            });
        for r in group.iter_mut() {
            r.best = r.mean == best;
        }
    }
    Ok(Summary { epochs: epochs.to_vec(), rows })
}

impl Summary {
    pub fn get(&self, dataset: &str, optimizer: &str, split: Split, metric: Metric, epoch: usize) -> Option<&SummaryRow> {
        self.rows.iter().find(|r| {
            r.dataset == dataset && r.optimizer == optimizer && r.split == split && r.metric == metric && r.epoch == epoch
        })
    }

    /// One block per (dataset, split, metric); rows are optimizers, columns
    /// epochs. `*` marks the best cell, `(n=k)` appears when seeds are missing
    /// or there is only one.
    pub fn render(&self) -> String {
        let mut out = String::new();
        let mut blocks: Vec<(String, Split, Metric)> = Vec::new();
        for r in &self.rows {
            let key = (r.dataset.clone(), r.split, r.metric);
            if !blocks.contains(&key) {
                blocks.push(key);
            }
        }
        let full_n = self.rows.iter().map(|r| r.n).max().unwrap_or(0);
        for (dataset, split, metric) in blocks {
            let _ = writeln!(out, "{dataset} / {} / {}", split.name(), metric.name());
            let _ = write!(out, "{:<10}", "optimizer");
            for e in &self.epochs {
                let _ = write!(out, " {:>24}", format!("epoch {e}"));
            }
            out.push('\n');
            let mut optimizers: Vec<&str> = Vec::new();
            for r in self.rows.iter().filter(|r| r.dataset == dataset && r.split == split && r.metric == metric) {
                if !optimizers.contains(&r.optimizer.as_str()) {
                    optimizers.push(&r.optimizer);
                }
            }
            for opt in optimizers {
                let _ = write!(out, "{opt:<10}");
                for &e in &self.epochs {
                    let cell = match self.get(&dataset, opt, split, metric, e) {
                        Some(r) => {
                            let std = if r.n == 1 { "0.00".to_owned() } else { format!("{:.4}", r.std) };
                            let mut s = format!("{:.4}±{std}", r.mean);
                            if r.n == 1 || r.n < full_n {
                                let _ = write!(s, " (n={})", r.n);
                            }
                            if r.best {
                                s.push('*');
                            }
                            s
                        }
                        None => "-".into(),
                    };
                    let _ = write!(out, " {cell:>24}");
                }
                out.push('\n');
            }
            out.push('\n');
        }
        out
    }
}
