use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;

use super::config::{prepare, BatchSize, ExperimentConfig, Prepared, Task};
use super::HarnessError;
use crate::data::{split_normalize, Dataset, Objective, SyntheticProblem};
use crate::model::{self, Batch, LossKind, Model, Targets};
use crate::optim::{Optimizer, OptimizerConfig};
use crate::vector::RealVector;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Split {
    Train,
    Test,
}

impl Split {
    pub fn name(self) -> &'static str {
        match self {
            Split::Train => "train",
            Split::Test => "test",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Metric {
    Mse,
    Loss,
    Accuracy,
}

impl Metric {
    pub fn name(self) -> &'static str {
        match self {
            Metric::Mse => "mse",
            Metric::Loss => "loss",
            Metric::Accuracy => "accuracy",
        }
    }

    pub fn higher_is_better(self) -> bool {
        matches!(self, Metric::Accuracy)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MetricRow {
    pub epoch: usize,
    pub split: Split,
    pub metric: Metric,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunRecord {
    pub run_id: String,
    pub optimizer: String,
    pub dataset: String,
    pub seed: u64,
    pub rows: Vec<MetricRow>,
    /// First epoch whose loss or parameters went non-finite. Rows stop at the
    /// epoch before it.
    pub diverged_at: Option<usize>,
    pub final_params: RealVector,
}

impl RunRecord {
    pub fn value(&self, epoch: usize, split: Split, metric: Metric) -> Option<f64> {
        self.rows
            .iter()
            .find(|r| r.epoch == epoch && r.split == split && r.metric == metric)
            .map(|r| r.value)
    }

    pub fn last_epoch(&self) -> usize {
        self.rows.last().map_or(0, |r| r.epoch)
    }

    /// Values of one (split, metric) series in epoch order.
    pub fn curve(&self, split: Split, metric: Metric) -> Vec<f64> {
        self.rows
            .iter()
            .filter(|r| r.split == split && r.metric == metric)
            .map(|r| r.value)
            .collect()
    }
}

pub fn run_id(dataset: &str, optimizer: &str, seed: u64) -> String {
    format!("{dataset}-{optimizer}-s{seed}")
}

/// Train once per configured seed. Seeds run in parallel; the result is in
/// seed order and each run is a pure function of (config, seed).
pub fn run_experiment(config: &ExperimentConfig) -> Result<Vec<RunRecord>, HarnessError> {
    let prepared = prepare(config)?;
    let label = prepared.optimizer.kind.name();
    run_prepared(&prepared, label)
}

pub fn run_prepared(prepared: &Prepared, label: &str) -> Result<Vec<RunRecord>, HarnessError> {
    let dataset_name = prepared.config.source_name();
    prepared
        .config
        .seeds
        .par_iter()
        .map(|&seed| {
            let mut record = match &prepared.task {
                Task::Supervised { dataset, loss } => train_supervised(prepared, dataset, *loss, seed)?,
                Task::Objective(problem) => minimize(prepared, problem, seed)?,
            };
            record.run_id = run_id(&dataset_name, label, seed);
            record.optimizer = label.to_owned();
            record.dataset = dataset_name.clone();
            Ok(record)
        })
        .collect()
}

fn empty_record(seed: u64) -> RunRecord {
    RunRecord {
        run_id: String::new(),
        optimizer: String::new(),
        dataset: String::new(),
        seed,
        rows: Vec::new(),
        diverged_at: None,
        final_params: RealVector::zeros(0),
    }
}

fn evaluate(model: &Model, data: &Dataset, loss: LossKind, split: Split, epoch: usize) -> Result<Vec<MetricRow>, HarnessError> {
    let predictions = model::forward(model, &data.features)?;
    let value = model::loss(loss, &predictions, &data.targets)?;
    let row = |metric, value| MetricRow { epoch, split, metric, value };
    Ok(match (&data.targets, loss) {
        (Targets::Classes(labels), _) => vec![
            row(Metric::Loss, value),
            row(Metric::Accuracy, model::accuracy(&predictions, labels)?),
        ],
        (_, LossKind::Mse) => vec![row(Metric::Mse, value)],
        _ => vec![row(Metric::Loss, value)],
    })
}

fn train_supervised(prepared: &Prepared, dataset: &Dataset, loss: LossKind, seed: u64) -> Result<RunRecord, HarnessError> {
    let config = &prepared.config;
    let split = split_normalize(dataset, config.split_ratio, seed)?;
    let output_width = match &dataset.targets {
        Targets::Values(m) => m.cols(),
        Targets::Classes(c) => c.iter().max().map_or(1, |m| m + 1),
    };
    let mut sizes = vec![dataset.features.cols()];
    sizes.extend(&config.model.hidden);
    sizes.push(output_width);
    let mut net = model::init_model(&sizes, seed)?;
    let mut params = net.to_flat();
    let mut optimizer = Optimizer::new(prepared.optimizer, params.len())?;

    let train_batch = split.train.batch();
    let n = train_batch.len();
    let mut order: Vec<usize> = (0..n).collect();
    let mut shuffle_rng = ChaCha8Rng::seed_from_u64(seed);
    shuffle_rng.set_stream(1);

    let mut record = empty_record(seed);
    for epoch in 1..=config.epochs {
        let stable = match config.batch_size {
            BatchSize::Full => train_step(&mut net, &mut params, &mut optimizer, &train_batch, loss)?,
            BatchSize::Rows(b) => {
                order.shuffle(&mut shuffle_rng);
                let mut stable = true;
                for rows in order.chunks(b) {
                    stable = train_step(&mut net, &mut params, &mut optimizer, &train_batch.select(rows), loss)?;
                    if !stable {
                        break;
                    }
                }
                stable
            }
        };
        if !stable {
            record.diverged_at = Some(epoch);
            break;
        }
        let mut rows = evaluate(&net, &split.train, loss, Split::Train, epoch)?;
        rows.extend(evaluate(&net, &split.test, loss, Split::Test, epoch)?);
        if rows.iter().any(|r| !r.value.is_finite()) {
            record.diverged_at = Some(epoch);
            break;
        }
        record.rows.extend(rows);
    }
    record.final_params = params;
    Ok(record)
}

/// One optimizer step on `batch`; `false` when the loss, gradient or
/// updated parameters are non-finite.
fn train_step(
    net: &mut Model,
    params: &mut RealVector,
    optimizer: &mut Optimizer,
    batch: &Batch,
    loss: LossKind,
) -> Result<bool, HarnessError> {
    let (value, grads) = model::backward(net, batch, loss)?;
    let grad = grads.flatten();
    if !value.is_finite() || !grad.is_finite() {
        return Ok(false);
    }
    optimizer.step(params, &grad)?;
    if !params.is_finite() {
        return Ok(false);
    }
    net.set_flat(params)?;
    Ok(true)
}

/// Seeded starting point: standard Normal for the quadratic, the classic
/// `(-1.2, 1, -1.2, ...)` plus `0.1·N(0, 1)` for Rosenbrock.
pub fn initial_point(problem: &SyntheticProblem, seed: u64) -> RealVector {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut z = |_| -> f64 { StandardNormal.sample(&mut rng) };
    match problem {
        SyntheticProblem::Quadratic(q) => (0..q.dim()).map(&mut z).collect(),
        SyntheticProblem::Rosenbrock(r) => (0..r.dim)
            .map(|i| if i % 2 == 0 { -1.2 } else { 1.0 } + 0.1 * z(i))
            .collect(),
        SyntheticProblem::Blobs(_) => RealVector::zeros(0),
    }
}

/// One optimizer step per epoch on a closed-form objective; records the
/// train loss after each step.
fn minimize(prepared: &Prepared, problem: &SyntheticProblem, seed: u64) -> Result<RunRecord, HarnessError> {
    let objective = problem.objective().expect("objective problems only");
    let mut theta = initial_point(problem, seed);
    let mut record = empty_record(seed);
    let trajectory = descend(objective, prepared.optimizer, &mut theta, prepared.config.epochs)?;
    for (i, value) in trajectory.iter().enumerate() {
        if !value.is_finite() {
            record.diverged_at = Some(i + 1);
            break;
        }
        record.rows.push(MetricRow {
            epoch: i + 1,
            split: Split::Train,
            metric: Metric::Loss,
            value: *value,
        });
    }
    record.final_params = theta;
    Ok(record)
}

/// Run `steps` optimizer steps from `theta`, returning the loss after each.
/// Stops early at the first non-finite loss, which is included.
pub fn descend(
    objective: &dyn Objective,
    config: OptimizerConfig,
    theta: &mut RealVector,
    steps: usize,
) -> Result<Vec<f64>, HarnessError> {
    let mut optimizer = Optimizer::new(config, theta.len())?;
    let mut losses = Vec::with_capacity(steps);
    for _ in 0..steps {
        let grad = objective.gradient(theta.as_slice());
        optimizer.step(theta, &grad)?;
        let value = objective.loss(theta.as_slice());
        losses.push(value);
        if !value.is_finite() {
            break;
        }
    }
    Ok(losses)
}
