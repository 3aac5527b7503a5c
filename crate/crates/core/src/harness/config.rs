use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::HarnessError;
use crate::data::{self, Dataset};
use crate::model::{Activation, LossKind, Targets};
use crate::optim::{OptimizerConfig, OptimizerKind};

/// Where supervised data comes from: a bundled name or a CSV file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum DatasetSource {
    Bundled(String),
    File(CsvSource),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CsvSource {
    pub path: PathBuf,
    pub target: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum ProblemSpec {
    Quadratic {
        dim: usize,
        condition_number: f64,
        #[serde(default)]
        seed: u64,
    },
    Rosenbrock {
        dim: usize,
    },
    Blobs {
        n: usize,
        k: usize,
        dim: usize,
        #[serde(default)]
        seed: u64,
    },
}

impl ProblemSpec {
    pub fn name(&self) -> &'static str {
        match self {
            ProblemSpec::Quadratic { .. } => "quadratic",
            ProblemSpec::Rosenbrock { .. } => "rosenbrock",
            ProblemSpec::Blobs { .. } => "blobs",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelSpec {
    #[serde(default = "default_hidden")]
    pub hidden: Vec<usize>,
    #[serde(default = "default_activation")]
    pub activation: Activation,
}

fn default_hidden() -> Vec<usize> {
    vec![8, 10]
}

fn default_activation() -> Activation {
    Activation::Relu
}

impl Default for ModelSpec {
    fn default() -> Self {
        Self {
            hidden: default_hidden(),
            activation: default_activation(),
        }
    }
}

/// Optimizer table as written by the user. Omitted fields take the
/// defaults of `kind`; the resolved table is what gets echoed to metadata.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OptimizerSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kind: Option<OptimizerKind>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub beta1: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub beta2: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub beta3: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub epsilon: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub momentum_beta: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub initial_accumulator: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bias_correction: Option<bool>,
}

impl OptimizerSpec {
    pub fn resolve(&self) -> OptimizerConfig {
        let base = OptimizerConfig::new(self.kind.unwrap_or(OptimizerKind::Tom));
        OptimizerConfig {
            kind: base.kind,
            alpha: self.alpha.unwrap_or(base.alpha),
            beta1: self.beta1.unwrap_or(base.beta1),
            beta2: self.beta2.unwrap_or(base.beta2),
            beta3: self.beta3.unwrap_or(base.beta3),
            epsilon: self.epsilon.unwrap_or(base.epsilon),
            momentum_beta: self.momentum_beta.unwrap_or(base.momentum_beta),
            initial_accumulator: self.initial_accumulator.unwrap_or(base.initial_accumulator),
            bias_correction: self.bias_correction.unwrap_or(base.bias_correction),
        }
    }
}

impl From<OptimizerConfig> for OptimizerSpec {
    fn from(c: OptimizerConfig) -> Self {
        Self {
            kind: Some(c.kind),
            alpha: Some(c.alpha),
            beta1: Some(c.beta1),
            beta2: Some(c.beta2),
            beta3: Some(c.beta3),
            epsilon: Some(c.epsilon),
            momentum_beta: Some(c.momentum_beta),
            initial_accumulator: Some(c.initial_accumulator),
            bias_correction: Some(c.bias_correction),
        }
    }
}

/// `"full"` or a positive row count.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(try_from = "RawBatchSize", into = "RawBatchSize")]
pub enum BatchSize {
    #[default]
    Full,
    Rows(usize),
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum RawBatchSize {
    Rows(i64),
    Keyword(String),
}

impl TryFrom<RawBatchSize> for BatchSize {
    type Error = String;

    fn try_from(raw: RawBatchSize) -> Result<Self, String> {
        match raw {
            RawBatchSize::Rows(n) if n >= 1 => Ok(BatchSize::Rows(n as usize)),
            RawBatchSize::Rows(n) => Err(format!("batch_size must be >= 1, got {n}")),
            RawBatchSize::Keyword(k) if k.eq_ignore_ascii_case("full") => Ok(BatchSize::Full),
            RawBatchSize::Keyword(k) => Err(format!("batch_size must be \"full\" or a count, got \"{k}\"")),
        }
    }
}

impl From<BatchSize> for RawBatchSize {
    fn from(b: BatchSize) -> Self {
        match b {
            BatchSize::Full => RawBatchSize::Keyword("full".into()),
            BatchSize::Rows(n) => RawBatchSize::Rows(n as i64),
        }
    }
}

fn default_split_ratio() -> f64 {
    0.8
}

/// One experiment, as read from a TOML file.
///
/// ```toml
/// dataset = "boston"            # or: dataset = { path = "my.csv", target = "y" }
/// loss = "mse"                  # optional; inferred from the targets
/// epochs = 200
/// batch_size = "full"           # or a row count
/// seeds = [0, 1, 2, 3, 4]
/// split_ratio = 0.8
/// output_dir = "runs/boston"
///
/// [model]
/// hidden = [8, 10]
/// activation = "relu"
///
/// [optimizer]
/// kind = "tom"
/// alpha = 0.001
/// ```
///
/// `problem = { kind = "quadratic", dim = 10, condition_number = 100.0 }`
/// replaces `dataset` for synthetic runs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dataset: Option<DatasetSource>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub problem: Option<ProblemSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub loss: Option<LossKind>,
    pub epochs: usize,
    #[serde(default)]
    pub batch_size: BatchSize,
    pub seeds: Vec<u64>,
    #[serde(default = "default_split_ratio")]
    pub split_ratio: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output_dir: Option<PathBuf>,
    #[serde(default)]
    pub model: ModelSpec,
    #[serde(default)]
    pub optimizer: OptimizerSpec,
}

impl ExperimentConfig {
    pub fn from_toml_str(text: &str) -> Result<Self, HarnessError> {
        let config: Self = toml::from_str(text).map_err(|e| HarnessError::Config(e.to_string()))?;
        config.validate()?;
        Ok(config)
    }

    pub fn from_file(path: impl AsRef<Path>) -> Result<Self, HarnessError> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path)
            .map_err(|e| HarnessError::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::from_toml_str(&text)
    }

    pub fn to_toml_string(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    /// A bundled-dataset regression run with the given optimizer.
    pub fn regression(dataset: &str, optimizer: OptimizerConfig, epochs: usize, seeds: Vec<u64>) -> Self {
        Self {
            dataset: Some(DatasetSource::Bundled(dataset.into())),
            problem: None,
            loss: Some(LossKind::Mse),
            epochs,
            batch_size: BatchSize::Full,
            seeds,
            split_ratio: 0.8,
            output_dir: None,
            model: ModelSpec::default(),
            optimizer: optimizer.into(),
        }
    }

    pub fn synthetic(problem: ProblemSpec, optimizer: OptimizerConfig, epochs: usize, seeds: Vec<u64>) -> Self {
        let loss = matches!(problem, ProblemSpec::Blobs { .. }).then_some(LossKind::CrossEntropy);
        Self {
            dataset: None,
            problem: Some(problem),
            loss,
            epochs,
            batch_size: BatchSize::Full,
            seeds,
            split_ratio: 0.8,
            output_dir: None,
            model: ModelSpec::default(),
            optimizer: optimizer.into(),
        }
    }

    pub fn validate(&self) -> Result<(), HarnessError> {
        let bad = |msg: String| Err(HarnessError::Config(msg));
        match (&self.dataset, &self.problem) {
            (Some(_), Some(_)) => return bad("set exactly one of `dataset` and `problem`, not both".into()),
            (None, None) => return bad("one of `dataset` or `problem` is required".into()),
            _ => {}
        }
        if self.epochs == 0 {
            return bad("epochs must be >= 1".into());
        }
        if self.seeds.is_empty() {
            return bad("seeds must be nonempty".into());
        }
        if !(self.split_ratio > 0.0 && self.split_ratio < 1.0) {
            return bad(format!("split_ratio must lie in (0, 1), got {}", self.split_ratio));
        }
        if self.model.hidden.contains(&0) {
            return bad("hidden layer sizes must be >= 1".into());
        }
        self.optimizer
            .resolve()
            .validate()
            .map_err(|e| HarnessError::Config(e.to_string()))?;
        Ok(())
    }

    pub fn source_name(&self) -> String {
        match (&self.dataset, &self.problem) {
            (Some(DatasetSource::Bundled(name)), _) => name.clone(),
            (Some(DatasetSource::File(f)), _) => f
                .path
                .file_stem()
                .map(|s| s.to_string_lossy().into_owned())
                .unwrap_or_else(|| "dataset".into()),
            (None, Some(p)) => p.name().into(),
            (None, None) => "unknown".into(),
        }
    }
}

/// What a validated config trains on.
#[derive(Debug, Clone)]
pub enum Task {
    Supervised {
        dataset: Dataset,
        loss: LossKind,
    },
    Objective(crate::data::SyntheticProblem),
}

/// A config with every default made explicit, plus the loaded task.
#[derive(Debug, Clone)]
pub struct Prepared {
    pub config: ExperimentConfig,
    pub optimizer: OptimizerConfig,
    pub task: Task,
}

pub fn prepare(config: &ExperimentConfig) -> Result<Prepared, HarnessError> {
    config.validate()?;
    let optimizer = config.optimizer.resolve();
    let dataset = match (&config.dataset, &config.problem) {
        (Some(DatasetSource::Bundled(name)), _) => Some(data::bundled(name)?),
        (Some(DatasetSource::File(f)), _) => Some(data::load_csv(&f.path, &f.target)?),
        (None, Some(ProblemSpec::Blobs { n, k, dim, seed })) => Some(data::make_blobs(*n, *k, *dim, *seed)?.dataset),
        _ => None,
    };
    let task = match dataset {
        Some(dataset) => {
            let inferred = match dataset.targets {
                Targets::Values(_) => LossKind::Mse,
                Targets::Classes(_) => LossKind::CrossEntropy,
            };
            let loss = config.loss.unwrap_or(inferred);
            if loss != inferred {
                return Err(HarnessError::Config(format!(
                    "loss `{}` does not fit the targets of `{}`",
                    loss.name(),
                    dataset.name
                )));
            }
            Task::Supervised { dataset, loss }
        }
        None => {
            let problem = match config.problem.as_ref().expect("validated") {
                ProblemSpec::Quadratic { dim, condition_number, seed } => {
                    data::SyntheticProblem::Quadratic(data::make_quadratic(*dim, *condition_number, *seed)?)
                }
                ProblemSpec::Rosenbrock { dim } => data::SyntheticProblem::Rosenbrock(data::make_rosenbrock(*dim)?),
                ProblemSpec::Blobs { .. } => unreachable!("blobs load as a dataset"),
            };
            if config.loss.is_some() {
                return Err(HarnessError::Config(format!(
                    "`loss` does not apply to the {} problem",
                    problem.kind_name()
                )));
            }
            Task::Objective(problem)
        }
    };
    let loss = match &task {
        Task::Supervised { loss, .. } => Some(*loss),
        Task::Objective(_) => None,
    };
    let resolved = ExperimentConfig {
        loss,
        optimizer: optimizer.into(),
        ..config.clone()
    };
    Ok(Prepared {
        config: resolved,
        optimizer,
        task,
    })
}
