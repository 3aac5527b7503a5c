//! Dense feed-forward networks: ReLU hidden layers, an affine output layer,
//! mean-squared-error or softmax cross-entropy loss, analytic backprop and a
//! central-difference oracle.
//!
//! Weights are row-major `fan_out × fan_in`. The flat parameter order used by
//! [`Model::to_flat`] and [`Gradients::flatten`] is, per layer, all weights
//! then all biases.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::vector::{Matrix, RealVector};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ModelError {
    #[error("invalid shape: {0}")]
    InvalidShape(String),
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Activation {
    Relu,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LossKind {
    Mse,
    CrossEntropy,
}

impl LossKind {
    pub fn name(self) -> &'static str {
        match self {
            LossKind::Mse => "mse",
            LossKind::CrossEntropy => "cross_entropy",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Targets {
    /// One row per sample, one column per output.
    Values(Matrix),
    /// Class index per sample.
    Classes(Vec<usize>),
}

impl Targets {
    pub fn len(&self) -> usize {
        match self {
            Targets::Values(m) => m.rows(),
            Targets::Classes(c) => c.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn select(&self, indices: &[usize]) -> Targets {
        match self {
            Targets::Values(m) => Targets::Values(m.select_rows(indices)),
            Targets::Classes(c) => Targets::Classes(indices.iter().map(|&i| c[i]).collect()),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Batch {
    pub inputs: Matrix,
    pub targets: Targets,
}

impl Batch {
    pub fn new(inputs: Matrix, targets: Targets) -> Result<Self, ModelError> {
        if inputs.rows() != targets.len() {
            return Err(ModelError::ShapeMismatch(format!(
                "{} input rows, {} targets",
                inputs.rows(),
                targets.len()
            )));
        }
        Ok(Self { inputs, targets })
    }

    pub fn len(&self) -> usize {
        self.inputs.rows()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn select(&self, indices: &[usize]) -> Batch {
        Batch {
            inputs: self.inputs.select_rows(indices),
            targets: self.targets.select(indices),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Layer {
    pub fan_in: usize,
    pub fan_out: usize,
    pub weights: RealVector,
    pub biases: RealVector,
}

impl Layer {
    fn affine(&self, x: &[f64], out: &mut [f64]) {
        let w = self.weights.as_slice();
        for (o, slot) in out.iter_mut().enumerate() {
            let row = &w[o * self.fan_in..(o + 1) * self.fan_in];
            *slot = self.biases[o] + row.iter().zip(x).map(|(a, b)| a * b).sum::<f64>();
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Model {
    layer_sizes: Vec<usize>,
    pub layers: Vec<Layer>,
    pub activation: Activation,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Gradients {
    pub weights: Vec<RealVector>,
    pub biases: Vec<RealVector>,
}

impl Gradients {
    pub fn flatten(&self) -> RealVector {
        self.weights
            .iter()
            .zip(&self.biases)
            .flat_map(|(w, b)| w.iter().chain(b.iter()).copied())
            .collect()
    }
}

/// Forward pass with the pre-activations kept for backprop.
struct Trace {
    /// `activations[0]` is the input row; `activations[l + 1]` the output of layer `l`.
    activations: Vec<Vec<f64>>,
    pre: Vec<Vec<f64>>,
}

pub fn init_model(layer_sizes: &[usize], seed: u64) -> Result<Model, ModelError> {
    if layer_sizes.len() < 2 {
        return Err(ModelError::InvalidShape(
            "need at least an input and an output layer".into(),
        ));
    }
    if layer_sizes.contains(&0) {
        return Err(ModelError::InvalidShape("layer sizes must be >= 1".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let layers = layer_sizes
        .windows(2)
        .map(|pair| {
            let (fan_in, fan_out) = (pair[0], pair[1]);
            let limit = (6.0 / (fan_in + fan_out) as f64).sqrt();
            let weights = (0..fan_in * fan_out)
                .map(|_| rng.random_range(-limit..limit))
                .collect();
            Layer {
                fan_in,
                fan_out,
                weights,
                biases: RealVector::zeros(fan_out),
            }
        })
        .collect();
    Ok(Model {
        layer_sizes: layer_sizes.to_vec(),
        layers,
        activation: Activation::Relu,
    })
}

impl Model {
    pub fn layer_sizes(&self) -> &[usize] {
        &self.layer_sizes
    }

    pub fn input_width(&self) -> usize {
        self.layer_sizes[0]
    }

    pub fn output_width(&self) -> usize {
        *self.layer_sizes.last().unwrap()
    }

    pub fn param_count(&self) -> usize {
        self.layers.iter().map(|l| l.fan_in * l.fan_out + l.fan_out).sum()
    }

    pub fn to_flat(&self) -> RealVector {
        self.layers
            .iter()
            .flat_map(|l| l.weights.iter().chain(l.biases.iter()).copied())
            .collect()
    }

    pub fn set_flat(&mut self, flat: &RealVector) -> Result<(), ModelError> {
        if flat.len() != self.param_count() {
            return Err(ModelError::ShapeMismatch(format!(
                "{} parameters given, model has {}",
                flat.len(),
                self.param_count()
            )));
        }
        let mut rest = flat.as_slice();
        for layer in &mut self.layers {
            let (w, tail) = rest.split_at(layer.weights.len());
            let (b, tail) = tail.split_at(layer.biases.len());
            layer.weights = RealVector::from(w);
            layer.biases = RealVector::from(b);
            rest = tail;
        }
        Ok(())
    }

    fn check_inputs(&self, inputs: &Matrix) -> Result<(), ModelError> {
        if inputs.cols() != self.input_width() {
            return Err(ModelError::ShapeMismatch(format!(
                "{} input features, model expects {}",
                inputs.cols(),
                self.input_width()
            )));
        }
        Ok(())
    }

    fn trace(&self, x: &[f64]) -> Trace {
        let last = self.layers.len() - 1;
        let mut activations = vec![x.to_vec()];
        let mut pre = Vec::with_capacity(self.layers.len());
        for (l, layer) in self.layers.iter().enumerate() {
            let mut z = vec![0.0; layer.fan_out];
            layer.affine(&activations[l], &mut z);
            let a = if l == last {
                z.clone()
            } else {
                z.iter().map(|&v| v.max(0.0)).collect()
            };
            pre.push(z);
            activations.push(a);
        }
        Trace { activations, pre }
    }

    /// Hidden-layer pre-activation signs for every sample, used to detect
    /// when a perturbation moves a ReLU across its kink.
    fn relu_pattern(&self, inputs: &Matrix) -> Vec<bool> {
        let hidden = self.layers.len() - 1;
        (0..inputs.rows())
            .flat_map(|r| {
                let tr = self.trace(inputs.row(r));
                tr.pre.into_iter().take(hidden).flatten().map(|z| z > 0.0).collect::<Vec<_>>()
            })
            .collect()
    }
}

pub fn forward(model: &Model, inputs: &Matrix) -> Result<Matrix, ModelError> {
    model.check_inputs(inputs)?;
    let width = model.output_width();
    let mut data = Vec::with_capacity(inputs.rows() * width);
    for r in 0..inputs.rows() {
        let tr = model.trace(inputs.row(r));
        data.extend_from_slice(tr.activations.last().unwrap());
    }
    Ok(Matrix::from_vec(inputs.rows(), width, data).expect("shape is consistent"))
}

fn check_targets(kind: LossKind, predictions: &Matrix, targets: &Targets) -> Result<(), ModelError> {
    match (kind, targets) {
        (LossKind::Mse, Targets::Values(t)) => {
            if t.rows() != predictions.rows() || t.cols() != predictions.cols() {
                return Err(ModelError::ShapeMismatch(format!(
                    "predictions {}x{}, targets {}x{}",
                    predictions.rows(),
                    predictions.cols(),
                    t.rows(),
                    t.cols()
                )));
            }
        }
        (LossKind::CrossEntropy, Targets::Classes(c)) => {
            if c.len() != predictions.rows() {
                return Err(ModelError::ShapeMismatch(format!(
                    "{} prediction rows, {} labels",
                    predictions.rows(),
                    c.len()
                )));
            }
            if let Some(&bad) = c.iter().find(|&&k| k >= predictions.cols()) {
                return Err(ModelError::ShapeMismatch(format!(
                    "label {bad} out of range for {} classes",
                    predictions.cols()
                )));
            }
        }
        _ => {
            return Err(ModelError::ShapeMismatch(
                "MSE needs value targets, cross-entropy needs class labels".into(),
            ))
        }
    }
    if predictions.rows() == 0 {
        return Err(ModelError::ShapeMismatch("empty batch".into()));
    }
    Ok(())
}

fn log_softmax(logits: &[f64]) -> Vec<f64> {
    let max = logits.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let lse = max + logits.iter().map(|&z| (z - max).exp()).sum::<f64>().ln();
    logits.iter().map(|&z| z - lse).collect()
}

/// Mean loss over the batch. MSE averages over every output element.
pub fn loss(kind: LossKind, predictions: &Matrix, targets: &Targets) -> Result<f64, ModelError> {
    check_targets(kind, predictions, targets)?;
    let n = predictions.rows();
    Ok(match targets {
        Targets::Values(t) => {
            let sum: f64 = predictions
                .as_slice()
                .iter()
                .zip(t.as_slice())
                .map(|(p, y)| (p - y) * (p - y))
                .sum();
            sum / predictions.as_slice().len() as f64
        }
        Targets::Classes(c) => {
            let sum: f64 = (0..n).map(|r| -log_softmax(predictions.row(r))[c[r]]).sum();
            sum / n as f64
        }
    })
}

/// Gradient of the mean loss with respect to the output-layer values, per row.
fn output_delta(kind: LossKind, output: &[f64], targets: &Targets, row: usize, scale: f64) -> Vec<f64> {
    match (kind, targets) {
        (LossKind::Mse, Targets::Values(t)) => output
            .iter()
            .zip(t.row(row))
            .map(|(p, y)| 2.0 * (p - y) * scale)
            .collect(),
        (_, Targets::Classes(c)) => {
            let logp = log_softmax(output);
            logp.iter()
                .enumerate()
                .map(|(k, lp)| (lp.exp() - if k == c[row] { 1.0 } else { 0.0 }) * scale)
                .collect()
        }
        _ => unreachable!("checked by check_targets"),
    }
}

pub fn backward(model: &Model, batch: &Batch, kind: LossKind) -> Result<(f64, Gradients), ModelError> {
    model.check_inputs(&batch.inputs)?;
    let predictions = forward(model, &batch.inputs)?;
    let value = loss(kind, &predictions, &batch.targets)?;

    let n = batch.len();
    let scale = match kind {
        LossKind::Mse => 1.0 / (n * model.output_width()) as f64,
        LossKind::CrossEntropy => 1.0 / n as f64,
    };
    let mut gw: Vec<Vec<f64>> = model.layers.iter().map(|l| vec![0.0; l.weights.len()]).collect();
    let mut gb: Vec<Vec<f64>> = model.layers.iter().map(|l| vec![0.0; l.fan_out]).collect();

    for r in 0..n {
        let tr = model.trace(batch.inputs.row(r));
        let mut delta = output_delta(kind, tr.activations.last().unwrap(), &batch.targets, r, scale);
        for l in (0..model.layers.len()).rev() {
            let layer = &model.layers[l];
            let input = &tr.activations[l];
            for (o, &d) in delta.iter().enumerate() {
                gb[l][o] += d;
                let row = &mut gw[l][o * layer.fan_in..(o + 1) * layer.fan_in];
                for (g, &x) in row.iter_mut().zip(input) {
                    *g += d * x;
                }
            }
            if l == 0 {
                break;
            }
            // Back through W then ReLU; the subgradient at 0 is 0.
            let w = layer.weights.as_slice();
            let below = &tr.pre[l - 1];
            delta = (0..layer.fan_in)
                .map(|i| {
                    if below[i] > 0.0 {
                        delta
                            .iter()
                            .enumerate()
                            .map(|(o, &d)| d * w[o * layer.fan_in + i])
                            .sum()
                    } else {
                        0.0
                    }
                })
                .collect();
        }
    }
    Ok((
        value,
        Gradients {
            weights: gw.into_iter().map(RealVector::new).collect(),
            biases: gb.into_iter().map(RealVector::new).collect(),
        },
    ))
}

fn batch_loss(model: &Model, batch: &Batch, kind: LossKind) -> Result<f64, ModelError> {
    loss(kind, &forward(model, &batch.inputs)?, &batch.targets)
}

fn unflatten(model: &Model, flat: Vec<f64>) -> Gradients {
    let mut rest = flat.as_slice();
    let mut weights = Vec::new();
    let mut biases = Vec::new();
    for layer in &model.layers {
        let (w, tail) = rest.split_at(layer.weights.len());
        let (b, tail) = tail.split_at(layer.fan_out);
        weights.push(RealVector::from(w));
        biases.push(RealVector::from(b));
        rest = tail;
    }
    Gradients { weights, biases }
}

/// Central differences `(L(θ + h·e_i) − L(θ − h·e_i)) / 2h` per parameter.
pub fn finite_diff(model: &Model, batch: &Batch, kind: LossKind, h: f64) -> Result<Gradients, ModelError> {
    if !(h > 0.0) {
        return Err(ModelError::InvalidShape(format!("step h must be > 0, got {h}")));
    }
    let base = model.to_flat();
    let mut probe = model.clone();
    let mut out = Vec::with_capacity(base.len());
    for i in 0..base.len() {
        let mut plus = base.clone().into_vec();
        plus[i] += h;
        probe.set_flat(&RealVector::new(plus))?;
        let lp = batch_loss(&probe, batch, kind)?;
        let mut minus = base.clone().into_vec();
        minus[i] -= h;
        probe.set_flat(&RealVector::new(minus))?;
        let lm = batch_loss(&probe, batch, kind)?;
        out.push((lp - lm) / (2.0 * h));
    }
    Ok(unflatten(model, out))
}

#[derive(Debug, Clone, PartialEq)]
pub struct GradCheck {
    /// Largest error over compared coordinates: relative where
    /// `|analytic| > abs_floor`, absolute otherwise.
    pub max_error: f64,
    pub max_relative_error: f64,
    pub max_absolute_error: f64,
    pub compared: usize,
    /// Coordinates skipped because `θ ± h` changes the sign pattern of some
    /// hidden pre-activation on the batch.
    pub skipped_kinks: usize,
}

/// Compare [`backward`] against [`finite_diff`] coordinate by coordinate.
///
/// A coordinate is compared relatively, `|a − n| / max(|a|, |n|)`, when
/// `|a| > abs_floor`, and absolutely otherwise. It is skipped when
/// perturbing it by `+h` or `−h` flips any hidden ReLU on the batch.
pub fn gradient_check(
    model: &Model,
    batch: &Batch,
    kind: LossKind,
    h: f64,
    abs_floor: f64,
) -> Result<GradCheck, ModelError> {
    let (_, analytic) = backward(model, batch, kind)?;
    let analytic = analytic.flatten();
    let numeric = finite_diff(model, batch, kind, h)?.flatten();
    let base = model.to_flat();
    let pattern = model.relu_pattern(&batch.inputs);
    let mut probe = model.clone();

    let mut report = GradCheck {
        max_error: 0.0,
        max_relative_error: 0.0,
        max_absolute_error: 0.0,
        compared: 0,
        skipped_kinks: 0,
    };
    for i in 0..base.len() {
        let crosses = [h, -h].into_iter().any(|d| {
            let mut p = base.clone().into_vec();
            p[i] += d;
            probe.set_flat(&RealVector::new(p)).expect("same shape");
            probe.relu_pattern(&batch.inputs) != pattern
        });
        if crosses {
            report.skipped_kinks += 1;
            continue;
        }
        let (a, n) = (analytic[i], numeric[i]);
        let err = if a.abs() > abs_floor {
            let rel = (a - n).abs() / a.abs().max(n.abs());
            report.max_relative_error = report.max_relative_error.max(rel);
            rel
        } else {
            let abs = (a - n).abs();
            report.max_absolute_error = report.max_absolute_error.max(abs);
            abs
        };
        report.max_error = report.max_error.max(err);
        report.compared += 1;
    }
    Ok(report)
}

/// Top-1 accuracy of `logits` against `labels`; ties go to the lowest index.
pub fn accuracy(logits: &Matrix, labels: &[usize]) -> Result<f64, ModelError> {
    if logits.rows() != labels.len() || labels.is_empty() {
        return Err(ModelError::ShapeMismatch(format!(
            "{} logit rows, {} labels",
            logits.rows(),
            labels.len()
        )));
    }
    let hits = (0..logits.rows())
        .filter(|&r| argmax(logits.row(r)) == labels[r])
        .count();
    Ok(hits as f64 / labels.len() as f64)
}

pub fn argmax(values: &[f64]) -> usize {
    let mut best = 0;
    for (i, &v) in values.iter().enumerate().skip(1) {
        if v > values[best] {
            best = i;
        }
    }
    best
}
