use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::{DataError, Dataset};
use crate::model::Targets;
use crate::vector::Matrix;

/// A seeded train/test split, standardized with train-set statistics.
///
/// Features are mapped to `(x − mean) / std` per column using the population
/// standard deviation of the train rows; a zero-variance column keeps
/// `std = 1`. Regression targets get the same treatment. Class labels pass
/// through unchanged.
#[derive(Debug, Clone, PartialEq)]
pub struct SplitDataset {
    pub train: Dataset,
    pub test: Dataset,
    pub norm_mean: Vec<f64>,
    pub norm_std: Vec<f64>,
    pub target_mean: f64,
    pub target_std: f64,
    pub train_indices: Vec<usize>,
    pub test_indices: Vec<usize>,
    pub seed: u64,
    pub ratio: f64,
}

fn mean_std(values: impl Iterator<Item = f64> + Clone) -> (f64, f64) {
    let n = values.clone().count() as f64;
    let mean = values.clone().sum::<f64>() / n;
    let var = values.map(|v| (v - mean) * (v - mean)).sum::<f64>() / n;
    let std = var.sqrt();
    (mean, if std > 0.0 { std } else { 1.0 })
}

fn standardize_columns(m: &Matrix, mean: &[f64], std: &[f64]) -> Matrix {
    let mut out = m.clone();
    for r in 0..out.rows() {
        for (c, v) in out.row_mut(r).iter_mut().enumerate() {
            *v = (*v - mean[c]) / std[c];
        }
    }
    out
}

impl SplitDataset {
    pub fn normalize_features(&self, raw: &Matrix) -> Matrix {
        standardize_columns(raw, &self.norm_mean, &self.norm_std)
    }

    pub fn denormalize_features(&self, normalized: &Matrix) -> Matrix {
        let mut out = normalized.clone();
        for r in 0..out.rows() {
            for (c, v) in out.row_mut(r).iter_mut().enumerate() {
                *v = *v * self.norm_std[c] + self.norm_mean[c];
            }
        }
        out
    }

    pub fn denormalize_target(&self, value: f64) -> f64 {
        value * self.target_std + self.target_mean
    }
}

pub fn split_normalize(dataset: &Dataset, ratio: f64, seed: u64) -> Result<SplitDataset, DataError> {
    if !(ratio > 0.0 && ratio < 1.0) {
        return Err(DataError::InvalidParam(format!("ratio must lie in (0, 1), got {ratio}")));
    }
    let n = dataset.len();
    if n < 2 {
        return Err(DataError::TooFewRows { needed: 2, got: n });
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    let n_train = ((ratio * n as f64).round() as usize).clamp(1, n - 1);
    let (train_idx, test_idx) = order.split_at(n_train);

    let raw_train = dataset.select(train_idx);
    let raw_test = dataset.select(test_idx);

    let cols = dataset.features.cols();
    let (norm_mean, norm_std): (Vec<f64>, Vec<f64>) = (0..cols)
        .map(|c| mean_std((0..raw_train.len()).map(|r| raw_train.features.get(r, c))))
        .unzip();

    let (target_mean, target_std) = match &raw_train.targets {
        Targets::Values(m) => mean_std(m.as_slice().iter().copied()),
        Targets::Classes(_) => (0.0, 1.0),
    };

    let standardize = |part: Dataset| Dataset {
        features: standardize_columns(&part.features, &norm_mean, &norm_std),
        targets: match part.targets {
            Targets::Values(m) => Targets::Values(standardize_columns(&m, &[target_mean], &[target_std])),
            classes => classes,
        },
        ..part
    };
    let split = SplitDataset {
        train: standardize(raw_train),
        test: standardize(raw_test),
        norm_mean: norm_mean.clone(),
        norm_std: norm_std.clone(),
        target_mean,
        target_std,
        train_indices: train_idx.to_vec(),
        test_indices: test_idx.to_vec(),
        seed,
        ratio,
    };
    Ok(split)
}
