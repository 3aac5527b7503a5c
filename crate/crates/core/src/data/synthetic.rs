use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use super::{DataError, Dataset};
use crate::model::Targets;
use crate::vector::{Matrix, RealVector};

/// A differentiable test function over a flat parameter vector.
pub trait Objective {
    fn dim(&self) -> usize;
    fn loss(&self, theta: &[f64]) -> f64;
    fn gradient(&self, theta: &[f64]) -> RealVector;
}

/// `L(θ) = ½ θᵀAθ` with symmetric positive definite `A`.
#[derive(Debug, Clone, PartialEq)]
pub struct Quadratic {
    pub matrix: Matrix,
    pub spectrum: Vec<f64>,
    pub seed: u64,
}

impl Quadratic {
    /// Wrap an explicit symmetric matrix. The spectrum field is left empty.
    pub fn from_matrix(matrix: Matrix) -> Result<Self, DataError> {
        let n = matrix.rows();
        if n == 0 || matrix.cols() != n {
            return Err(DataError::InvalidParam("quadratic matrix must be square and nonempty".into()));
        }
        for i in 0..n {
            for j in 0..i {
                if matrix.get(i, j) != matrix.get(j, i) {
                    return Err(DataError::InvalidParam("quadratic matrix must be symmetric".into()));
                }
            }
        }
        Ok(Quadratic { matrix, spectrum: Vec::new(), seed: 0 })
    }
}

impl Objective for Quadratic {
    fn dim(&self) -> usize {
        self.matrix.rows()
    }

    fn loss(&self, theta: &[f64]) -> f64 {
        let a_theta = self.matrix.matvec(theta).expect("dimension");
        0.5 * theta.iter().zip(&a_theta).map(|(x, y)| x * y).sum::<f64>()
    }

    fn gradient(&self, theta: &[f64]) -> RealVector {
        RealVector::new(self.matrix.matvec(theta).expect("dimension"))
    }
}

/// Orthonormal rows from modified Gram-Schmidt on a seeded Gaussian matrix.
fn random_orthogonal(dim: usize, rng: &mut ChaCha8Rng) -> Vec<Vec<f64>> {
    let mut rows: Vec<Vec<f64>> = Vec::with_capacity(dim);
    while rows.len() < dim {
        let mut v: Vec<f64> = (0..dim).map(|_| StandardNormal.sample(rng)).collect();
        for q in &rows {
            let proj: f64 = v.iter().zip(q).map(|(a, b)| a * b).sum();
            for (x, qx) in v.iter_mut().zip(q) {
                *x -= proj * qx;
            }
        }
        let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        // a near-dependent draw is discarded and redrawn
        if norm > 1e-8 {
            v.iter_mut().for_each(|x| *x /= norm);
            rows.push(v);
        }
    }
    rows
}

pub fn make_quadratic(dim: usize, condition_number: f64, seed: u64) -> Result<Quadratic, DataError> {
    if dim == 0 {
        return Err(DataError::InvalidParam("dim must be >= 1".into()));
    }
    if !(condition_number >= 1.0 && condition_number.is_finite()) {
        return Err(DataError::InvalidParam(format!(
            "condition number must be finite and >= 1, got {condition_number}"
        )));
    }
    let spectrum: Vec<f64> = (0..dim)
        .map(|i| {
            if dim == 1 {
                1.0
            } else {
                condition_number.powf(i as f64 / (dim - 1) as f64)
            }
        })
        .collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let q = random_orthogonal(dim, &mut rng);
    let mut matrix = Matrix::zeros(dim, dim);
    for i in 0..dim {
        for j in i..dim {
            let a: f64 = (0..dim).map(|k| q[k][i] * spectrum[k] * q[k][j]).sum();
            matrix.set(i, j, a);
            matrix.set(j, i, a);
        }
    }
    Ok(Quadratic { matrix, spectrum, seed })
}

/// `Σ 100(x_{i+1} − x_i²)² + (1 − x_i)²`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Rosenbrock {
    pub dim: usize,
}

impl Objective for Rosenbrock {
    fn dim(&self) -> usize {
        self.dim
    }

    fn loss(&self, x: &[f64]) -> f64 {
        x.windows(2)
            .map(|w| 100.0 * (w[1] - w[0] * w[0]).powi(2) + (1.0 - w[0]).powi(2))
            .sum()
    }

    fn gradient(&self, x: &[f64]) -> RealVector {
        let mut g = vec![0.0; x.len()];
        for i in 0..x.len().saturating_sub(1) {
            let r = x[i + 1] - x[i] * x[i];
            g[i] += -400.0 * x[i] * r - 2.0 * (1.0 - x[i]);
            g[i + 1] += 200.0 * r;
        }
        RealVector::new(g)
    }
}

pub fn make_rosenbrock(dim: usize) -> Result<Rosenbrock, DataError> {
    if dim < 2 {
        return Err(DataError::InvalidParam(format!("rosenbrock needs dim >= 2, got {dim}")));
    }
    Ok(Rosenbrock { dim })
}

/// Gaussian clusters with unit spread around centers drawn uniformly from
/// `[-10, 10)^dim`. Row `i` belongs to class `i % k`.
#[derive(Debug, Clone, PartialEq)]
pub struct Blobs {
    pub centers: Matrix,
    pub dataset: Dataset,
    pub seed: u64,
}

pub fn make_blobs(n: usize, k: usize, dim: usize, seed: u64) -> Result<Blobs, DataError> {
    if k < 2 {
        return Err(DataError::InvalidParam(format!("blobs need k >= 2, got {k}")));
    }
    if dim == 0 || n < k {
        return Err(DataError::InvalidParam(format!(
            "blobs need dim >= 1 and n >= k, got n={n} k={k} dim={dim}"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut centers = Matrix::zeros(k, dim);
    for c in 0..k {
        for v in centers.row_mut(c) {
            *v = rng.random_range(-10.0..10.0);
        }
    }
    let mut features = Matrix::zeros(n, dim);
    let labels: Vec<usize> = (0..n).map(|i| i % k).collect();
    for (i, &label) in labels.iter().enumerate() {
        for (j, v) in features.row_mut(i).iter_mut().enumerate() {
            let z: f64 = StandardNormal.sample(&mut rng);
            *v = centers.get(label, j) + z;
        }
    }
    let dataset = Dataset {
        name: "blobs".into(),
        features,
        targets: Targets::Classes(labels),
        feature_names: (0..dim).map(|j| format!("x{j}")).collect(),
        target_name: "label".into(),
        dropped_rows: 0,
    };
    Ok(Blobs { centers, dataset, seed })
}

#[derive(Debug, Clone, PartialEq)]
pub enum SyntheticProblem {
    Quadratic(Quadratic),
    Rosenbrock(Rosenbrock),
    Blobs(Blobs),
}

impl SyntheticProblem {
    pub fn kind_name(&self) -> &'static str {
        match self {
            SyntheticProblem::Quadratic(_) => "quadratic",
            SyntheticProblem::Rosenbrock(_) => "rosenbrock",
            SyntheticProblem::Blobs(_) => "blobs",
        }
    }

    /// The objective for the two closed-form problems; `None` for blobs.
    pub fn objective(&self) -> Option<&dyn Objective> {
        match self {
            SyntheticProblem::Quadratic(q) => Some(q),
            SyntheticProblem::Rosenbrock(r) => Some(r),
            SyntheticProblem::Blobs(_) => None,
        }
    }
}
