use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use super::HarnessError;
use crate::model::{gradient_check, init_model, Batch, GradCheck, LossKind, Targets};
use crate::vector::Matrix;

pub const GRADCHECK_STEP: f64 = 1e-5;
pub const GRADCHECK_FLOOR: f64 = 1e-6;
pub const GRADCHECK_TOLERANCE: f64 = 1e-5;

#[derive(Debug, Clone, PartialEq)]
pub struct GradCheckCase {
    pub loss: LossKind,
    pub case: usize,
    pub layer_sizes: Vec<usize>,
    pub rows: usize,
    pub report: GradCheck,
}

impl GradCheckCase {
    pub fn passed(&self) -> bool {
        self.report.max_error <= GRADCHECK_TOLERANCE
    }
}

/// `cases` random networks and batches per loss, derived from `seed`.
pub fn gradcheck_suite(cases: usize, seed: u64) -> Result<Vec<GradCheckCase>, HarnessError> {
    let mut out = Vec::with_capacity(2 * cases);
    for (li, loss) in [LossKind::Mse, LossKind::CrossEntropy].into_iter().enumerate() {
        for case in 0..cases {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream((li * cases + case) as u64 + 1);
            let input = rng.random_range(2..=5);
            let hidden = rng.random_range(0..=2);
            let mut sizes = vec![input];
            sizes.extend((0..hidden).map(|_| rng.random_range(2..=6)));
            let outputs = match loss {
                LossKind::Mse => rng.random_range(1..=3),
                LossKind::CrossEntropy => rng.random_range(2..=4),
            };
            sizes.push(outputs);
            let rows = rng.random_range(3..=8);
            let mut normal = || -> f64 { StandardNormal.sample(&mut rng) };
            let inputs = Matrix::from_vec(rows, input, (0..rows * input).map(|_| normal()).collect())
                .expect("shape");
            let targets = match loss {
                LossKind::Mse => Targets::Values(
                    Matrix::from_vec(rows, outputs, (0..rows * outputs).map(|_| normal()).collect()).expect("shape"),
                ),
                LossKind::CrossEntropy => Targets::Classes((0..rows).map(|_| rng.random_range(0..outputs)).collect()),
            };
            let model = init_model(&sizes, rng.random())?;
            let batch = Batch::new(inputs, targets)?;
            let report = gradient_check(&model, &batch, loss, GRADCHECK_STEP, GRADCHECK_FLOOR)?;
            out.push(GradCheckCase { loss, case, layer_sizes: sizes, rows, report });
        }
    }
    Ok(out)
}
