use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use tom_core::data::make_blobs;
use tom_core::harness::{gradcheck_suite, GRADCHECK_TOLERANCE};
use tom_core::model::{accuracy, backward, finite_diff, forward, init_model, loss, Batch, LossKind, Targets};
use tom_core::{Matrix, Optimizer, OptimizerConfig};

fn random_batch(rng: &mut ChaCha8Rng, rows: usize, cols: usize, classes: usize) -> Batch {
    let inputs = Matrix::from_vec(rows, cols, (0..rows * cols).map(|_| rng.random_range(-1.0..1.0)).collect()).unwrap();
    let labels = (0..rows).map(|_| rng.random_range(0..classes)).collect();
    Batch::new(inputs, Targets::Classes(labels)).unwrap()
}

#[test]
fn twenty_cases_per_loss_within_tolerance() {
    let cases = gradcheck_suite(20, 0).unwrap();
    assert_eq!(cases.len(), 40);
    for c in &cases {
        assert!(c.report.max_error <= GRADCHECK_TOLERANCE, "{c:?}");
    }
    let compared: usize = cases.iter().map(|c| c.report.compared).sum();
    assert!(compared > 1000);
}

// A softmax-linear model has no kinks, so central differences converge at
// second order.
#[test]
fn central_difference_error_is_second_order() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let model = init_model(&[3, 4], 1).unwrap();
    let batch = random_batch(&mut rng, 6, 3, 4);
    let (_, exact) = backward(&model, &batch, LossKind::CrossEntropy).unwrap();
    let exact = exact.flatten();
    let err = |h: f64| {
        let fd = finite_diff(&model, &batch, LossKind::CrossEntropy, h).unwrap().flatten();
        fd.max_abs_diff(&exact).unwrap()
    };
    let (e1, e2, e3) = (err(0.08), err(0.04), err(0.02));
    let order1 = (e1 / e2).log2();
    let order2 = (e2 / e3).log2();
    assert!(order1 >= 1.8 && order2 >= 1.8, "orders {order1} {order2}");
}

#[test]
fn widely_separated_blobs_are_learned_quickly() {
    let blobs = make_blobs(300, 3, 2, 4).unwrap();
    let batch = blobs.dataset.batch();
    let mut model = init_model(&[2, 16, 3], 0).unwrap();
    let mut params = model.to_flat();
    let mut opt = Optimizer::new(OptimizerConfig::adam().with_alpha(0.01), params.len()).unwrap();
    for _ in 0..500 {
        let (_, g) = backward(&model, &batch, LossKind::CrossEntropy).unwrap();
        opt.step(&mut params, &g.flatten()).unwrap();
        model.set_flat(&params).unwrap();
    }
    let Targets::Classes(labels) = &batch.targets else { unreachable!() };
    let acc = accuracy(&forward(&model, &batch.inputs).unwrap(), labels).unwrap();
    assert!(acc >= 0.99, "accuracy {acc}");
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn loss_ignores_row_order(seed in any::<u64>(), rows in 2usize..10) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let model = init_model(&[3, 5, 2], seed).unwrap();
        let batch = random_batch(&mut rng, rows, 3, 2);
        let mut order: Vec<usize> = (0..rows).collect();
        rand::seq::SliceRandom::shuffle(order.as_mut_slice(), &mut rng);
        let shuffled = batch.select(&order);
        let a = loss(LossKind::CrossEntropy, &forward(&model, &batch.inputs).unwrap(), &batch.targets).unwrap();
        let b = loss(LossKind::CrossEntropy, &forward(&model, &shuffled.inputs).unwrap(), &shuffled.targets).unwrap();
        prop_assert!((a - b).abs() <= 1e-12 * a.max(1.0));
    }

    #[test]
    fn flat_parameters_round_trip(seed in any::<u64>()) {
        let model = init_model(&[4, 3, 3, 2], seed).unwrap();
        let mut copy = init_model(&[4, 3, 3, 2], seed.wrapping_add(1)).unwrap();
        copy.set_flat(&model.to_flat()).unwrap();
        prop_assert_eq!(copy, model);
    }

    #[test]
    fn cross_entropy_is_nonnegative(seed in any::<u64>(), rows in 1usize..8, classes in 2usize..5) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let model = init_model(&[3, classes], seed).unwrap();
        let batch = random_batch(&mut rng, rows, 3, classes);
        let (value, _) = backward(&model, &batch, LossKind::CrossEntropy).unwrap();
        prop_assert!(value >= 0.0);
    }
}
