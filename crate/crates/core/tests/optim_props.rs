use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use tom_core::optim::{init_state, step};
use tom_core::{Optimizer, OptimizerConfig, OptimizerKind, RealVector};

fn gradient_stream(seed: u64, dim: usize, len: usize) -> Vec<RealVector> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..len)
        .map(|_| (0..dim).map(|_| rng.random_range(-2.0..2.0)).collect())
        .collect()
}

fn trajectory(config: OptimizerConfig, start: &RealVector, grads: &[RealVector]) -> Vec<RealVector> {
    let mut opt = Optimizer::new(config, start.len()).unwrap();
    let mut params = start.clone();
    grads
        .iter()
        .map(|g| {
            opt.step(&mut params, g).unwrap();
            params.clone()
        })
        .collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    // With a frozen trend, Tom reduces to Adam with beta2 := beta3.
    #[test]
    fn tom_without_trend_is_adam(seed in any::<u64>(), dim in 1usize..=16, beta1 in 0.5f64..0.99, beta3 in 0.9f64..0.9999) {
        let grads = gradient_stream(seed, dim, 1000);
        let start = RealVector::filled(dim, 0.5);
        let tom = OptimizerConfig::tom().with_betas(beta1, 1.0, beta3);
        let adam = OptimizerConfig::adam().with_betas(beta1, beta3, 0.0);
        let a = trajectory(tom, &start, &grads);
        let b = trajectory(adam, &start, &grads);
        for (x, y) in a.iter().zip(&b) {
            prop_assert_eq!(x.as_slice(), y.as_slice());
        }
    }

    #[test]
    fn coordinate_permutation_commutes_with_step(seed in any::<u64>(), dim in 2usize..=8, kind_idx in 0usize..7) {
        let kind = OptimizerKind::ALL[kind_idx];
        let grads = gradient_stream(seed, dim, 20);
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0xabc);
        let mut perm: Vec<usize> = (0..dim).collect();
        rand::seq::SliceRandom::shuffle(perm.as_mut_slice(), &mut rng);
        let permute = |v: &RealVector| -> RealVector { perm.iter().map(|&i| v[i]).collect() };

        let start: RealVector = (0..dim).map(|i| i as f64 * 0.1 - 0.3).collect();
        let config = OptimizerConfig::new(kind);
        let plain = trajectory(config, &start, &grads);
        let permuted_grads: Vec<RealVector> = grads.iter().map(permute).collect();
        let permuted = trajectory(config, &permute(&start), &permuted_grads);
        for (p, q) in plain.iter().zip(&permuted) {
            prop_assert_eq!(&permute(p), q);
        }
    }

    #[test]
    fn replay_is_bit_identical(seed in any::<u64>(), dim in 1usize..=6, kind_idx in 0usize..7) {
        let config = OptimizerConfig::new(OptimizerKind::ALL[kind_idx]);
        let grads = gradient_stream(seed, dim, 30);
        let start = RealVector::zeros(dim);
        prop_assert_eq!(trajectory(config, &start, &grads), trajectory(config, &start, &grads));
    }

    // A positive gradient never increases a coordinate under any method.
    #[test]
    fn first_step_moves_against_the_gradient(g in prop::collection::vec(0.001f64..10.0, 1..8), kind_idx in 0usize..7) {
        let config = OptimizerConfig::new(OptimizerKind::ALL[kind_idx]);
        let state = init_state(&config, g.len()).unwrap();
        let params = RealVector::zeros(g.len());
        let (next, _, _) = step(&config, &state, &params, &RealVector::new(g)).unwrap();
        prop_assert!(next.iter().all(|&x| x < 0.0));
    }
}

#[test]
fn zero_gradient_leaves_adaptive_methods_in_place() {
    for kind in [OptimizerKind::Adam, OptimizerKind::AmsGrad, OptimizerKind::Tom, OptimizerKind::RmsProp, OptimizerKind::AdaGrad] {
        let start = RealVector::new(vec![1.0, -2.0, 3.0]);
        let grads = vec![RealVector::zeros(3); 10];
        let last = trajectory(OptimizerConfig::new(kind), &start, &grads).pop().unwrap();
        assert_eq!(last, start, "{kind}");
    }
}

#[test]
fn length_mismatch_leaves_state_untouched() {
    let config = OptimizerConfig::tom();
    let mut opt = Optimizer::new(config, 3).unwrap();
    let mut params = RealVector::zeros(3);
    opt.step(&mut params, &RealVector::filled(3, 1.0)).unwrap();
    let before = (opt.state().clone(), params.clone());
    assert!(opt.step(&mut params, &RealVector::filled(2, 1.0)).is_err());
    assert_eq!((opt.state().clone(), params), before);
}

#[test]
fn tom_trend_tracks_a_linear_gradient_ramp() {
    // g_t = t: after warm-up the trend buffer approaches the slope.
    let mut opt = Optimizer::new(OptimizerConfig::tom().with_betas(0.5, 0.5, 0.999), 1).unwrap();
    let mut params = RealVector::zeros(1);
    for t in 1..=200 {
        opt.step(&mut params, &RealVector::new(vec![t as f64])).unwrap();
    }
    assert!((opt.state().trend[0] - 1.0).abs() < 1e-9);
}
