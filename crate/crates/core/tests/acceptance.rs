//! Acceptance suite. Runs every criterion, prints one PASS/FAIL line each and
//! exits non-zero if any fails.

use std::path::Path;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use tom_core::data::{make_quadratic, Objective, SyntheticProblem};
use tom_core::harness::{
    gradcheck_suite, initial_point, run_experiment, CsvSource, DatasetSource, ExperimentConfig, Metric, ProblemSpec,
    RunRecord, Split, GRADCHECK_TOLERANCE,
};
use tom_core::smoothing::{holt, ses_error_form, ses_levels, Series};
use tom_core::verify::{bias_factors, constant_gradient_unroll, level_bias_factor, monte_carlo_forecast_bias};
use tom_core::{Optimizer, OptimizerConfig};

struct Outcome {
    passed: bool,
    detail: String,
}

fn outcome(passed: bool, detail: impl Into<String>) -> Outcome {
    Outcome { passed, detail: detail.into() }
}

fn degeneracy() -> Outcome {
    let q = make_quadratic(10, 100.0, 42).unwrap();
    let problem = SyntheticProblem::Quadratic(q.clone());
    let start = initial_point(&problem, 42);
    let tom = OptimizerConfig::tom().with_betas(0.9, 1.0, 0.999).with_bias_correction(true);
    let adam = OptimizerConfig::adam().with_betas(0.9, 0.999, 0.0);
    let (mut a, mut b) = (start.clone(), start);
    let mut oa = Optimizer::new(tom, 10).unwrap();
    let mut ob = Optimizer::new(adam, 10).unwrap();
    let mut worst = 0.0f64;
    for _ in 0..1000 {
        let ga = q.gradient(a.as_slice());
        let gb = q.gradient(b.as_slice());
        oa.step(&mut a, &ga).unwrap();
        ob.step(&mut b, &gb).unwrap();
        worst = worst.max(a.max_abs_diff(&b).unwrap());
    }
    outcome(worst <= 1e-12, format!("max |tom - adam| over 1000 steps = {worst:e}"))
}

fn trend_closed_form() -> Outcome {
    let c = 1.7;
    let mut worst = 0.0f64;
    for beta2 in [0.5, 0.9, 0.99] {
        let u = constant_gradient_unroll(0.9, beta2, c, 200);
        for (i, b) in u.trends.iter().enumerate() {
            let closed = (1.0 - beta2) * beta2.powi(i as i32) * c;
            worst = worst.max((b - closed).abs() / closed.abs());
        }
    }
    outcome(worst <= 1e-14, format!("max relative error {worst:e}"))
}

fn level_closed_form() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(31);
    let mut worst = 0.0f64;
    for _ in 0..5 {
        let (b1, b2): (f64, f64) = (rng.random_range(0.05..0.999), rng.random_range(0.05..0.999));
        for t in 1..=100u32 {
            // series A: the gradient's own geometric weights; series B: the
            // trend values fed back through the level
            let series_a: f64 = (0..t).map(|i| (1.0 - b1) * b1.powi(i as i32)).sum();
            let series_b: f64 = (1..t).map(|j| b1.powi((t - j) as i32) * (1.0 - b2) * b2.powi(j as i32 - 1)).sum();
            let closed = level_bias_factor(b1, b2, t).unwrap();
            worst = worst.max((closed - (series_a + series_b)).abs());
        }
    }
    outcome(worst <= 1e-12, format!("max |closed - series| = {worst:e}"))
}

/// Exact rational evaluation of |forecast − approx| / forecast.
const FROZEN_GAPS: [(u32, f64); 5] = [
    (1, 0.0090909090909090905),
    (5, 0.024725371841768953),
    (10, 0.039834914482159242),
    (50, 0.060871181366580429),
    (100, 0.039062923401428293),
];

fn approximation_audit() -> Outcome {
    let mut worst = 0.0f64;
    let mut report = Vec::new();
    for (t, frozen) in FROZEN_GAPS {
        let gap = bias_factors(0.9, 0.99, t).unwrap().relative_gap();
        worst = worst.max((gap - frozen).abs());
        report.push(format!("t={t}:{gap:.6}"));
    }
    outcome(worst <= 1e-12, format!("{} (max drift {worst:e})", report.join(" ")))
}

fn monte_carlo() -> Outcome {
    let est = monte_carlo_forecast_bias(0.9, 0.99, 1.0, 0.5, 20, 100_000, 7).unwrap();
    let z = (est.empirical_ratio - 1.0) / est.std_error;
    outcome(
        z.abs() <= 3.0,
        format!("ratio {:.6} se {:.2e} ({z:+.2} se)", est.empirical_ratio, est.std_error),
    )
}

fn gradients() -> Outcome {
    let cases = gradcheck_suite(20, 2024).unwrap();
    let worst = cases.iter().map(|c| c.report.max_error).fold(0.0, f64::max);
    let skipped: usize = cases.iter().map(|c| c.report.skipped_kinks).sum();
    outcome(
        cases.len() == 40 && worst <= GRADCHECK_TOLERANCE,
        format!("{} cases, max relative error {worst:e}, {skipped} kink coordinates skipped", cases.len()),
    )
}

fn final_test_mse(records: &[RunRecord]) -> f64 {
    let values: Vec<f64> = records
        .iter()
        .map(|r| r.value(200, Split::Test, Metric::Mse).unwrap_or(f64::INFINITY))
        .collect();
    values.iter().sum::<f64>() / values.len() as f64
}

/// Bundled datasets plus California Housing when a copy is present.
fn regression_sources() -> Vec<DatasetSource> {
    let mut sources = vec![DatasetSource::Bundled("boston".into()), DatasetSource::Bundled("diabetes".into())];
    let california = Path::new(env!("CARGO_MANIFEST_DIR")).join("data/california.csv");
    if california.exists() {
        sources.push(DatasetSource::File(CsvSource { path: california, target: "MedHouseVal".into() }));
    }
    sources
}

fn regression_protocol() -> Outcome {
    let mut wins = 0;
    let mut boston = (f64::NAN, f64::NAN);
    let sources = regression_sources();
    let mut notes = Vec::new();
    for source in &sources {
        let mse = |opt: OptimizerConfig| {
            let mut config = ExperimentConfig::regression("boston", opt, 200, vec![0, 1, 2, 3, 4]);
            config.dataset = Some(source.clone());
            run_experiment(&config).map(|r| final_test_mse(&r))
        };
        let (tom, adam) = match (mse(OptimizerConfig::tom()), mse(OptimizerConfig::adam())) {
            (Ok(t), Ok(a)) => (t, a),
            (Err(e), _) | (_, Err(e)) => return outcome(false, format!("run failed: {e}")),
        };
        if tom <= adam {
            wins += 1;
        }
        let name = match source {
            DatasetSource::Bundled(name) => name.as_str(),
            DatasetSource::File(_) => "california",
        };
        if name == "boston" {
            boston = (tom, adam);
        }
        notes.push(format!("{name} tom {tom:.4} adam {adam:.4}"));
    }
    let band = |x: f64| (0.1..=0.6).contains(&x);
    let passed = wins >= 2 && band(boston.0) && band(boston.1);
    outcome(passed, format!("{}; tom <= adam on {wins}/{}", notes.join(", "), sources.len()))
}

fn smoothing_oracles() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut worst_forms = 0.0f64;
    for _ in 0..20 {
        let n = rng.random_range(5..300);
        let values: Vec<f64> = (0..n).map(|_| rng.random_range(-50.0..50.0)).collect();
        let alpha = rng.random_range(0.01..0.99);
        let s = Series::new(values).unwrap();
        let levels = ses_levels(&s, alpha, 0.0).unwrap();
        let forecasts = ses_error_form(&s, alpha, 0.0).unwrap();
        for (l, f) in levels.iter().zip(&forecasts) {
            worst_forms = worst_forms.max((l - f).abs());
        }
    }
    let slope = 0.8;
    let y: Vec<f64> = (1..=100).map(|t| 5.0 + slope * t as f64).collect();
    let fit = holt(&Series::new(y).unwrap(), 0.5, 0.5, 5.0, slope).unwrap();
    let trend_err = (fit.trends[99] - slope).abs();
    outcome(
        worst_forms <= 1e-12 && trend_err <= 1e-6,
        format!("two-form gap {worst_forms:e}, |b_100 - slope| = {trend_err:e}"),
    )
}

fn convergence_ordering() -> Outcome {
    let problem = ProblemSpec::Blobs { n: 300, k: 3, dim: 2, seed: 0 };
    let final_loss = |opt: OptimizerConfig| {
        let config = ExperimentConfig::synthetic(problem.clone(), opt, 300, vec![0, 1, 2, 3, 4]);
        let records = run_experiment(&config).unwrap();
        records
            .iter()
            .map(|r| r.value(300, Split::Train, Metric::Loss).unwrap_or(f64::INFINITY))
            .sum::<f64>()
            / records.len() as f64
    };
    let (adagrad, adam) = (final_loss(OptimizerConfig::adagrad()), final_loss(OptimizerConfig::adam()));
    outcome(adagrad > adam, format!("final train loss adagrad {adagrad:.4} adam {adam:.4}"))
}

fn main() -> ExitCode {
    let criteria: [(&str, Duration, fn() -> Outcome); 9] = [
        ("1 tom/adam degeneracy", Duration::from_secs(1), degeneracy),
        ("2 trend bias closed form", Duration::from_secs(1), trend_closed_form),
        ("3 level bias closed form", Duration::from_secs(1), level_closed_form),
        ("4 approximation audit", Duration::from_secs(1), approximation_audit),
        ("5 monte carlo unbiasedness", Duration::from_secs(30), monte_carlo),
        ("6 gradient correctness", Duration::from_secs(10), gradients),
        ("7 regression protocol", Duration::from_secs(300), regression_protocol),
        ("8 smoothing oracles", Duration::from_secs(1), smoothing_oracles),
        ("9 convergence ordering", Duration::from_secs(60), convergence_ordering),
    ];
    let mut failed = 0;
    for (name, budget, run) in criteria {
        let start = Instant::now();
        let result = run();
        let elapsed = start.elapsed();
        let in_time = elapsed <= budget;
        let passed = result.passed && in_time;
        if !passed {
            failed += 1;
        }
        let timing = format!("{:.2}s of {}s", elapsed.as_secs_f64(), budget.as_secs());
        let late = if in_time { "" } else { " OVER BUDGET" };
        println!("{} criterion {name}: {} [{timing}{late}]", if passed { "PASS" } else { "FAIL" }, result.detail);
    }
    println!("acceptance: {} of 9 passed", 9 - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
