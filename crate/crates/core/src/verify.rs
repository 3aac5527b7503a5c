//! Bias factors of Tom's forecast under stationary gradients.
//!
//! If every gradient has the same expectation `E(g)`, the zero-initialized
//! recurrences of [`crate::optim::tom_step`] satisfy
//!
//! ```text
//! E(b_t) = (1 − β2)·β2^{t−1}·E(g)                                  trend factor
//! E(ℓ_t) = [β1(1 − β2)(β2^{t−1} − β1^{t−1})/(β2 − β1) + 1 − β1^t]·E(g)  level factor
//! E(f_t) = E(ℓ_t) + E(b_t)                                         forecast factor
//! ```
//!
//! and the optimizer divides by the approximation `1 − (β1β2)^t`. This module
//! evaluates the exact factors, a scalar unroll that realizes them under
//! constant gradients, a Monte Carlo estimate under i.i.d. Normal gradients,
//! and the gap between exact and approximate corrections.
//!
//! Monte Carlo draws come from ChaCha8 (`rand_chacha::ChaCha8Rng`) seeded
//! with `seed_from_u64(seed)`; trials consume the stream in order, each
//! drawing `t` gradients.

use std::fmt::Write as _;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum VerifyError {
    #[error("invalid parameter: {0}")]
    InvalidParam(String),
}

fn check_beta(name: &str, beta: f64) -> Result<(), VerifyError> {
    if beta > 0.0 && beta < 1.0 {
        Ok(())
    } else {
        Err(VerifyError::InvalidParam(format!(
            "{name} must lie in (0, 1), got {beta}"
        )))
    }
}

fn check_step(t: u32) -> Result<(), VerifyError> {
    if t == 0 {
        return Err(VerifyError::InvalidParam("t must be >= 1".into()));
    }
    Ok(())
}

/// `(1 − β2)·β2^{t−1}`.
pub fn trend_bias_factor(beta2: f64, t: u32) -> Result<f64, VerifyError> {
    check_beta("beta2", beta2)?;
    check_step(t)?;
    Ok((1.0 - beta2) * beta2.powi(t as i32 - 1))
}

/// `(x^n − y^n)/(x − y)`, with the limit `n·x^{n−1}` when `x == y`.
pub fn telescoped_ratio(x: f64, y: f64, n: u32) -> f64 {
    if n == 0 {
        return 0.0;
    }
    if x == y {
        return n as f64 * x.powi(n as i32 - 1);
    }
    (x.powi(n as i32) - y.powi(n as i32)) / (x - y)
}

/// `Σ_{k=1}^{n} x^{n−k}·y^{k−1}`, the expanded form of [`telescoped_ratio`].
pub fn telescoped_sum(x: f64, y: f64, n: u32) -> f64 {
    (1..=n)
        .map(|k| x.powi((n - k) as i32) * y.powi(k as i32 - 1))
        .sum()
}

/// Closed-form level factor. `β1 == β2` takes the analytic limit of the
/// telescoped fraction, `(t − 1)·β^{t−2}`.
pub fn level_bias_factor(beta1: f64, beta2: f64, t: u32) -> Result<f64, VerifyError> {
    check_beta("beta1", beta1)?;
    check_beta("beta2", beta2)?;
    check_step(t)?;
    let from_trend = beta1 * (1.0 - beta2) * telescoped_ratio(beta2, beta1, t - 1);
    Ok(from_trend + (1.0 - beta1.powi(t as i32)))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BiasFactors {
    pub t: u32,
    pub trend_factor: f64,
    pub level_factor: f64,
    pub forecast_factor: f64,
    /// `1 − (β1β2)^t`.
    pub approx_factor: f64,
}

impl BiasFactors {
    /// `|forecast − approx| / forecast`.
    pub fn relative_gap(&self) -> f64 {
        (self.forecast_factor - self.approx_factor).abs() / self.forecast_factor
    }
}

pub fn bias_factors(beta1: f64, beta2: f64, t: u32) -> Result<BiasFactors, VerifyError> {
    let trend_factor = trend_bias_factor(beta2, t)?;
    let level_factor = level_bias_factor(beta1, beta2, t)?;
    Ok(BiasFactors {
        t,
        trend_factor,
        level_factor,
        forecast_factor: level_factor + trend_factor,
        approx_factor: 1.0 - (beta1 * beta2).powi(t as i32),
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct Unroll {
    pub levels: Vec<f64>,
    pub trends: Vec<f64>,
    pub forecasts: Vec<f64>,
}

/// Scalar Tom level/trend recurrences with `g_t = c` for `t = 1..=steps`
/// and `g_0 = 0`.
pub fn constant_gradient_unroll(beta1: f64, beta2: f64, c: f64, steps: u32) -> Unroll {
    unroll_stream(beta1, beta2, std::iter::repeat_n(c, steps as usize))
}

fn unroll_stream(beta1: f64, beta2: f64, grads: impl Iterator<Item = f64>) -> Unroll {
    let mut out = Unroll {
        levels: Vec::new(),
        trends: Vec::new(),
        forecasts: Vec::new(),
    };
    let (mut level, mut trend, mut prev) = (0.0, 0.0, 0.0);
    for g in grads {
        level = beta1 * (level + trend) + (1.0 - beta1) * g;
        trend = beta2 * trend + (1.0 - beta2) * (g - prev);
        prev = g;
        out.levels.push(level);
        out.trends.push(trend);
        out.forecasts.push(level + trend);
    }
    out
}

fn final_forecast(beta1: f64, beta2: f64, grads: impl Iterator<Item = f64>) -> f64 {
    let (mut level, mut trend, mut prev) = (0.0, 0.0, 0.0);
    for g in grads {
        level = beta1 * (level + trend) + (1.0 - beta1) * g;
        trend = beta2 * trend + (1.0 - beta2) * (g - prev);
        prev = g;
    }
    level + trend
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MonteCarloEstimate {
    /// `mean(f_t) / (forecast_factor·mean)`.
    pub empirical_ratio: f64,
    /// Standard error of `empirical_ratio`.
    pub std_error: f64,
    /// `mean(f_t) / (approx_factor·mean)`.
    pub approx_ratio: f64,
    pub factors: BiasFactors,
}

pub fn monte_carlo_forecast_bias(
    beta1: f64,
    beta2: f64,
    mean: f64,
    stddev: f64,
    t: u32,
    trials: usize,
    seed: u64,
) -> Result<MonteCarloEstimate, VerifyError> {
    if trials < 1000 {
        return Err(VerifyError::InvalidParam(format!(
            "need at least 1000 trials, got {trials}"
        )));
    }
    if !(stddev >= 0.0 && stddev.is_finite()) {
        return Err(VerifyError::InvalidParam(format!("stddev must be >= 0, got {stddev}")));
    }
    if mean == 0.0 || !mean.is_finite() {
        return Err(VerifyError::InvalidParam("mean must be finite and nonzero".into()));
    }
    let factors = bias_factors(beta1, beta2, t)?;
    let normal = Normal::new(mean, stddev)
        .map_err(|e| VerifyError::InvalidParam(e.to_string()))?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    // Welford accumulation of f_t across trials.
    let (mut avg, mut m2) = (0.0f64, 0.0f64);
    for k in 0..trials {
        let f = final_forecast(
            beta1,
            beta2,
            (0..t).map(|_| normal.sample(&mut rng)),
        );
        let delta = f - avg;
        avg += delta / (k + 1) as f64;
        m2 += delta * (f - avg);
    }
    let sample_var = if trials > 1 { m2 / (trials - 1) as f64 } else { 0.0 };
    let expected = factors.forecast_factor * mean;
    Ok(MonteCarloEstimate {
        empirical_ratio: avg / expected,
        std_error: (sample_var / trials as f64).sqrt() / expected.abs(),
        approx_ratio: avg / (factors.approx_factor * mean),
        factors,
    })
}

/// Plain-text table of the bias factors at each requested step.
pub fn report(beta1: f64, beta2: f64, steps: &[u32]) -> Result<String, VerifyError> {
    let mut out = String::new();
    let _ = writeln!(out, "bias factors for beta1={beta1} beta2={beta2}");
    let _ = writeln!(
        out,
        "{:>6} {:>14} {:>14} {:>14} {:>14} {:>12}",
        "t", "trend", "level", "forecast", "1-(b1*b2)^t", "rel_gap"
    );
    for &t in steps {
        let f = bias_factors(beta1, beta2, t)?;
        let _ = writeln!(
            out,
            "{:>6} {:>14.10} {:>14.10} {:>14.10} {:>14.10} {:>12.3e}",
            t,
            f.trend_factor,
            f.level_factor,
            f.forecast_factor,
            f.approx_factor,
            f.relative_gap()
        );
    }
    Ok(out)
}
