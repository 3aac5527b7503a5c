//! Exponential smoothing forecasters: single, Holt linear trend and
//! additive Holt-Winters.
//!
//! The smoothing constant weights the *previous* estimate, so
//! `ℓ_t = α·ℓ_{t-1} + (1 − α)·y_t`. This is the mirror image of the common
//! textbook form `ℓ_t = α·y_t + (1 − α)·ℓ_{t-1}`; pass `1 − α` to translate.
//!
//! Series are indexed from `t = 1`. Fits carry one-step-ahead forecasts:
//! `forecasts[i]` is `f_{i+2}`, the forecast made after observing `y_{i+1}`.
//! `forecast_ahead(h)` extrapolates past the end of the series.
//!
//! Holt's trend smooths differences of successive *levels*. The Tom
//! optimizer in [`crate::optim`] instead smooths differences of raw
//! gradients.

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SmoothingError {
    #[error("series is empty")]
    EmptySeries,
    #[error("series has {len} points, need at least {needed}")]
    SeriesTooShort { len: usize, needed: usize },
    #[error("non-finite value at index {0}")]
    NonFinite(usize),
    #[error("invalid parameter: {0}")]
    InvalidParam(String),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Series {
    values: Vec<f64>,
}

impl Series {
    pub fn new(values: Vec<f64>) -> Result<Self, SmoothingError> {
        if values.is_empty() {
            return Err(SmoothingError::EmptySeries);
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(SmoothingError::NonFinite(i));
        }
        Ok(Self { values })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

impl TryFrom<Vec<f64>> for Series {
    type Error = SmoothingError;

    fn try_from(values: Vec<f64>) -> Result<Self, Self::Error> {
        Series::new(values)
    }
}

fn check_unit(name: &str, value: f64) -> Result<(), SmoothingError> {
    if value > 0.0 && value < 1.0 {
        Ok(())
    } else {
        Err(SmoothingError::InvalidParam(format!(
            "{name} must lie in (0, 1), got {value}"
        )))
    }
}

/// Single exponential smoothing. Returns `ℓ_1..ℓ_n`; the forecast
/// `f_{t+1}` equals `ℓ_t`.
pub fn ses_levels(series: &Series, alpha: f64, l0: f64) -> Result<Vec<f64>, SmoothingError> {
    check_unit("alpha", alpha)?;
    let mut level = l0;
    Ok(series
        .values
        .iter()
        .map(|&y| {
            level = alpha * level + (1.0 - alpha) * y;
            level
        })
        .collect())
}

/// Single smoothing in error-correction form, `f_{t+1} = f_t + (1 − α)·e_t`.
/// Returns `f_2..f_{n+1}`.
pub fn ses_error_form(series: &Series, alpha: f64, f1: f64) -> Result<Vec<f64>, SmoothingError> {
    check_unit("alpha", alpha)?;
    let mut forecast = f1;
    Ok(series
        .values
        .iter()
        .map(|&y| {
            let error = y - forecast;
            forecast += (1.0 - alpha) * error;
            forecast
        })
        .collect())
}

#[derive(Debug, Clone, PartialEq)]
pub struct HoltFit {
    pub levels: Vec<f64>,
    pub trends: Vec<f64>,
    /// `f_2..f_{n+1}`.
    pub forecasts: Vec<f64>,
    /// `f_1 = ℓ_0 + b_0`.
    pub initial_forecast: f64,
}

impl HoltFit {
    /// `e_t = y_t − f_t` for `t = 1..n`.
    pub fn one_step_errors(&self, series: &Series) -> Vec<f64> {
        one_step_errors(series, self.initial_forecast, &self.forecasts)
    }

    /// `ℓ_n + h·b_n`.
    pub fn forecast_ahead(&self, h: usize) -> f64 {
        let n = self.levels.len();
        self.levels[n - 1] + h as f64 * self.trends[n - 1]
    }
}

fn one_step_errors(series: &Series, first: f64, forecasts: &[f64]) -> Vec<f64> {
    std::iter::once(first)
        .chain(forecasts.iter().copied())
        .zip(&series.values)
        .map(|(f, y)| y - f)
        .collect()
}

/// Holt's linear trend method.
pub fn holt(
    series: &Series,
    alpha: f64,
    beta: f64,
    l0: f64,
    b0: f64,
) -> Result<HoltFit, SmoothingError> {
    check_unit("alpha", alpha)?;
    check_unit("beta", beta)?;
    let n = series.len();
    let mut fit = HoltFit {
        levels: Vec::with_capacity(n),
        trends: Vec::with_capacity(n),
        forecasts: Vec::with_capacity(n),
        initial_forecast: l0 + b0,
    };
    let (mut level, mut trend) = (l0, b0);
    for &y in &series.values {
        let prev_level = level;
        level = alpha * (level + trend) + (1.0 - alpha) * y;
        trend = beta * trend + (1.0 - beta) * (level - prev_level);
        fit.levels.push(level);
        fit.trends.push(trend);
        fit.forecasts.push(level + trend);
    }
    Ok(fit)
}

/// Default Holt start: `ℓ_0 = y_1`, `b_0 = y_2 − y_1` (zero for one point).
pub fn holt_default_init(series: &Series) -> (f64, f64) {
    let y = &series.values;
    let b0 = if y.len() >= 2 { y[1] - y[0] } else { 0.0 };
    (y[0], b0)
}

#[derive(Debug, Clone, PartialEq)]
pub struct SmoothingParams {
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
    pub cycle: usize,
    pub l0: f64,
    pub b0: f64,
    /// `s_{1−c}, .., s_0`.
    pub s0: Vec<f64>,
}

impl SmoothingParams {
    /// Smoothing constants with the default start computed from `series`:
    /// `ℓ_0` is the mean of the first cycle, `b_0` the difference of the
    /// first two cycle means divided by `c`, and `s_0` the first cycle's
    /// deviations from its mean.
    pub fn with_default_init(
        series: &Series,
        alpha: f64,
        beta: f64,
        gamma: f64,
        cycle: usize,
    ) -> Result<Self, SmoothingError> {
        if cycle < 2 {
            return Err(SmoothingError::InvalidParam("cycle must be >= 2".into()));
        }
        if series.len() < 2 * cycle {
            return Err(SmoothingError::SeriesTooShort {
                len: series.len(),
                needed: 2 * cycle,
            });
        }
        let y = &series.values;
        let mean = |s: &[f64]| s.iter().sum::<f64>() / s.len() as f64;
        let first = mean(&y[..cycle]);
        let second = mean(&y[cycle..2 * cycle]);
        Ok(Self {
            alpha,
            beta,
            gamma,
            cycle,
            l0: first,
            b0: (second - first) / cycle as f64,
            s0: y[..cycle].iter().map(|v| v - first).collect(),
        })
    }

    fn validate(&self) -> Result<(), SmoothingError> {
        check_unit("alpha", self.alpha)?;
        check_unit("beta", self.beta)?;
        check_unit("gamma", self.gamma)?;
        if self.cycle < 2 {
            return Err(SmoothingError::InvalidParam("cycle must be >= 2".into()));
        }
        if self.s0.len() != self.cycle {
            return Err(SmoothingError::InvalidParam(format!(
                "s0 has {} values, cycle is {}",
                self.s0.len(),
                self.cycle
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct HoltWintersFit {
    pub levels: Vec<f64>,
    pub trends: Vec<f64>,
    /// `s_1..s_n`.
    pub seasonals: Vec<f64>,
    /// `f_2..f_{n+1}`.
    pub forecasts: Vec<f64>,
    /// `f_1 = ℓ_0 + b_0 + s_{1−c}`.
    pub initial_forecast: f64,
}

impl HoltWintersFit {
    pub fn one_step_errors(&self, series: &Series) -> Vec<f64> {
        one_step_errors(series, self.initial_forecast, &self.forecasts)
    }

    /// `ℓ_n + h·b_n + s_{n−c+1+((h−1) mod c)}` for cycle length `c`.
    pub fn forecast_ahead(&self, h: usize, cycle: usize) -> f64 {
        let n = self.levels.len();
        let j = n - cycle + 1 + (h.max(1) - 1) % cycle;
        self.levels[n - 1] + h as f64 * self.trends[n - 1] + self.seasonals[j - 1]
    }
}

/// Triple exponential smoothing with additive seasonality of period `c`.
pub fn holt_winters_additive(
    series: &Series,
    params: &SmoothingParams,
) -> Result<HoltWintersFit, SmoothingError> {
    params.validate()?;
    let c = params.cycle;
    let n = series.len();
    if n < 2 * c {
        return Err(SmoothingError::SeriesTooShort {
            len: n,
            needed: 2 * c,
        });
    }
    let (alpha, beta, gamma) = (params.alpha, params.beta, params.gamma);
    let mut fit = HoltWintersFit {
        levels: Vec::with_capacity(n),
        trends: Vec::with_capacity(n),
        seasonals: Vec::with_capacity(n),
        forecasts: Vec::with_capacity(n),
        initial_forecast: params.l0 + params.b0 + params.s0[0],
    };
    // s_j for j in 1-c..=n, stored at offset j + c - 1.
    let mut seasonal: Vec<f64> = params.s0.clone();
    seasonal.reserve(n);
    let (mut level, mut trend) = (params.l0, params.b0);
    for (i, &y) in series.values.iter().enumerate() {
        // At t = i + 1, s_{t-c} sits at offset i.
        let lagged = seasonal[i];
        let (prev_level, prev_trend) = (level, trend);
        level = alpha * (prev_level + prev_trend) + (1.0 - alpha) * (y - lagged);
        trend = beta * prev_trend + (1.0 - beta) * (level - prev_level);
        let s = gamma * lagged + (1.0 - gamma) * (y - prev_level - prev_trend);
        seasonal.push(s);
        fit.levels.push(level);
        fit.trends.push(trend);
        fit.seasonals.push(s);
        // f_{t+1} uses s_{t-c+1}, at offset i + 1.
        fit.forecasts.push(level + trend + seasonal[i + 1]);
    }
    Ok(fit)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s(values: &[f64]) -> Series {
        Series::new(values.to_vec()).unwrap()
    }

    #[test]
    fn ses_examples() {
        assert_eq!(ses_levels(&s(&[10.0]), 0.5, 10.0).unwrap(), vec![10.0]);
        assert_eq!(ses_levels(&s(&[0.0, 1.0]), 0.5, 0.0).unwrap(), vec![0.0, 0.5]);
        let flat = ses_levels(&s(&[4.2; 30]), 0.3, 4.2).unwrap();
        assert!(flat.iter().all(|&l| l == 4.2));
    }

    #[test]
    fn error_form_examples() {
        assert_eq!(ses_error_form(&s(&[1.0]), 0.5, 0.0).unwrap(), vec![0.5]);
        assert_eq!(ses_error_form(&s(&[2.0, 2.0]), 0.7, 2.0).unwrap(), vec![2.0, 2.0]);
    }

    #[test]
    fn rejects_bad_input() {
        assert_eq!(Series::new(vec![]).unwrap_err(), SmoothingError::EmptySeries);
        assert!(matches!(Series::new(vec![1.0, f64::NAN]), Err(SmoothingError::NonFinite(1))));
        assert!(ses_levels(&s(&[1.0]), 1.0, 0.0).is_err());
        assert!(holt(&s(&[1.0]), 0.5, 0.0, 0.0, 0.0).is_err());
    }

    #[test]
    fn holt_linear_series_converges_from_rough_start() {
        let y: Vec<f64> = (1..=100).map(|t| 2.0 + 3.0 * t as f64).collect();
        let series = s(&y);
        let fit = holt(&series, 0.5, 0.5, y[0], 3.0).unwrap();
        assert!((fit.trends[99] - 3.0).abs() <= 1e-6);
        let errors = fit.one_step_errors(&series);
        assert!(errors[99].abs() <= 1e-6);
    }

    #[test]
    fn holt_constant_and_single_point() {
        let fit = holt(&s(&[7.0; 20]), 0.4, 0.6, 7.0, 0.0).unwrap();
        assert!(fit.trends.iter().all(|&b| b == 0.0));
        let fit = holt(&s(&[5.0]), 0.4, 0.6, 5.0, 0.0).unwrap();
        assert_eq!(fit.forecasts, vec![5.0]);
    }

    #[test]
    fn holt_default_init_uses_first_difference() {
        assert_eq!(holt_default_init(&s(&[1.0, 4.0, 9.0])), (1.0, 3.0));
        assert_eq!(holt_default_init(&s(&[2.0])), (2.0, 0.0));
    }

    #[test]
    fn holt_winters_needs_two_cycles() {
        let series = s(&[1.0, 2.0, 3.0]);
        assert!(matches!(
            SmoothingParams::with_default_init(&series, 0.5, 0.5, 0.5, 2),
            Err(SmoothingError::SeriesTooShort { len: 3, needed: 4 })
        ));
        let params = SmoothingParams {
            alpha: 0.5,
            beta: 0.5,
            gamma: 0.5,
            cycle: 2,
            l0: 0.0,
            b0: 0.0,
            s0: vec![0.0, 0.0],
        };
        assert!(matches!(
            holt_winters_additive(&series, &params),
            Err(SmoothingError::SeriesTooShort { .. })
        ));
    }

    #[test]
    fn holt_winters_default_init_values() {
        let series = s(&[1.0, 3.0, 3.0, 5.0]);
        let p = SmoothingParams::with_default_init(&series, 0.5, 0.5, 0.5, 2).unwrap();
        assert_eq!(p.l0, 2.0);
        assert_eq!(p.b0, 1.0);
        assert_eq!(p.s0, vec![-1.0, 1.0]);
    }

    #[test]
    fn ahead_forecasts_extend_one_step_forecasts() {
        let y: Vec<f64> = (1..=30).map(|t| 1.0 + 0.5 * t as f64 + [1.0, -1.0, 0.0][t % 3]).collect();
        let series = s(&y);
        let fit = holt(&series, 0.4, 0.3, y[0], y[1] - y[0]).unwrap();
        assert_eq!(fit.forecast_ahead(1), *fit.forecasts.last().unwrap());
        let p = SmoothingParams::with_default_init(&series, 0.4, 0.3, 0.5, 3).unwrap();
        let hw = holt_winters_additive(&series, &p).unwrap();
        assert!((hw.forecast_ahead(1, 3) - hw.forecasts.last().unwrap()).abs() <= 1e-12);
        // the seasonal term repeats with period c
        let season = |h: usize| hw.forecast_ahead(h, 3) - h as f64 * hw.trends.last().unwrap();
        assert!((season(1) - season(4)).abs() <= 1e-12);
    }

    #[test]
    fn holt_winters_constant_series() {
        let series = s(&[3.0; 24]);
        let p = SmoothingParams::with_default_init(&series, 0.3, 0.4, 0.5, 4).unwrap();
        let fit = holt_winters_additive(&series, &p).unwrap();
        assert!(fit.forecasts.iter().all(|&f| (f - 3.0).abs() <= 1e-12));
    }

    #[test]
    fn holt_winters_pure_season_is_tracked_exactly() {
        let pattern = [2.0, -1.0, 0.5, -1.5];
        let y: Vec<f64> = (1..=40).map(|t| pattern[t % 4]).collect();
        let series = s(&y);
        let params = SmoothingParams {
            alpha: 0.6,
            beta: 0.7,
            gamma: 0.2,
            cycle: 4,
            l0: 0.0,
            b0: 0.0,
            // s_{-3}, s_{-2}, s_{-1}, s_0 share the phase of t mod 4.
            s0: vec![pattern[1], pattern[2], pattern[3], pattern[0]],
        };
        let fit = holt_winters_additive(&series, &params).unwrap();
        let errors = fit.one_step_errors(&series);
        assert!(errors.iter().all(|e| e.abs() < 1e-12));
    }

    #[test]
    fn holt_winters_flat_season_matches_holt() {
        let y: Vec<f64> = (1..=60).map(|t| 2.0 + 3.0 * t as f64).collect();
        let series = s(&y);
        let holt_fit = holt(&series, 0.3, 0.6, 2.0, 3.0).unwrap();
        let params = SmoothingParams {
            alpha: 0.3,
            beta: 0.6,
            gamma: 0.45,
            cycle: 5,
            l0: 2.0,
            b0: 3.0,
            s0: vec![0.0; 5],
        };
        let hw = holt_winters_additive(&series, &params).unwrap();
        assert!(hw.seasonals.iter().all(|s| s.abs() <= 1e-12));
        for (a, b) in hw.forecasts.iter().zip(&holt_fit.forecasts) {
            assert!((a - b).abs() <= 1e-10);
        }
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #[test]
            fn two_forms_agree(
                y in prop::collection::vec(-1e3f64..1e3, 1..200),
                alpha in 0.01f64..0.99,
                l0 in -1e3f64..1e3,
            ) {
                let series = Series::new(y).unwrap();
                let levels = ses_levels(&series, alpha, l0).unwrap();
                let forecasts = ses_error_form(&series, alpha, l0).unwrap();
                for (l, f) in levels.iter().zip(&forecasts) {
                    prop_assert!((l - f).abs() <= 1e-12 * l.abs().max(1.0));
                }
            }

            #[test]
            fn levels_are_convex_combinations(
                y in prop::collection::vec(-1e3f64..1e3, 1..100),
                alpha in 0.01f64..0.99,
                l0 in -1e3f64..1e3,
            ) {
                let series = Series::new(y.clone()).unwrap();
                let levels = ses_levels(&series, alpha, l0).unwrap();
                let mut prev = l0;
                for (l, yt) in levels.iter().zip(&y) {
                    let (lo, hi) = (prev.min(*yt), prev.max(*yt));
                    prop_assert!(*l >= lo - 1e-9 && *l <= hi + 1e-9);
                    prev = *l;
                }
            }

            #[test]
            fn holt_exact_on_linear_series(
                a in -50f64..50.0,
                slope in -5f64..5.0,
                alpha in 0.05f64..0.95,
                beta in 0.05f64..0.95,
            ) {
                let y: Vec<f64> = (1..=150).map(|t| a + slope * t as f64).collect();
                let series = Series::new(y).unwrap();
                let fit = holt(&series, alpha, beta, a, slope).unwrap();
                for e in fit.one_step_errors(&series) {
                    prop_assert!(e.abs() <= 1e-9);
                }
            }
        }
    }
}
