use proptest::prelude::*;

use tom_core::smoothing::{holt, holt_winters_additive, ses_error_form, ses_levels, Series, SmoothingParams};

fn series(values: Vec<f64>) -> Series {
    Series::new(values).unwrap()
}

proptest! {
    #[test]
    fn recursive_and_error_forms_agree(values in prop::collection::vec(-100.0f64..100.0, 1..200), alpha in 0.01f64..0.99, start in -10.0f64..10.0) {
        let s = series(values);
        let levels = ses_levels(&s, alpha, start).unwrap();
        let forecasts = ses_error_form(&s, alpha, start).unwrap();
        for (l, f) in levels.iter().zip(&forecasts) {
            prop_assert!((l - f).abs() <= 1e-12 * (1.0 + l.abs()));
        }
    }

    #[test]
    fn smoothed_level_stays_in_hull(values in prop::collection::vec(-5.0f64..5.0, 1..100), alpha in 0.01f64..0.99) {
        let s = series(values.clone());
        let lo = values.iter().cloned().fold(f64::INFINITY, f64::min);
        let hi = values.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        for l in ses_levels(&s, alpha, values[0]).unwrap() {
            prop_assert!(l >= lo - 1e-12 && l <= hi + 1e-12);
        }
    }

    #[test]
    fn holt_is_exact_on_lines(a in -50.0f64..50.0, slope in -5.0f64..5.0, alpha in 0.05f64..0.95, beta in 0.05f64..0.95) {
        let y: Vec<f64> = (1..=100).map(|t| a + slope * t as f64).collect();
        let fit = holt(&series(y.clone()), alpha, beta, a, slope).unwrap();
        for (t, (l, b)) in fit.levels.iter().zip(&fit.trends).enumerate() {
            prop_assert!((l - y[t]).abs() <= 1e-9 * (1.0 + y[t].abs()));
            prop_assert!((b - slope).abs() <= 1e-9);
        }
    }
}

#[test]
fn holt_trend_recovers_slope_at_one_hundred() {
    let y: Vec<f64> = (1..=100).map(|t| 4.0 - 0.75 * t as f64).collect();
    let fit = holt(&series(y), 0.3, 0.6, 4.0 - 0.75, -0.75).unwrap();
    assert!((fit.trends[99] + 0.75).abs() <= 1e-6);
}

#[test]
fn holt_winters_tracks_trend_plus_season() {
    let pattern = [3.0, -1.0, -2.0, 0.0];
    let y: Vec<f64> = (1..=80).map(|t| 10.0 + 0.5 * t as f64 + pattern[(t - 1) % 4]).collect();
    let s = series(y.clone());
    let params = SmoothingParams {
        alpha: 0.4,
        beta: 0.5,
        gamma: 0.6,
        cycle: 4,
        l0: 10.0,
        b0: 0.5,
        s0: pattern.to_vec(),
    };
    let fit = holt_winters_additive(&s, &params).unwrap();
    for (e, t) in fit.one_step_errors(&s).iter().zip(1..) {
        assert!(e.abs() <= 1e-9, "t={t} error {e}");
    }
}
