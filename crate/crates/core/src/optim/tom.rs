//! Trend over Momentum (Tom).
//!
//! Adam's first moment is replaced by a Holt linear-trend forecast of the
//! gradient:
//!
//! ```text
//! ℓ_t = β1·(ℓ_{t-1} + b_{t-1}) + (1 − β1)·g_t
//! b_t = β2·b_{t-1} + (1 − β2)·(g_t − g_{t-1})
//! v_t = β3·v_{t-1} + (1 − β3)·g_t²
//! f   = ℓ_t + b_t
//! f̂   = f / (1 − (β1·β2)^t)          (bias correction on)
//! v̂   = v_t / (1 − β3^t)
//! θ_t = θ_{t-1} − α·f̂ / (√v̂ + ε)
//! ```
//!
//! The trend smooths differences of raw gradients, with `g_0 = 0`, unlike
//! Holt's method on a series which differences successive levels. With
//! `β2 = 1` the trend stays at zero and the update is exactly Adam's with
//! second-moment decay `β3`.

use super::{check_lengths, decay_pow, scaled_update, OptimError, OptimizerConfig, OptimizerState, StepReport};
use crate::vector::RealVector;

pub fn tom_step(
    state: &mut OptimizerState,
    params: &RealVector,
    grad: &RealVector,
    cfg: &OptimizerConfig,
) -> Result<(RealVector, StepReport), OptimError> {
    check_lengths(state, params, grad)?;
    let t = state.t + 1;

    let level = state
        .level
        .add(&state.trend)?
        .scale(cfg.beta1)
        .add(&grad.scale(1.0 - cfg.beta1))?;
    let trend = state
        .trend
        .scale(cfg.beta2)
        .add(&grad.sub(&state.prev_grad)?.scale(1.0 - cfg.beta2))?;
    let second = state
        .second
        .scale(cfg.beta3)
        .add(&grad.square().scale(1.0 - cfg.beta3))?;
    let forecast = level.add(&trend)?;

    let (forecast_hat, second_hat) = if cfg.bias_correction {
        (
            forecast.scale(1.0 / (1.0 - decay_pow(cfg.beta1 * cfg.beta2, t))),
            second.scale(1.0 / (1.0 - decay_pow(cfg.beta3, t))),
        )
    } else {
        (forecast, second.clone())
    };

    let update = scaled_update(cfg.alpha, &forecast_hat, &second_hat, cfg.epsilon)?;
    let next = params.add(&update)?;

    state.level = level;
    state.trend = trend;
    state.second = second;
    state.prev_grad = grad.clone();
    state.t = t;
    Ok((
        next,
        StepReport {
            update,
            corrected_forecast: Some(forecast_hat),
            corrected_second: Some(second_hat),
        },
    ))
}
