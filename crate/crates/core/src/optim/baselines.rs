//! SGD, SGD with momentum, AdaGrad, RMSProp, Adam and AMSGrad.
//!
//! Sign and epsilon conventions are per method: SGD-M accumulates `-α·g`
//! into the velocity and adds it to the parameters; AdaGrad and RMSProp add
//! epsilon under the square root; Adam and AMSGrad add it after.

use super::{check_lengths, decay_pow, scaled_update, OptimError, OptimizerConfig, OptimizerState, StepReport};
use crate::vector::RealVector;

pub fn sgd_step(
    state: &mut OptimizerState,
    params: &RealVector,
    grad: &RealVector,
    cfg: &OptimizerConfig,
) -> Result<(RealVector, StepReport), OptimError> {
    check_lengths(state, params, grad)?;
    let update = grad.scale(-cfg.alpha);
    let next = params.add(&update)?;
    state.t += 1;
    Ok((
        next,
        StepReport {
            update,
            corrected_forecast: None,
            corrected_second: None,
        },
    ))
}

/// `m ← β·m − α·g`, `θ ← θ + m`.
pub fn sgdm_step(
    state: &mut OptimizerState,
    params: &RealVector,
    grad: &RealVector,
    cfg: &OptimizerConfig,
) -> Result<(RealVector, StepReport), OptimError> {
    check_lengths(state, params, grad)?;
    let momentum = state
        .momentum
        .scale(cfg.momentum_beta)
        .sub(&grad.scale(cfg.alpha))?;
    let next = params.add(&momentum)?;
    state.momentum = momentum.clone();
    state.t += 1;
    Ok((
        next,
        StepReport {
            update: momentum,
            corrected_forecast: None,
            corrected_second: None,
        },
    ))
}

/// `G ← G + g²`, `θ ← θ − α·g/√(G + ε)`.
pub fn adagrad_step(
    state: &mut OptimizerState,
    params: &RealVector,
    grad: &RealVector,
    cfg: &OptimizerConfig,
) -> Result<(RealVector, StepReport), OptimError> {
    check_lengths(state, params, grad)?;
    let second = state.second.add(&grad.square())?;
    let update = inner_epsilon_update(cfg, grad, &second)?;
    let next = params.add(&update)?;
    state.second = second.clone();
    state.t += 1;
    Ok((
        next,
        StepReport {
            update,
            corrected_forecast: None,
            corrected_second: Some(second),
        },
    ))
}

/// `G ← β·G + (1−β)·g²` with `β = cfg.beta2`, then the AdaGrad-shaped update.
pub fn rmsprop_step(
    state: &mut OptimizerState,
    params: &RealVector,
    grad: &RealVector,
    cfg: &OptimizerConfig,
) -> Result<(RealVector, StepReport), OptimError> {
    check_lengths(state, params, grad)?;
    let second = state
        .second
        .scale(cfg.beta2)
        .add(&grad.square().scale(1.0 - cfg.beta2))?;
    let update = inner_epsilon_update(cfg, grad, &second)?;
    let next = params.add(&update)?;
    state.second = second.clone();
    state.t += 1;
    Ok((
        next,
        StepReport {
            update,
            corrected_forecast: None,
            corrected_second: Some(second),
        },
    ))
}

fn inner_epsilon_update(
    cfg: &OptimizerConfig,
    grad: &RealVector,
    second: &RealVector,
) -> Result<RealVector, OptimError> {
    let denom = second.add_scalar(cfg.epsilon).sqrt()?;
    Ok(grad.div(&denom)?.scale(-cfg.alpha))
}

pub fn adam_step(
    state: &mut OptimizerState,
    params: &RealVector,
    grad: &RealVector,
    cfg: &OptimizerConfig,
) -> Result<(RealVector, StepReport), OptimError> {
    check_lengths(state, params, grad)?;
    let t = state.t + 1;
    let momentum = state
        .momentum
        .scale(cfg.beta1)
        .add(&grad.scale(1.0 - cfg.beta1))?;
    let second = state
        .second
        .scale(cfg.beta2)
        .add(&grad.square().scale(1.0 - cfg.beta2))?;
    let (first_hat, second_hat) = if cfg.bias_correction {
        (
            momentum.scale(1.0 / (1.0 - decay_pow(cfg.beta1, t))),
            second.scale(1.0 / (1.0 - decay_pow(cfg.beta2, t))),
        )
    } else {
        (momentum.clone(), second.clone())
    };
    let update = scaled_update(cfg.alpha, &first_hat, &second_hat, cfg.epsilon)?;
    let next = params.add(&update)?;
    state.momentum = momentum;
    state.second = second;
    state.t = t;
    Ok((
        next,
        StepReport {
            update,
            corrected_forecast: None,
            corrected_second: Some(second_hat),
        },
    ))
}

/// Adam with `v̂ ← max(v̂, v)` in place of the second-moment bias correction.
/// The first moment is still bias corrected.
pub fn amsgrad_step(
    state: &mut OptimizerState,
    params: &RealVector,
    grad: &RealVector,
    cfg: &OptimizerConfig,
) -> Result<(RealVector, StepReport), OptimError> {
    check_lengths(state, params, grad)?;
    let t = state.t + 1;
    let momentum = state
        .momentum
        .scale(cfg.beta1)
        .add(&grad.scale(1.0 - cfg.beta1))?;
    let second = state
        .second
        .scale(cfg.beta2)
        .add(&grad.square().scale(1.0 - cfg.beta2))?;
    let second_max = state.second_max.max(&second)?;
    let first_hat = momentum.scale(1.0 / (1.0 - decay_pow(cfg.beta1, t)));
    let update = scaled_update(cfg.alpha, &first_hat, &second_max, cfg.epsilon)?;
    let next = params.add(&update)?;
    state.momentum = momentum;
    state.second = second;
    state.second_max = second_max.clone();
    state.t = t;
    Ok((
        next,
        StepReport {
            update,
            corrected_forecast: None,
            corrected_second: Some(second_max),
        },
    ))
}
