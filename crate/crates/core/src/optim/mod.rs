//! First-order optimizers behind one stepping interface.
//!
//! Each kind has a free function `*_step(state, params, grad, cfg)` that
//! validates lengths, then advances `state` and returns the new parameters.
//! [`step`] is the pure dispatcher over [`OptimizerKind`]; [`Optimizer`]
//! bundles a config with its state for training loops.

mod baselines;
mod config;
mod state;
mod tom;

use thiserror::Error;

pub use baselines::{adagrad_step, adam_step, amsgrad_step, rmsprop_step, sgd_step, sgdm_step};
pub use config::{OptimizerConfig, OptimizerKind};
pub use state::{init_state, OptimizerState, StepReport};
pub use tom::tom_step;

use crate::vector::{RealVector, VectorError};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum OptimError {
    #[error("invalid optimizer config: {0}")]
    InvalidConfig(String),
    #[error("length mismatch: params {params}, grad {grad}, state {state}")]
    LengthMismatch {
        params: usize,
        grad: usize,
        state: usize,
    },
    #[error("state was built for {state}, config is {config}")]
    KindMismatch {
        config: OptimizerKind,
        state: OptimizerKind,
    },
    #[error(transparent)]
    Vector(#[from] VectorError),
}

pub(crate) fn check_lengths(
    state: &OptimizerState,
    params: &RealVector,
    grad: &RealVector,
) -> Result<(), OptimError> {
    let dim = state.dim();
    if params.len() != dim || grad.len() != dim {
        return Err(OptimError::LengthMismatch {
            params: params.len(),
            grad: grad.len(),
            state: dim,
        });
    }
    Ok(())
}

/// `base^t`, shared by every bias correction so equal inputs give equal bits.
pub(crate) fn decay_pow(base: f64, t: u64) -> f64 {
    base.powi(i32::try_from(t).unwrap_or(i32::MAX))
}

/// `−α·first / (√second + ε)`.
pub(crate) fn scaled_update(
    alpha: f64,
    first: &RealVector,
    second: &RealVector,
    epsilon: f64,
) -> Result<RealVector, OptimError> {
    let denom = second.sqrt()?.add_scalar(epsilon);
    Ok(first.div(&denom)?.scale(-alpha))
}

/// Bias-correction divisor `1 − β^t` for a step counter `t`.
pub fn bias_correction_factor(beta: f64, t: u64) -> f64 {
    1.0 - decay_pow(beta, t)
}

type StepFn = fn(
    &mut OptimizerState,
    &RealVector,
    &RealVector,
    &OptimizerConfig,
) -> Result<(RealVector, StepReport), OptimError>;

fn step_fn(kind: OptimizerKind) -> StepFn {
    match kind {
        OptimizerKind::Sgd => sgd_step,
        OptimizerKind::Sgdm => sgdm_step,
        OptimizerKind::AdaGrad => adagrad_step,
        OptimizerKind::RmsProp => rmsprop_step,
        OptimizerKind::Adam => adam_step,
        OptimizerKind::AmsGrad => amsgrad_step,
        OptimizerKind::Tom => tom_step,
    }
}

/// Pure dispatch: returns the new parameters and state, leaving the inputs
/// untouched.
pub fn step(
    config: &OptimizerConfig,
    state: &OptimizerState,
    params: &RealVector,
    grad: &RealVector,
) -> Result<(RealVector, OptimizerState, StepReport), OptimError> {
    if config.kind != state.kind {
        return Err(OptimError::KindMismatch {
            config: config.kind,
            state: state.kind,
        });
    }
    let mut next_state = state.clone();
    let (next, report) = step_fn(config.kind)(&mut next_state, params, grad, config)?;
    Ok((next, next_state, report))
}

/// A config together with the state it owns.
#[derive(Debug, Clone)]
pub struct Optimizer {
    config: OptimizerConfig,
    state: OptimizerState,
}

impl Optimizer {
    pub fn new(config: OptimizerConfig, dim: usize) -> Result<Self, OptimError> {
        let state = init_state(&config, dim)?;
        Ok(Self { config, state })
    }

    pub fn config(&self) -> &OptimizerConfig {
        &self.config
    }

    pub fn state(&self) -> &OptimizerState {
        &self.state
    }

    /// Updates `params` in place.
    pub fn step(
        &mut self,
        params: &mut RealVector,
        grad: &RealVector,
    ) -> Result<StepReport, OptimError> {
        let (next, report) = step_fn(self.config.kind)(&mut self.state, params, grad, &self.config)?;
        *params = next;
        Ok(report)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(x: &[f64]) -> RealVector {
        RealVector::from(x)
    }

    #[test]
    fn dispatch_matches_direct_calls() {
        for kind in OptimizerKind::ALL {
            let cfg = OptimizerConfig::new(kind);
            let state = init_state(&cfg, 2).unwrap();
            let params = v(&[0.3, -0.7]);
            let grad = v(&[1.5, 0.25]);
            let (p, s, r) = step(&cfg, &state, &params, &grad).unwrap();
            let mut direct = state.clone();
            let (dp, dr) = step_fn(kind)(&mut direct, &params, &grad, &cfg).unwrap();
            assert_eq!(p, dp);
            assert_eq!(s, direct);
            assert_eq!(r, dr);
            assert_eq!(s.t, 1);
        }
    }

    #[test]
    fn dispatch_is_deterministic() {
        let cfg = OptimizerConfig::tom();
        let state = init_state(&cfg, 2).unwrap();
        let (p, s, _) = step(&cfg, &state, &v(&[1.0, 2.0]), &v(&[0.1, 0.2])).unwrap();
        let a = step(&cfg, &s.clone(), &p.clone(), &v(&[0.3, -0.1])).unwrap();
        let b = step(&cfg, &s, &p, &v(&[0.3, -0.1])).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn kind_mismatch_is_rejected() {
        let state = init_state(&OptimizerConfig::adam(), 1).unwrap();
        let err = step(&OptimizerConfig::tom(), &state, &v(&[0.0]), &v(&[1.0])).unwrap_err();
        assert!(matches!(err, OptimError::KindMismatch { .. }));
    }

    #[test]
    fn bias_factor_limits() {
        assert!((bias_correction_factor(0.9, 1) - 0.1).abs() < 1e-16);
        assert!((bias_correction_factor(0.9, 10_000) - 1.0).abs() < 1e-16);
    }
}
