use serde::{Deserialize, Serialize};

use super::{OptimError, OptimizerConfig, OptimizerKind};
use crate::vector::RealVector;

/// Per-parameter optimizer buffers. All buffers have the parameter length,
/// whether or not the owning kind reads them.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OptimizerState {
    pub kind: OptimizerKind,
    pub t: u64,
    /// Tom level (smoothed gradient).
    pub level: RealVector,
    /// Tom trend (smoothed gradient difference).
    pub trend: RealVector,
    /// Squared-gradient statistic: `v` for Adam/AMSGrad/Tom, `G` for AdaGrad/RMSProp.
    pub second: RealVector,
    /// SGD-M velocity or Adam/AMSGrad first moment.
    pub momentum: RealVector,
    /// AMSGrad running maximum of `second`.
    pub second_max: RealVector,
    /// Gradient from the previous Tom step; zero before the first.
    pub prev_grad: RealVector,
}

impl OptimizerState {
    pub fn dim(&self) -> usize {
        self.second.len()
    }
}

/// What a single step did.
#[derive(Debug, Clone, PartialEq)]
pub struct StepReport {
    /// The increment applied to the parameters (`params' - params`).
    pub update: RealVector,
    /// Tom's (possibly bias-corrected) forecast `ℓ + b`.
    pub corrected_forecast: Option<RealVector>,
    /// Second-moment statistic the update was scaled by.
    pub corrected_second: Option<RealVector>,
}

pub fn init_state(config: &OptimizerConfig, dim: usize) -> Result<OptimizerState, OptimError> {
    config.validate()?;
    if dim == 0 {
        return Err(OptimError::InvalidConfig("dimension must be >= 1".into()));
    }
    let second = if config.kind == OptimizerKind::AdaGrad {
        RealVector::filled(dim, config.initial_accumulator)
    } else {
        RealVector::zeros(dim)
    };
    Ok(OptimizerState {
        kind: config.kind,
        t: 0,
        level: RealVector::zeros(dim),
        trend: RealVector::zeros(dim),
        second,
        momentum: RealVector::zeros(dim),
        second_max: RealVector::zeros(dim),
        prev_grad: RealVector::zeros(dim),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tom_starts_from_zero() {
        let s = init_state(&OptimizerConfig::tom(), 3).unwrap();
        assert_eq!(s.level, RealVector::zeros(3));
        assert_eq!(s.trend, RealVector::zeros(3));
        assert_eq!(s.second, RealVector::zeros(3));
        assert_eq!(s.prev_grad, RealVector::zeros(3));
        assert_eq!(s.t, 0);
    }

    #[test]
    fn adagrad_seeds_accumulator() {
        let s = init_state(&OptimizerConfig::adagrad(), 2).unwrap();
        assert_eq!(s.second.as_slice(), &[0.1, 0.1]);
    }

    #[test]
    fn sgd_buffers_are_zero() {
        let s = init_state(&OptimizerConfig::sgd(), 1).unwrap();
        assert_eq!(s.t, 0);
        for buf in [&s.level, &s.trend, &s.second, &s.momentum, &s.second_max, &s.prev_grad] {
            assert_eq!(buf.as_slice(), &[0.0]);
        }
    }

    #[test]
    fn rejects_empty_and_invalid() {
        assert!(init_state(&OptimizerConfig::sgd(), 0).is_err());
        assert!(init_state(&OptimizerConfig::sgd().with_alpha(-1.0), 2).is_err());
    }
}
