use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::OptimError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OptimizerKind {
    Sgd,
    Sgdm,
    AdaGrad,
    RmsProp,
    Adam,
    AmsGrad,
    Tom,
}

impl OptimizerKind {
    pub const ALL: [OptimizerKind; 7] = [
        OptimizerKind::Sgd,
        OptimizerKind::Sgdm,
        OptimizerKind::AdaGrad,
        OptimizerKind::RmsProp,
        OptimizerKind::Adam,
        OptimizerKind::AmsGrad,
        OptimizerKind::Tom,
    ];

    pub fn name(self) -> &'static str {
        match self {
            OptimizerKind::Sgd => "sgd",
            OptimizerKind::Sgdm => "sgdm",
            OptimizerKind::AdaGrad => "adagrad",
            OptimizerKind::RmsProp => "rmsprop",
            OptimizerKind::Adam => "adam",
            OptimizerKind::AmsGrad => "amsgrad",
            OptimizerKind::Tom => "tom",
        }
    }
}

impl fmt::Display for OptimizerKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for OptimizerKind {
    type Err = OptimError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        OptimizerKind::ALL
            .into_iter()
            .find(|k| k.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| OptimError::InvalidConfig(format!("unknown optimizer kind `{s}`")))
    }
}

/// Hyperparameters for every optimizer.
///
/// Field meaning depends on `kind`:
///
/// | kind     | beta1        | beta2                  | beta3         |
/// |----------|--------------|------------------------|---------------|
/// | rmsprop  | -            | squared-grad decay     | -             |
/// | adam     | first moment | second moment          | -             |
/// | amsgrad  | first moment | second moment          | -             |
/// | tom      | level        | trend                  | second moment |
///
/// `momentum_beta` is used only by `sgdm`, `initial_accumulator` only by
/// `adagrad`, and `bias_correction` by `adam` and `tom`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OptimizerConfig {
    pub kind: OptimizerKind,
    pub alpha: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub beta3: f64,
    pub epsilon: f64,
    pub momentum_beta: f64,
    pub initial_accumulator: f64,
    pub bias_correction: bool,
}

impl OptimizerConfig {
    /// Defaults for `kind`: step size 0.001, epsilon 1e-8, and the
    /// kind-specific decay constants from the table above.
    pub fn new(kind: OptimizerKind) -> Self {
        let beta2 = match kind {
            OptimizerKind::Tom => 0.99,
            OptimizerKind::RmsProp => 0.9,
            _ => 0.999,
        };
        Self {
            kind,
            alpha: 0.001,
            beta1: 0.9,
            beta2,
            beta3: 0.999,
            epsilon: 1e-8,
            momentum_beta: 0.9,
            initial_accumulator: 0.1,
            bias_correction: true,
        }
    }

    pub fn sgd() -> Self {
        Self::new(OptimizerKind::Sgd)
    }

    pub fn sgdm() -> Self {
        Self::new(OptimizerKind::Sgdm)
    }

    pub fn adagrad() -> Self {
        Self::new(OptimizerKind::AdaGrad)
    }

    pub fn rmsprop() -> Self {
        Self::new(OptimizerKind::RmsProp)
    }

    pub fn adam() -> Self {
        Self::new(OptimizerKind::Adam)
    }

    pub fn amsgrad() -> Self {
        Self::new(OptimizerKind::AmsGrad)
    }

    pub fn tom() -> Self {
        Self::new(OptimizerKind::Tom)
    }

    pub fn with_alpha(mut self, alpha: f64) -> Self {
        self.alpha = alpha;
        self
    }

    pub fn with_betas(mut self, beta1: f64, beta2: f64, beta3: f64) -> Self {
        self.beta1 = beta1;
        self.beta2 = beta2;
        self.beta3 = beta3;
        self
    }

    pub fn with_bias_correction(mut self, on: bool) -> Self {
        self.bias_correction = on;
        self
    }

    pub fn validate(&self) -> Result<(), OptimError> {
        let bad = |what: String| Err(OptimError::InvalidConfig(what));
        if !(self.alpha > 0.0 && self.alpha.is_finite()) {
            return bad(format!("alpha must be > 0, got {}", self.alpha));
        }
        if !(self.epsilon > 0.0 && self.epsilon.is_finite()) {
            return bad(format!("epsilon must be > 0, got {}", self.epsilon));
        }
        if !(self.initial_accumulator >= 0.0 && self.initial_accumulator.is_finite()) {
            return bad(format!(
                "initial_accumulator must be >= 0, got {}",
                self.initial_accumulator
            ));
        }
        let in_unit = |x: f64| (0.0..1.0).contains(&x);
        for (name, value) in [
            ("beta1", self.beta1),
            ("beta3", self.beta3),
            ("momentum_beta", self.momentum_beta),
        ] {
            if !in_unit(value) {
                return bad(format!("{name} must lie in [0, 1), got {value}"));
            }
        }
        // beta2 = 1 freezes Tom's trend at zero, which is how Tom reduces to Adam.
        let beta2_ok = if self.kind == OptimizerKind::Tom {
            (0.0..=1.0).contains(&self.beta2)
        } else {
            in_unit(self.beta2)
        };
        if !beta2_ok {
            return bad(format!("beta2 out of range for {}: {}", self.kind, self.beta2));
        }
        Ok(())
    }
}

impl Default for OptimizerConfig {
    fn default() -> Self {
        Self::tom()
    }
}
