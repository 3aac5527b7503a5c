//! Trend-over-momentum optimization toolkit.
//!
//! - [`vector`]: dense `f64` vectors and matrices.
//! - [`optim`]: SGD, SGD-M, AdaGrad, RMSProp, Adam, AMSGrad and Tom.
//! - [`smoothing`]: single, Holt linear-trend and additive Holt-Winters smoothing.
//! - [`verify`]: closed-form bias factors for Tom's forecast and their checks.
//! - [`model`]: dense ReLU networks with analytic and finite-difference gradients.
//! - [`data`]: CSV ingestion, seeded splits, normalization and synthetic problems.
//! - [`harness`]: seeded experiment runner, metrics CSV and summaries.

pub mod data;
pub mod harness;
pub mod model;
pub mod optim;
pub mod smoothing;
pub mod vector;
pub mod verify;

pub use optim::{Optimizer, OptimizerConfig, OptimizerKind};
pub use vector::{Matrix, RealVector};
