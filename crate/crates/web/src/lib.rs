//! wasm-bindgen entry points for the demo page. Each returns a JSON string.

pub mod demo;

use serde::Serialize;
use wasm_bindgen::prelude::*;

fn json<T: Serialize>(result: Result<T, String>) -> Result<String, JsValue> {
    result
        .and_then(|v| serde_json::to_string(&v).map_err(|e| e.to_string()))
        .map_err(|e| JsValue::from_str(&e))
}

/// `optimizers` is a comma-separated list of optimizer names.
#[wasm_bindgen]
pub fn trajectories(problem: &str, optimizers: &str, alpha: f64, steps: usize, grid_size: usize) -> Result<String, JsValue> {
    let names: Vec<&str> = optimizers.split(',').filter(|s| !s.trim().is_empty()).collect();
    json(demo::trajectories(problem, &names, alpha, steps, grid_size))
}

#[wasm_bindgen]
pub fn bias_curves(beta1: f64, beta2: f64, steps: u32) -> Result<String, JsValue> {
    json(demo::bias_curves(beta1, beta2, steps))
}

#[wasm_bindgen]
pub fn forecast(
    values: &str,
    method: &str,
    alpha: f64,
    beta: f64,
    gamma: f64,
    cycle: usize,
    horizon: usize,
) -> Result<String, JsValue> {
    json(demo::parse_series(values).and_then(|v| demo::forecast(v, method, alpha, beta, gamma, cycle, horizon)))
}
