//! Computations behind the browser page. Everything returns plain
//! serializable values so it runs and tests natively.

use serde::Serialize;
use tom_core::data::{make_quadratic, make_rosenbrock, Objective};
use tom_core::smoothing::{holt, holt_default_init, holt_winters_additive, ses_error_form, Series, SmoothingParams};
use tom_core::verify::bias_factors;
use tom_core::{Optimizer, OptimizerConfig, OptimizerKind, RealVector};

/// Paths are cut once a coordinate leaves this box.
const ESCAPE: f64 = 1e6;

#[derive(Debug, Clone, Serialize)]
pub struct OptimizerPath {
    pub optimizer: String,
    pub points: Vec<[f64; 2]>,
    pub losses: Vec<f64>,
    pub diverged: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct Trajectories {
    pub problem: String,
    /// `[xmin, xmax, ymin, ymax]`.
    pub bounds: [f64; 4],
    pub grid_size: usize,
    /// Row-major `log10(1 + loss)`, row 0 at `ymin`.
    pub grid: Vec<f64>,
    pub minimum: [f64; 2],
    pub paths: Vec<OptimizerPath>,
}

struct Surface {
    objective: Box<dyn Objective>,
    start: [f64; 2],
    bounds: [f64; 4],
    minimum: [f64; 2],
}

fn surface(problem: &str) -> Result<Surface, String> {
    match problem {
        "rosenbrock" => Ok(Surface {
            objective: Box::new(make_rosenbrock(2).map_err(|e| e.to_string())?),
            start: [-1.2, 1.0],
            bounds: [-2.0, 2.0, -1.0, 3.0],
            minimum: [1.0, 1.0],
        }),
        "quadratic" => Ok(Surface {
            objective: Box::new(make_quadratic(2, 25.0, 7).map_err(|e| e.to_string())?),
            start: [-1.6, 1.4],
            bounds: [-2.0, 2.0, -2.0, 2.0],
            minimum: [0.0, 0.0],
        }),
        other => Err(format!("unknown problem `{other}`")),
    }
}

fn run_path(objective: &dyn Objective, config: OptimizerConfig, start: [f64; 2], steps: usize) -> Result<OptimizerPath, String> {
    let mut theta = RealVector::new(start.to_vec());
    let mut opt = Optimizer::new(config, 2).map_err(|e| e.to_string())?;
    let mut path = OptimizerPath {
        optimizer: config.kind.name().into(),
        points: vec![start],
        losses: vec![objective.loss(theta.as_slice())],
        diverged: false,
    };
    for _ in 0..steps {
        let g = objective.gradient(theta.as_slice());
        opt.step(&mut theta, &g).map_err(|e| e.to_string())?;
        let (x, y) = (theta.as_slice()[0], theta.as_slice()[1]);
        let loss = objective.loss(theta.as_slice());
        if !(loss.is_finite() && x.abs() < ESCAPE && y.abs() < ESCAPE) {
            path.diverged = true;
            break;
        }
        path.points.push([x, y]);
        path.losses.push(loss);
    }
    Ok(path)
}

/// Runs each named optimizer from a fixed start on a 2D surface.
pub fn trajectories(problem: &str, optimizers: &[&str], alpha: f64, steps: usize, grid_size: usize) -> Result<Trajectories, String> {
    if !(alpha > 0.0 && alpha.is_finite()) {
        return Err(format!("alpha must be positive, got {alpha}"));
    }
    if grid_size < 2 {
        return Err("grid size must be >= 2".into());
    }
    let s = surface(problem)?;
    let paths = optimizers
        .iter()
        .map(|name| {
            let kind: OptimizerKind = name.trim().parse().map_err(|e: tom_core::optim::OptimError| e.to_string())?;
            run_path(s.objective.as_ref(), OptimizerConfig::new(kind).with_alpha(alpha), s.start, steps)
        })
        .collect::<Result<Vec<_>, _>>()?;
    let [x0, x1, y0, y1] = s.bounds;
    let step = |lo: f64, hi: f64, i: usize| lo + (hi - lo) * i as f64 / (grid_size - 1) as f64;
    let mut grid = Vec::with_capacity(grid_size * grid_size);
    for r in 0..grid_size {
        for c in 0..grid_size {
            grid.push(s.objective.loss(&[step(x0, x1, c), step(y0, y1, r)]).ln_1p() / std::f64::consts::LN_10);
        }
    }
    Ok(Trajectories {
        problem: problem.into(),
        bounds: s.bounds,
        grid_size,
        grid,
        minimum: s.minimum,
        paths,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct BiasCurves {
    pub t: Vec<u32>,
    pub trend: Vec<f64>,
    pub level: Vec<f64>,
    pub forecast: Vec<f64>,
    pub approx: Vec<f64>,
    pub gap: Vec<f64>,
}

pub fn bias_curves(beta1: f64, beta2: f64, steps: u32) -> Result<BiasCurves, String> {
    let mut out = BiasCurves {
        t: Vec::new(),
        trend: Vec::new(),
        level: Vec::new(),
        forecast: Vec::new(),
        approx: Vec::new(),
        gap: Vec::new(),
    };
    for t in 1..=steps {
        let f = bias_factors(beta1, beta2, t).map_err(|e| e.to_string())?;
        out.t.push(t);
        out.trend.push(f.trend_factor);
        out.level.push(f.level_factor);
        out.forecast.push(f.forecast_factor);
        out.approx.push(f.approx_factor);
        out.gap.push(f.relative_gap());
    }
    Ok(out)
}

#[derive(Debug, Clone, Serialize)]
pub struct ForecastResult {
    pub method: String,
    pub values: Vec<f64>,
    /// One-step forecasts `f_1..f_n`.
    pub fitted: Vec<f64>,
    /// `h = 1..=horizon` past the last observation.
    pub ahead: Vec<f64>,
    pub sse: f64,
}

/// Numbers separated by commas, semicolons or whitespace.
pub fn parse_series(text: &str) -> Result<Vec<f64>, String> {
    text.split(|c: char| c == ',' || c == ';' || c.is_whitespace())
        .filter(|s| !s.is_empty())
        .map(|s| s.parse::<f64>().map_err(|_| format!("not a number: `{s}`")))
        .collect()
}

pub fn forecast(values: Vec<f64>, method: &str, alpha: f64, beta: f64, gamma: f64, cycle: usize, horizon: usize) -> Result<ForecastResult, String> {
    let series = Series::new(values.clone()).map_err(|e| e.to_string())?;
    let n = series.len();
    let (first, rest, ahead): (f64, Vec<f64>, Vec<f64>) = match method {
        "ses" => {
            let f = ses_error_form(&series, alpha, values[0]).map_err(|e| e.to_string())?;
            let last = f[n - 1];
            (values[0], f, vec![last; horizon])
        }
        "holt" => {
            let (l0, b0) = holt_default_init(&series);
            let fit = holt(&series, alpha, beta, l0, b0).map_err(|e| e.to_string())?;
            let ahead = (1..=horizon).map(|h| fit.forecast_ahead(h)).collect();
            (fit.initial_forecast, fit.forecasts, ahead)
        }
        "holt-winters" => {
            let params = SmoothingParams::with_default_init(&series, alpha, beta, gamma, cycle).map_err(|e| e.to_string())?;
            let fit = holt_winters_additive(&series, &params).map_err(|e| e.to_string())?;
            let ahead = (1..=horizon).map(|h| fit.forecast_ahead(h, cycle)).collect();
            (fit.initial_forecast, fit.forecasts, ahead)
        }
        other => return Err(format!("unknown method `{other}`")),
    };
    let fitted: Vec<f64> = std::iter::once(first).chain(rest.into_iter().take(n - 1)).collect();
    let sse = fitted.iter().zip(&values).map(|(f, y)| (y - f).powi(2)).sum();
    Ok(ForecastResult {
        method: method.into(),
        values,
        fitted,
        ahead,
        sse,
    })
}
