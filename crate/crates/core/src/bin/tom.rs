use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use tom_core::harness::{
    self, check_divergence, compare_suite, default_epochs, format_g17, gradcheck_suite, metrics_csv,
    summarize, write_outputs, ExperimentConfig, HarnessError, GRADCHECK_TOLERANCE,
};
use tom_core::smoothing::{holt, holt_default_init, holt_winters_additive, ses_levels, Series, SmoothingParams};
use tom_core::verify;
use tom_core::{OptimizerConfig, OptimizerKind};

/// Optimizer benchmarks, bias-factor checks and smoothing demos.
#[derive(Parser)]
#[command(name = "tom", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Train one TOML config; writes CSVs to the output directory or prints
    /// the metrics CSV to stdout.
    Train {
        #[arg(long)]
        config: PathBuf,
        /// Overrides `output_dir` from the config.
        #[arg(long)]
        output_dir: Option<PathBuf>,
    },
    /// Cross each config with each optimizer over a seed list.
    Suite {
        /// Repeat for several problems.
        #[arg(long, required = true)]
        config: Vec<PathBuf>,
        /// Comma-separated kinds, each at its defaults.
        #[arg(long, value_delimiter = ',', default_value = "sgd,sgdm,adagrad,rmsprop,adam,amsgrad,tom")]
        optimizers: Vec<OptimizerKind>,
        #[arg(long, value_delimiter = ',', default_value = "0,1,2,3,4")]
        seeds: Vec<u64>,
        /// Step size for every optimizer.
        #[arg(long, default_value_t = 0.001)]
        alpha: f64,
        #[arg(long)]
        output_dir: Option<PathBuf>,
    },
    /// Print the bias-factor table, optionally with a Monte Carlo check.
    VerifyBias {
        #[arg(long, default_value_t = 0.9)]
        beta1: f64,
        #[arg(long, default_value_t = 0.99)]
        beta2: f64,
        #[arg(long, value_delimiter = ',', default_value = "1,5,10,50,100")]
        steps: Vec<u32>,
        /// Monte Carlo trials; 0 skips the simulation.
        #[arg(long, default_value_t = 0)]
        trials: usize,
        #[arg(long, default_value_t = 20)]
        t: u32,
        #[arg(long, default_value_t = 1.0)]
        mean: f64,
        #[arg(long, default_value_t = 0.5)]
        stddev: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Smooth one CSV column and extrapolate it.
    Forecast {
        #[arg(long)]
        input: PathBuf,
        /// Column name; defaults to the first column.
        #[arg(long)]
        column: Option<String>,
        #[arg(long, value_enum, default_value_t = Method::Holt)]
        method: Method,
        #[arg(long, default_value_t = 0.5)]
        alpha: f64,
        #[arg(long, default_value_t = 0.5)]
        beta: f64,
        #[arg(long, default_value_t = 0.5)]
        gamma: f64,
        #[arg(long, default_value_t = 12)]
        cycle: usize,
        #[arg(long, default_value_t = 10)]
        horizon: usize,
    },
    /// Backprop against central differences on seeded random networks.
    Gradcheck {
        #[arg(long, default_value_t = 20)]
        cases: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Method {
    Ses,
    Holt,
    HoltWinters,
}

/// Error carrying the process exit code.
struct Failure {
    code: u8,
    message: String,
}

impl From<HarnessError> for Failure {
    fn from(e: HarnessError) -> Self {
        Failure { code: e.exit_code() as u8, message: e.to_string() }
    }
}

fn usage(message: impl Into<String>) -> Failure {
    Failure { code: 1, message: message.into() }
}

fn data_error(message: impl Into<String>) -> Failure {
    Failure { code: 2, message: message.into() }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    let result = match cli.command {
        Command::Train { config, output_dir } => train(&config, output_dir),
        Command::Suite { config, optimizers, seeds, alpha, output_dir } => {
            suite(&config, &optimizers, &seeds, alpha, output_dir)
        }
        Command::VerifyBias { beta1, beta2, steps, trials, t, mean, stddev, seed } => {
            verify_bias(beta1, beta2, &steps, trials, t, mean, stddev, seed)
        }
        Command::Forecast { input, column, method, alpha, beta, gamma, cycle, horizon } => {
            forecast(&input, column.as_deref(), method, alpha, beta, gamma, cycle, horizon)
        }
        Command::Gradcheck { cases, seed } => gradcheck(cases, seed),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}

/// Print without panicking when the reader hangs up early.
fn emit(text: &str) {
    let _ = std::io::stdout().lock().write_all(text.as_bytes());
}

fn train(path: &Path, output_dir: Option<PathBuf>) -> Result<(), Failure> {
    let config = ExperimentConfig::from_file(path)?;
    let prepared = harness::prepare(&config)?;
    let records = harness::run_prepared(&prepared, prepared.optimizer.kind.name())?;
    let summary = summarize(&records, &default_epochs(&records))?;
    match output_dir.or(config.output_dir.clone()) {
        Some(dir) => {
            write_outputs(&dir, Some(&prepared.config.to_toml_string()), &records, &summary)?;
            emit(&summary.render());
            emit(&format!("wrote {} runs to {}\n", records.len(), dir.display()));
        }
        None => {
            emit(&metrics_csv(&records));
            eprint!("{}", summary.render());
        }
    }
    check_divergence(&records)?;
    Ok(())
}

fn suite(
    paths: &[PathBuf],
    kinds: &[OptimizerKind],
    seeds: &[u64],
    alpha: f64,
    output_dir: Option<PathBuf>,
) -> Result<(), Failure> {
    let problems = paths
        .iter()
        .map(ExperimentConfig::from_file)
        .collect::<Result<Vec<_>, _>>()?;
    let optimizers: Vec<OptimizerConfig> = kinds.iter().map(|&k| OptimizerConfig::new(k).with_alpha(alpha)).collect();
    let report = compare_suite(&problems, &optimizers, seeds)?;
    emit(&report.summary.render());
    emit("final epoch\n");
    emit(&report.final_epoch.render());
    if let Some(dir) = output_dir {
        write_outputs(&dir, None, &report.records, &report.summary)?;
        emit(&format!("wrote {} runs to {}\n", report.records.len(), dir.display()));
    }
    check_divergence(&report.records)?;
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn verify_bias(
    beta1: f64,
    beta2: f64,
    steps: &[u32],
    trials: usize,
    t: u32,
    mean: f64,
    stddev: f64,
    seed: u64,
) -> Result<(), Failure> {
    let text = verify::report(beta1, beta2, steps).map_err(|e| usage(e.to_string()))?;
    emit(&text);
    if trials > 0 {
        let est = verify::monte_carlo_forecast_bias(beta1, beta2, mean, stddev, t, trials, seed)
            .map_err(|e| usage(e.to_string()))?;
        emit(&format!(
            "monte carlo t={t} trials={trials}: mean(f)/exact = {:.6} (se {:.2e}), mean(f)/approx = {:.6}\n",
            est.empirical_ratio, est.std_error, est.approx_ratio
        ));
    }
    Ok(())
}

fn read_series(path: &Path, column: Option<&str>) -> Result<Vec<f64>, Failure> {
    let mut rdr = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|e| data_error(format!("{}: {e}", path.display())))?;
    let headers = rdr.headers().map_err(|e| data_error(e.to_string()))?.clone();
    let idx = match column {
        Some(name) => headers
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| data_error(format!("missing column `{name}`")))?,
        None => 0,
    };
    let mut values = Vec::new();
    for (i, record) in rdr.records().enumerate() {
        let record = record.map_err(|e| data_error(e.to_string()))?;
        let cell = record.get(idx).unwrap_or("");
        let v: f64 = cell
            .parse()
            .map_err(|_| data_error(format!("row {}: cannot parse `{cell}`", i + 1)))?;
        values.push(v);
    }
    Ok(values)
}

#[allow(clippy::too_many_arguments)]
fn forecast(
    input: &Path,
    column: Option<&str>,
    method: Method,
    alpha: f64,
    beta: f64,
    gamma: f64,
    cycle: usize,
    horizon: usize,
) -> Result<(), Failure> {
    let values = read_series(input, column)?;
    let series = Series::new(values.clone()).map_err(|e| data_error(e.to_string()))?;
    let fail = |e: tom_core::smoothing::SmoothingError| usage(e.to_string());
    let mut out = std::io::stdout().lock();
    let mut line = |s: String| {
        let _ = out.write_all(s.as_bytes());
        let _ = out.write_all(b"\n");
    };
    line("t,observed,level,trend,season,forecast".into());
    let n = values.len();
    match method {
        Method::Ses => {
            let levels = ses_levels(&series, alpha, values[0]).map_err(fail)?;
            for (i, (y, l)) in values.iter().zip(&levels).enumerate() {
                line(format!("{},{},{},,,{}", i + 1, format_g17(*y), format_g17(*l), format_g17(*l)));
            }
            for h in 1..=horizon {
                line(format!("{},,,,,{}", n + h, format_g17(levels[n - 1])));
            }
        }
        Method::Holt => {
            let (l0, b0) = holt_default_init(&series);
            let fit = holt(&series, alpha, beta, l0, b0).map_err(fail)?;
            for i in 0..n {
                line(format!(
                    "{},{},{},{},,{}",
                    i + 1,
                    format_g17(values[i]),
                    format_g17(fit.levels[i]),
                    format_g17(fit.trends[i]),
                    format_g17(fit.forecasts[i])
                ));
            }
            for h in 1..=horizon {
                line(format!("{},,,,,{}", n + h, format_g17(fit.forecast_ahead(h))));
            }
        }
        Method::HoltWinters => {
            let params = SmoothingParams::with_default_init(&series, alpha, beta, gamma, cycle).map_err(fail)?;
            let fit = holt_winters_additive(&series, &params).map_err(fail)?;
            for i in 0..n {
                line(format!(
                    "{},{},{},{},{},{}",
                    i + 1,
                    format_g17(values[i]),
                    format_g17(fit.levels[i]),
                    format_g17(fit.trends[i]),
                    format_g17(fit.seasonals[i]),
                    format_g17(fit.forecasts[i])
                ));
            }
            for h in 1..=horizon {
                line(format!("{},,,,,{}", n + h, format_g17(fit.forecast_ahead(h, cycle))));
            }
        }
    }
    Ok(())
}

fn gradcheck(cases: usize, seed: u64) -> Result<(), Failure> {
    let results = gradcheck_suite(cases, seed)?;
    let mut text = format!(
        "{:<14} {:>4} {:<16} {:>5} {:>12} {:>8} {:>6}\n",
        "loss", "case", "layers", "rows", "max_error", "compared", "kinks"
    );
    for c in &results {
        text += &format!(
            "{:<14} {:>4} {:<16} {:>5} {:>12.3e} {:>8} {:>6}\n",
            c.loss.name(),
            c.case,
            format!("{:?}", c.layer_sizes),
            c.rows,
            c.report.max_error,
            c.report.compared,
            c.report.skipped_kinks
        );
    }
    let worst = results.iter().map(|c| c.report.max_error).fold(0.0, f64::max);
    let failed = results.iter().filter(|c| !c.passed()).count();
    text += &format!("worst error {worst:.3e}, tolerance {GRADCHECK_TOLERANCE:e}, {failed} failed\n");
    emit(&text);
    if failed > 0 {
        return Err(usage(format!("{failed} gradient check cases exceeded tolerance")));
    }
    Ok(())
}
