//! `ddm` command-line front end.
//!
//! Exit codes: 0 success, 2 input parse error, 3 configuration violation,
//! 4 internal numeric failure. JSON output is pretty-printed; CSV output
//! starts with one `# config: {...}` line echoing the effective
//! configuration, followed by a fixed header. Numbers are written in
//! shortest round-trip form, `,` separated, `\n` terminated.

use crate::ball::{build_ball, BallMethod, DEFAULT_INFLATION_M, DEFAULT_MC_SAMPLES};
use crate::ddm::{fit, ModelConfig, DEFAULT_A, DEFAULT_ALPHA, DEFAULT_GAMMA, DEFAULT_T};
use crate::error::DdmError;
use crate::inference::{marginal_interval, posterior_mean, select, DEFAULT_THRESHOLD};
use crate::sim::{
    coverage_curve, curve_csv, gen_noise, run_experiment, ErrorSpec, ExperimentResult,
    ExperimentSpec,
};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Input(String),
    #[error("{0}")]
    Config(String),
    #[error("{0}")]
    Internal(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            Self::Input(_) => 2,
            Self::Config(_) => 3,
            Self::Internal(_) => 4,
        }
    }
}

impl From<DdmError> for CliError {
    fn from(e: DdmError) -> Self {
        match e {
            DdmError::DimensionMismatch { .. } | DdmError::NonFinite { .. } => {
                Self::Input(e.to_string())
            }
            DdmError::Numeric(_) => Self::Internal(e.to_string()),
            _ => Self::Config(e.to_string()),
        }
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "ddm",
    version,
    about = "Sparse normal means via a closed-form data-dependent measure"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum MethodArg {
    Quantile,
    PlugIn,
}

impl From<MethodArg> for BallMethod {
    fn from(m: MethodArg) -> Self {
        match m {
            MethodArg::Quantile => BallMethod::Quantile,
            MethodArg::PlugIn => BallMethod::PlugIn,
        }
    }
}

#[derive(Debug, Clone, Args)]
pub struct ModelArgs {
    /// Variance proxy of the errors.
    #[arg(long, default_value_t = 1.0)]
    pub sigma: f64,
    #[arg(long, default_value_t = DEFAULT_ALPHA)]
    pub alpha: f64,
    #[arg(long, default_value_t = DEFAULT_GAMMA)]
    pub gamma: f64,
    /// Sparsity exponent: inclusion probability n^-(1+a).
    #[arg(long = "a", default_value_t = DEFAULT_A)]
    pub a: f64,
    /// MGF window endpoint; alpha must be below 2T.
    #[arg(long = "T", default_value_t = DEFAULT_T)]
    pub t_window: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

impl ModelArgs {
    fn config(&self, n: usize) -> ModelConfig {
        ModelConfig::new(n)
            .with_sigma(self.sigma)
            .with_alpha(self.alpha)
            .with_gamma(self.gamma)
            .with_a(self.a)
            .with_t_window(self.t_window)
            .with_seed(self.seed)
    }
}

#[derive(Debug, Clone, Args)]
pub struct OutputArgs {
    #[arg(long, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    /// Output file (written atomically). Defaults to stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Fit the measure to a one-column file of observations.
    Fit {
        input: PathBuf,
        #[command(flatten)]
        model: ModelArgs,
        #[arg(long, default_value_t = DEFAULT_THRESHOLD)]
        threshold: f64,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Select coordinates with slab weight above a threshold.
    Select {
        input: PathBuf,
        #[command(flatten)]
        model: ModelArgs,
        #[arg(long, default_value_t = DEFAULT_THRESHOLD)]
        threshold: f64,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Equal-tailed marginal credible intervals.
    Interval {
        input: PathBuf,
        #[command(flatten)]
        model: ModelArgs,
        #[arg(long, default_value_t = 0.05)]
        zeta: f64,
        /// Zero-based coordinate; all coordinates when omitted.
        #[arg(long)]
        index: Option<usize>,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Credible ball around the mean of the measure.
    Ball {
        input: PathBuf,
        #[command(flatten)]
        model: ModelArgs,
        #[arg(long, value_enum, default_value_t = MethodArg::PlugIn)]
        method: MethodArg,
        #[arg(long, default_value_t = 0.05)]
        zeta: f64,
        #[arg(long = "M", default_value_t = DEFAULT_INFLATION_M)]
        inflation_m: f64,
        #[arg(long, default_value_t = DEFAULT_MC_SAMPLES)]
        mc_samples: usize,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Run one replicated experiment from a JSON spec.
    Simulate {
        spec: PathBuf,
        /// Override the spec's master seed.
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        replications: Option<usize>,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Coverage and mean length of the eleventh-coordinate interval over a grid of signal sizes.
    Curve {
        spec: PathBuf,
        #[arg(long, default_value_t = 0.0)]
        grid_start: f64,
        #[arg(long, default_value_t = 10.0)]
        grid_stop: f64,
        #[arg(long, default_value_t = 1.0)]
        grid_step: f64,
        /// Explicit comma-separated grid; overrides start/stop/step.
        #[arg(long, value_delimiter = ',')]
        grid: Option<Vec<f64>>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        replications: Option<usize>,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Time fit + mean + selection on n standard normal observations.
    Bench {
        #[arg(long, default_value_t = 1_000_000)]
        n: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

/// Parse a one-column file: one real per line, with an optional
/// non-numeric header on the first line. Blank lines are skipped.
pub fn parse_observations(text: &str) -> Result<Vec<f64>, CliError> {
    let mut values = Vec::new();
    for (k, raw) in text.lines().enumerate() {
        let line_no = k + 1;
        let line = raw.trim();
        if line.is_empty() {
            continue;
        }
        if line.contains(',') {
            return Err(CliError::Input(format!(
                "line {line_no}: expected a single column, got {line:?}"
            )));
        }
        match line.parse::<f64>() {
            Ok(v) if v.is_finite() => values.push(v),
            Ok(v) => {
                return Err(CliError::Input(format!(
                    "line {line_no}: non-finite value {v}"
                )));
            }
            Err(_) if line_no == 1 => {}
            Err(e) => {
                return Err(CliError::Input(format!(
                    "line {line_no}: cannot parse {line:?}: {e}"
                )));
            }
        }
    }
    if values.is_empty() {
        return Err(CliError::Input("input contains no observations".into()));
    }
    Ok(values)
}

fn read_observations(path: &Path) -> Result<Vec<f64>, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Input(format!("cannot read {}: {e}", path.display())))?;
    parse_observations(&text)
}

fn read_spec(path: &Path) -> Result<ExperimentSpec, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Input(format!("cannot read {}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| {
        CliError::Input(format!(
            "{}: line {}, column {}: {e}",
            path.display(),
            e.line(),
            e.column()
        ))
    })
}

/// Write to `out` via a temporary file in the same directory, or to stdout.
fn emit(out: Option<&Path>, content: &str) -> Result<(), CliError> {
    let io_err = |e: std::io::Error| CliError::Internal(format!("write failed: {e}"));
    match out {
        Some(path) => {
            let dir = match path.parent() {
                Some(p) if !p.as_os_str().is_empty() => p,
                _ => Path::new("."),
            };
            let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(io_err)?;
            tmp.write_all(content.as_bytes()).map_err(io_err)?;
            tmp.persist(path).map_err(|e| io_err(e.error))?;
            Ok(())
        }
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(content.as_bytes()).map_err(io_err)?;
            stdout.flush().map_err(io_err)
        }
    }
}

fn to_json(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("JSON values always serialize");
    s.push('\n');
    s
}

fn csv_with_config(config: &Value, header: &str, rows: impl IntoIterator<Item = String>) -> String {
    let mut out = format!("# config: {config}\n{header}\n");
    for row in rows {
        out.push_str(&row);
        out.push('\n');
    }
    out
}

fn model_echo(config: &ModelConfig, extra: Value) -> Value {
    let mut v = serde_json::to_value(config).expect("config serializes");
    if let (Value::Object(map), Value::Object(more)) = (&mut v, extra) {
        map.extend(more);
    }
    v
}

fn fitted(
    input: &Path,
    model: &ModelArgs,
) -> Result<(crate::ddm::DdmParams, ModelConfig), CliError> {
    let y = read_observations(input)?;
    let config = model.config(y.len());
    let params = fit(&y, &config)?;
    Ok((params, config))
}

pub fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Fit {
            input,
            model,
            threshold,
            output,
        } => {
            let (params, config) = fitted(&input, &model)?;
            let mean = posterior_mean(&params);
            let sel = select(&params, threshold)?;
            let echo = model_echo(&config, json!({ "threshold": threshold }));
            let content = match output.format {
                Format::Json => to_json(&json!({
                    "command": "fit",
                    "config": echo,
                    "params": params.to_record(),
                    "posterior_mean": mean,
                    "selected": sel.selected,
                    "expected_dim": sel.expected_dim,
                })),
                Format::Csv => csv_with_config(
                    &echo,
                    "index,y,phi,posterior_mean,selected",
                    (0..params.n()).map(|i| {
                        format!(
                            "{},{},{},{},{}",
                            i,
                            params.mu()[i],
                            params.phi()[i],
                            mean[i],
                            u8::from(params.phi()[i] > threshold)
                        )
                    }),
                ),
            };
            emit(output.out.as_deref(), &content)
        }
        Command::Select {
            input,
            model,
            threshold,
            output,
        } => {
            let (params, config) = fitted(&input, &model)?;
            let sel = select(&params, threshold)?;
            let echo = model_echo(&config, json!({ "threshold": threshold }));
            let content = match output.format {
                Format::Json => to_json(&json!({
                    "command": "select",
                    "config": echo,
                    "selected": sel.selected,
                    "expected_dim": sel.expected_dim,
                    "threshold": sel.threshold,
                })),
                Format::Csv => csv_with_config(
                    &echo,
                    "index,phi,selected",
                    sel.phi
                        .iter()
                        .enumerate()
                        .map(|(i, p)| format!("{i},{p},{}", u8::from(*p > threshold))),
                ),
            };
            emit(output.out.as_deref(), &content)
        }
        Command::Interval {
            input,
            model,
            zeta,
            index,
            output,
        } => {
            let (params, config) = fitted(&input, &model)?;
            let indices: Vec<usize> = match index {
                Some(i) => vec![i],
                None => (0..params.n()).collect(),
            };
            let intervals = indices
                .iter()
                .map(|&i| marginal_interval(&params, i, zeta).map(|iv| (i, iv)))
                .collect::<Result<Vec<_>, _>>()?;
            let echo = model_echo(&config, json!({ "zeta": zeta, "index": index }));
            let content = match output.format {
                Format::Json => to_json(&json!({
                    "command": "interval",
                    "config": echo,
                    "intervals": intervals.iter().map(|(i, iv)| json!({
                        "index": i,
                        "lower": iv.lower,
                        "upper": iv.upper,
                        "contains_atom_at_zero": iv.contains_atom_at_zero,
                    })).collect::<Vec<_>>(),
                })),
                Format::Csv => csv_with_config(
                    &echo,
                    "index,lower,upper,contains_atom_at_zero",
                    intervals.iter().map(|(i, iv)| {
                        format!(
                            "{},{},{},{}",
                            i,
                            iv.lower,
                            iv.upper,
                            u8::from(iv.contains_atom_at_zero)
                        )
                    }),
                ),
            };
            emit(output.out.as_deref(), &content)
        }
        Command::Ball {
            input,
            model,
            method,
            zeta,
            inflation_m,
            mc_samples,
            output,
        } => {
            let (params, config) = fitted(&input, &model)?;
            let ball = build_ball(
                &params,
                method.into(),
                zeta,
                inflation_m,
                mc_samples,
                config.rng_seed,
            )?;
            let record = ball.to_record();
            let echo = model_echo(
                &config,
                json!({ "method": record.method, "zeta": zeta, "M": inflation_m, "mc_samples": mc_samples }),
            );
            let content = match output.format {
                Format::Json => to_json(&json!({
                    "command": "ball",
                    "config": echo,
                    "ball": record,
                    "center": ball.center,
                })),
                Format::Csv => csv_with_config(
                    &echo,
                    "method,zeta,M,g_n,raw_radius,inflated_radius,mc_samples,seed",
                    [format!(
                        "{},{},{},{},{},{},{},{}",
                        record.method.as_str(),
                        record.zeta,
                        record.inflation_m,
                        record.g_n,
                        record.raw_radius,
                        record.inflated_radius,
                        record.mc_samples.map(|m| m.to_string()).unwrap_or_default(),
                        record.seed.map(|s| s.to_string()).unwrap_or_default()
                    )],
                ),
            };
            emit(output.out.as_deref(), &content)
        }
        Command::Simulate {
            spec,
            seed,
            replications,
            output,
        } => {
            let mut spec = read_spec(&spec)?;
            if let Some(s) = seed {
                spec.seed = s;
            }
            if let Some(r) = replications {
                spec.replications = r;
            }
            let result = run_experiment(&spec)?;
            let echo = serde_json::to_value(&spec).expect("spec serializes");
            let content = match output.format {
                Format::Json => to_json(&json!({
                    "command": "simulate",
                    "config": echo,
                    "result": result,
                })),
                Format::Csv => {
                    csv_with_config(&echo, ExperimentResult::CSV_HEADER, [result.csv_row()])
                }
            };
            emit(output.out.as_deref(), &content)
        }
        Command::Curve {
            spec,
            grid_start,
            grid_stop,
            grid_step,
            grid,
            seed,
            replications,
            format,
            out,
        } => {
            let mut spec = read_spec(&spec)?;
            if let Some(s) = seed {
                spec.seed = s;
            }
            if let Some(r) = replications {
                spec.replications = r;
            }
            let grid = match grid {
                Some(g) => g,
                None => build_grid(grid_start, grid_stop, grid_step)?,
            };
            let rows = coverage_curve(&spec, &grid)?;
            let echo = json!({ "spec": spec, "grid": grid });
            let content = match format {
                Format::Csv => format!("# config: {echo}\n{}", curve_csv(&rows)),
                Format::Json => to_json(&json!({
                    "command": "curve",
                    "config": echo,
                    "rows": rows,
                })),
            };
            emit(out.as_deref(), &content)
        }
        Command::Bench { n, seed, out } => {
            let report = bench(n, seed)?;
            emit(out.as_deref(), &to_json(&report))
        }
    }
}

/// `start, start + step, …` up to `stop` inclusive.
pub fn build_grid(start: f64, stop: f64, step: f64) -> Result<Vec<f64>, CliError> {
    if !(step > 0.0 && step.is_finite() && start.is_finite() && stop.is_finite() && stop >= start) {
        return Err(CliError::Config(format!(
            "invalid grid: start {start}, stop {stop}, step {step}"
        )));
    }
    let count = ((stop - start) / step + 1e-9).floor() as usize;
    Ok((0..=count).map(|k| start + k as f64 * step).collect())
}

fn peak_rss_bytes() -> Option<u64> {
    let status = std::fs::read_to_string("/proc/self/status").ok()?;
    let line = status.lines().find(|l| l.starts_with("VmHWM:"))?;
    let kb: u64 = line.split_whitespace().nth(1)?.parse().ok()?;
    Some(kb * 1024)
}

/// End-to-end timing of fit, mean and selection. Only the timing and
/// memory fields vary between runs.
pub fn bench(n: usize, seed: u64) -> Result<Value, CliError> {
    if n == 0 {
        return Err(CliError::Config("bench needs n >= 1".into()));
    }
    let y = gen_noise(&ErrorSpec::Gaussian { sigma: 1.0 }, n, seed)?;
    let config = ModelConfig::new(n).with_seed(seed);
    let start = Instant::now();
    let params = fit(&y, &config)?;
    let mean = posterior_mean(&params);
    let sel = select(&params, DEFAULT_THRESHOLD)?;
    let seconds = start.elapsed().as_secs_f64();
    Ok(json!({
        "command": "bench",
        "config": model_echo(&config, json!({ "threshold": DEFAULT_THRESHOLD })),
        "n": n,
        "seconds": seconds,
        "throughput_per_second": n as f64 / seconds.max(1e-12),
        "selected_count": sel.size(),
        "expected_dim": sel.expected_dim,
        "mean_abs_sum": mean.iter().map(|v| v.abs()).sum::<f64>(),
        "peak_rss_bytes": peak_rss_bytes(),
    }))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_plain_and_header_variants() {
        assert_eq!(
            parse_observations("1\n2.5\n-3e1\n").unwrap(),
            vec![1.0, 2.5, -30.0]
        );
        assert_eq!(parse_observations("y\n1\n\n2\n").unwrap(), vec![1.0, 2.0]);
    }

    #[test]
    fn parse_errors_carry_line_numbers() {
        let e = parse_observations("1\nabc\n").unwrap_err();
        assert!(e.to_string().contains("line 2"));
        assert_eq!(e.exit_code(), 2);
        assert!(parse_observations("").is_err());
        assert!(parse_observations("y\n").is_err());
        assert!(parse_observations("1,2\n")
            .unwrap_err()
            .to_string()
            .contains("line 1"));
        assert!(parse_observations("1\ninf\n").is_err());
    }

    #[test]
    fn grid_construction() {
        assert_eq!(build_grid(0.0, 10.0, 0.5).unwrap().len(), 21);
        assert_eq!(build_grid(0.0, 10.0, 1.0).unwrap().len(), 11);
        assert!(build_grid(0.0, 1.0, 0.0).is_err());
    }

    #[test]
    fn error_mapping() {
        assert_eq!(CliError::from(DdmError::InvalidZeta(0.7)).exit_code(), 3);
        assert_eq!(CliError::from(DdmError::Numeric("x".into())).exit_code(), 4);
        assert_eq!(
            CliError::from(DdmError::NonFinite {
                index: 0,
                value: f64::NAN
            })
            .exit_code(),
            2
        );
    }

    #[test]
    fn bench_single_coordinate() {
        let r = bench(1, 3).unwrap();
        assert_eq!(r["n"], 1);
        assert!(r["selected_count"].as_u64().unwrap() <= 1);
    }
}
