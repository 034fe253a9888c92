//! Command-line front end: `run`, `bounds`, `divergence` and `stein`.
//!
//! Exit codes: 0 success, 1 I/O failure, 2 invalid configuration or
//! arguments, 3 numeric failure.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use clap::{Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

use crate::cramer_rao::{cr_l2_cox, cr_l2_gaussian, cr_w2alpha_cox, cr_w2alpha_gaussian, cr_walphap_gaussian};
use crate::montecarlo::{
    divergence_probe, drift_label, estimate_risk, super_efficiency_experiment, with_threads, Estimator,
    ExperimentSpec, Model, ProbeSubject, RiskReport,
};
use crate::processes::{simulate_bm, shift_by_drift, DriftSpec, IntensitySpec, RateCurve, TimeGrid};
use crate::rng::Stream;
use crate::sobolev_energy::{Atom, EnergySpec, MeasureSpec, Regime};
use crate::stein::{SteinConfig, SteinOperator};
use crate::Error;

/// Environment variable capping the number of worker threads.
pub const THREADS_ENV: &str = "FRAC_STEIN_THREADS";

pub const CSV_HEADER: &str = "experiment,model,estimator,energy,alpha,p,m,reps,seed,estimate,stderr,ci_lo,ci_hi,bound,ratio";

#[derive(Debug, Parser)]
#[command(name = "frac-stein", version, about = "Cramer-Rao bounds, Monte Carlo risks and Stein shrinkage under fractional Sobolev risks")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run the experiments of a JSON config and write results to a directory.
    Run {
        config: PathBuf,
        out: PathBuf,
    },
    /// Print Cramer-Rao bounds as CSV.
    Bounds(BoundsArgs),
    /// Mean discrete risk of X across doubling resolutions.
    Divergence(DivergenceArgs),
    /// Super-efficiency experiment for the shrinkage estimator.
    Stein(SteinArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModelKind {
    Gaussian,
    Cox,
}

#[derive(Debug, clap::Args)]
pub struct BoundsArgs {
    #[arg(long, value_enum, default_value = "gaussian")]
    pub model: ModelKind,
    /// Fractional orders, comma separated; omitted for the L² bound.
    #[arg(long, value_delimiter = ',')]
    pub alpha: Vec<f64>,
    #[arg(long, default_value_t = 2.0)]
    pub p: f64,
    /// Horizons, comma separated.
    #[arg(long = "T", value_delimiter = ',', default_value = "1")]
    pub horizon: Vec<f64>,
    /// `lebesgue` or atoms `time:weight,time:weight,...` (L² bound only).
    #[arg(long, default_value = "lebesgue")]
    pub mu: String,
    /// Constant mean intensity `E[u̇]` of the Cox model.
    #[arg(long, default_value_t = 1.0)]
    pub mean_intensity: f64,
    /// Significant digits of the printed bound.
    #[arg(long, default_value_t = 7)]
    pub digits: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ProbeEnergy {
    H1,
    Wfrac,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum RegimeArg {
    Pc,
    Pl,
}

impl From<RegimeArg> for Regime {
    fn from(r: RegimeArg) -> Self {
        match r {
            RegimeArg::Pc => Regime::PiecewiseConstant,
            RegimeArg::Pl => Regime::PiecewiseLinear,
        }
    }
}

#[derive(Debug, clap::Args)]
pub struct DivergenceArgs {
    #[arg(long, value_enum, default_value = "gaussian")]
    pub model: ModelKind,
    #[arg(long, value_enum, default_value = "h1")]
    pub energy: ProbeEnergy,
    #[arg(long, default_value_t = 0.6)]
    pub alpha: f64,
    #[arg(long, value_enum, default_value = "pl")]
    pub regime: RegimeArg,
    #[arg(long = "T", default_value_t = 1.0)]
    pub horizon: f64,
    #[arg(long, value_delimiter = ',', default_value = "64,128,256")]
    pub resolutions: Vec<usize>,
    #[arg(long, default_value_t = 1000)]
    pub reps: u64,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    /// Drift of the Gaussian model, e.g. `zero`, `linear:0.5`.
    #[arg(long, default_value = "zero")]
    pub drift: String,
    /// Evaluate the drift path itself instead of X - u.
    #[arg(long)]
    pub deterministic: bool,
    /// Constant intensity of the Cox model.
    #[arg(long, default_value_t = 1.0)]
    pub mean_intensity: f64,
    /// Also write the table to this file.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, clap::Args)]
pub struct SteinArgs {
    #[arg(long, default_value_t = 8)]
    pub n: usize,
    #[arg(long, default_value_t = -1.0, allow_hyphen_values = true)]
    pub a: f64,
    #[arg(long, default_value_t = 0.25)]
    pub alpha: f64,
    #[arg(long = "T", default_value_t = 1.0)]
    pub horizon: f64,
    /// Cells of the simulation grid (a multiple of n).
    #[arg(long, default_value_t = 256)]
    pub m: usize,
    #[arg(long, default_value_t = 100_000)]
    pub reps: u64,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    /// Drifts, e.g. `zero`, `linear:0.5`, `quadratic:0.5`, `sine:1:3.14`.
    #[arg(long = "drift", default_values_t = ["zero".to_string(), "linear:0.5".to_string()])]
    pub drifts: Vec<String>,
    /// Directory for the result table and shift profiles.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

/// Failure of a subcommand, mapped to an exit code.
#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Validation(String),
    #[error("{0}")]
    Numeric(String),
    #[error("{0}")]
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Io(_) => 1,
            CliError::Validation(_) => 2,
            CliError::Numeric(_) => 3,
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::InvalidArgument(m) => CliError::Validation(format!("invalid argument: {m}")),
            Error::Numeric(m) => CliError::Numeric(format!("numeric error: {m}")),
        }
    }
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> CliError + '_ {
    move |e| CliError::Io(format!("{}: {e}", path.display()))
}

/// Experiment file: `{"experiments": [...]}`.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Config {
    pub experiments: Vec<ExperimentConfig>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EstimatorKind {
    #[default]
    Identity,
    Stein,
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridConfig {
    #[serde(rename = "T")]
    pub horizon: f64,
    pub m: usize,
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SteinParams {
    pub n: usize,
    pub a: f64,
    pub alpha: f64,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    #[serde(default)]
    pub name: Option<String>,
    pub model: ModelKind,
    #[serde(default)]
    pub estimator: EstimatorKind,
    pub energy: EnergySpec,
    pub grid: GridConfig,
    /// Gaussian drift; zero when omitted.
    #[serde(default)]
    pub drift: Option<DriftSpec>,
    /// Cox intensity; unit Poisson when omitted.
    #[serde(default)]
    pub intensity: Option<IntensitySpec>,
    #[serde(default)]
    pub stein: Option<SteinParams>,
    pub reps: u64,
    pub seed: u64,
}

impl ExperimentConfig {
    pub fn to_spec(&self, index: usize) -> crate::Result<ExperimentSpec> {
        let name = self.name.clone().unwrap_or_else(|| format!("experiment_{index}"));
        let ctx = |e: Error| match e {
            Error::InvalidArgument(m) => Error::InvalidArgument(format!("experiments[{index}] ({name}): {m}")),
            other => other,
        };
        let fail = |m: &str| Err(Error::InvalidArgument(format!("experiments[{index}] ({name}): {m}")));
        let model = match self.model {
            ModelKind::Gaussian => {
                if self.intensity.is_some() {
                    return fail("`intensity` is only allowed with model cox");
                }
                Model::Gaussian(self.drift.clone().unwrap_or(DriftSpec::Zero {}))
            }
            ModelKind::Cox => {
                if self.drift.is_some() {
                    return fail("`drift` is only allowed with model gaussian");
                }
                Model::Cox(self.intensity.unwrap_or_else(IntensitySpec::unit))
            }
        };
        let estimator = match (self.estimator, self.stein) {
            (EstimatorKind::Identity, None) => Estimator::Identity,
            (EstimatorKind::Identity, Some(_)) => return fail("`stein` block given but estimator is identity"),
            (EstimatorKind::Stein, None) => return fail("estimator stein needs a `stein` block {n, a, alpha}"),
            (EstimatorKind::Stein, Some(s)) => {
                Estimator::Stein(SteinConfig::uniform(self.grid.horizon, s.n, s.a, s.alpha).map_err(ctx)?)
            }
        };
        let grid = Arc::new(TimeGrid::uniform(self.grid.horizon, self.grid.m).map_err(ctx)?);
        let spec = ExperimentSpec {
            name: name.clone(),
            model,
            estimator,
            energy: self.energy.clone(),
            grid,
            reps: self.reps,
            seed: self.seed,
        };
        spec.validate().map_err(ctx)?;
        Ok(spec)
    }
}

/// Parses and validates a config document; the error names the JSON path of
/// the offending key.
pub fn parse_config(text: &str) -> Result<Vec<ExperimentSpec>, CliError> {
    let de = &mut serde_json::Deserializer::from_str(text);
    let config: Config = serde_path_to_error::deserialize(de)
        .map_err(|e| CliError::Validation(format!("config error at `{}`: {}", e.path(), e.inner())))?;
    if config.experiments.is_empty() {
        return Err(CliError::Validation("config has no experiments".into()));
    }
    let specs = config
        .experiments
        .iter()
        .enumerate()
        .map(|(i, e)| e.to_spec(i))
        .collect::<crate::Result<Vec<_>>>()?;
    let mut names: Vec<&str> = specs.iter().map(|s| s.name.as_str()).collect();
    names.sort_unstable();
    if let Some(w) = names.windows(2).find(|w| w[0] == w[1]) {
        return Err(CliError::Validation(format!("duplicate experiment name `{}`", w[0])));
    }
    Ok(specs)
}

/// `%.{digits}g`-style formatting with trailing zeros removed; `inf`, `-inf`
/// and `nan` for non-finite values.
pub fn format_sig(x: f64, digits: usize) -> String {
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if x == 0.0 {
        return "0".into();
    }
    let digits = digits.max(1);
    let sci = format!("{:.*e}", digits - 1, x);
    let (mantissa, exp) = sci.split_once('e').expect("exponent");
    let exp: i32 = exp.parse().expect("integer exponent");
    let trim = |s: String| {
        if s.contains('.') {
            s.trim_end_matches('0').trim_end_matches('.').to_string()
        } else {
            s
        }
    };
    if exp < -5 || exp >= digits as i32 {
        format!("{}e{exp}", trim(mantissa.to_string()))
    } else {
        let decimals = (digits as i32 - 1 - exp).max(0) as usize;
        trim(format!("{x:.decimals$}"))
    }
}

fn csv_num(x: f64) -> String {
    format_sig(x, 17)
}

fn csv_opt(x: Option<f64>) -> String {
    x.map(csv_num).unwrap_or_default()
}

/// Configuration inputs are echoed at shortest round-trip precision.
fn csv_input(x: f64) -> String {
    if x.is_finite() {
        x.to_string()
    } else {
        format_sig(x, 17)
    }
}

pub fn csv_row(r: &RiskReport) -> String {
    [
        r.experiment.clone(),
        r.model.clone(),
        r.estimator.clone(),
        r.energy.clone(),
        r.alpha.map(csv_input).unwrap_or_default(),
        csv_input(r.p),
        r.m.to_string(),
        r.reps.to_string(),
        r.seed.to_string(),
        csv_num(r.estimate),
        csv_num(r.stderr),
        csv_num(r.ci_lo),
        csv_num(r.ci_hi),
        csv_opt(r.bound),
        csv_opt(r.ratio),
    ]
    .join(",")
}

/// Worker cap from [`THREADS_ENV`]; `None` when unset.
pub fn thread_cap() -> Result<Option<usize>, CliError> {
    match std::env::var(THREADS_ENV) {
        Err(_) => Ok(None),
        Ok(v) => match v.trim().parse::<usize>() {
            Ok(n) if n > 0 => Ok(Some(n)),
            _ => Err(CliError::Validation(format!("{THREADS_ENV} must be a positive integer, got {v:?}"))),
        },
    }
}

fn in_pool<R: Send>(f: impl FnOnce() -> Result<R, CliError> + Send) -> Result<R, CliError> {
    let cap = thread_cap()?;
    with_threads(cap, f)?
}

/// `run`: executes every experiment and writes `results.json`,
/// `results.csv` and `plotdata/risk_vs_bound.csv` under `out`.
pub fn run(config: &Path, out: &Path) -> Result<Vec<RiskReport>, CliError> {
    let text = fs::read_to_string(config).map_err(io_err(config))?;
    let specs = parse_config(&text)?;
    let reports: Vec<RiskReport> = in_pool(|| specs.iter().map(|s| estimate_risk(s).map_err(CliError::from)).collect())?;
    write_results(&reports, out)?;
    Ok(reports)
}

pub fn write_results(reports: &[RiskReport], out: &Path) -> Result<(), CliError> {
    let plot_dir = out.join("plotdata");
    fs::create_dir_all(&plot_dir).map_err(io_err(&plot_dir))?;

    let json = serde_json::to_string_pretty(reports).map_err(|e| CliError::Io(e.to_string()))?;
    let path = out.join("results.json");
    fs::write(&path, json + "\n").map_err(io_err(&path))?;

    let mut csv = String::from(CSV_HEADER);
    csv.push('\n');
    for r in reports {
        csv.push_str(&csv_row(r));
        csv.push('\n');
    }
    let path = out.join("results.csv");
    fs::write(&path, csv).map_err(io_err(&path))?;

    let mut plot = String::from("experiment,m,estimate,ci_lo,ci_hi,bound,discrete_expectation\n");
    for r in reports {
        let _ = writeln!(
            plot,
            "{},{},{},{},{},{},{}",
            r.experiment,
            r.m,
            csv_num(r.estimate),
            csv_num(r.ci_lo),
            csv_num(r.ci_hi),
            csv_opt(r.bound),
            csv_opt(r.discrete_expectation)
        );
    }
    let path = plot_dir.join("risk_vs_bound.csv");
    fs::write(&path, plot).map_err(io_err(&path))
}

fn parse_mu(text: &str) -> crate::Result<MeasureSpec> {
    if text.eq_ignore_ascii_case("lebesgue") {
        return Ok(MeasureSpec::Lebesgue {});
    }
    let atoms = text
        .split(',')
        .map(|item| {
            let (t, w) = item.split_once(':').ok_or_else(|| {
                Error::InvalidArgument(format!("--mu atoms must be time:weight, got {item:?}"))
            })?;
            let num = |s: &str| {
                s.trim()
                    .parse::<f64>()
                    .map_err(|_| Error::InvalidArgument(format!("--mu: cannot parse number {s:?}")))
            };
            Ok(Atom { time: num(t)?, weight: num(w)? })
        })
        .collect::<crate::Result<Vec<_>>>()?;
    Ok(MeasureSpec::Discrete { atoms })
}

/// Parses `zero`, `linear:s`, `quadratic:c` or `sine:amplitude:omega`.
pub fn parse_drift(text: &str) -> crate::Result<DriftSpec> {
    let parts: Vec<&str> = text.split(':').map(str::trim).collect();
    let nums: Vec<f64> = parts[1..]
        .iter()
        .map(|s| s.parse::<f64>().map_err(|_| Error::InvalidArgument(format!("drift {text:?}: bad number {s:?}"))))
        .collect::<crate::Result<_>>()?;
    let drift = match (parts[0], nums.as_slice()) {
        ("zero", []) => DriftSpec::Zero {},
        ("linear", [slope]) => DriftSpec::Linear { slope: *slope },
        ("quadratic", [coef]) => DriftSpec::Quadratic { coef: *coef },
        ("sine", [amplitude, omega]) => DriftSpec::Sine { amplitude: *amplitude, omega: *omega },
        _ => {
            return Err(Error::InvalidArgument(format!(
                "drift {text:?} must be zero, linear:s, quadratic:c or sine:amplitude:omega"
            )))
        }
    };
    drift.validate()?;
    Ok(drift)
}

fn constant_intensity(rate: f64) -> crate::Result<IntensitySpec> {
    if !(rate.is_finite() && rate >= 0.0) {
        return Err(Error::InvalidArgument(format!("--mean-intensity must be finite and >= 0, got {rate}")));
    }
    Ok(IntensitySpec::Deterministic { rate: RateCurve::Constant { value: rate }, max_rate: rate })
}

/// `bounds`: CSV table `model,risk,T,alpha,p,bound`.
pub fn bounds(args: &BoundsArgs) -> Result<String, CliError> {
    let mu = parse_mu(&args.mu)?;
    let rate = args.mean_intensity;
    if args.model == ModelKind::Cox {
        constant_intensity(rate)?;
    }
    let model = match args.model {
        ModelKind::Gaussian => "gaussian",
        ModelKind::Cox => "cox",
    };
    let mut out = String::from("model,risk,T,alpha,p,bound\n");
    for &horizon in &args.horizon {
        if args.alpha.is_empty() {
            let b = match args.model {
                ModelKind::Gaussian => cr_l2_gaussian(&mu, horizon)?,
                ModelKind::Cox => cr_l2_cox(|t| rate * t, &mu, horizon)?,
            };
            let _ = writeln!(out, "{model},l2,{},,,{}", csv_input(horizon), format_sig(b, args.digits));
            continue;
        }
        for &alpha in &args.alpha {
            let b = match args.model {
                ModelKind::Gaussian if args.p == 2.0 => cr_w2alpha_gaussian(horizon, alpha)?,
                ModelKind::Gaussian => cr_walphap_gaussian(horizon, alpha, args.p)?,
                ModelKind::Cox if args.p == 2.0 => cr_w2alpha_cox(|_| rate, horizon, alpha)?,
                ModelKind::Cox => {
                    return Err(CliError::Validation(
                        "no Cox bound is available for p != 2; use --p 2".into(),
                    ))
                }
            };
            let _ = writeln!(
                out,
                "{model},wfrac,{},{},{},{}",
                csv_input(horizon),
                csv_input(alpha),
                csv_input(args.p),
                format_sig(b, args.digits)
            );
        }
    }
    Ok(out)
}

/// `divergence`: CSV table `m,mean,stderr,exact,growth`.
pub fn divergence(args: &DivergenceArgs) -> Result<String, CliError> {
    let energy = match args.energy {
        ProbeEnergy::H1 => EnergySpec::H1 {},
        ProbeEnergy::Wfrac => EnergySpec::Wfrac { alpha: args.alpha, p: 2.0, regime: args.regime.into() },
    };
    let drift = parse_drift(&args.drift)?;
    let subject = match (args.deterministic, args.model) {
        (true, ModelKind::Gaussian) => ProbeSubject::Deterministic(drift),
        (true, ModelKind::Cox) => {
            return Err(CliError::Validation("--deterministic applies to the gaussian model".into()))
        }
        (false, ModelKind::Gaussian) => ProbeSubject::Process(Model::Gaussian(drift)),
        (false, ModelKind::Cox) => ProbeSubject::Process(Model::Cox(constant_intensity(args.mean_intensity)?)),
    };
    let rows = in_pool(|| {
        divergence_probe(&subject, &energy, args.horizon, &args.resolutions, args.reps, args.seed)
            .map_err(CliError::from)
    })?;
    let mut out = String::from("m,mean,stderr,exact,growth\n");
    let mut prev: Option<f64> = None;
    for r in &rows {
        let growth = prev.map(|p| r.mean / p);
        let _ = writeln!(
            out,
            "{},{},{},{},{}",
            r.m,
            csv_num(r.mean),
            csv_num(r.stderr),
            csv_opt(r.exact),
            csv_opt(growth)
        );
        prev = Some(r.mean);
    }
    if let Some(path) = &args.out {
        if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
            fs::create_dir_all(dir).map_err(io_err(dir))?;
        }
        fs::write(path, &out).map_err(io_err(path))?;
    }
    Ok(out)
}

/// `stein`: CSV table of the super-efficiency experiment. With `--out`,
/// also writes it to `super_efficiency.csv` and one sample shift profile
/// per drift to `plotdata/stein_shift.csv`.
pub fn stein(args: &SteinArgs) -> Result<String, CliError> {
    let config = SteinConfig::uniform(args.horizon, args.n, args.a, args.alpha)?;
    let drifts = args.drifts.iter().map(|d| parse_drift(d)).collect::<crate::Result<Vec<_>>>()?;
    if !args.m.is_multiple_of(args.n) {
        return Err(CliError::Validation(format!("--m = {} must be a multiple of --n = {}", args.m, args.n)));
    }
    let rows = in_pool(|| {
        super_efficiency_experiment(&config, &drifts, args.m, args.reps, args.seed).map_err(CliError::from)
    })?;
    let mut out = String::from(
        "drift,m,reps,estimate,stderr,bound,predicted,predicted_stderr,sigmas_below_bound,z_vs_predicted,super_efficient,consistent\n",
    );
    for r in &rows {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{},{},{},{},{}",
            r.drift,
            r.report.m,
            r.report.reps,
            csv_num(r.report.estimate),
            csv_num(r.report.stderr),
            csv_opt(r.report.bound),
            csv_num(r.predicted),
            csv_num(r.predicted_stderr),
            csv_num(r.sigmas_below_bound),
            csv_num(r.z_vs_predicted),
            r.super_efficient,
            r.consistent
        );
    }
    if let Some(dir) = &args.out {
        let plot_dir = dir.join("plotdata");
        fs::create_dir_all(&plot_dir).map_err(io_err(&plot_dir))?;
        let path = dir.join("super_efficiency.csv");
        fs::write(&path, &out).map_err(io_err(&path))?;
        let path = plot_dir.join("stein_shift.csv");
        fs::write(&path, shift_profiles(&config, &drifts, args.m, args.seed)?).map_err(io_err(&path))?;
    }
    Ok(out)
}

/// Observed path, shrunk estimate and shift on the simulation grid for one
/// replication per drift.
fn shift_profiles(config: &SteinConfig, drifts: &[DriftSpec], m: usize, seed: u64) -> Result<String, CliError> {
    let op = SteinOperator::assemble(config.clone())?;
    let grid = Arc::new(TimeGrid::uniform(config.coarse().horizon(), m)?);
    let mut out = String::from("drift,t,u,x,estimate,shift\n");
    for (k, drift) in drifts.iter().enumerate() {
        let mut stream = Stream::new(seed, k as u64);
        let x = shift_by_drift(&simulate_bm(&grid, &mut stream), drift)?;
        let est = op.shrunk_estimator(&x)?;
        let u = drift.on_grid(&grid);
        let label = drift_label(drift).replace(',', ";");
        for (i, &t) in grid.nodes().iter().enumerate() {
            let (xi, ei) = (x.values()[i], est.values()[i]);
            let _ = writeln!(
                out,
                "{label},{},{},{},{},{}",
                csv_input(t),
                csv_num(u.values()[i]),
                csv_num(xi),
                csv_num(ei),
                csv_num(ei - xi)
            );
        }
    }
    Ok(out)
}

/// Executes a parsed command line, printing tables to standard output.
pub fn execute(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Run { config, out } => {
            let reports = run(&config, &out)?;
            println!("{CSV_HEADER}");
            for r in &reports {
                println!("{}", csv_row(r));
            }
        }
        Command::Bounds(args) => print!("{}", bounds(&args)?),
        Command::Divergence(args) => print!("{}", divergence(&args)?),
        Command::Stein(args) => print!("{}", stein(&args)?),
    }
    Ok(())
}

/// Entry point of the binary; returns the process exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    match execute(cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
