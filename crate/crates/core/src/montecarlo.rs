//! Replication-parallel risk estimation.
//!
//! Replication `i` draws everything from `Stream::new(seed, i)` and results
//! are aggregated in index order with compensated sums, so a report depends
//! only on the spec and seed, never on the number of workers.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::cramer_rao::{cr_l2_cox, cr_l2_gaussian, cr_w2alpha_cox, cr_w2alpha_gaussian, cr_walphap_gaussian};
use crate::error::{invalid, Result};
use crate::processes::{shift_by_drift, simulate_bm, simulate_cox, DriftSpec, IntensitySpec, RateCurve, RealPath, TimeGrid};
use crate::rng::Stream;
use crate::sobolev_energy::{Energy, EnergySpec, Regime};
use crate::stats::{mean_and_stderr, replicate};
use crate::stein::{PredictedRisk, SteinConfig, SteinOperator};

/// Two-sided 95% normal quantile.
pub const Z95: f64 = 1.959_963_984_540_054;

/// Minimum replication count of an experiment.
pub const MIN_REPS: u64 = 100;

/// Observation model with its true parameter.
#[derive(Debug, Clone, PartialEq)]
pub enum Model {
    Gaussian(DriftSpec),
    Cox(IntensitySpec),
}

impl Model {
    pub fn label(&self) -> &'static str {
        match self {
            Model::Gaussian(_) => "gaussian",
            Model::Cox(_) => "cox",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Estimator {
    /// The efficient estimator `ξ = X`.
    Identity,
    /// `X + ξ` with the shrinkage shift.
    Stein(SteinConfig),
}

impl Estimator {
    pub fn label(&self) -> &'static str {
        match self {
            Estimator::Identity => "identity",
            Estimator::Stein(_) => "stein",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentSpec {
    pub name: String,
    pub model: Model,
    pub estimator: Estimator,
    pub energy: EnergySpec,
    pub grid: Arc<TimeGrid>,
    pub reps: u64,
    pub seed: u64,
}

impl ExperimentSpec {
    pub fn validate(&self) -> Result<()> {
        if self.reps < MIN_REPS {
            return invalid(format!("reps must be >= {MIN_REPS}, got {}", self.reps));
        }
        let horizon = self.grid.horizon();
        self.energy.validate(horizon)?;
        match &self.model {
            Model::Gaussian(d) => d.validate()?,
            Model::Cox(i) => i.validate(horizon)?,
        }
        if let Estimator::Stein(cfg) = &self.estimator {
            if !matches!(self.model, Model::Gaussian(_)) {
                return invalid("the stein estimator is only available for the gaussian model");
            }
            if cfg.coarse().horizon() != horizon {
                return invalid("stein coarse grid and experiment grid have different horizons");
            }
            self.grid.embed(cfg.coarse()).map_err(|_| {
                crate::Error::InvalidArgument("stein coarse nodes must be nodes of the experiment grid".into())
            })?;
        }
        Ok(())
    }
}

/// Monte Carlo risk estimate with its theoretical comparison values.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RiskReport {
    pub experiment: String,
    pub model: String,
    pub estimator: String,
    pub energy: String,
    pub alpha: Option<f64>,
    pub p: f64,
    pub m: usize,
    pub reps: u64,
    pub seed: u64,
    pub estimate: f64,
    pub stderr: f64,
    pub ci_lo: f64,
    pub ci_hi: f64,
    /// Cramer–Rao bound; `+∞` when no unbiased estimator has finite risk,
    /// `None` when no closed-form bound is available for this risk.
    #[serde(with = "extended_real")]
    pub bound: Option<f64>,
    pub ratio: Option<f64>,
    /// Exact expectation of the discretized risk of `X`, when known.
    pub discrete_expectation: Option<f64>,
}

/// `Option<f64>` with `+∞` written as the string `"inf"`.
mod extended_real {
    use serde::{de::Error as _, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &Option<f64>, s: S) -> Result<S::Ok, S::Error> {
        match v {
            None => s.serialize_none(),
            Some(x) if *x == f64::INFINITY => s.serialize_str("inf"),
            Some(x) => s.serialize_f64(*x),
        }
    }

    #[derive(Deserialize)]
    #[serde(untagged)]
    enum Repr {
        Num(f64),
        Text(String),
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Option<f64>, D::Error> {
        match Option::<Repr>::deserialize(d)? {
            None => Ok(None),
            Some(Repr::Num(x)) => Ok(Some(x)),
            Some(Repr::Text(t)) if t == "inf" => Ok(Some(f64::INFINITY)),
            Some(Repr::Text(t)) => Err(D::Error::custom(format!("expected a number or \"inf\", got {t:?}"))),
        }
    }
}

impl RiskReport {
    fn new(spec: &ExperimentSpec, m: usize, samples: &[f64], bound: Option<f64>, exact: Option<f64>) -> Self {
        let (estimate, stderr) = mean_and_stderr(samples);
        let ratio = bound.filter(|b| b.is_finite() && *b > 0.0).map(|b| estimate / b);
        Self {
            experiment: spec.name.clone(),
            model: spec.model.label().into(),
            estimator: spec.estimator.label().into(),
            energy: spec.energy.label(),
            alpha: spec.energy.alpha(),
            p: spec.energy.p(),
            m,
            reps: samples.len() as u64,
            seed: spec.seed,
            estimate,
            stderr,
            ci_lo: estimate - Z95 * stderr,
            ci_hi: estimate + Z95 * stderr,
            bound,
            ratio,
            discrete_expectation: exact,
        }
    }

    /// `|estimate - target|` in standard errors.
    pub fn z_score(&self, target: f64) -> f64 {
        (self.estimate - target).abs() / self.stderr
    }
}

/// Cramer–Rao bound matching the model and risk of a spec.
pub fn bound_for(model: &Model, energy: &EnergySpec, horizon: f64) -> Result<Option<f64>> {
    Ok(match (model, energy) {
        (_, EnergySpec::H1 {}) => Some(f64::INFINITY),
        (Model::Gaussian(_), EnergySpec::L2 { mu }) => Some(cr_l2_gaussian(mu, horizon)?),
        (Model::Gaussian(_), EnergySpec::Wfrac { alpha, p, .. }) if *p == 2.0 => {
            Some(cr_w2alpha_gaussian(horizon, *alpha)?)
        }
        (Model::Gaussian(_), EnergySpec::Wfrac { alpha, p, .. }) => Some(cr_walphap_gaussian(horizon, *alpha, *p)?),
        (Model::Cox(i), EnergySpec::L2 { mu }) => Some(cr_l2_cox(|t| i.mean_compensator(t), mu, horizon)?),
        (Model::Cox(i), EnergySpec::Wfrac { alpha, p, .. }) if *p == 2.0 => {
            Some(cr_w2alpha_cox(|t| i.mean_rate(t), horizon, *alpha)?)
        }
        (Model::Cox(_), EnergySpec::Wfrac { .. }) => None,
    })
}

/// Exact expected discretized energy of `X - u` for the estimator `X`, where
/// it has a closed form: Gaussian `p = 2` risks, and Cox `p = 2` risks with a
/// constant base rate (increments then have variance `E[Z] λ̄ |t - s|`).
fn discrete_expectation(spec: &ExperimentSpec, energy: &Energy) -> Option<f64> {
    if spec.estimator != Estimator::Identity {
        return None;
    }
    let bm = energy.brownian_expectation()?;
    match &spec.model {
        Model::Gaussian(_) => Some(bm),
        Model::Cox(i) => match i.rate() {
            RateCurve::Constant { value } => Some(i.mean_multiplier() * value * bm),
            _ => None,
        },
    }
}

/// Per-experiment state shared by all replications.
struct Prepared {
    drift_path: Option<RealPath>,
    stein: Option<SteinOperator>,
}

impl Prepared {
    fn new(spec: &ExperimentSpec, grid: &Arc<TimeGrid>) -> Result<Self> {
        let drift_path = match &spec.model {
            Model::Gaussian(d) => Some(d.on_grid(grid)),
            Model::Cox(_) => None,
        };
        let stein = match &spec.estimator {
            Estimator::Stein(cfg) => Some(SteinOperator::assemble(cfg.clone())?),
            Estimator::Identity => None,
        };
        Ok(Self { drift_path, stein })
    }

    /// Node values of `estimator(X) - u` for replication `i`.
    fn error_path(&self, spec: &ExperimentSpec, grid: &Arc<TimeGrid>, i: u64) -> Result<Vec<f64>> {
        let mut stream = Stream::new(spec.seed, i);
        let (estimate, truth) = match &spec.model {
            Model::Gaussian(drift) => {
                let x = shift_by_drift(&simulate_bm(grid, &mut stream), drift)?;
                let est = match &self.stein {
                    Some(op) => op.shrunk_estimator(&x)?,
                    None => x,
                };
                (est, self.drift_path.clone().expect("gaussian drift path"))
            }
            Model::Cox(intensity) => {
                let sample = simulate_cox(grid, intensity, &mut stream)?;
                (sample.path.to_real_path(), sample.compensator())
            }
        };
        Ok(estimate.values().iter().zip(truth.values()).map(|(a, b)| a - b).collect())
    }
}

fn collect<T>(results: Vec<Result<T>>) -> Result<Vec<T>> {
    results.into_iter().collect()
}

/// Mean of `energy(estimator(X) - u)` over the replications.
pub fn estimate_risk(spec: &ExperimentSpec) -> Result<RiskReport> {
    spec.validate()?;
    let grid = &spec.grid;
    let energy = Energy::new(&spec.energy, grid)?;
    let prepared = Prepared::new(spec, grid)?;
    let samples = collect(replicate(spec.reps, |i| {
        energy.evaluate(&prepared.error_path(spec, grid, i)?)
    }))?;
    let bound = bound_for(&spec.model, &spec.energy, grid.horizon())?;
    Ok(RiskReport::new(spec, grid.cells(), &samples, bound, discrete_expectation(spec, &energy)))
}

/// Risk at resolutions `m` and `2m` from the same draws.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TwoLevelReport {
    pub coarse: RiskReport,
    pub fine: RiskReport,
    /// `(coarse - fine) / fine`.
    pub relative_gap: f64,
    /// Standard error of the paired difference `coarse - fine`.
    pub gap_stderr: f64,
}

/// Simulates on the uniform grid with `2m` cells and evaluates the risk on
/// it and on its restriction to the spec's `m`-cell grid.
pub fn estimate_risk_two_level(spec: &ExperimentSpec) -> Result<TwoLevelReport> {
    spec.validate()?;
    let coarse_grid = &spec.grid;
    if !coarse_grid.is_uniform() {
        return invalid("the two-resolution check needs a uniform grid");
    }
    let fine_grid = Arc::new(TimeGrid::uniform(coarse_grid.horizon(), 2 * coarse_grid.cells())?);
    let fine_energy = Energy::new(&spec.energy, &fine_grid)?;
    let coarse_energy = Energy::new(&spec.energy, coarse_grid)?;
    let prepared = Prepared::new(spec, &fine_grid)?;
    let pairs = collect(replicate(spec.reps, |i| {
        let err = prepared.error_path(spec, &fine_grid, i)?;
        let restricted: Vec<f64> = err.iter().step_by(2).copied().collect();
        Ok((coarse_energy.evaluate(&restricted)?, fine_energy.evaluate(&err)?))
    }))?;
    let coarse: Vec<f64> = pairs.iter().map(|p| p.0).collect();
    let fine: Vec<f64> = pairs.iter().map(|p| p.1).collect();
    let gaps: Vec<f64> = pairs.iter().map(|p| p.0 - p.1).collect();
    let bound = bound_for(&spec.model, &spec.energy, coarse_grid.horizon())?;
    let coarse = RiskReport::new(spec, coarse_grid.cells(), &coarse, bound, discrete_expectation(spec, &coarse_energy));
    let fine = RiskReport::new(spec, fine_grid.cells(), &fine, bound, discrete_expectation(spec, &fine_energy));
    let (gap, gap_stderr) = mean_and_stderr(&gaps);
    Ok(TwoLevelReport { relative_gap: gap / fine.estimate, gap_stderr, coarse, fine })
}

/// What the divergence probe measures.
#[derive(Debug, Clone, PartialEq)]
pub enum ProbeSubject {
    /// `X - u` under the model, averaged over replications.
    Process(Model),
    /// A fixed path `u` in place of `X`.
    Deterministic(DriftSpec),
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DivergenceRow {
    pub m: usize,
    pub mean: f64,
    pub stderr: f64,
    /// Exact expectation of the discretized energy, when known.
    pub exact: Option<f64>,
}

/// Mean discrete energy per resolution for energies in which no unbiased
/// estimator has finite risk.
pub fn divergence_probe(
    subject: &ProbeSubject,
    energy: &EnergySpec,
    horizon: f64,
    resolutions: &[usize],
    reps: u64,
    seed: u64,
) -> Result<Vec<DivergenceRow>> {
    if resolutions.len() < 3 {
        return invalid("divergence probe needs at least 3 resolutions");
    }
    if resolutions.windows(2).any(|w| w[1] != 2 * w[0]) {
        return invalid(format!("resolutions must double at each step, got {resolutions:?}"));
    }
    match energy {
        EnergySpec::H1 {} => {}
        EnergySpec::Wfrac { alpha, .. } if *alpha >= 0.5 => {}
        _ => return invalid("divergence probe needs the h1 energy or wfrac with alpha >= 1/2"),
    }
    resolutions
        .iter()
        .map(|&m| {
            let grid = Arc::new(TimeGrid::uniform(horizon, m)?);
            match subject {
                ProbeSubject::Deterministic(u) => {
                    let e = Energy::new(energy, &grid)?.evaluate(u.on_grid(&grid).values())?;
                    Ok(DivergenceRow { m, mean: e, stderr: 0.0, exact: Some(e) })
                }
                ProbeSubject::Process(model) => {
                    let spec = ExperimentSpec {
                        name: "divergence".into(),
                        model: model.clone(),
                        estimator: Estimator::Identity,
                        energy: energy.clone(),
                        grid,
                        reps,
                        seed,
                    };
                    let r = estimate_risk(&spec)?;
                    Ok(DivergenceRow { m, mean: r.estimate, stderr: r.stderr, exact: r.discrete_expectation })
                }
            }
        })
        .collect()
}

/// One drift of the super-efficiency experiment.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SuperEfficiencyRow {
    pub drift: String,
    pub report: RiskReport,
    pub predicted: f64,
    pub predicted_stderr: f64,
    pub mean_inv_q: f64,
    /// `(ρ - estimate) / stderr`.
    pub sigmas_below_bound: f64,
    /// `|estimate - predicted|` over the joint standard error.
    pub z_vs_predicted: f64,
    pub super_efficient: bool,
    pub consistent: bool,
}

/// MC risk of `X + ξ` in `W^{α,2}` (piecewise-constant regime on a uniform
/// grid with `m` cells) for each drift, against `ρ` and the predicted risk.
pub fn super_efficiency_experiment(
    config: &SteinConfig,
    drifts: &[DriftSpec],
    m: usize,
    reps: u64,
    seed: u64,
) -> Result<Vec<SuperEfficiencyRow>> {
    if !config.is_admissible() {
        return invalid(format!(
            "stein exponent a = {} is outside the admissible range (1 - n/2, 0) for n = {}",
            config.a(),
            config.n()
        ));
    }
    let grid = Arc::new(TimeGrid::uniform(config.coarse().horizon(), m)?);
    let op = SteinOperator::assemble(config.clone())?;
    drifts
        .iter()
        .enumerate()
        .map(|(k, drift)| {
            let spec = ExperimentSpec {
                name: format!("super_efficiency_{k}"),
                model: Model::Gaussian(drift.clone()),
                estimator: Estimator::Stein(config.clone()),
                energy: EnergySpec::Wfrac { alpha: config.alpha(), p: 2.0, regime: Regime::PiecewiseConstant },
                grid: Arc::clone(&grid),
                reps,
                seed: Stream::derive_seed(seed, 2 * k as u64),
            };
            let report = estimate_risk(&spec)?;
            let predicted: PredictedRisk =
                op.predicted_risk(drift, reps, Stream::derive_seed(seed, 2 * k as u64 + 1))?;
            let rho = predicted.rho;
            let sigmas_below_bound = (rho - report.estimate) / report.stderr;
            let joint = report.stderr.hypot(predicted.stderr);
            let z_vs_predicted = (report.estimate - predicted.value).abs() / joint;
            Ok(SuperEfficiencyRow {
                drift: drift_label(drift),
                report,
                predicted: predicted.value,
                predicted_stderr: predicted.stderr,
                mean_inv_q: predicted.mean_inv_q,
                sigmas_below_bound,
                z_vs_predicted,
                super_efficient: sigmas_below_bound >= 3.0,
                consistent: z_vs_predicted <= 3.0,
            })
        })
        .collect()
}

pub fn drift_label(d: &DriftSpec) -> String {
    match d {
        DriftSpec::Zero {} => "zero".into(),
        DriftSpec::Linear { slope } => format!("linear({slope})"),
        DriftSpec::Quadratic { coef } => format!("quadratic({coef})"),
        DriftSpec::Sine { amplitude, omega } => format!("sine({amplitude},{omega})"),
        DriftSpec::Sampled { nodes, .. } => format!("sampled({})", nodes.len()),
    }
}

/// Runs `f` on a rayon pool with at most `threads` workers (all available
/// cores when `None`).
pub fn with_threads<R: Send>(threads: Option<usize>, f: impl FnOnce() -> R + Send) -> Result<R> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(n) = threads {
        if n == 0 {
            return invalid("thread count must be positive");
        }
        builder = builder.num_threads(n);
    }
    let pool = builder.build().map_err(|e| crate::Error::Numeric(format!("thread pool: {e}")))?;
    Ok(pool.install(f))
}
