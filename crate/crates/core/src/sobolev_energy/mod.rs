//! Discrete energy functionals used as risks: `L²(μ)`, `H¹_0` and the
//! fractional `W^{α,p}` seminorm, together with the closed-form reference
//! integrals and Gaussian absolute moments that the bounds are built from.

mod fractional;
mod gram;
mod kernel;
mod measure;

use std::sync::Arc;

use serde::{Deserialize, Serialize};

pub use fractional::{frac_energy, pl_energy_quadrature, validate_frac, FracEnergy, Regime, DEFAULT_TOLERANCE};
pub use gram::RampGram;
pub use kernel::{gaussian_abs_moment, kernel_cell_weight, kernel_double_integral, power_double_integral};
pub use measure::{h1_energy, l2_energy, Atom, MeasureSpec};

use crate::error::{invalid, Result};
use crate::processes::TimeGrid;

fn default_p() -> f64 {
    2.0
}

/// Which risk functional to evaluate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum EnergySpec {
    L2 {
        #[serde(default)]
        mu: MeasureSpec,
    },
    H1 {},
    Wfrac {
        alpha: f64,
        #[serde(default = "default_p")]
        p: f64,
        regime: Regime,
    },
}

impl EnergySpec {
    pub fn validate(&self, horizon: f64) -> Result<()> {
        match self {
            EnergySpec::L2 { mu } => mu.validate(horizon),
            EnergySpec::H1 {} => Ok(()),
            EnergySpec::Wfrac { alpha, p, regime } => validate_frac(*alpha, *p, *regime),
        }
    }

    pub fn label(&self) -> String {
        match self {
            EnergySpec::L2 { mu: MeasureSpec::Lebesgue {} } => "l2".into(),
            EnergySpec::L2 { .. } => "l2_discrete".into(),
            EnergySpec::H1 {} => "h1".into(),
            EnergySpec::Wfrac { regime: Regime::PiecewiseConstant, .. } => "wfrac_pc".into(),
            EnergySpec::Wfrac { regime: Regime::PiecewiseLinear, .. } => "wfrac_pl".into(),
        }
    }

    pub fn alpha(&self) -> Option<f64> {
        match self {
            EnergySpec::Wfrac { alpha, .. } => Some(*alpha),
            _ => None,
        }
    }

    /// Exponent of the risk: 2 for `L²` and `H¹`.
    pub fn p(&self) -> f64 {
        match self {
            EnergySpec::Wfrac { p, .. } => *p,
            _ => 2.0,
        }
    }
}

/// Energy evaluator prepared for one grid.
#[derive(Debug, Clone)]
pub struct Energy {
    grid: Arc<TimeGrid>,
    kind: Prepared,
}

#[derive(Debug, Clone)]
enum Prepared {
    L2(MeasureSpec),
    H1,
    Frac(FracEnergy),
}

impl Energy {
    pub fn new(spec: &EnergySpec, grid: &Arc<TimeGrid>) -> Result<Self> {
        spec.validate(grid.horizon())?;
        let kind = match spec {
            EnergySpec::L2 { mu } => Prepared::L2(mu.clone()),
            EnergySpec::H1 {} => Prepared::H1,
            EnergySpec::Wfrac { alpha, p, regime } => Prepared::Frac(FracEnergy::new(grid, *alpha, *p, *regime)?),
        };
        Ok(Self { grid: Arc::clone(grid), kind })
    }

    pub fn grid(&self) -> &Arc<TimeGrid> {
        &self.grid
    }

    /// Energy of the path with these node values.
    pub fn evaluate(&self, values: &[f64]) -> Result<f64> {
        let nodes = self.grid.nodes();
        if values.len() != nodes.len() {
            return invalid(format!("expected {} node values, got {}", nodes.len(), values.len()));
        }
        match &self.kind {
            Prepared::L2(MeasureSpec::Lebesgue {}) => Ok(measure::trapezoid_sq(nodes, values)),
            Prepared::L2(mu) => {
                let path = crate::processes::RealPath::new(Arc::clone(&self.grid), values.to_vec())?;
                l2_energy(&path, mu)
            }
            Prepared::H1 => Ok(measure::h1_from_values(nodes, values)),
            Prepared::Frac(f) => f.energy(values),
        }
    }

    /// Exact expected energy of a standard Brownian path, where available.
    pub fn brownian_expectation(&self) -> Option<f64> {
        match &self.kind {
            // E X_t² = t is linear, so the trapezoid is exact; at an atom the
            // interpolant has variance (1 - θ²) τ_k + θ² τ_{k+1}
            Prepared::L2(MeasureSpec::Lebesgue {}) => Some(0.5 * self.grid.horizon().powi(2)),
            Prepared::L2(MeasureSpec::Discrete { atoms }) => {
                let x = self.grid.nodes();
                Some(
                    atoms
                        .iter()
                        .map(|a| {
                            let k = self.grid.cell_of(a.time);
                            let theta = (a.time - x[k]) / (x[k + 1] - x[k]);
                            a.weight * ((1.0 - theta * theta) * x[k] + theta * theta * x[k + 1])
                        })
                        .sum(),
                )
            }
            Prepared::H1 => Some(self.grid.cells() as f64),
            Prepared::Frac(f) => f.brownian_expectation(),
        }
    }
}

/// Independent quadrature oracle for tests: `∫_0^T ds ∫_0^{T-s} dd f(s, d)` by
/// nested adaptive rules, where `d = t - s`. The inner integral runs in
/// `d = (T - s) z⁴`,
/// which turns the diagonal singularity into a regular endpoint, and both
/// levels are split at the given nodes.
#[cfg(test)]
pub(crate) fn upper_triangle_oracle(nodes: &[f64], f: &dyn Fn(f64, f64) -> f64, rel: f64) -> f64 {
    use crate::quadrature::{adaptive_1d, Tolerance};
    let big_t = *nodes.last().unwrap();
    let inner_tol = Tolerance { rel: 0.1 * rel, abs: 1e-18, max_panels: 100_000 };
    let mut outer = |s: f64| {
        let len = big_t - s;
        if len <= 0.0 {
            return 0.0;
        }
        let breaks: Vec<f64> = nodes.iter().filter(|&&x| x > s).map(|&x| ((x - s) / len).powf(0.25)).collect();
        let mut inner = |z: f64| {
            let z3 = z * z * z;
            let d = len * z3 * z;
            if d > 0.0 { 4.0 * len * z3 * f(s, d) } else { 0.0 }
        };
        adaptive_1d(&mut inner, 0.0, 1.0, &breaks, inner_tol).unwrap()
    };
    let tol = Tolerance { rel, abs: 1e-15, max_panels: 100_000 };
    adaptive_1d(&mut outer, 0.0, big_t, nodes, tol).unwrap()
}
