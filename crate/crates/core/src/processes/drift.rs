use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::grid::TimeGrid;
use super::paths::RealPath;
use crate::error::{invalid, Result};

/// Deterministic Cameron–Martin drift `u(t) = ∫_0^t u̇(s) ds`.
///
/// Closed forms evaluate `u` analytically. `Sampled` holds `u̇` at nodes; it is
/// linearly interpolated between them, so `u` at the nodes is the cumulative
/// trapezoid rule.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum DriftSpec {
    Zero {},
    /// `u(t) = slope · t`
    Linear { slope: f64 },
    /// `u(t) = coef · t²`
    Quadratic { coef: f64 },
    /// `u(t) = amplitude · sin(ω t) / ω`, so `u̇(t) = amplitude · cos(ω t)`
    Sine { amplitude: f64, omega: f64 },
    Sampled { nodes: Vec<f64>, rate: Vec<f64> },
}

impl DriftSpec {
    pub fn validate(&self) -> Result<()> {
        match self {
            DriftSpec::Zero {} => Ok(()),
            DriftSpec::Linear { slope } if slope.is_finite() => Ok(()),
            DriftSpec::Quadratic { coef } if coef.is_finite() => Ok(()),
            DriftSpec::Sine { amplitude, omega }
                if amplitude.is_finite() && omega.is_finite() && *omega != 0.0 =>
            {
                Ok(())
            }
            DriftSpec::Sampled { nodes, rate } => {
                TimeGrid::from_nodes(nodes.clone())?;
                if nodes.len() != rate.len() {
                    return invalid("sampled drift needs one rate per node");
                }
                if rate.iter().any(|r| !r.is_finite()) {
                    return invalid("sampled drift rates must be finite");
                }
                Ok(())
            }
            other => invalid(format!("drift parameters must be finite (omega != 0): {other:?}")),
        }
    }

    /// `u̇(t)`.
    pub fn derivative(&self, t: f64) -> f64 {
        match self {
            DriftSpec::Zero {} => 0.0,
            DriftSpec::Linear { slope } => *slope,
            DriftSpec::Quadratic { coef } => 2.0 * coef * t,
            DriftSpec::Sine { amplitude, omega } => amplitude * (omega * t).cos(),
            DriftSpec::Sampled { nodes, rate } => {
                let k = sampled_cell(nodes, t);
                let theta = (t - nodes[k]) / (nodes[k + 1] - nodes[k]);
                (1.0 - theta) * rate[k] + theta * rate[k + 1]
            }
        }
    }

    /// `u(t)`.
    pub fn primitive(&self, t: f64) -> f64 {
        match self {
            DriftSpec::Zero {} => 0.0,
            DriftSpec::Linear { slope } => slope * t,
            DriftSpec::Quadratic { coef } => coef * t * t,
            DriftSpec::Sine { amplitude, omega } => amplitude * (omega * t).sin() / omega,
            DriftSpec::Sampled { nodes, rate } => {
                let k = sampled_cell(nodes, t);
                let mut acc = 0.0;
                for j in 0..k {
                    acc += 0.5 * (rate[j] + rate[j + 1]) * (nodes[j + 1] - nodes[j]);
                }
                let dt = t - nodes[k];
                let slope = (rate[k + 1] - rate[k]) / (nodes[k + 1] - nodes[k]);
                acc + rate[k] * dt + 0.5 * slope * dt * dt
            }
        }
    }

    /// `u` at the grid nodes.
    pub fn on_grid(&self, grid: &Arc<TimeGrid>) -> RealPath {
        match self {
            DriftSpec::Sampled { nodes, rate } if nodes.as_slice() == grid.nodes() => {
                let mut values = Vec::with_capacity(nodes.len());
                let mut acc = 0.0;
                values.push(0.0);
                for j in 0..nodes.len() - 1 {
                    acc += 0.5 * (rate[j] + rate[j + 1]) * (nodes[j + 1] - nodes[j]);
                    values.push(acc);
                }
                RealPath::new(Arc::clone(grid), values).expect("lengths match")
            }
            _ => RealPath::from_fn(Arc::clone(grid), |t| self.primitive(t)),
        }
    }

    pub fn is_zero(&self) -> bool {
        matches!(self, DriftSpec::Zero {})
    }
}

fn sampled_cell(nodes: &[f64], t: f64) -> usize {
    let i = nodes.partition_point(|&x| x <= t);
    i.clamp(1, nodes.len() - 1) - 1
}
