use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::processes::RealPath;
use crate::quadrature::{adaptive_1d, Tolerance};

/// Point mass of a discrete measure.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Atom {
    pub time: f64,
    pub weight: f64,
}

/// Finite Borel measure on `[0, T]` for the `L²(μ)` risk.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum MeasureSpec {
    Lebesgue {},
    Discrete { atoms: Vec<Atom> },
}

impl Default for MeasureSpec {
    fn default() -> Self {
        MeasureSpec::Lebesgue {}
    }
}

impl MeasureSpec {
    pub fn validate(&self, horizon: f64) -> Result<()> {
        if let MeasureSpec::Discrete { atoms } = self {
            for a in atoms {
                if !(a.time >= 0.0 && a.time <= horizon) {
                    return invalid(format!("atom time {} outside [0, {horizon}]", a.time));
                }
                if !(a.weight >= 0.0 && a.weight.is_finite()) {
                    return invalid(format!("atom weight {} must be finite and >= 0", a.weight));
                }
            }
        }
        Ok(())
    }

    /// `∫ f dμ` over `[0, T]`; Lebesgue integrals are computed adaptively.
    pub fn integrate(&self, horizon: f64, mut f: impl FnMut(f64) -> f64) -> Result<f64> {
        self.validate(horizon)?;
        match self {
            MeasureSpec::Lebesgue {} => {
                adaptive_1d(&mut f, 0.0, horizon, &[], Tolerance::relative(1e-12))
            }
            MeasureSpec::Discrete { atoms } => Ok(atoms.iter().map(|a| a.weight * f(a.time)).sum()),
        }
    }
}

/// `∫ diff_t² μ(dt)`: trapezoid on the grid for Lebesgue, linear
/// interpolation at the atoms for discrete measures.
pub fn l2_energy(diff: &RealPath, mu: &MeasureSpec) -> Result<f64> {
    let grid = diff.grid();
    mu.validate(grid.horizon())?;
    Ok(match mu {
        MeasureSpec::Lebesgue {} => trapezoid_sq(grid.nodes(), diff.values()),
        MeasureSpec::Discrete { atoms } => atoms
            .iter()
            .map(|a| {
                let v = diff.interpolate(a.time);
                a.weight * v * v
            })
            .sum(),
    })
}

pub(crate) fn trapezoid_sq(nodes: &[f64], values: &[f64]) -> f64 {
    nodes
        .windows(2)
        .zip(values.windows(2))
        .map(|(t, v)| 0.5 * (t[1] - t[0]) * (v[0] * v[0] + v[1] * v[1]))
        .sum()
}

/// `Σ_k (Δv_k)² / Δτ_k`, the squared `H¹_0` norm of the interpolant.
pub fn h1_energy(path: &RealPath) -> f64 {
    h1_from_values(path.grid().nodes(), path.values())
}

pub(crate) fn h1_from_values(nodes: &[f64], values: &[f64]) -> f64 {
    nodes
        .windows(2)
        .zip(values.windows(2))
        .map(|(t, v)| {
            let d = v[1] - v[0];
            d * d / (t[1] - t[0])
        })
        .sum()
}
