//! Discrete `W^{α,p}` energies `∫∫ |u_t - u_s|^p / |t - s|^{pα+1} ds dt`.
//!
//! Two regimes are supported. The piecewise-constant one freezes the path at
//! the left node of each cell and integrates the kernel exactly over cell
//! pairs; it needs `pα < 1` so that touching cells carry finite weight. The
//! piecewise-linear one integrates the interpolant: exactly through the ramp
//! Gram matrix when `p = 2`, numerically otherwise.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::gram::{slopes, RampGram};
use super::kernel::kernel_cell_weight;
use crate::error::{invalid, Result};
use crate::processes::{RealPath, TimeGrid};
use crate::quadrature::{adaptive_1d, adaptive_rect, rule, Tolerance};

/// How the path is represented between grid nodes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Regime {
    PiecewiseConstant,
    PiecewiseLinear,
}

/// Default relative tolerance of the numeric piecewise-linear quadrature.
pub const DEFAULT_TOLERANCE: f64 = 1e-7;

/// Tensor Gauss orders for separated pairs, by the ratio of the gap between
/// the cells to the larger width. Pairs closer than one width are refined
/// adaptively.
const TIERS: [(f64, usize); 3] = [(3.0, 6), (7.0, 4), (f64::INFINITY, 3)];

fn tier(ratio: f64) -> Option<usize> {
    if ratio < 1.0 {
        return None;
    }
    TIERS.iter().position(|&(bound, _)| ratio < bound)
}

/// `x ↦ |x|^p` with cheap paths for integer exponents.
#[derive(Debug, Clone, Copy)]
pub(crate) enum Power {
    Two,
    Four,
    Int(i32),
    Real(f64),
}

impl Power {
    pub(crate) fn new(p: f64) -> Self {
        if p == 2.0 {
            Power::Two
        } else if p == 4.0 {
            Power::Four
        } else if p.fract() == 0.0 && p.abs() <= 64.0 {
            Power::Int(p as i32)
        } else {
            Power::Real(p)
        }
    }

    #[inline]
    pub(crate) fn abs_pow(self, x: f64) -> f64 {
        match self {
            Power::Two => x * x,
            Power::Four => {
                let y = x * x;
                y * y
            }
            Power::Int(n) => x.abs().powi(n),
            Power::Real(p) => x.abs().powf(p),
        }
    }

    /// `|x|^p` is a polynomial, so Gauss rules see no kink at sign changes.
    fn is_even(self) -> bool {
        match self {
            Power::Two | Power::Four => true,
            Power::Int(n) => n % 2 == 0,
            Power::Real(_) => false,
        }
    }
}

pub fn validate_frac(alpha: f64, p: f64, regime: Regime) -> Result<()> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return invalid(format!("alpha must lie in (0, 1), got {alpha}"));
    }
    if !(p > 1.0 && p.is_finite()) {
        return invalid(format!("p must be finite and > 1, got {p}"));
    }
    if regime == Regime::PiecewiseConstant && p * alpha >= 1.0 {
        return invalid(format!(
            "piecewise_constant regime requires alpha < 1/p (got alpha = {alpha}, p = {p})"
        ));
    }
    Ok(())
}

/// Prepared `W^{α,p}` evaluator for paths on a fixed grid.
#[derive(Debug, Clone)]
pub struct FracEnergy {
    grid: Arc<TimeGrid>,
    alpha: f64,
    p: f64,
    regime: Regime,
    method: Method,
}

#[derive(Debug, Clone)]
enum Method {
    Constant(CellWeights),
    Gram(RampGram),
    Quadrature(LinearQuadrature),
}

impl FracEnergy {
    pub fn new(grid: &Arc<TimeGrid>, alpha: f64, p: f64, regime: Regime) -> Result<Self> {
        validate_frac(alpha, p, regime)?;
        let method = match regime {
            Regime::PiecewiseConstant => Method::Constant(CellWeights::new(grid, p * alpha + 1.0, p)?),
            Regime::PiecewiseLinear if p == 2.0 => Method::Gram(RampGram::new(grid, alpha)?),
            Regime::PiecewiseLinear => {
                Method::Quadrature(LinearQuadrature::new(grid, alpha, p, DEFAULT_TOLERANCE))
            }
        };
        Ok(Self { grid: Arc::clone(grid), alpha, p, regime, method })
    }

    pub fn grid(&self) -> &Arc<TimeGrid> {
        &self.grid
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    pub fn regime(&self) -> Regime {
        self.regime
    }

    /// Energy of the path with the given node values.
    pub fn energy(&self, values: &[f64]) -> Result<f64> {
        if values.len() != self.grid.nodes().len() {
            return invalid(format!(
                "expected {} node values, got {}",
                self.grid.nodes().len(),
                values.len()
            ));
        }
        match &self.method {
            Method::Constant(w) => Ok(w.energy(values)),
            Method::Gram(g) => Ok(g.energy(values)),
            Method::Quadrature(q) => q.energy(self.grid.nodes(), values),
        }
    }

    /// Exact expected energy of a Brownian path in this discretization
    /// (available for `p = 2`).
    pub fn brownian_expectation(&self) -> Option<f64> {
        match &self.method {
            Method::Constant(w) if self.p == 2.0 => Some(w.brownian_expectation(self.grid.nodes())),
            Method::Gram(g) => Some(g.brownian_expectation()),
            _ => None,
        }
    }
}

/// `W^{α,p}` energy of a path in the given regime.
pub fn frac_energy(path: &RealPath, alpha: f64, p: f64, regime: Regime) -> Result<f64> {
    FracEnergy::new(path.grid(), alpha, p, regime)?.energy(path.values())
}

/// Energy of the piecewise-linear interpolant by numeric quadrature, for any
/// `p`, to relative tolerance `tol`.
pub fn pl_energy_quadrature(path: &RealPath, alpha: f64, p: f64, tol: f64) -> Result<f64> {
    validate_frac(alpha, p, Regime::PiecewiseLinear)?;
    if tol.is_nan() || tol <= 0.0 {
        return invalid(format!("tolerance must be positive, got {tol}"));
    }
    LinearQuadrature::new(path.grid(), alpha, p, tol).energy(path.grid().nodes(), path.values())
}

/// Kernel weights of cell pairs for the piecewise-constant regime.
#[derive(Debug, Clone)]
struct CellWeights {
    cells: usize,
    power: Power,
    /// Uniform grids: weight by lag. Otherwise row-major upper triangle.
    by_lag: bool,
    weights: Vec<f64>,
}

impl CellWeights {
    fn new(grid: &TimeGrid, beta: f64, p: f64) -> Result<Self> {
        let x = grid.nodes();
        let m = grid.cells();
        let cell = |k: usize| (x[k], x[k + 1]);
        let (by_lag, weights) = if grid.is_uniform() {
            let mut w = vec![0.0; m];
            for (d, slot) in w.iter_mut().enumerate().skip(1) {
                *slot = kernel_cell_weight(cell(0), cell(d), beta)?;
            }
            (true, w)
        } else {
            let mut w = vec![0.0; m * m];
            for k in 0..m {
                for l in k + 1..m {
                    w[k * m + l] = kernel_cell_weight(cell(k), cell(l), beta)?;
                }
            }
            (false, w)
        };
        Ok(Self { cells: m, power: Power::new(p), by_lag, weights })
    }

    fn pair_sum(&self, v: &[f64], f: impl Fn(f64) -> f64) -> f64 {
        let m = self.cells;
        let mut total = 0.0;
        if self.by_lag {
            for d in 1..m {
                let s: f64 = v[d..m].iter().zip(&v[..m - d]).map(|(a, b)| f(a - b)).sum();
                total += self.weights[d] * s;
            }
        } else {
            for k in 0..m {
                let row = &self.weights[k * m..(k + 1) * m];
                total += (k + 1..m).map(|l| row[l] * f(v[l] - v[k])).sum::<f64>();
            }
        }
        2.0 * total
    }

    fn energy(&self, values: &[f64]) -> f64 {
        let power = self.power;
        match power {
            Power::Two => self.pair_sum(values, |d| d * d),
            _ => self.pair_sum(values, |d| power.abs_pow(d)),
        }
    }

    fn brownian_expectation(&self, nodes: &[f64]) -> f64 {
        self.pair_sum(nodes, f64::abs)
    }
}

/// Numeric energy of piecewise-linear paths.
///
/// Same-cell pairs are integrated in closed form, adjacent pairs through a
/// Duffy split of the singular corner, and separated pairs with a tensor
/// Gauss rule whose order drops with distance. Pairs that are close relative
/// to their size, or where `|u_t - u_s|^p` has a kink, are refined adaptively.
#[derive(Debug, Clone)]
struct LinearQuadrature {
    beta: f64,
    p: f64,
    power: Power,
    kernel: Power,
    tol: f64,
    /// Nodes and weights on [0, 1] per tier.
    rules: Vec<(Vec<f64>, Vec<f64>)>,
    /// Uniform grids: per lag, the tier and the offset of its kernel block.
    lags: Option<Vec<(usize, usize)>>,
    table: Vec<f64>,
}

impl LinearQuadrature {
    fn new(grid: &TimeGrid, alpha: f64, p: f64, tol: f64) -> Self {
        let beta = p * alpha + 1.0;
        let kernel = Power::new(beta);
        let rules: Vec<(Vec<f64>, Vec<f64>)> =
            TIERS.iter().map(|&(_, o)| rule(o).mapped(0.0, 1.0).unzip()).collect();
        let mut table = Vec::new();
        let lags = grid.is_uniform().then(|| {
            let m = grid.cells();
            let h = grid.width(0);
            let mut lags = vec![(0, 0); m];
            for (d, slot) in lags.iter_mut().enumerate().skip(2) {
                let t = tier((d - 1) as f64).expect("lag >= 2 is separated");
                let (xi, wt) = &rules[t];
                *slot = (t, table.len());
                for i in 0..xi.len() {
                    for j in 0..xi.len() {
                        let gap = h * (d as f64 + xi[j] - xi[i]);
                        table.push(wt[i] * wt[j] * h * h / kernel.abs_pow(gap));
                    }
                }
            }
            lags
        });
        Self { beta, p, power: Power::new(p), kernel, tol, rules, lags, table }
    }

    fn energy(&self, x: &[f64], v: &[f64]) -> Result<f64> {
        let m = x.len() - 1;
        let b = slopes(x, v);
        let h: Vec<f64> = x.windows(2).map(|w| w[1] - w[0]).collect();
        let g = self.p - self.beta;

        let same: f64 = (0..m)
            .map(|k| self.power.abs_pow(b[k]) * 2.0 * h[k].powf(g + 2.0) / ((g + 1.0) * (g + 2.0)))
            .sum();

        let mut adjacent = 0.0;
        for k in 0..m.saturating_sub(1) {
            adjacent += self.adjacent_pair(b[k] * h[k], b[k + 1] * h[k + 1], h[k], h[k + 1])?;
        }

        // interpolant at the Gauss nodes of every cell, per tier
        let nodes: Vec<Vec<f64>> = self
            .rules
            .iter()
            .map(|(xi, _)| {
                let mut u = Vec::with_capacity(m * xi.len());
                for k in 0..m {
                    u.extend(xi.iter().map(|&z| v[k] + b[k] * h[k] * z));
                }
                u
            })
            .collect();

        let mut far = 0.0;
        let mut deferred = Vec::new();
        let mut scratch = Vec::new();
        for k in 0..m {
            for l in k + 2..m {
                let kink = !self.power.is_even() && {
                    let c = [v[l] - v[k], v[l] - v[k + 1], v[l + 1] - v[k], v[l + 1] - v[k + 1]];
                    c.iter().any(|&d| d < 0.0) && c.iter().any(|&d| d > 0.0)
                };
                let (t, tab) = match &self.lags {
                    Some(lags) => {
                        let (t, off) = lags[l - k];
                        let o = self.rules[t].0.len();
                        (Some(t), &self.table[off..off + o * o])
                    }
                    None => {
                        let t = tier((x[l] - x[k + 1]) / h[k].max(h[l]));
                        if let (Some(t), false) = (t, kink) {
                            let (xi, wt) = &self.rules[t];
                            scratch.clear();
                            for i in 0..xi.len() {
                                for j in 0..xi.len() {
                                    let gap = x[l] + h[l] * xi[j] - x[k] - h[k] * xi[i];
                                    scratch.push(wt[i] * wt[j] * h[k] * h[l] / self.kernel.abs_pow(gap));
                                }
                            }
                        }
                        (t, &scratch[..])
                    }
                };
                let t = match t {
                    Some(t) if !kink => t,
                    _ => {
                        deferred.push((k, l));
                        continue;
                    }
                };
                let o = self.rules[t].0.len();
                let uk = &nodes[t][k * o..(k + 1) * o];
                let ul = &nodes[t][l * o..(l + 1) * o];
                for (&a, row) in uk.iter().zip(tab.chunks_exact(o)) {
                    far += ul.iter().zip(row).map(|(&c, &w)| self.power.abs_pow(c - a) * w).sum::<f64>();
                }
            }
        }

        if !deferred.is_empty() {
            let scale = same + 2.0 * (adjacent + far);
            let tol = Tolerance {
                rel: self.tol,
                abs: (self.tol * scale / deferred.len() as f64).max(1e-300),
                max_panels: 20_000,
            };
            for (k, l) in deferred {
                let mut f = |s: f64, t: f64| {
                    let du = v[l] + b[l] * (t - x[l]) - v[k] - b[k] * (s - x[k]);
                    self.power.abs_pow(du) / self.kernel.abs_pow(t - s)
                };
                far += adaptive_rect(&mut f, (x[k], x[k + 1]), (x[l], x[l + 1]), tol)?;
            }
        }

        Ok(same + 2.0 * (adjacent + far))
    }

    /// One ordering of an adjacent cell pair with increments `ak = b_k h_k`,
    /// `al = b_l h_l` meeting at a common node.
    fn adjacent_pair(&self, ak: f64, al: f64, hk: f64, hl: f64) -> Result<f64> {
        let tol = Tolerance { rel: 1e-2 * self.tol, abs: 1e-300, max_panels: 2_000 };
        let root = |num: f64, den: f64| if den != 0.0 { vec![-num / den] } else { Vec::new() };
        let mut f1 = |w: f64| self.power.abs_pow(ak + al * w) / self.kernel.abs_pow(hk + hl * w);
        let i1 = adaptive_1d(&mut f1, 0.0, 1.0, &root(ak, al), tol)?;
        let mut f2 = |w: f64| self.power.abs_pow(ak * w + al) / self.kernel.abs_pow(hk * w + hl);
        let i2 = adaptive_1d(&mut f2, 0.0, 1.0, &root(al, ak), tol)?;
        Ok(hk * hl / (self.p - self.beta + 2.0) * (i1 + i2))
    }
}
