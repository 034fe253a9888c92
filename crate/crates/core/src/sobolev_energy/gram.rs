//! Exact `W^{α,2}` energy of piecewise-linear paths.
//!
//! A piecewise-linear path with slopes `s_i` on the cells is `Σ s_i r_i` with
//! `r_i(t) = |[0, t] ∩ I_i|` the ramp of cell `i`. The energy is the quadratic
//! form `sᵀ G s` where `G_ij = ∫ Δr_i Δr_j dμ_α`, and each entry has a closed
//! form in the antiderivatives of the kernel.

use std::sync::Arc;

use super::kernel::Primitives;
use crate::error::{invalid, Result};
use crate::processes::TimeGrid;

/// Gram matrix of the cell ramps under `μ_α(ds, dt) = 2 (t-s)^{-2α-1} 1{s<t}`.
#[derive(Debug, Clone)]
pub struct RampGram {
    grid: Arc<TimeGrid>,
    alpha: f64,
    entries: Vec<f64>,
}

impl RampGram {
    pub fn new(grid: &Arc<TimeGrid>, alpha: f64) -> Result<Self> {
        if !(alpha > 0.0 && alpha < 1.0) {
            return invalid(format!("alpha must lie in (0, 1), got {alpha}"));
        }
        let k = Primitives::new(2.0 * alpha + 1.0);
        let x = grid.nodes();
        let n = grid.cells();
        let big_t = grid.horizon();
        let phi_t = k.phi(big_t);
        let mut entries = vec![0.0; n * n];
        for i in 0..n {
            let (x0, x1) = (x[i], x[i + 1]);
            let h = x1 - x0;
            let (y0, y1) = (big_t - x0, big_t - x1);
            entries[i * n + i] = 4.0
                * (phi_t * h * h / 2.0
                    - (h * k.phi1(y0) - k.phi2(y0) + k.phi2(y1))
                    - (h * k.phi1(x1) - k.phi2(x1) + k.phi2(x0))
                    + k.phi2(h));
            let tail_i = k.phi1(big_t - x0) - k.phi1(big_t - x1);
            for j in i + 1..n {
                let hj = x[j + 1] - x[j];
                let head_j = k.phi1(x[j + 1]) - k.phi1(x[j]);
                let corner = k.phi2(x[j + 1] - x0) - k.phi2(x[j + 1] - x1)
                    - k.phi2(x[j] - x0)
                    + k.phi2(x[j] - x1);
                let v = 2.0 * (phi_t * h * hj - hj * tail_i - h * head_j + corner);
                entries[i * n + j] = v;
                entries[j * n + i] = v;
            }
        }
        Ok(Self { grid: Arc::clone(grid), alpha, entries })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn grid(&self) -> &Arc<TimeGrid> {
        &self.grid
    }

    pub fn dim(&self) -> usize {
        self.grid.cells()
    }

    pub fn entry(&self, i: usize, j: usize) -> f64 {
        self.entries[i * self.dim() + j]
    }

    /// Row-major entries.
    pub fn entries(&self) -> &[f64] {
        &self.entries
    }

    /// `sᵀ G s` for cell slopes `s`.
    pub fn form(&self, slopes: &[f64]) -> f64 {
        let n = self.dim();
        debug_assert_eq!(slopes.len(), n);
        let mut total = 0.0;
        for (i, &si) in slopes.iter().enumerate() {
            let row = &self.entries[i * n..(i + 1) * n];
            let dot: f64 = row.iter().zip(slopes).map(|(g, s)| g * s).sum();
            total += si * dot;
        }
        total
    }

    /// Energy of the piecewise-linear interpolant of node values.
    pub fn energy(&self, values: &[f64]) -> f64 {
        let slopes = slopes(self.grid.nodes(), values);
        self.form(&slopes)
    }

    /// Expected energy of the interpolated Brownian path, `Σ_i G_ii / h_i`.
    pub fn brownian_expectation(&self) -> f64 {
        (0..self.dim()).map(|i| self.entry(i, i) / self.grid.width(i)).sum()
    }
}

pub(crate) fn slopes(nodes: &[f64], values: &[f64]) -> Vec<f64> {
    nodes
        .windows(2)
        .zip(values.windows(2))
        .map(|(t, v)| (v[1] - v[0]) / (t[1] - t[0]))
        .collect()
}
