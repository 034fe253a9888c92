use std::sync::Arc;

use super::grid::TimeGrid;
use crate::error::{invalid, Result};

/// Real-valued path sampled at the nodes of a grid.
#[derive(Debug, Clone, PartialEq)]
pub struct RealPath {
    grid: Arc<TimeGrid>,
    values: Vec<f64>,
}

impl RealPath {
    pub fn new(grid: Arc<TimeGrid>, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.nodes().len() {
            return invalid(format!(
                "path has {} values but grid has {} nodes",
                values.len(),
                grid.nodes().len()
            ));
        }
        Ok(Self { grid, values })
    }

    pub fn zeros(grid: Arc<TimeGrid>) -> Self {
        let values = vec![0.0; grid.nodes().len()];
        Self { grid, values }
    }

    pub fn from_fn(grid: Arc<TimeGrid>, f: impl Fn(f64) -> f64) -> Self {
        let values = grid.nodes().iter().map(|&t| f(t)).collect();
        Self { grid, values }
    }

    pub fn grid(&self) -> &Arc<TimeGrid> {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    /// Linear interpolation of the node values at `t ∈ [0, T]`.
    pub fn interpolate(&self, t: f64) -> f64 {
        let nodes = self.grid.nodes();
        let k = self.grid.cell_of(t);
        let theta = (t - nodes[k]) / (nodes[k + 1] - nodes[k]);
        (1.0 - theta) * self.values[k] + theta * self.values[k + 1]
    }

    pub fn same_grid(&self, other: &RealPath) -> bool {
        Arc::ptr_eq(&self.grid, &other.grid) || self.grid == other.grid
    }

    /// Pointwise difference `self - other`.
    pub fn minus(&self, other: &RealPath) -> Result<RealPath> {
        if !self.same_grid(other) {
            return invalid("paths live on different grids");
        }
        let values = self.values.iter().zip(&other.values).map(|(a, b)| a - b).collect();
        Ok(RealPath { grid: Arc::clone(&self.grid), values })
    }

    /// Values at the nodes of `coarse`, which must be a sub-grid.
    pub fn restrict(&self, coarse: Arc<TimeGrid>) -> Result<RealPath> {
        let idx = self.grid.embed(&coarse)?;
        let values = idx.iter().map(|&i| self.values[i]).collect();
        Ok(RealPath { grid: coarse, values })
    }
}

/// Counting path: sorted jump times in `(0, T]` and the counts `N(τ_k)`.
#[derive(Debug, Clone, PartialEq)]
pub struct CountingPath {
    grid: Arc<TimeGrid>,
    jumps: Vec<f64>,
    counts: Vec<u64>,
}

impl CountingPath {
    pub fn new(grid: Arc<TimeGrid>, jumps: Vec<f64>) -> Result<Self> {
        let horizon = grid.horizon();
        if let Some(&t) = jumps.iter().find(|&&t| !(t > 0.0 && t <= horizon)) {
            return invalid(format!("jump time {t} outside (0, {horizon}]"));
        }
        if jumps.windows(2).any(|w| w[1] <= w[0]) {
            return invalid("jump times must increase strictly");
        }
        // N(τ_k) counts jumps at or before τ_k
        let counts = grid
            .nodes()
            .iter()
            .map(|&t| jumps.partition_point(|&s| s <= t) as u64)
            .collect();
        Ok(Self { grid, jumps, counts })
    }

    pub fn grid(&self) -> &Arc<TimeGrid> {
        &self.grid
    }

    pub fn jumps(&self) -> &[f64] {
        &self.jumps
    }

    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    /// Total number of jumps `N(T)`.
    pub fn total(&self) -> u64 {
        self.jumps.len() as u64
    }

    pub fn to_real_path(&self) -> RealPath {
        RealPath {
            grid: Arc::clone(&self.grid),
            values: self.counts.iter().map(|&c| c as f64).collect(),
        }
    }

    /// Same jump record observed on a coarser sub-grid.
    pub fn restrict(&self, coarse: Arc<TimeGrid>) -> Result<CountingPath> {
        self.grid.embed(&coarse)?;
        CountingPath::new(coarse, self.jumps.clone())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::processes::make_uniform_grid;

    fn grid(m: usize) -> Arc<TimeGrid> {
        Arc::new(make_uniform_grid(1.0, m).unwrap())
    }

    #[test]
    fn length_mismatch_rejected() {
        assert!(RealPath::new(grid(4), vec![0.0; 4]).is_err());
    }

    #[test]
    fn interpolation_is_linear() {
        let p = RealPath::from_fn(grid(4), |t| 3.0 * t);
        assert!((p.interpolate(0.3) - 0.9).abs() < 1e-15);
        assert!((p.interpolate(1.0) - 3.0).abs() < 1e-15);
    }

    #[test]
    fn counts_include_jumps_at_nodes() {
        let p = CountingPath::new(grid(4), vec![0.1, 0.25, 0.9]).unwrap();
        assert_eq!(p.counts(), &[0, 2, 2, 2, 3]);
        assert_eq!(p.total(), 3);
    }

    #[test]
    fn invalid_jumps_rejected() {
        assert!(CountingPath::new(grid(4), vec![0.0]).is_err());
        assert!(CountingPath::new(grid(4), vec![0.5, 0.4]).is_err());
        assert!(CountingPath::new(grid(4), vec![1.5]).is_err());
    }

    #[test]
    fn restriction_keeps_subgrid_values() {
        let p = RealPath::from_fn(grid(8), |t| t * t);
        let q = p.restrict(grid(4)).unwrap();
        assert_eq!(q.values(), &[0.0, 0.0625, 0.25, 0.5625, 1.0]);
        assert!(p.restrict(grid(3)).is_err());
    }
}
