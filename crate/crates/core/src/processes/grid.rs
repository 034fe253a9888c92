use crate::error::{invalid, Result};

/// Discretized observation window `0 = τ_0 < τ_1 < ... < τ_m = T`.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeGrid {
    nodes: Vec<f64>,
    uniform: bool,
}

impl TimeGrid {
    /// Uniform grid with `cells` cells on `[0, horizon]`.
    pub fn uniform(horizon: f64, cells: usize) -> Result<Self> {
        if !horizon.is_finite() || horizon <= 0.0 {
            return invalid(format!("horizon must be positive and finite, got {horizon}"));
        }
        if cells < 2 {
            return invalid(format!("grid needs at least 2 cells, got {cells}"));
        }
        let mut nodes: Vec<f64> = (0..=cells)
            .map(|k| k as f64 * horizon / cells as f64)
            .collect();
        nodes[cells] = horizon;
        Ok(Self { nodes, uniform: true })
    }

    pub fn from_nodes(nodes: Vec<f64>) -> Result<Self> {
        if nodes.len() < 3 {
            return invalid(format!("grid needs at least 3 nodes, got {}", nodes.len()));
        }
        if nodes[0] != 0.0 {
            return invalid(format!("first node must be 0, got {}", nodes[0]));
        }
        if nodes.iter().any(|x| !x.is_finite()) {
            return invalid("grid nodes must be finite");
        }
        if let Some(w) = nodes.windows(2).find(|w| w[1] <= w[0]) {
            return invalid(format!("grid nodes must increase strictly ({} >= {})", w[0], w[1]));
        }
        let m = nodes.len() - 1;
        let h = nodes[m] / m as f64;
        let uniform = nodes
            .iter()
            .enumerate()
            .all(|(k, &x)| (x - k as f64 * h).abs() <= 1e-12 * nodes[m]);
        Ok(Self { nodes, uniform })
    }

    pub fn horizon(&self) -> f64 {
        self.nodes[self.nodes.len() - 1]
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    /// Number of cells `m`.
    pub fn cells(&self) -> usize {
        self.nodes.len() - 1
    }

    /// Width of cell `k` (0-based, cell `k` is `[τ_k, τ_{k+1}]`).
    pub fn width(&self, k: usize) -> f64 {
        self.nodes[k + 1] - self.nodes[k]
    }

    pub fn widths(&self) -> impl Iterator<Item = f64> + '_ {
        self.nodes.windows(2).map(|w| w[1] - w[0])
    }

    pub fn is_uniform(&self) -> bool {
        self.uniform
    }

    /// Index of the node equal to `t` (relative tolerance 1e-12 of the horizon).
    pub fn node_index(&self, t: f64) -> Option<usize> {
        let tol = 1e-12 * self.horizon();
        let i = self.nodes.partition_point(|&x| x < t - tol);
        (i < self.nodes.len() && (self.nodes[i] - t).abs() <= tol).then_some(i)
    }

    /// Cell containing `t` (right-closed at the last cell).
    pub fn cell_of(&self, t: f64) -> usize {
        let i = self.nodes.partition_point(|&x| x <= t);
        i.clamp(1, self.cells()) - 1
    }

    /// Positions of `coarse` nodes inside this grid; fails if any is missing.
    pub fn embed(&self, coarse: &TimeGrid) -> Result<Vec<usize>> {
        if (coarse.horizon() - self.horizon()).abs() > 1e-12 * self.horizon() {
            return invalid("coarse grid horizon differs from simulation horizon");
        }
        coarse
            .nodes()
            .iter()
            .map(|&t| match self.node_index(t) {
                Some(i) => Ok(i),
                None => invalid(format!("coarse node {t} is not a node of the simulation grid")),
            })
            .collect()
    }
}

/// Uniform grid `τ_k = kT/m`.
pub fn make_uniform_grid(horizon: f64, cells: usize) -> Result<TimeGrid> {
    TimeGrid::uniform(horizon, cells)
}
