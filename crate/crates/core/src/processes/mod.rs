//! Time grids, sampled paths, simulation of shifted Brownian motion and Cox
//! processes, and the Girsanov likelihood weights of both models.

mod drift;
mod grid;
mod intensity;
mod paths;
mod simulate;

pub use drift::DriftSpec;
pub use grid::{make_uniform_grid, TimeGrid};
pub use intensity::{GammaLaw, IntensitySpec, RateCurve, RealizedIntensity};
pub use paths::{CountingPath, RealPath};
pub use simulate::{
    girsanov_weight_cox, girsanov_weight_gaussian, shift_by_drift, simulate_bm, simulate_cox, CoxSample,
};
