//! Simulation and numerical verification toolkit for nonparametric drift
//! estimation of shifted Brownian motion and intensity estimation of Cox
//! processes under fractional Sobolev risks.
//!
//! * [`processes`]: grids, paths, simulation, Girsanov weights
//! * [`sobolev_energy`]: discrete `L²(μ)`, `H¹_0` and `W^{α,p}` energies
//! * [`cramer_rao`]: closed-form lower bounds for both models
//! * [`stein`]: the super-efficient shrinkage estimator
//! * [`montecarlo`]: reproducible replication-parallel risk estimation
//! * [`cli`]: configuration-driven experiment runner

pub mod cli;
pub mod cramer_rao;
pub mod error;
pub mod montecarlo;
pub mod processes;
pub mod quadrature;
pub mod rng;
pub mod sobolev_energy;
pub mod stats;
pub mod stein;

pub use error::{Error, Result};
