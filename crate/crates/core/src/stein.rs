//! Super-efficient shrinkage estimator for the Gaussian shift model under
//! the `W^{α,2}` risk.
//!
//! With coarse increments `δx_i = X_{t_i} - X_{t_{i-1}}`, the matrix
//! `a_ij = ∫ Δr_i Δr_j dμ_α` of cell ramps and `B = A⁻¹`, the functional
//! `F = Q^a`, `Q = ⟨Bδx, δx⟩`, yields the shift
//!
//! `ξ_t = D_{1[0,t]} log F² = 4a ⟨Bδx, ℓ(t)⟩ / Q`, `ℓ_j(t) = |[0, t] ∩ I_j|`,
//!
//! and the risk of `X + ξ` equals `ρ + 4 E[Δ_α F / F]` with
//! `Δ_α F / F = 2a(2(a-1) + n) / Q`.

use std::sync::Arc;

use nalgebra::{DMatrix, DVector};

use crate::cramer_rao::cr_w2alpha_gaussian;
use crate::error::{invalid, numeric, Result};
use crate::processes::{DriftSpec, RealPath, TimeGrid};
use crate::rng::Stream;
use crate::sobolev_energy::pl_energy_quadrature;
use crate::stats::{mean_and_stderr, replicate};

/// Relative tolerance of the energy quadrature used to assemble `A`.
pub const ASSEMBLY_TOLERANCE: f64 = 1e-9;

const INVERSE_RESIDUAL: f64 = 1e-8;

/// Coarse grid, exponent `a` and smoothness `α` of the estimator.
#[derive(Debug, Clone, PartialEq)]
pub struct SteinConfig {
    coarse: Arc<TimeGrid>,
    a: f64,
    alpha: f64,
    tolerance: f64,
}

impl SteinConfig {
    pub fn new(coarse: Arc<TimeGrid>, a: f64, alpha: f64) -> Result<Self> {
        if coarse.cells() < 3 {
            return invalid(format!("stein requires n >= 3 coarse cells, got n = {}", coarse.cells()));
        }
        if !(alpha > 0.0 && alpha < 0.5) {
            return invalid(format!("stein requires alpha in (0, 1/2), got {alpha}"));
        }
        if !a.is_finite() {
            return invalid(format!("stein exponent a must be finite, got {a}"));
        }
        Ok(Self { coarse, a, alpha, tolerance: ASSEMBLY_TOLERANCE })
    }

    /// Uniform coarse grid with `n` cells on `[0, T]`.
    pub fn uniform(horizon: f64, n: usize, a: f64, alpha: f64) -> Result<Self> {
        if n < 3 {
            return invalid(format!("stein requires n >= 3 coarse cells, got n = {n}"));
        }
        Self::new(Arc::new(TimeGrid::uniform(horizon, n)?), a, alpha)
    }

    pub fn with_tolerance(mut self, tolerance: f64) -> Result<Self> {
        if !(tolerance > 0.0 && tolerance < 1.0) {
            return invalid(format!("quadrature tolerance must lie in (0, 1), got {tolerance}"));
        }
        self.tolerance = tolerance;
        Ok(self)
    }

    pub fn coarse(&self) -> &Arc<TimeGrid> {
        &self.coarse
    }

    pub fn n(&self) -> usize {
        self.coarse.cells()
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn tolerance(&self) -> f64 {
        self.tolerance
    }

    /// `a ∈ (1 - n/2, 0)`, where `Δ_α F < 0`.
    pub fn is_admissible(&self) -> bool {
        self.a < 0.0 && self.a > 1.0 - 0.5 * self.n() as f64
    }
}

/// Assembled matrices and the shift evaluator. Immutable and shareable.
#[derive(Debug, Clone)]
pub struct SteinOperator {
    config: SteinConfig,
    a_mat: DMatrix<f64>,
    b_mat: DMatrix<f64>,
    chol_l: DMatrix<f64>,
}

/// Monte Carlo prediction `ρ + 8a(2a - 2 + n) E[Q⁻¹]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PredictedRisk {
    pub rho: f64,
    pub mean_inv_q: f64,
    pub stderr_inv_q: f64,
    pub value: f64,
    pub stderr: f64,
}

impl SteinOperator {
    /// Builds `A` by polarization of the piecewise-linear energy form, then
    /// `B = A⁻¹` through its Cholesky factor.
    pub fn assemble(config: SteinConfig) -> Result<Self> {
        let n = config.n();
        let grid = &config.coarse;
        let energy = |v: &[f64]| -> Result<f64> {
            let mut values = Vec::with_capacity(n + 1);
            values.push(0.0);
            let mut acc = 0.0;
            for (i, vi) in v.iter().enumerate() {
                acc += vi * grid.width(i);
                values.push(acc);
            }
            let path = RealPath::new(Arc::clone(grid), values)?;
            pl_energy_quadrature(&path, config.alpha, 2.0, config.tolerance)
        };
        let mut unit = vec![0.0; n];
        let mut diag = vec![0.0; n];
        for i in 0..n {
            unit[i] = 1.0;
            diag[i] = energy(&unit)?;
            unit[i] = 0.0;
        }
        let mut a_mat = DMatrix::from_diagonal(&DVector::from_vec(diag.clone()));
        for i in 0..n {
            for j in i + 1..n {
                unit[i] = 1.0;
                unit[j] = 1.0;
                let e = energy(&unit)?;
                unit[i] = 0.0;
                unit[j] = 0.0;
                let v = 0.5 * (e - diag[i] - diag[j]);
                a_mat[(i, j)] = v;
                a_mat[(j, i)] = v;
            }
        }
        Self::from_matrix(config, a_mat)
    }

    fn from_matrix(config: SteinConfig, a_mat: DMatrix<f64>) -> Result<Self> {
        let n = config.n();
        let Some(chol) = a_mat.clone().cholesky() else {
            return numeric(
                "matrix A is not positive definite; the quadrature tolerance is too loose".to_string(),
            );
        };
        let b_mat = chol.inverse();
        let residual = (&a_mat * &b_mat - DMatrix::<f64>::identity(n, n)).amax();
        if residual > INVERSE_RESIDUAL {
            return numeric(format!("|AB - I|_max = {residual:e} exceeds {INVERSE_RESIDUAL:e}"));
        }
        let chol_l = chol.l();
        Ok(Self { config, a_mat, b_mat, chol_l })
    }

    pub fn config(&self) -> &SteinConfig {
        &self.config
    }

    pub fn a_matrix(&self) -> &DMatrix<f64> {
        &self.a_mat
    }

    pub fn b_matrix(&self) -> &DMatrix<f64> {
        &self.b_mat
    }

    /// Lower Cholesky factor of `A`.
    pub fn cholesky_factor(&self) -> &DMatrix<f64> {
        &self.chol_l
    }

    fn check_len(&self, dx: &[f64]) -> Result<()> {
        if dx.len() != self.config.n() {
            return invalid(format!("expected {} coarse increments, got {}", self.config.n(), dx.len()));
        }
        Ok(())
    }

    fn b_times(&self, dx: &[f64]) -> DVector<f64> {
        &self.b_mat * DVector::from_column_slice(dx)
    }

    /// `Q = ⟨Bδx, δx⟩`.
    pub fn quadratic_form_q(&self, dx: &[f64]) -> Result<f64> {
        self.check_len(dx)?;
        if dx.iter().all(|&x| x == 0.0) {
            return invalid("Q is undefined at the zero increment vector");
        }
        Ok(self.b_times(dx).dot(&DVector::from_column_slice(dx)))
    }

    /// `2a(2(a - 1) + n)`, so that `Δ_α F = coefficient · Q^{a-1}`.
    pub fn laplacian_coefficient(&self) -> f64 {
        let a = self.config.a;
        2.0 * a * (2.0 * (a - 1.0) + self.config.n() as f64)
    }

    /// `Δ_α F = 2a(2(a - 1) + n) Q^{a-1}`.
    pub fn laplacian_f(&self, dx: &[f64]) -> Result<f64> {
        let q = self.quadratic_form_q(dx)?;
        Ok(self.laplacian_coefficient() * q.powf(self.config.a - 1.0))
    }

    /// `ξ_t = 4a ⟨Bδx, ℓ(t)⟩ / Q`.
    pub fn stein_shift(&self, dx: &[f64], t: f64) -> Result<f64> {
        Ok(self.shift_profile(dx, &[t])?[0])
    }

    /// `ξ` at several times, sharing `Bδx`.
    pub fn shift_profile(&self, dx: &[f64], times: &[f64]) -> Result<Vec<f64>> {
        let q = self.quadratic_form_q(dx)?;
        let b = self.b_times(dx);
        let coarse = &self.config.coarse;
        let horizon = coarse.horizon();
        let x = coarse.nodes();
        let scale = 4.0 * self.config.a / q;
        // cumulative ⟨Bδx, ℓ⟩ at the coarse nodes
        let mut cum = Vec::with_capacity(x.len());
        cum.push(0.0);
        for i in 0..self.config.n() {
            cum.push(cum[i] + b[i] * coarse.width(i));
        }
        times
            .iter()
            .map(|&t| {
                if !(0.0..=horizon).contains(&t) {
                    return invalid(format!("time {t} outside [0, {horizon}]"));
                }
                let j = coarse.cell_of(t);
                Ok(scale * (cum[j] + b[j] * (t - x[j])))
            })
            .collect()
    }

    /// Coarse increments of a path whose grid contains the coarse nodes.
    pub fn increments(&self, path: &RealPath) -> Result<Vec<f64>> {
        let idx = path.grid().embed(&self.config.coarse).map_err(|_| {
            crate::Error::InvalidArgument("coarse nodes are missing from the path grid".into())
        })?;
        let v = path.values();
        Ok(idx.windows(2).map(|w| v[w[1]] - v[w[0]]).collect())
    }

    /// `X + ξ` at every node of the path grid.
    pub fn shrunk_estimator(&self, path: &RealPath) -> Result<RealPath> {
        let dx = self.increments(path)?;
        let shift = self.shift_profile(&dx, path.grid().nodes())?;
        let values = path.values().iter().zip(&shift).map(|(x, s)| x + s).collect();
        RealPath::new(Arc::clone(path.grid()), values)
    }

    /// Draws `δX` from its Gaussian law under drift `u`.
    pub fn sample_increments(&self, drift: &DriftSpec, stream: &mut Stream) -> Vec<f64> {
        let x = self.config.coarse.nodes();
        x.windows(2)
            .map(|w| {
                let mean = drift.primitive(w[1]) - drift.primitive(w[0]);
                mean + (w[1] - w[0]).sqrt() * stream.standard_normal()
            })
            .collect()
    }

    /// `ρ + 4 E^u[Δ_α F / F]` with `E^u[Q⁻¹]` estimated from `reps` draws of
    /// `δX`. Requires a deterministic drift.
    pub fn predicted_risk(&self, drift: &DriftSpec, reps: u64, seed: u64) -> Result<PredictedRisk> {
        drift.validate()?;
        if reps < 2 {
            return invalid("predicted risk needs at least 2 replications");
        }
        let rho = cr_w2alpha_gaussian(self.config.coarse.horizon(), self.config.alpha)?;
        let inv_q: Vec<f64> = replicate(reps, |i| {
            let dx = self.sample_increments(drift, &mut Stream::new(seed, i));
            self.quadratic_form_q(&dx).map(f64::recip).unwrap_or(f64::INFINITY)
        });
        let (mean_inv_q, stderr_inv_q) = mean_and_stderr(&inv_q);
        if !mean_inv_q.is_finite() {
            return numeric("E[1/Q] estimate is not finite");
        }
        let coef = 4.0 * self.laplacian_coefficient();
        Ok(PredictedRisk {
            rho,
            mean_inv_q,
            stderr_inv_q,
            value: rho + coef * mean_inv_q,
            stderr: coef.abs() * stderr_inv_q,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::processes::{shift_by_drift, simulate_bm};
    use crate::sobolev_energy::{FracEnergy, RampGram, Regime};
    use proptest::prelude::*;

    fn operator(n: usize, a: f64) -> SteinOperator {
        SteinOperator::assemble(SteinConfig::uniform(1.0, n, a, 0.25).unwrap()).unwrap()
    }

    fn increments_strategy(n: usize) -> impl Strategy<Value = Vec<f64>> {
        prop::collection::vec(-2.0f64..2.0, n)
            .prop_filter("away from zero", |v| v.iter().map(|x| x * x).sum::<f64>() > 1e-2)
    }

    /// `D_{1[0,t]} log F²` as the derivative of `ε ↦ 2a log Q(δx + ε ℓ(t))`,
    /// by central differences refined with two Richardson steps.
    fn fd_shift(op: &SteinOperator, dx: &[f64], t: f64) -> f64 {
        let coarse = op.config().coarse();
        let ell: Vec<f64> = (0..dx.len())
            .map(|j| {
                let (lo, hi) = (coarse.nodes()[j], coarse.nodes()[j + 1]);
                (t.min(hi) - lo).max(0.0)
            })
            .collect();
        let g = |eps: f64| {
            let moved: Vec<f64> = dx.iter().zip(&ell).map(|(x, l)| x + eps * l).collect();
            2.0 * op.config().a() * op.quadratic_form_q(&moved).unwrap().ln()
        };
        let d = |eps: f64| (g(eps) - g(-eps)) / (2.0 * eps);
        let h = 1e-2;
        let (d1, d2, d3) = (d(h), d(h / 2.0), d(h / 4.0));
        let r1 = (4.0 * d2 - d1) / 3.0;
        let r2 = (4.0 * d3 - d2) / 3.0;
        (16.0 * r2 - r1) / 15.0
    }

    #[test]
    fn config_validation() {
        assert!(SteinConfig::uniform(1.0, 2, -0.5, 0.25).unwrap_err().to_string().contains("n >= 3"));
        assert!(SteinConfig::uniform(1.0, 8, -1.0, 0.5).is_err());
        assert!(SteinConfig::uniform(1.0, 8, f64::NAN, 0.25).is_err());
        let c = SteinConfig::uniform(1.0, 8, -1.0, 0.25).unwrap();
        assert!(c.is_admissible());
        assert!(!SteinConfig::uniform(1.0, 8, 0.5, 0.25).unwrap().is_admissible());
        assert!(!SteinConfig::uniform(1.0, 3, -0.6, 0.25).unwrap().is_admissible());
    }

    #[test]
    fn matrix_matches_identity_path_energy() {
        for n in [3, 8, 20] {
            let op = operator(n, -1.0);
            let total = op.a_matrix().sum();
            assert!((total / (8.0 / 15.0) - 1.0).abs() < 1e-6, "n={n}: {total}");
        }
    }

    #[test]
    fn matrix_matches_closed_form_gram() {
        let coarse = Arc::new(TimeGrid::from_nodes(vec![0.0, 0.1, 0.4, 0.5, 0.9, 1.0]).unwrap());
        let op = SteinOperator::assemble(SteinConfig::new(coarse.clone(), -1.0, 0.3).unwrap()).unwrap();
        let gram = RampGram::new(&coarse, 0.3).unwrap();
        let a = op.a_matrix();
        for i in 0..5 {
            for j in 0..5 {
                assert!((a[(i, j)] - gram.entry(i, j)).abs() < 1e-8 * gram.entry(i, i), "({i},{j})");
                assert_eq!(a[(i, j)], a[(j, i)]);
            }
        }
    }

    #[test]
    fn hat_direction_matches_independent_quadrature() {
        let op = operator(4, -1.0);
        let v = DVector::from_vec(vec![1.0, -1.0, 0.0, 0.0]);
        let form = v.dot(&(op.a_matrix() * &v));
        // ṽ is the hat rising on [0, 1/4] and falling on [1/4, 1/2]
        let hat = |t: f64| if t < 0.25 { t } else { (0.5 - t).max(0.0) };
        let f = |s: f64, d: f64| 2.0 * (hat(s + d) - hat(s)).powi(2) * d.powf(-1.5);
        let oracle = crate::sobolev_energy::upper_triangle_oracle(&[0.0, 0.25, 0.5, 1.0], &f, 1e-8);
        assert!((form - oracle).abs() < 1e-5 * oracle, "{form} vs {oracle}");
    }

    #[test]
    fn inverse_residual_small_up_to_32() {
        for n in [3, 8, 16, 32] {
            let op = operator(n, -1.0);
            let r = (op.a_matrix() * op.b_matrix() - DMatrix::<f64>::identity(n, n)).amax();
            assert!(r <= 1e-8, "n={n}: {r}");
            assert!(op.cholesky_factor().diagonal().iter().all(|&d| d > 0.0));
        }
    }

    #[test]
    fn q_on_columns_of_a() {
        let op = operator(6, -1.0);
        for i in 0..6 {
            let col: Vec<f64> = op.a_matrix().column(i).iter().copied().collect();
            let q = op.quadratic_form_q(&col).unwrap();
            assert!((q - op.a_matrix()[(i, i)]).abs() < 1e-10 * q);
        }
        assert!(op.quadratic_form_q(&[0.0; 6]).is_err());
        assert!(op.quadratic_form_q(&[1.0; 5]).is_err());
    }

    #[test]
    fn laplacian_values() {
        // Q = 1 is reached by scaling any vector
        let op = operator(3, -0.25);
        let dx = [0.3, -0.2, 0.5];
        let q = op.quadratic_form_q(&dx).unwrap();
        let unit: Vec<f64> = dx.iter().map(|x| x / q.sqrt()).collect();
        assert!((op.laplacian_f(&unit).unwrap() + 0.25).abs() < 1e-12);
        let op8 = operator(8, -1.0);
        assert_eq!(op8.laplacian_coefficient(), -8.0);
        let dx8 = [0.4, 0.1, -0.3, 0.2, 0.5, -0.1, 0.0, 0.3];
        let q8 = op8.quadratic_form_q(&dx8).unwrap();
        let scaled: Vec<f64> = dx8.iter().map(|x| x * (2.0 / q8).sqrt()).collect();
        assert!((op8.laplacian_f(&scaled).unwrap() + 2.0).abs() < 1e-12);
        assert!(operator(8, -1e-9).laplacian_coefficient().abs() < 1e-7);
        assert!(operator(8, 0.5).laplacian_f(&dx8).unwrap() > 0.0);
    }

    #[test]
    fn shift_vanishes_at_origin_and_rejects_outside_times() {
        let op = operator(5, -1.0);
        let dx = [0.1, 0.2, -0.3, 0.4, 0.0];
        assert_eq!(op.stein_shift(&dx, 0.0).unwrap(), 0.0);
        assert!(op.stein_shift(&dx, 1.1).is_err());
        assert!(op.stein_shift(&dx, -0.1).is_err());
    }

    #[test]
    fn shift_matches_finite_difference_oracle() {
        let op = operator(8, -1.0);
        let mut s = Stream::new(77, 0);
        let mut worst = 0.0f64;
        for _ in 0..100 {
            let dx: Vec<f64> = (0..8).map(|_| s.standard_normal() * 0.35).collect();
            let t = s.uniform_open();
            let xi = op.stein_shift(&dx, t).unwrap();
            let fd = fd_shift(&op, &dx, t);
            worst = worst.max((xi - fd).abs() / xi.abs().max(1e-3));
        }
        assert!(worst < 1e-6, "{worst}");
    }

    #[test]
    fn shrunk_estimator_starts_at_zero_and_vanishes_with_a() {
        let fine = Arc::new(TimeGrid::uniform(1.0, 64).unwrap());
        let path = simulate_bm(&fine, &mut Stream::new(3, 3));
        let out = operator(8, -1.0).shrunk_estimator(&path).unwrap();
        assert_eq!(out.values()[0], 0.0);
        assert_ne!(out.values(), path.values());
        let tiny = operator(8, -1e-12).shrunk_estimator(&path).unwrap();
        for (a, b) in tiny.values().iter().zip(path.values()) {
            assert!((a - b).abs() < 1e-9);
        }
        let off = Arc::new(TimeGrid::uniform(1.0, 12).unwrap());
        assert!(operator(8, -1.0).shrunk_estimator(&simulate_bm(&off, &mut Stream::new(1, 1))).is_err());
    }

    #[test]
    fn predicted_risk_below_bound() {
        let op = operator(8, -1.0);
        let rho = 8.0 / 3.0;
        for drift in [DriftSpec::Zero {}, DriftSpec::Linear { slope: 0.5 }] {
            let p = op.predicted_risk(&drift, 4000, 11).unwrap();
            assert_eq!(p.rho, rho);
            assert!(p.value < rho - 3.0 * p.stderr);
            assert!(p.mean_inv_q > 0.0);
        }
        let vanish = operator(8, -1e-6).predicted_risk(&DriftSpec::Zero {}, 500, 1).unwrap();
        assert!((vanish.value - rho).abs() < 1e-3);
    }

    #[test]
    fn shortcut_increments_match_path_increments() {
        // δX read from a fine simulated path and drawn directly agree in law:
        // compare the MC means of 1/Q at 3 standard errors.
        let op = operator(8, -1.0);
        let drift = DriftSpec::Linear { slope: 0.5 };
        let fine = Arc::new(TimeGrid::uniform(1.0, 32).unwrap());
        let reps = 6000;
        let from_paths: Vec<f64> = (0..reps)
            .map(|i| {
                let path = shift_by_drift(&simulate_bm(&fine, &mut Stream::new(5, i)), &drift).unwrap();
                1.0 / op.quadratic_form_q(&op.increments(&path).unwrap()).unwrap()
            })
            .collect();
        let direct = op.predicted_risk(&drift, reps, 6).unwrap();
        let (m, se) = mean_and_stderr(&from_paths);
        let joint = (se * se + direct.stderr_inv_q.powi(2)).sqrt();
        assert!((m - direct.mean_inv_q).abs() < 3.0 * joint, "{m} vs {}", direct.mean_inv_q);
    }

    #[test]
    fn risk_decomposition_audit() {
        // Pathwise: energy of ξ is cᵀAc with c = 4aBδx/Q the slopes of ξ.
        // Cross term: E[∫(ξ_t - ξ_s)(W_t - W_s) dμ_α] = E[cᵀA(δW/h)] because
        // E[W_t - W_s | δW] is the interpolant of the coarse increments.
        let op = operator(8, -1.0);
        let a = op.config().a();
        let h = 1.0 / 8.0;
        for drift in [DriftSpec::Zero {}, DriftSpec::Linear { slope: 0.5 }] {
            let reps = 40_000;
            let mean_du: Vec<f64> =
                (0..8).map(|i| drift.primitive((i + 1) as f64 * h) - drift.primitive(i as f64 * h)).collect();
            let mut lhs = Vec::with_capacity(reps);
            let mut rhs = Vec::with_capacity(reps);
            for i in 0..reps as u64 {
                let dx = op.sample_increments(&drift, &mut Stream::new(21, i));
                let q = op.quadratic_form_q(&dx).unwrap();
                let c = op.b_times(&dx) * (4.0 * a / q);
                let w = DVector::from_iterator(8, dx.iter().zip(&mean_du).map(|(x, m)| (x - m) / h));
                let ac = op.a_matrix() * &c;
                lhs.push(c.dot(&ac) + 2.0 * ac.dot(&w));
                rhs.push(4.0 * op.laplacian_coefficient() / q);
            }
            let diff: Vec<f64> = lhs.iter().zip(&rhs).map(|(l, r)| l - r).collect();
            let (m, se) = mean_and_stderr(&diff);
            assert!(m.abs() < 3.0 * se, "{m} ± {se}");
        }
    }

    #[test]
    fn shift_energy_is_quadratic_form_of_slopes() {
        // ξ is piecewise linear on the coarse grid with slopes c = 4aBδx/Q.
        let op = operator(8, -1.0);
        let dx = [0.3, -0.1, 0.2, 0.5, -0.4, 0.1, 0.0, 0.2];
        let coarse = op.config().coarse().clone();
        let xi = op.shift_profile(&dx, coarse.nodes()).unwrap();
        let path = RealPath::new(coarse.clone(), xi).unwrap();
        let e = FracEnergy::new(&coarse, 0.25, 2.0, Regime::PiecewiseLinear).unwrap().energy(path.values()).unwrap();
        let q = op.quadratic_form_q(&dx).unwrap();
        let c = op.b_times(&dx) * (4.0 * op.config().a() / q);
        assert!((e - c.dot(&(op.a_matrix() * &c))).abs() < 1e-8 * e);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]

        #[test]
        fn q_quadratic_homogeneity(dx in increments_strategy(6), lambda in 0.1f64..5.0) {
            let op = operator(6, -1.0);
            let scaled: Vec<f64> = dx.iter().map(|x| lambda * x).collect();
            let (q, q2) = (op.quadratic_form_q(&dx).unwrap(), op.quadratic_form_q(&scaled).unwrap());
            prop_assert!(q > 0.0);
            prop_assert!((q2 - lambda * lambda * q).abs() <= 1e-10 * q2);
        }

        #[test]
        fn shift_is_minus_one_homogeneous(dx in increments_strategy(6), lambda in 0.1f64..5.0, t in 0.0f64..1.0) {
            let op = operator(6, -1.0);
            let scaled: Vec<f64> = dx.iter().map(|x| lambda * x).collect();
            let a = op.stein_shift(&dx, t).unwrap();
            let b = op.stein_shift(&scaled, t).unwrap();
            prop_assert!((lambda * b - a).abs() <= 1e-10 * a.abs().max(1e-12));
        }

        #[test]
        fn laplacian_sign(n in 3usize..12, frac in 0.01f64..0.99, dx in increments_strategy(12)) {
            let a = (1.0 - 0.5 * n as f64) * frac;
            let op = SteinOperator::assemble(SteinConfig::uniform(1.0, n, a, 0.25).unwrap()).unwrap();
            prop_assert!(op.config().is_admissible());
            prop_assert!(op.laplacian_f(&dx[..n]).unwrap() < 0.0);
        }
    }
}
