//! Closed-form Cramer–Rao lower bounds for the Gaussian shift and Cox models.
//!
//! Infinite bounds are returned as `f64::INFINITY`; they encode the
//! nonexistence of unbiased estimators with finite risk.

use crate::error::{invalid, Result};
use crate::quadrature::{adaptive_1d, Tolerance};
use crate::sobolev_energy::{
    gaussian_abs_moment, kernel_cell_weight, kernel_double_integral, power_double_integral, MeasureSpec,
};

fn check_horizon(horizon: f64) -> Result<()> {
    if !(horizon > 0.0 && horizon.is_finite()) {
        return invalid(format!("horizon must be positive and finite, got {horizon}"));
    }
    Ok(())
}

fn check_alpha(alpha: f64) -> Result<()> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return invalid(format!("alpha must lie in (0, 1), got {alpha}"));
    }
    Ok(())
}

fn check_p(p: f64) -> Result<()> {
    if !(p > 1.0 && p.is_finite()) {
        return invalid(format!("p must be finite and > 1, got {p}"));
    }
    Ok(())
}

/// `∫_0^T t μ(dt)`: bound on the `L²(μ)` risk of unbiased drift estimators.
pub fn cr_l2_gaussian(mu: &MeasureSpec, horizon: f64) -> Result<f64> {
    check_horizon(horizon)?;
    mu.validate(horizon)?;
    Ok(match mu {
        MeasureSpec::Lebesgue {} => 0.5 * horizon * horizon,
        MeasureSpec::Discrete { atoms } => atoms.iter().map(|a| a.weight * a.time).sum(),
    })
}

/// `W^{α,2}` bound `∫∫ |t - s|^{-2α}`, attained by `X`.
pub fn cr_w2alpha_gaussian(horizon: f64, alpha: f64) -> Result<f64> {
    kernel_double_integral(horizon, alpha)
}

/// `W^{α,p}` bound
/// `c_q^{-p/q} · 2 T^{1 - pα + p/2} / (p max{0, 1/2 - α} (1 + p(1/2 - α)))`
/// with `q = p / (p - 1)`.
pub fn cr_walphap_gaussian(horizon: f64, alpha: f64, p: f64) -> Result<f64> {
    check_horizon(horizon)?;
    check_alpha(alpha)?;
    check_p(p)?;
    let gap = (0.5 - alpha).max(0.0);
    if gap == 0.0 {
        return Ok(f64::INFINITY);
    }
    let q = p / (p - 1.0);
    let cq = gaussian_abs_moment(q)?;
    let numerator = 2.0 * horizon.powf(1.0 - p * alpha + 0.5 * p);
    Ok(numerator / (p * gap * (1.0 + p * gap)) / cq.powf(p / q))
}

/// `W^{α,p}` risk of the estimator `X`: `c_p ∫∫ |t - s|^{p/2 - pα - 1}`.
pub fn risk_of_x_walphap(horizon: f64, alpha: f64, p: f64) -> Result<f64> {
    check_horizon(horizon)?;
    check_alpha(alpha)?;
    check_p(p)?;
    Ok(gaussian_abs_moment(p)? * power_double_integral(horizon, 0.5 * p - p * alpha - 1.0))
}

/// `∫_0^T E[u_t] μ(dt)` for a Cox process with mean compensator `E[u_t]`.
pub fn cr_l2_cox(mean_compensator: impl Fn(f64) -> f64, mu: &MeasureSpec, horizon: f64) -> Result<f64> {
    check_horizon(horizon)?;
    mu.integrate(horizon, mean_compensator)
}

/// `2 ∫_0^T E[u̇_r] ∫_r^T ∫_0^r (t - s)^{-2α-1} ds dt dr`.
pub fn cr_w2alpha_cox(mean_rate: impl Fn(f64) -> f64, horizon: f64, alpha: f64) -> Result<f64> {
    check_horizon(horizon)?;
    check_alpha(alpha)?;
    let tol = Tolerance::relative(1e-12);
    if alpha >= 0.5 {
        let mut rate = |r: f64| mean_rate(r);
        let mass = adaptive_1d(&mut rate, 0.0, horizon, &[], tol)?;
        return Ok(if mass > 0.0 { f64::INFINITY } else { 0.0 });
    }
    let beta = 2.0 * alpha + 1.0;
    let mut err = None;
    let mut f = |r: f64| match kernel_cell_weight((0.0, r), (r, horizon), beta) {
        Ok(k) => mean_rate(r) * k,
        Err(e) => {
            err = Some(e);
            0.0
        }
    };
    let value = adaptive_1d(&mut f, 0.0, horizon, &[], tol)?;
    match err {
        Some(e) => Err(e),
        None => Ok(2.0 * value),
    }
}
