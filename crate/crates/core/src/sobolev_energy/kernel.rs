//! Singular kernel `x^{-β}`: second antiderivatives, cell weights and the
//! closed-form reference integrals.

use statrs::function::gamma::gamma;

use crate::error::{invalid, Result};

/// Antiderivative family of the kernel `x^{-β}` for `β > 1`.
///
/// `phi'' = x^{-β}`, `phi1' = phi`, `phi2' = phi1`. Each member is shifted by
/// a polynomial of degree below two relative to the pure power, which makes
/// the `β → 2` limit continuous (it becomes the logarithmic branch) and leaves
/// every four-corner combination used below unchanged.
#[derive(Debug, Clone, Copy)]
pub(crate) struct Primitives {
    eps: f64,
    c: f64,
}

impl Primitives {
    pub(crate) fn new(beta: f64) -> Self {
        Self { eps: 2.0 - beta, c: 1.0 - beta }
    }

    /// `(x^{2-β} - 1) / ((1-β)(2-β))`, or `-ln x` at `β = 2`.
    pub(crate) fn phi(&self, x: f64) -> f64 {
        let l = x.ln();
        if self.eps == 0.0 {
            return l / self.c;
        }
        (self.eps * l).exp_m1() / (self.eps * self.c)
    }

    pub(crate) fn phi1(&self, x: f64) -> f64 {
        if x == 0.0 {
            return 0.0;
        }
        let l = x.ln();
        if self.eps == 0.0 {
            return x * (l - 1.0) / self.c;
        }
        let e = self.eps;
        x * ((e * l).exp_m1() - e) / ((1.0 + e) * self.c * e)
    }

    pub(crate) fn phi2(&self, x: f64) -> f64 {
        if x == 0.0 {
            return 0.0;
        }
        let l = x.ln();
        if self.eps == 0.0 {
            return x * x * (2.0 * l - 3.0) / (4.0 * self.c);
        }
        let e = self.eps;
        x * x * (2.0 * (e * l).exp_m1() - 3.0 * e - e * e)
            / (2.0 * (1.0 + e) * (2.0 + e) * self.c * e)
    }
}

/// `∫_a^b ∫_c^d (t - s)^{-β} dt ds` for `b <= c`.
///
/// Returns `+∞` for touching cells (`b = c`) when `β >= 2`.
pub fn kernel_cell_weight(cell_s: (f64, f64), cell_t: (f64, f64), beta: f64) -> Result<f64> {
    let ((a, b), (c, d)) = (cell_s, cell_t);
    if !(beta > 1.0 && beta.is_finite()) {
        return invalid(format!("kernel exponent must be finite and > 1, got {beta}"));
    }
    if ![a, b, c, d].iter().all(|x| x.is_finite()) || a > b || c > d {
        return invalid(format!("malformed cells [{a}, {b}] x [{c}, {d}]"));
    }
    if b > c {
        return invalid(format!("cells [{a}, {b}] and [{c}, {d}] overlap"));
    }
    if a == b || c == d {
        return Ok(0.0);
    }
    let k = Primitives::new(beta);
    let corner = k.phi(c - b);
    if corner.is_infinite() {
        return Ok(f64::INFINITY);
    }
    Ok(k.phi(d - a) - k.phi(d - b) - k.phi(c - a) + corner)
}

/// `∫_0^T ∫_0^T |t - s|^γ ds dt`, infinite for `γ <= -1`.
pub fn power_double_integral(horizon: f64, gamma_exp: f64) -> f64 {
    if gamma_exp <= -1.0 {
        return f64::INFINITY;
    }
    2.0 * horizon.powf(gamma_exp + 2.0) / ((gamma_exp + 1.0) * (gamma_exp + 2.0))
}

/// `∫_0^T ∫_0^T |t - s|^{-2α} ds dt`; infinite for `α >= 1/2`.
pub fn kernel_double_integral(horizon: f64, alpha: f64) -> Result<f64> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return invalid(format!("alpha must lie in (0, 1), got {alpha}"));
    }
    if !(horizon > 0.0 && horizon.is_finite()) {
        return invalid(format!("horizon must be positive, got {horizon}"));
    }
    Ok(power_double_integral(horizon, -2.0 * alpha))
}

/// `E|Y|^q` for a standard Gaussian `Y`.
pub fn gaussian_abs_moment(q: f64) -> Result<f64> {
    if !(q > 0.0 && q.is_finite()) {
        return invalid(format!("moment order must be positive, got {q}"));
    }
    Ok(2f64.powf(0.5 * q) * gamma(0.5 * (q + 1.0)) / std::f64::consts::PI.sqrt())
}
