use std::sync::Arc;

use super::drift::DriftSpec;
use super::grid::TimeGrid;
use super::intensity::{IntensitySpec, RealizedIntensity};
use super::paths::{CountingPath, RealPath};
use crate::error::{invalid, numeric, Result};
use crate::rng::Stream;

/// Brownian path on `grid`: independent `N(0, Δτ_k)` increments, `X_0 = 0`.
pub fn simulate_bm(grid: &Arc<TimeGrid>, stream: &mut Stream) -> RealPath {
    let mut values = Vec::with_capacity(grid.nodes().len());
    let mut x = 0.0;
    values.push(x);
    for h in grid.widths() {
        x += h.sqrt() * stream.standard_normal();
        values.push(x);
    }
    RealPath::new(Arc::clone(grid), values).expect("one value per node")
}

/// Observation under `P^u`: `X = X^u + u` with `X^u` Brownian.
pub fn shift_by_drift(path: &RealPath, drift: &DriftSpec) -> Result<RealPath> {
    if let DriftSpec::Sampled { nodes, .. } = drift {
        if nodes.as_slice() != path.grid().nodes() {
            return invalid("sampled drift nodes differ from the path grid");
        }
    }
    let u = drift.on_grid(path.grid());
    let mut out = path.clone();
    for (x, du) in out.values_mut().iter_mut().zip(u.values()) {
        *x += du;
    }
    Ok(out)
}

/// Cox path with its realized intensity.
#[derive(Debug, Clone)]
pub struct CoxSample {
    pub path: CountingPath,
    pub intensity: RealizedIntensity,
}

impl CoxSample {
    /// Realized compensator `u_t` at the grid nodes.
    pub fn compensator(&self) -> RealPath {
        RealPath::from_fn(Arc::clone(self.path.grid()), |t| self.intensity.compensator(t))
    }
}

/// Cox process by Lewis–Shedler thinning.
///
/// The `F_0` part of the intensity is drawn first; candidates then arrive at
/// the envelope rate and are kept with probability `λ(t) / envelope`.
pub fn simulate_cox(grid: &Arc<TimeGrid>, intensity: &IntensitySpec, stream: &mut Stream) -> Result<CoxSample> {
    let realized = intensity.realize(stream);
    let jumps = thin(grid.horizon(), &realized, stream)?;
    Ok(CoxSample { path: CountingPath::new(Arc::clone(grid), jumps)?, intensity: realized })
}

fn thin(horizon: f64, intensity: &RealizedIntensity, stream: &mut Stream) -> Result<Vec<f64>> {
    let envelope = intensity.envelope();
    let mut jumps = Vec::new();
    if envelope <= 0.0 {
        return Ok(jumps);
    }
    let mut t = 0.0;
    loop {
        t += -stream.uniform_open().ln() / envelope;
        if t > horizon {
            return Ok(jumps);
        }
        let rate = intensity.value(t);
        if rate > envelope * (1.0 + 1e-12) {
            return numeric(format!("intensity {rate} at t = {t} exceeds thinning bound {envelope}"));
        }
        if stream.uniform_open() * envelope <= rate {
            jumps.push(t);
        }
    }
}

/// Gaussian likelihood ratio `L^u` with left-point Ito sums.
pub fn girsanov_weight_gaussian(path: &RealPath, drift: &DriftSpec) -> f64 {
    let nodes = path.grid().nodes();
    let x = path.values();
    let mut stochastic = 0.0;
    let mut energy = 0.0;
    for k in 1..nodes.len() {
        let rate = drift.derivative(nodes[k - 1]);
        stochastic += rate * (x[k] - x[k - 1]);
        energy += rate * rate * (nodes[k] - nodes[k - 1]);
    }
    (stochastic - 0.5 * energy).exp()
}

/// Poisson-to-Cox likelihood ratio `Π u̇(T_k) · exp(-∫(u̇ - 1))`, the integral
/// by the trapezoid rule on the path grid.
pub fn girsanov_weight_cox(path: &CountingPath, rate: impl Fn(f64) -> f64) -> Result<f64> {
    let mut log_weight = 0.0;
    for &t in path.jumps() {
        let r = rate(t);
        if r.is_nan() || r <= 0.0 {
            return invalid(format!("intensity must be positive at jump time {t}, got {r}"));
        }
        log_weight += r.ln();
    }
    let nodes = path.grid().nodes();
    let compensator: f64 = nodes
        .windows(2)
        .map(|w| 0.5 * ((rate(w[0]) - 1.0) + (rate(w[1]) - 1.0)) * (w[1] - w[0]))
        .sum();
    Ok((log_weight - compensator).exp())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::processes::{make_uniform_grid, RateCurve};

    fn grid(m: usize) -> Arc<TimeGrid> {
        Arc::new(make_uniform_grid(1.0, m).unwrap())
    }

    #[test]
    fn bm_starts_at_zero_and_is_deterministic() {
        let g = grid(16);
        let a = simulate_bm(&g, &mut Stream::new(3, 11));
        let b = simulate_bm(&g, &mut Stream::new(3, 11));
        assert_eq!(a.values()[0], 0.0);
        assert_eq!(a, b);
    }

    #[test]
    fn zero_drift_leaves_path_unchanged() {
        let g = grid(8);
        let p = simulate_bm(&g, &mut Stream::new(1, 0));
        assert_eq!(shift_by_drift(&p, &DriftSpec::Zero {}).unwrap(), p);
    }

    #[test]
    fn unit_drift_on_zero_path_gives_nodes() {
        let g = grid(8);
        let p = shift_by_drift(&RealPath::zeros(Arc::clone(&g)), &DriftSpec::Linear { slope: 1.0 }).unwrap();
        for (&t, &v) in g.nodes().iter().zip(p.values()) {
            assert!((v - t).abs() < 1e-15);
        }
    }

    #[test]
    fn sampled_drift_grid_mismatch() {
        let d = DriftSpec::Sampled { nodes: vec![0.0, 0.5, 1.0], rate: vec![0.0; 3] };
        assert!(shift_by_drift(&RealPath::zeros(grid(4)), &d).is_err());
    }

    #[test]
    fn gaussian_weight_of_zero_drift_is_one() {
        let p = simulate_bm(&grid(32), &mut Stream::new(5, 5));
        assert_eq!(girsanov_weight_gaussian(&p, &DriftSpec::Zero {}), 1.0);
    }

    #[test]
    fn gaussian_weight_on_flat_path() {
        // u̇(t) = t; exponent -½ Σ τ_{k-1}² Δτ → -1/6
        let drift = DriftSpec::Quadratic { coef: 0.5 };
        let mut prev = f64::INFINITY;
        for m in [64, 256, 1024, 4096] {
            let w = girsanov_weight_gaussian(&RealPath::zeros(grid(m)), &drift);
            let err = (w - (-1.0f64 / 6.0).exp()).abs();
            assert!(err < prev);
            prev = err;
            if m == 4096 {
                assert!(err < 1e-4, "{w}");
            }
        }
        let m = 64;
        let h = 1.0 / m as f64;
        let left: f64 = (0..m).map(|k| (k as f64 * h).powi(2) * h).sum();
        let w = girsanov_weight_gaussian(&RealPath::zeros(grid(m)), &drift);
        assert!((w - (-0.5 * left).exp()).abs() < 1e-14);
    }

    #[test]
    fn cox_weight_identity_and_no_jumps() {
        let path = CountingPath::new(grid(8), vec![0.3, 0.6]).unwrap();
        assert_eq!(girsanov_weight_cox(&path, |_| 1.0).unwrap(), 1.0);
        let empty = CountingPath::new(grid(8), vec![]).unwrap();
        let w = girsanov_weight_cox(&empty, |_| 2.0).unwrap();
        assert!((w - (-1.0f64).exp()).abs() < 1e-15);
        assert!(girsanov_weight_cox(&path, |t| t - 0.5).is_err());
    }

    #[test]
    fn thinning_bound_violation_is_an_error() {
        let realized = RealizedIntensity {
            rate: RateCurve::Constant { value: 3.0 },
            scale: 1.0,
            max_rate: 2.0,
        };
        assert!(thin(10.0, &realized, &mut Stream::new(0, 0)).is_err());
    }

    #[test]
    fn zero_intensity_has_no_jumps() {
        let spec = IntensitySpec::Deterministic { rate: RateCurve::Constant { value: 0.0 }, max_rate: 0.0 };
        let s = simulate_cox(&grid(4), &spec, &mut Stream::new(0, 0)).unwrap();
        assert_eq!(s.path.total(), 0);
    }
}
