//! Risk-level Monte Carlo checks: attainment of the bounds by `X`, drift
//! independence, confidence interval coverage, divergence signatures and the
//! shrinkage estimator.

use std::sync::Arc;

use frac_stein::montecarlo::{
    divergence_probe, estimate_risk, super_efficiency_experiment, with_threads, Estimator, ExperimentSpec, Model,
    ProbeSubject,
};
use frac_stein::processes::{DriftSpec, GammaLaw, IntensitySpec, RateCurve, TimeGrid};
use frac_stein::sobolev_energy::{EnergySpec, MeasureSpec, Regime};
use frac_stein::stein::SteinConfig;

fn lebesgue() -> EnergySpec {
    EnergySpec::L2 { mu: MeasureSpec::Lebesgue {} }
}

fn spec(model: Model, energy: EnergySpec, m: usize, reps: u64, seed: u64) -> ExperimentSpec {
    ExperimentSpec {
        name: "mc".into(),
        model,
        estimator: Estimator::Identity,
        energy,
        grid: Arc::new(TimeGrid::uniform(1.0, m).unwrap()),
        reps,
        seed,
    }
}

fn sine_drift() -> DriftSpec {
    DriftSpec::Sine { amplitude: 1.0, omega: std::f64::consts::PI }
}

#[test]
fn l2_risk_of_x_is_half() {
    let r = estimate_risk(&spec(Model::Gaussian(sine_drift()), lebesgue(), 512, 10_000, 101)).unwrap();
    assert!(r.z_score(0.5) <= 3.0, "{r:?}");
    assert_eq!(r.ratio.map(|x| (x - r.estimate / 0.5).abs() < 1e-15), Some(true));
}

#[test]
fn wfrac_pc_risk_of_x_matches_discrete_expectation() {
    let energy = EnergySpec::Wfrac { alpha: 0.25, p: 2.0, regime: Regime::PiecewiseConstant };
    let r = estimate_risk(&spec(Model::Gaussian(DriftSpec::Linear { slope: 2.0 }), energy, 1024, 10_000, 102)).unwrap();
    let exact = r.discrete_expectation.unwrap();
    assert!((exact / (8.0 / 3.0) - 1.0).abs() < 0.05, "{exact}");
    assert!(r.z_score(exact) <= 3.0, "{r:?}");
}

#[test]
fn gaussian_risk_is_drift_independent() {
    let energy = EnergySpec::Wfrac { alpha: 0.3, p: 2.0, regime: Regime::PiecewiseLinear };
    let a = estimate_risk(&spec(Model::Gaussian(DriftSpec::Zero {}), energy.clone(), 128, 4000, 103)).unwrap();
    let b = estimate_risk(&spec(Model::Gaussian(sine_drift()), energy, 128, 4000, 104)).unwrap();
    assert!((a.estimate - b.estimate).abs() <= 3.0 * a.stderr.hypot(b.stderr), "{a:?} {b:?}");
}

#[test]
fn confidence_interval_coverage() {
    let covered = (0..100u64)
        .filter(|&seed| {
            let r = estimate_risk(&spec(Model::Gaussian(DriftSpec::Zero {}), lebesgue(), 64, 1000, 1000 + seed)).unwrap();
            r.ci_lo <= 0.5 && 0.5 <= r.ci_hi
        })
        .count();
    assert!(covered >= 90, "{covered} of 100");
}

#[test]
fn cox_l2_risk_is_mean_compensator_mass() {
    let gamma = IntensitySpec::RandomScaled {
        rate: RateCurve::Constant { value: 1.0 },
        multiplier: GammaLaw { shape: 2.0, scale: 0.5 },
        max_rate: 1.0,
    };
    for (intensity, seed) in [(IntensitySpec::unit(), 105), (gamma, 106)] {
        let r = estimate_risk(&spec(Model::Cox(intensity), lebesgue(), 256, 10_000, seed)).unwrap();
        assert!((r.bound.unwrap() - 0.5).abs() < 1e-12);
        assert!(r.z_score(0.5) <= 3.0, "{r:?}");
    }
}

#[test]
fn cox_time_varying_intensity_attains_bound() {
    let intensity = IntensitySpec::Deterministic {
        rate: RateCurve::Linear { intercept: 0.5, slope: 2.0 },
        max_rate: 2.5,
    };
    // ∫₀¹ (t/2 + t²) dt = 1/4 + 1/3
    let r = estimate_risk(&spec(Model::Cox(intensity), lebesgue(), 256, 10_000, 107)).unwrap();
    assert!((r.bound.unwrap() - 7.0 / 12.0).abs() < 1e-12);
    assert!(r.z_score(7.0 / 12.0) <= 3.0, "{r:?}");
}

#[test]
fn h1_divergence_is_linear_in_m() {
    let rows = divergence_probe(
        &ProbeSubject::Process(Model::Gaussian(DriftSpec::Zero {})),
        &EnergySpec::H1 {},
        1.0,
        &[64, 128, 256],
        1000,
        108,
    )
    .unwrap();
    for r in &rows {
        assert!((r.mean / r.m as f64 - 1.0).abs() <= 0.1, "{r:?}");
    }
}

#[test]
fn wfrac_above_half_diverges() {
    let energy = EnergySpec::Wfrac { alpha: 0.6, p: 2.0, regime: Regime::PiecewiseLinear };
    let rows = divergence_probe(
        &ProbeSubject::Process(Model::Gaussian(DriftSpec::Zero {})),
        &energy,
        1.0,
        &[32, 64, 128, 256],
        1000,
        109,
    )
    .unwrap();
    for w in rows.windows(2) {
        assert!(w[1].mean / w[0].mean >= 1.1, "{w:?}");
        let exact = w[1].exact.unwrap() / w[0].exact.unwrap();
        assert!(exact >= 1.1, "{exact}");
    }
}

#[test]
fn smooth_path_has_bounded_h1_energy() {
    let rows = divergence_probe(
        &ProbeSubject::Deterministic(DriftSpec::Linear { slope: 1.0 }),
        &EnergySpec::H1 {},
        1.0,
        &[64, 128, 256],
        0,
        0,
    )
    .unwrap();
    for r in rows {
        assert!((r.mean - 1.0).abs() < 1e-12);
    }
}

#[test]
fn vanishing_shrinkage_recovers_bound() {
    let config = SteinConfig::uniform(1.0, 8, -1e-3, 0.25).unwrap();
    let rows = super_efficiency_experiment(&config, &[DriftSpec::Zero {}], 256, 10_000, 110).unwrap();
    let r = &rows[0].report;
    assert!((r.estimate / (8.0 / 3.0) - 1.0).abs() < 0.01, "{r:?}");
}

#[test]
fn shrinkage_beats_bound_at_small_scale() {
    let config = SteinConfig::uniform(1.0, 8, -1.0, 0.25).unwrap();
    let rows =
        super_efficiency_experiment(&config, &[DriftSpec::Zero {}, DriftSpec::Linear { slope: 0.5 }], 128, 5000, 111)
            .unwrap();
    for row in rows {
        assert!(row.super_efficient, "{row:?}");
        assert!(row.consistent, "{row:?}");
    }
}

#[test]
fn reports_identical_across_worker_counts() {
    let cox = spec(
        Model::Cox(IntensitySpec::RandomScaled {
            rate: RateCurve::Sine { level: 1.0, amplitude: 0.5, omega: 3.0 },
            multiplier: GammaLaw { shape: 3.0, scale: 0.4 },
            max_rate: 1.5,
        }),
        EnergySpec::Wfrac { alpha: 0.2, p: 3.0, regime: Regime::PiecewiseLinear },
        32,
        300,
        112,
    );
    let a = with_threads(Some(1), || estimate_risk(&cox)).unwrap().unwrap();
    let b = with_threads(Some(5), || estimate_risk(&cox)).unwrap().unwrap();
    assert_eq!(a, b);
}
