use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::rng::Stream;

/// Deterministic base rate curve `λ̄(t)` with a closed-form primitive.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum RateCurve {
    Constant { value: f64 },
    /// `intercept + slope · t`
    Linear { intercept: f64, slope: f64 },
    /// `level + amplitude · sin(ω t)`
    Sine { level: f64, amplitude: f64, omega: f64 },
}

impl RateCurve {
    pub fn value(&self, t: f64) -> f64 {
        match *self {
            RateCurve::Constant { value } => value,
            RateCurve::Linear { intercept, slope } => intercept + slope * t,
            RateCurve::Sine { level, amplitude, omega } => level + amplitude * (omega * t).sin(),
        }
    }

    /// `∫_0^t λ̄(s) ds`.
    pub fn primitive(&self, t: f64) -> f64 {
        match *self {
            RateCurve::Constant { value } => value * t,
            RateCurve::Linear { intercept, slope } => intercept * t + 0.5 * slope * t * t,
            RateCurve::Sine { level, amplitude, omega } => {
                level * t + amplitude * (1.0 - (omega * t).cos()) / omega
            }
        }
    }

    /// Lower and upper bounds of the curve on `[0, horizon]` (the sine bounds
    /// are the envelope `level ± |amplitude|`).
    pub fn range_on(&self, horizon: f64) -> (f64, f64) {
        match *self {
            RateCurve::Constant { value } => (value, value),
            RateCurve::Linear { .. } => {
                let (a, b) = (self.value(0.0), self.value(horizon));
                (a.min(b), a.max(b))
            }
            RateCurve::Sine { level, amplitude, .. } => (level - amplitude.abs(), level + amplitude.abs()),
        }
    }

    fn validate(&self) -> Result<()> {
        let finite = match *self {
            RateCurve::Constant { value } => value.is_finite(),
            RateCurve::Linear { intercept, slope } => intercept.is_finite() && slope.is_finite(),
            RateCurve::Sine { level, amplitude, omega } => {
                level.is_finite() && amplitude.is_finite() && omega.is_finite() && omega != 0.0
            }
        };
        if finite {
            Ok(())
        } else {
            invalid(format!("rate curve parameters must be finite (omega != 0): {self:?}"))
        }
    }
}

/// Law of the `F_0`-measurable multiplier `Z`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GammaLaw {
    pub shape: f64,
    pub scale: f64,
}

impl GammaLaw {
    pub fn mean(&self) -> f64 {
        self.shape * self.scale
    }

    pub fn variance(&self) -> f64 {
        self.shape * self.scale * self.scale
    }
}

/// Cox intensity `u̇_t`: either deterministic `λ̄(t)` or `Z · λ̄(t)` with `Z`
/// drawn once per realization.
///
/// `max_rate` bounds the base curve `λ̄`; for the random-scaled family the
/// thinning envelope of a realization is `Z · max_rate`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum IntensitySpec {
    Deterministic { rate: RateCurve, max_rate: f64 },
    RandomScaled { rate: RateCurve, multiplier: GammaLaw, max_rate: f64 },
}

/// One realization of the intensity: `scale · λ̄(t)` with envelope `scale · max_rate`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RealizedIntensity {
    pub rate: RateCurve,
    pub scale: f64,
    pub max_rate: f64,
}

impl RealizedIntensity {
    pub fn value(&self, t: f64) -> f64 {
        self.scale * self.rate.value(t)
    }

    /// Realized compensator `u_t = ∫_0^t u̇`.
    pub fn compensator(&self, t: f64) -> f64 {
        self.scale * self.rate.primitive(t)
    }

    pub fn envelope(&self) -> f64 {
        self.scale * self.max_rate
    }
}

impl IntensitySpec {
    /// Unit-rate Poisson intensity.
    pub fn unit() -> Self {
        IntensitySpec::Deterministic { rate: RateCurve::Constant { value: 1.0 }, max_rate: 1.0 }
    }

    pub fn rate(&self) -> &RateCurve {
        match self {
            IntensitySpec::Deterministic { rate, .. } | IntensitySpec::RandomScaled { rate, .. } => rate,
        }
    }

    pub fn max_rate(&self) -> f64 {
        match *self {
            IntensitySpec::Deterministic { max_rate, .. } | IntensitySpec::RandomScaled { max_rate, .. } => {
                max_rate
            }
        }
    }

    pub fn validate(&self, horizon: f64) -> Result<()> {
        self.rate().validate()?;
        let max_rate = self.max_rate();
        if !max_rate.is_finite() || max_rate < 0.0 {
            return invalid(format!("max_rate must be finite and nonnegative, got {max_rate}"));
        }
        let (lo, hi) = self.rate().range_on(horizon);
        if lo < 0.0 {
            return invalid(format!("base rate must be nonnegative on [0, T], minimum {lo}"));
        }
        if hi > max_rate * (1.0 + 1e-12) {
            return invalid(format!("base rate reaches {hi}, above max_rate {max_rate}"));
        }
        if let IntensitySpec::RandomScaled { multiplier, .. } = self {
            if !(multiplier.shape > 0.0 && multiplier.scale > 0.0)
                || !multiplier.shape.is_finite()
                || !multiplier.scale.is_finite()
            {
                return invalid("gamma multiplier needs positive finite shape and scale");
            }
        }
        Ok(())
    }

    /// `E[u̇_t]`.
    pub fn mean_rate(&self, t: f64) -> f64 {
        self.mean_multiplier() * self.rate().value(t)
    }

    /// `E[u_t]`.
    pub fn mean_compensator(&self, t: f64) -> f64 {
        self.mean_multiplier() * self.rate().primitive(t)
    }

    pub fn mean_multiplier(&self) -> f64 {
        match self {
            IntensitySpec::Deterministic { .. } => 1.0,
            IntensitySpec::RandomScaled { multiplier, .. } => multiplier.mean(),
        }
    }

    /// Draw the `F_0`-measurable part of the intensity.
    pub fn realize(&self, stream: &mut Stream) -> RealizedIntensity {
        match *self {
            IntensitySpec::Deterministic { rate, max_rate } => RealizedIntensity { rate, scale: 1.0, max_rate },
            IntensitySpec::RandomScaled { rate, multiplier, max_rate } => {
                use rand_distr::{Distribution, Gamma};
                let law = Gamma::new(multiplier.shape, multiplier.scale).expect("validated gamma law");
                let scale = law.sample(stream.rng_mut());
                RealizedIntensity { rate, scale, max_rate }
            }
        }
    }
}
