//! Thermal Lorentzian reservoir: the correlation coefficients `k(t)` and
//! `f(t)` that drive the time-local generator, in closed form, plus a direct
//! quadrature over the spectral density used to validate them.
//!
//! All frequencies and rates are measured in units of the decay rate γ₀ and
//! times in units of 1/γ₀. Temperature enters only through the dimensionless
//! ratio `theta = k_B T / (ħ ω₀)`.

use std::f64::consts::PI;

use thiserror::Error;

use crate::qmat::{C64, I, ONE, ZERO};
use crate::quadrature::{self, Estimate, QuadratureError, QuadratureOptions};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ReservoirError {
    #[error("invalid reservoir parameter {name} = {value}: {reason}")]
    InvalidParameter {
        name: &'static str,
        value: f64,
        reason: &'static str,
    },
    #[error("time must be non-negative and finite, got {0}")]
    InvalidTime(f64),
    #[error("full-line frequency integration is only defined at zero temperature")]
    FullLineAtFiniteTemperature,
    #[error(transparent)]
    Quadrature(#[from] QuadratureError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Regime {
    /// λ > 2γ₀: essentially exponential decay.
    Markovian,
    /// λ < 2γ₀: reservoir memory matters.
    NonMarkovian,
    /// λ = 2γ₀ exactly.
    Boundary,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReservoirParams {
    /// Rate unit; 1 unless deliberately rescaled.
    pub gamma0: f64,
    /// Spectral width of the Lorentzian.
    pub lambda: f64,
    /// Detuning between the atomic transition and the reservoir centre.
    pub delta: f64,
    /// Atomic transition frequency.
    pub omega0: f64,
    /// `k_B T / (ħ ω₀)`.
    pub theta: f64,
}

impl ReservoirParams {
    pub fn new(lambda: f64, delta: f64, omega0: f64, theta: f64) -> Result<Self, ReservoirError> {
        let p = Self {
            gamma0: 1.0,
            lambda,
            delta,
            omega0,
            theta,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<(), ReservoirError> {
        let bad = |name, value, reason| {
            Err(ReservoirError::InvalidParameter {
                name,
                value,
                reason,
            })
        };
        if !(self.gamma0.is_finite() && self.gamma0 > 0.0) {
            return bad("gamma0", self.gamma0, "must be positive");
        }
        if !(self.lambda.is_finite() && self.lambda > 0.0) {
            return bad("lambda", self.lambda, "must be positive");
        }
        if !self.delta.is_finite() {
            return bad("delta", self.delta, "must be finite");
        }
        if !(self.omega0.is_finite() && self.omega0 > 0.0) {
            return bad("omega0", self.omega0, "must be positive");
        }
        if !(self.theta.is_finite() && self.theta >= 0.0) {
            return bad("theta", self.theta, "must be non-negative");
        }
        Ok(())
    }

    pub fn regime(&self) -> Regime {
        let edge = 2.0 * self.gamma0;
        if self.lambda > edge {
            Regime::Markovian
        } else if self.lambda < edge {
            Regime::NonMarkovian
        } else {
            Regime::Boundary
        }
    }

    /// Bose factor evaluated at the complex pole `ω₀ − δ − iλ`.
    ///
    /// Zero at `theta = 0`. For positive real part of the exponent the form
    /// `e^{-z} / (1 - e^{-z})` is used so that low temperatures underflow to
    /// zero instead of overflowing.
    pub fn pole_occupation(&self) -> C64 {
        if self.theta == 0.0 {
            return ZERO;
        }
        let z = C64::new(self.omega0 - self.delta, -self.lambda) / (self.omega0 * self.theta);
        if z.re > 0.0 {
            let e = (-z).exp();
            e / (ONE - e)
        } else {
            ONE / (z.exp() - ONE)
        }
    }

    /// Thermal occupation `1 / (e^{ω / (ω₀ θ)} − 1)` of a real reservoir mode.
    pub fn mode_occupation(&self, omega: f64) -> f64 {
        if self.theta == 0.0 {
            return 0.0;
        }
        1.0 / (omega / (self.omega0 * self.theta)).exp_m1()
    }

    /// Lorentzian spectral density `J(ω)`.
    pub fn spectral_density(&self, omega: f64) -> f64 {
        let detune = self.omega0 - omega - self.delta;
        self.gamma0 * self.lambda * self.lambda
            / (2.0 * PI * (detune * detune + self.lambda * self.lambda))
    }
}

/// `k(t)` and `f(t)` at one instant.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CorrelationCoefficients {
    pub k: C64,
    pub f: C64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Which {
    K,
    F,
}

fn check_time(t: f64) -> Result<(), ReservoirError> {
    if t.is_finite() && t >= 0.0 {
        Ok(())
    } else {
        Err(ReservoirError::InvalidTime(t))
    }
}

/// Temperature-independent prefactor `γ₀λ(1 − e^{(iδ−λ)t}) / (2(λ − iδ))`.
fn memory_factor(t: f64, p: &ReservoirParams) -> C64 {
    if t == 0.0 {
        return ZERO;
    }
    let growth = C64::new(-p.lambda, p.delta) * t;
    // 1 - e^{x} computed without cancellation for small |x|
    let one_minus = -(growth.exp() - ONE);
    let one_minus = if growth.norm() < 1e-5 {
        -growth * (ONE + growth * 0.5 + growth * growth / 6.0)
    } else {
        one_minus
    };
    one_minus * (p.gamma0 * p.lambda) / (C64::new(p.lambda, -p.delta) * 2.0)
}

/// Both coefficients from one evaluation of the shared prefactor.
pub fn coefficients(
    t: f64,
    p: &ReservoirParams,
) -> Result<CorrelationCoefficients, ReservoirError> {
    check_time(t)?;
    p.validate()?;
    Ok(coefficients_unchecked(t, p))
}

pub(crate) fn coefficients_unchecked(t: f64, p: &ReservoirParams) -> CorrelationCoefficients {
    let base = memory_factor(t, p);
    let n = p.pole_occupation();
    CorrelationCoefficients {
        k: base * n,
        f: if p.theta == 0.0 {
            base
        } else {
            base * (n + ONE)
        },
    }
}

pub fn correlation_k(t: f64, p: &ReservoirParams) -> Result<C64, ReservoirError> {
    coefficients(t, p).map(|c| c.k)
}

pub fn correlation_f(t: f64, p: &ReservoirParams) -> Result<C64, ReservoirError> {
    coefficients(t, p).map(|c| c.f)
}

/// Frequency range for the spectral-integral oracle.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum FrequencyDomain {
    /// `ω ≥ cutoff`, i.e. physical mode frequencies. `None` picks 0 at zero
    /// temperature and `1e-6·ω₀` otherwise: with a Lorentzian `J(0) ≠ 0`, so
    /// the thermal integrand grows like `1/ω` and the integral diverges
    /// logarithmically without an infrared cutoff.
    Physical { infrared_cutoff: Option<f64> },
    /// The whole real line. This is the domain the closed form assumes when
    /// the Lorentzian pole is picked up by contour integration; only
    /// meaningful at zero temperature.
    FullLine,
}

impl Default for FrequencyDomain {
    fn default() -> Self {
        FrequencyDomain::Physical {
            infrared_cutoff: None,
        }
    }
}

pub const INFRARED_CUTOFF_FRACTION: f64 = 1e-6;
/// Half-width around ω₀ in which the kernel uses its Taylor series.
pub const KERNEL_SERIES_RADIUS: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct SpectralQuadrature {
    pub domain: FrequencyDomain,
    pub options: QuadratureOptions,
}

/// Quadrature estimate with the truncated-tail bound folded into `error`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectralEstimate {
    pub value: C64,
    pub error: f64,
    pub tail_bound: f64,
    pub lower: f64,
    pub upper: f64,
}

/// `i(1 − e^{ixt}) / x`, with its series near the removable point `x = 0`.
fn kernel(x: f64, t: f64) -> C64 {
    if x.abs() < KERNEL_SERIES_RADIUS {
        C64::new(t - x * x * t * t * t / 6.0, x * t * t / 2.0)
    } else {
        I * (ONE - C64::new(0.0, x * t).exp()) / x
    }
}

/// Numerically integrate `∫ dω J(ω) n(ω) i(1 − e^{i(ω₀−ω)t}) / (ω₀ − ω)` where
/// `n` is the mode occupation (`k`) or occupation plus one (`f`).
///
/// The integration window is truncated at `ω₀ + |δ| + 50λ + 50/t` (and the
/// mirror image below for the full line); the neglected tail is bounded using
/// `|J| ≤ γ₀λ²/(2π(u−|δ|)²)` and `|kernel| ≤ 2/u` with `u = |ω − ω₀|`.
pub fn correlation_quadrature(
    t: f64,
    p: &ReservoirParams,
    which: Which,
    cfg: &SpectralQuadrature,
) -> Result<SpectralEstimate, ReservoirError> {
    check_time(t)?;
    p.validate()?;

    let reach = p.delta.abs() + 50.0 * p.lambda + if t > 0.0 { 50.0 / t } else { 0.0 };
    let upper = p.omega0 + reach;
    let lower = match cfg.domain {
        FrequencyDomain::FullLine => {
            if p.theta > 0.0 {
                return Err(ReservoirError::FullLineAtFiniteTemperature);
            }
            p.omega0 - reach
        }
        FrequencyDomain::Physical { infrared_cutoff } => {
            infrared_cutoff.unwrap_or(if p.theta == 0.0 {
                0.0
            } else {
                INFRARED_CUTOFF_FRACTION * p.omega0
            })
        }
    };
    if t == 0.0 {
        return Ok(SpectralEstimate {
            value: ZERO,
            error: 0.0,
            tail_bound: 0.0,
            lower,
            upper,
        });
    }

    let occupation = |omega: f64| -> f64 {
        let n = p.mode_occupation(omega);
        match which {
            Which::K => n,
            Which::F => n + 1.0,
        }
    };
    let integrand = |omega: f64| -> C64 {
        kernel(p.omega0 - omega, t) * (p.spectral_density(omega) * occupation(omega))
    };

    let peak = p.omega0 - p.delta;
    let breakpoints = [peak - p.lambda, peak, peak + p.lambda, p.omega0];
    let Estimate { value, error, .. } =
        quadrature::integrate(integrand, lower, upper, &breakpoints, &cfg.options)?;

    let gap = 50.0 * p.lambda + 50.0 / t;
    let tail_one_side = p.gamma0 * p.lambda * p.lambda / (2.0 * PI * gap * gap);
    let mut tail_bound = tail_one_side * occupation(upper).abs();
    if matches!(cfg.domain, FrequencyDomain::FullLine) {
        tail_bound += tail_one_side;
    }
    Ok(SpectralEstimate {
        value,
        error: error + tail_bound,
        tail_bound,
        lower,
        upper,
    })
}
