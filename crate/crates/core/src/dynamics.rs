//! Time-local master equation for two atoms in identical, independent
//! reservoirs, and its fixed-step RK4 integration.
//!
//! For each atom `j` the generator is
//!
//! ```text
//! L_j ρ = f [S⁻ρ, S⁺] + f* [S⁻, ρS⁺] + k* [S⁺ρ, S⁻] + k [S⁺, ρS⁻]
//! ```
//!
//! with the same `(k, f)` for both atoms.

use std::f64::consts::FRAC_1_SQRT_2;

use thiserror::Error;

use crate::qmat::{self, LinalgError, Mat4, QubitOperators, C64, ZERO};
use crate::reservoir::{self, CorrelationCoefficients, ReservoirError, ReservoirParams};

pub const HERMITICITY_TOL: f64 = 1e-10;
pub const TRACE_TOL: f64 = 1e-9;
/// Eigenvalues down to this value are treated as rounding noise.
pub const POSITIVITY_TOL: f64 = 1e-6;
/// Below this the generator has left the physical state space.
pub const POSITIVITY_ABORT: f64 = 1e-4;
/// Per-step trace drift that aborts an integration.
pub const TRACE_ABORT: f64 = 1e-7;
/// Off-X entries above this mean the input is not an X state.
pub const X_FORM_TOL: f64 = 1e-10;
pub const RICHARDSON_TOL: f64 = 1e-8;
pub const MAX_STORED_SAMPLES: usize = 100_000;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum StateError {
    #[error("density matrix has non-finite entries")]
    NonFinite,
    #[error("density matrix is not Hermitian (max |ρ - ρ^H| = {0:e})")]
    NotHermitian(f64),
    #[error("density matrix trace is {0}, expected 1")]
    TraceNotUnit(f64),
    #[error("density matrix has eigenvalue {0:e} below -{POSITIVITY_TOL:e}")]
    NotPositive(f64),
    #[error("state is not of X form (largest off-X entry {0:e})")]
    NotXForm(f64),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum IntegrationError {
    #[error("invalid integrator setting {name} = {value}: {reason}")]
    InvalidConfig {
        name: &'static str,
        value: f64,
        reason: &'static str,
    },
    #[error("invalid initial state: {0}")]
    InitialState(#[source] StateError),
    #[error(transparent)]
    Reservoir(#[from] ReservoirError),
    #[error("{kind} violated at t = {t}: {value:e}")]
    InvariantViolation { t: f64, kind: Invariant, value: f64 },
    #[error("step-size check failed: dt = {dt} and dt/2 disagree by {difference:e} at t = {t} (limit {RICHARDSON_TOL:e}); reduce dt")]
    StepSizeTooLarge { dt: f64, t: f64, difference: f64 },
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Invariant {
    Trace,
    Hermiticity,
    Positivity,
}

impl std::fmt::Display for Invariant {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Invariant::Trace => "trace preservation",
            Invariant::Hermiticity => "hermiticity",
            Invariant::Positivity => "positivity",
        })
    }
}

/// Numerical health of one state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Diagnostics {
    /// `Re tr ρ − 1`.
    pub trace_error: f64,
    pub hermiticity_error: f64,
    pub min_eigenvalue: f64,
    /// Largest modulus among the eight entries outside the X pattern.
    pub off_x: f64,
}

impl Diagnostics {
    pub fn of(m: &Mat4) -> Result<Self, LinalgError> {
        let eig = qmat::hermitian_eigenvalues(m)?;
        Ok(Self {
            trace_error: m.trace().re - 1.0,
            hermiticity_error: m.hermiticity_error(),
            min_eigenvalue: eig[0],
            off_x: off_x_max(m),
        })
    }
}

/// Whether `(i, j)` lies on the diagonal or anti-diagonal of a 4×4 matrix.
pub fn is_x_position(i: usize, j: usize) -> bool {
    i == j || i + j == 3
}

pub fn off_x_max(m: &Mat4) -> f64 {
    let mut worst: f64 = 0.0;
    for i in 0..4 {
        for j in 0..4 {
            if !is_x_position(i, j) {
                worst = worst.max(m[(i, j)].norm());
            }
        }
    }
    worst
}

/// Two-atom density matrix: Hermitian, unit trace, positive up to
/// [`POSITIVITY_TOL`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DensityMatrix(Mat4);

impl DensityMatrix {
    pub fn new(m: Mat4) -> Result<Self, StateError> {
        if !m.is_finite() {
            return Err(StateError::NonFinite);
        }
        let herm = m.hermiticity_error();
        if herm > HERMITICITY_TOL {
            return Err(StateError::NotHermitian(herm));
        }
        let tr = m.trace().re;
        if (tr - 1.0).abs() > TRACE_TOL {
            return Err(StateError::TraceNotUnit(tr));
        }
        let min = qmat::hermitian_eigenvalues(&m)?[0];
        if min < -POSITIVITY_TOL {
            return Err(StateError::NotPositive(min));
        }
        Ok(Self(m))
    }

    /// Wraps a matrix produced by the integrator, whose invariants are
    /// monitored separately.
    pub(crate) fn from_trusted(m: Mat4) -> Self {
        Self(m)
    }

    pub fn matrix(&self) -> &Mat4 {
        &self.0
    }

    /// Entry in 1-based `ρ_ij` notation.
    pub fn entry(&self, i: usize, j: usize) -> C64 {
        self.0[(i - 1, j - 1)]
    }

    pub fn populations(&self) -> [f64; 4] {
        std::array::from_fn(|i| self.0[(i, i)].re)
    }

    pub fn is_x_form(&self) -> bool {
        off_x_max(&self.0) <= X_FORM_TOL
    }

    pub fn diagnostics(&self) -> Result<Diagnostics, LinalgError> {
        Diagnostics::of(&self.0)
    }

    pub fn maximally_mixed() -> Self {
        Self(Mat4::identity().scale_re(0.25))
    }
}

/// Parameters of an X state: populations of `(|11⟩, |10⟩, |01⟩, |00⟩)` and
/// the two coherences `ρ₁₄`, `ρ₂₃`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct XState {
    pub populations: [f64; 4],
    pub coherence_14: C64,
    pub coherence_23: C64,
}

impl XState {
    pub fn matrix(&self) -> Mat4 {
        let mut m = Mat4::from_diagonal(self.populations);
        m[(0, 3)] = self.coherence_14;
        m[(3, 0)] = self.coherence_14.conj();
        m[(1, 2)] = self.coherence_23;
        m[(2, 1)] = self.coherence_23.conj();
        m
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum InitialState {
    /// `(|00⟩ + |11⟩)/√2`
    Psi,
    /// `(|01⟩ + |10⟩)/√2`
    Phi,
    CustomX(XState),
}

pub fn initial_density(s: &InitialState) -> Result<DensityMatrix, StateError> {
    let r = FRAC_1_SQRT_2;
    let amp = C64::new(r, 0.0);
    match s {
        InitialState::Psi => Ok(DensityMatrix(Mat4::outer(
            &[amp, ZERO, ZERO, amp],
            &[amp, ZERO, ZERO, amp],
        ))),
        InitialState::Phi => Ok(DensityMatrix(Mat4::outer(
            &[ZERO, amp, amp, ZERO],
            &[ZERO, amp, amp, ZERO],
        ))),
        InitialState::CustomX(x) => {
            if x.populations.iter().any(|p| !p.is_finite())
                || !(x.coherence_14.re.is_finite()
                    && x.coherence_14.im.is_finite()
                    && x.coherence_23.re.is_finite()
                    && x.coherence_23.im.is_finite())
            {
                return Err(StateError::NonFinite);
            }
            DensityMatrix::new(x.matrix())
        }
    }
}

/// Precomputed operator products for the generator.
#[derive(Debug, Clone, Copy)]
struct AtomChannel {
    raise: Mat4,
    lower: Mat4,
    raise_lower: Mat4,
    lower_raise: Mat4,
}

#[derive(Debug, Clone, Copy)]
pub struct Generator {
    channels: [AtomChannel; 2],
}

impl Generator {
    pub fn new() -> Self {
        let ops = QubitOperators::new();
        let channel = |raise: Mat4, lower: Mat4| AtomChannel {
            raise,
            lower,
            raise_lower: raise * lower,
            lower_raise: lower * raise,
        };
        Self {
            channels: [
                channel(ops.s_plus_a, ops.s_minus_a),
                channel(ops.s_plus_b, ops.s_minus_b),
            ],
        }
    }

    /// `dρ/dt` for given correlation coefficients.
    pub fn apply(&self, rho: &Mat4, c: &CorrelationCoefficients) -> Mat4 {
        let (f, k) = (c.f, c.k);
        let mut out = Mat4::zeros();
        for ch in &self.channels {
            let emit = ch.lower * *rho * ch.raise;
            let absorb = ch.raise * *rho * ch.lower;
            // f[S⁻ρ,S⁺] + f*[S⁻,ρS⁺]
            out += (emit - ch.raise_lower * *rho).scale(f);
            out += (emit - *rho * ch.raise_lower).scale(f.conj());
            // k*[S⁺ρ,S⁻] + k[S⁺,ρS⁻]
            out += (absorb - ch.lower_raise * *rho).scale(k.conj());
            out += (absorb - *rho * ch.lower_raise).scale(k);
        }
        out
    }
}

impl Default for Generator {
    fn default() -> Self {
        Self::new()
    }
}

/// Right-hand side of the master equation at time `t`.
pub fn liouvillian_apply(
    rho: &DensityMatrix,
    t: f64,
    p: &ReservoirParams,
) -> Result<Mat4, ReservoirError> {
    let c = reservoir::coefficients(t, p)?;
    Ok(Generator::new().apply(rho.matrix(), &c))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IntegratorConfig {
    pub dt: f64,
    pub t_max: f64,
    /// Store every n-th step; `None` picks the smallest stride keeping the
    /// trajectory at most [`MAX_STORED_SAMPLES`] samples.
    pub sample_stride: Option<usize>,
    pub richardson_check: bool,
}

impl IntegratorConfig {
    pub fn new(t_max: f64) -> Self {
        Self {
            dt: 1e-3,
            t_max,
            sample_stride: None,
            richardson_check: false,
        }
    }

    pub fn validate(&self) -> Result<(), IntegrationError> {
        let bad = |name, value, reason| {
            Err(IntegrationError::InvalidConfig {
                name,
                value,
                reason,
            })
        };
        if !(self.dt.is_finite() && self.dt > 0.0) {
            return bad("dt", self.dt, "must be positive");
        }
        if !self.t_max.is_finite() || self.t_max < self.dt * (1.0 - 1e-9) {
            return bad("t_max", self.t_max, "must be at least dt");
        }
        if self.sample_stride == Some(0) {
            return bad("sample_stride", 0.0, "must be a positive integer");
        }
        Ok(())
    }

    /// Number of RK4 steps covering the window.
    pub fn steps(&self) -> usize {
        let ratio = self.t_max / self.dt;
        let nearest = ratio.round();
        if (ratio - nearest).abs() <= 1e-9 * ratio.max(1.0) {
            nearest as usize
        } else {
            ratio.ceil() as usize
        }
    }

    pub fn stride(&self) -> usize {
        self.sample_stride
            .unwrap_or_else(|| self.steps().div_ceil(MAX_STORED_SAMPLES).max(1))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Sample {
    pub t: f64,
    pub rho: DensityMatrix,
    pub diagnostics: Diagnostics,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub samples: Vec<Sample>,
    pub dt: f64,
    pub stride: usize,
}

impl Trajectory {
    pub fn window_end(&self) -> f64 {
        self.samples.last().map_or(0.0, |s| s.t)
    }

    /// Samples whose smallest eigenvalue dips below [`POSITIVITY_TOL`]
    /// without reaching the abort threshold.
    pub fn positivity_warnings(&self) -> impl Iterator<Item = &Sample> {
        self.samples
            .iter()
            .filter(|s| s.diagnostics.min_eigenvalue < -POSITIVITY_TOL)
    }
}

fn rk4_step(gen: &Generator, rho: &Mat4, t: f64, dt: f64, p: &ReservoirParams) -> Mat4 {
    let c0 = reservoir::coefficients_unchecked(t, p);
    let c_mid = reservoir::coefficients_unchecked(t + 0.5 * dt, p);
    let c1 = reservoir::coefficients_unchecked(t + dt, p);
    let k1 = gen.apply(rho, &c0);
    let k2 = gen.apply(&(*rho + k1.scale_re(0.5 * dt)), &c_mid);
    let k3 = gen.apply(&(*rho + k2.scale_re(0.5 * dt)), &c_mid);
    let k4 = gen.apply(&(*rho + k3.scale_re(dt)), &c1);
    *rho + (k1 + k2.scale_re(2.0) + k3.scale_re(2.0) + k4).scale_re(dt / 6.0)
}

fn propagate(gen: &Generator, rho0: &Mat4, dt: f64, steps: usize, p: &ReservoirParams) -> Mat4 {
    let mut rho = *rho0;
    for i in 0..steps {
        rho = rk4_step(gen, &rho, i as f64 * dt, dt, p);
    }
    rho
}

fn check_sample(t: f64, d: &Diagnostics) -> Result<(), IntegrationError> {
    if d.trace_error.abs() > TRACE_TOL {
        return Err(IntegrationError::InvariantViolation {
            t,
            kind: Invariant::Trace,
            value: d.trace_error,
        });
    }
    if d.hermiticity_error > HERMITICITY_TOL {
        return Err(IntegrationError::InvariantViolation {
            t,
            kind: Invariant::Hermiticity,
            value: d.hermiticity_error,
        });
    }
    if d.min_eigenvalue < -POSITIVITY_ABORT {
        return Err(IntegrationError::InvariantViolation {
            t,
            kind: Invariant::Positivity,
            value: d.min_eigenvalue,
        });
    }
    Ok(())
}

/// Integrate `ρ(t)` from the initial state over `[0, n·dt]` with classical
/// RK4, the generator evaluated at the exact substep times.
///
/// Sample times are `i·dt` (never accumulated). Samples are stored every
/// `stride` steps plus the final step. The trace is checked every step; the
/// full diagnostics (including the smallest eigenvalue) at stored samples.
pub fn integrate(
    s: &InitialState,
    p: &ReservoirParams,
    cfg: &IntegratorConfig,
) -> Result<Trajectory, IntegrationError> {
    cfg.validate()?;
    p.validate()?;
    let rho0 = initial_density(s).map_err(IntegrationError::InitialState)?;
    let gen = Generator::new();
    let steps = cfg.steps();
    let stride = cfg.stride();
    let dt = cfg.dt;

    if cfg.richardson_check {
        let probe = steps.div_ceil(10).max(1);
        let coarse = propagate(&gen, rho0.matrix(), dt, probe, p);
        let fine = propagate(&gen, rho0.matrix(), 0.5 * dt, 2 * probe, p);
        let difference = (coarse - fine).max_abs();
        if difference > RICHARDSON_TOL {
            return Err(IntegrationError::StepSizeTooLarge {
                dt,
                t: probe as f64 * dt,
                difference,
            });
        }
    }

    let mut samples = Vec::with_capacity(steps / stride + 2);
    let d0 = rho0.diagnostics()?;
    samples.push(Sample {
        t: 0.0,
        rho: rho0,
        diagnostics: d0,
    });

    let mut rho = *rho0.matrix();
    for i in 0..steps {
        let t = i as f64 * dt;
        rho = rk4_step(&gen, &rho, t, dt, p);
        let t_next = (i + 1) as f64 * dt;
        let drift = rho.trace().re - 1.0;
        if drift.abs() > TRACE_ABORT || !rho.is_finite() {
            return Err(IntegrationError::InvariantViolation {
                t: t_next,
                kind: Invariant::Trace,
                value: drift,
            });
        }
        if (i + 1) % stride == 0 || i + 1 == steps {
            let d = Diagnostics::of(&rho)?;
            check_sample(t_next, &d)?;
            samples.push(Sample {
                t: t_next,
                rho: DensityMatrix::from_trusted(rho),
                diagnostics: d,
            });
        }
    }
    Ok(Trajectory {
        samples,
        dt,
        stride,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params(lambda: f64, delta: f64, theta: f64) -> ReservoirParams {
        ReservoirParams::new(lambda, delta, 10.0, theta).unwrap()
    }

    fn basis_projector(index: usize) -> Mat4 {
        let mut m = Mat4::zeros();
        m[(index, index)] = C64::new(1.0, 0.0);
        m
    }

    #[test]
    fn bell_initial_states() {
        let psi = initial_density(&InitialState::Psi).unwrap();
        for (i, j) in [(1, 1), (4, 4), (1, 4), (4, 1)] {
            assert!((psi.entry(i, j) - C64::new(0.5, 0.0)).norm() < 1e-15);
        }
        assert!((psi.matrix().frobenius_norm() - 1.0).abs() < 1e-15);
        let phi = initial_density(&InitialState::Phi).unwrap();
        for (i, j) in [(2, 2), (3, 3), (2, 3), (3, 2)] {
            assert!((phi.entry(i, j) - C64::new(0.5, 0.0)).norm() < 1e-15);
        }
        assert_eq!(phi.entry(1, 1), ZERO);
    }

    #[test]
    fn custom_x_validation() {
        let mixed = XState {
            populations: [0.25; 4],
            coherence_14: ZERO,
            coherence_23: ZERO,
        };
        let rho = initial_density(&InitialState::CustomX(mixed)).unwrap();
        assert_eq!(rho, DensityMatrix::maximally_mixed());

        let unnormalized = XState {
            populations: [0.5; 4],
            ..mixed
        };
        assert!(matches!(
            initial_density(&InitialState::CustomX(unnormalized)),
            Err(StateError::TraceNotUnit(_))
        ));
        let not_positive = XState {
            coherence_14: C64::new(0.5, 0.0),
            ..mixed
        };
        assert!(matches!(
            initial_density(&InitialState::CustomX(not_positive)),
            Err(StateError::NotPositive(_))
        ));
    }

    #[test]
    fn ground_state_is_annihilated_at_zero_temperature() {
        let ground = DensityMatrix::new(basis_projector(3)).unwrap();
        for t in [0.0, 0.3, 7.0] {
            let d = liouvillian_apply(&ground, t, &params(0.1, 1.0, 0.0)).unwrap();
            assert_eq!(d, Mat4::zeros());
        }
    }

    #[test]
    fn single_excitation_population_rate() {
        // ρ = |10⟩⟨10|: hand expansion of the four commutators gives
        // dρ₂₂/dt = −2 Re f − 2 Re k (absorption by atom B removes |10⟩ too)
        let rho = DensityMatrix::new(basis_projector(1)).unwrap();
        for theta in [0.0, 1.0] {
            let p = params(0.1, 1.0, theta);
            let t = 2.5;
            let c = reservoir::coefficients(t, &p).unwrap();
            let d = liouvillian_apply(&rho, t, &p).unwrap();
            let want = -2.0 * c.f.re - 2.0 * c.k.re;
            assert!((d[(1, 1)].re - want).abs() < 1e-15);
            if theta == 0.0 {
                assert!((d[(1, 1)].re + 2.0 * c.f.re).abs() < 1e-15);
            }
            // gains: |00⟩ from emission by A, |11⟩ from absorption by B
            assert!((d[(3, 3)].re - 2.0 * c.f.re).abs() < 1e-15);
            assert!((d[(0, 0)].re - 2.0 * c.k.re).abs() < 1e-15);
        }
    }

    #[test]
    fn generator_is_traceless_and_hermitian() {
        let x = XState {
            populations: [0.1, 0.2, 0.3, 0.4],
            coherence_14: C64::new(0.1, 0.05),
            coherence_23: C64::new(-0.07, 0.2),
        };
        let rho = initial_density(&InitialState::CustomX(x)).unwrap();
        let d = liouvillian_apply(&rho, 1.3, &params(0.1, 1.0, 1.0)).unwrap();
        assert!(d.trace().norm() < 1e-12);
        assert!(d.hermiticity_error() < 1e-12);
    }

    #[test]
    fn step_count_and_stride() {
        let cfg = IntegratorConfig::new(5.0);
        assert_eq!(cfg.steps(), 5000);
        assert_eq!(cfg.stride(), 1);
        let long = IntegratorConfig::new(200.0);
        assert_eq!(long.stride(), 2);
        assert!(long.steps() / long.stride() <= MAX_STORED_SAMPLES);
        let ragged = IntegratorConfig {
            dt: 0.3,
            ..IntegratorConfig::new(1.0)
        };
        assert_eq!(ragged.steps(), 4);
    }

    #[test]
    fn single_step_window() {
        let p = params(5.0, 0.0, 0.0);
        let cfg = IntegratorConfig {
            dt: 1e-3,
            t_max: 1e-3,
            sample_stride: Some(1),
            richardson_check: false,
        };
        let traj = integrate(&InitialState::Psi, &p, &cfg).unwrap();
        assert_eq!(traj.samples.len(), 2);
        let rho0 = initial_density(&InitialState::Psi).unwrap();
        let want = rk4_step(&Generator::new(), rho0.matrix(), 0.0, 1e-3, &p);
        assert_eq!(traj.samples[0].rho, rho0);
        assert_eq!(*traj.samples[1].rho.matrix(), want);
        assert_eq!(traj.samples[1].t, 1e-3);
    }

    #[test]
    fn rejects_bad_config() {
        let p = params(5.0, 0.0, 0.0);
        let zero_dt = IntegratorConfig {
            dt: 0.0,
            ..IntegratorConfig::new(1.0)
        };
        assert!(matches!(
            integrate(&InitialState::Psi, &p, &zero_dt),
            Err(IntegrationError::InvalidConfig { name: "dt", .. })
        ));
        let short = IntegratorConfig {
            t_max: 1e-4,
            ..IntegratorConfig::new(1.0)
        };
        assert!(integrate(&InitialState::Psi, &p, &short).is_err());
        let no_stride = IntegratorConfig {
            sample_stride: Some(0),
            ..IntegratorConfig::new(1.0)
        };
        assert!(integrate(&InitialState::Psi, &p, &no_stride).is_err());
    }

    #[test]
    fn richardson_flags_coarse_steps() {
        let p = params(5.0, 0.0, 1.0);
        let coarse = IntegratorConfig {
            dt: 0.1,
            t_max: 2.0,
            sample_stride: None,
            richardson_check: true,
        };
        assert!(matches!(
            integrate(&InitialState::Psi, &p, &coarse),
            Err(IntegrationError::StepSizeTooLarge { .. })
        ));
        let fine = IntegratorConfig { dt: 1e-3, ..coarse };
        assert!(integrate(&InitialState::Psi, &p, &fine).is_ok());
    }

    #[test]
    fn ground_state_fixed_point() {
        let ground = XState {
            populations: [0.0, 0.0, 0.0, 1.0],
            coherence_14: ZERO,
            coherence_23: ZERO,
        };
        let traj = integrate(
            &InitialState::CustomX(ground),
            &params(0.1, 1.0, 0.0),
            &IntegratorConfig::new(3.0),
        )
        .unwrap();
        let last = traj.samples.last().unwrap();
        assert!(last.rho.matrix().approx_eq(&basis_projector(3), 3e-12));
    }
}
