//! Quantum discord, concurrence and entanglement of formation of two-qubit
//! states. Entropies are in bits.
//!
//! Discord is available by two routes: the closed expression for X states
//! ([`discord_x`]) and a direct optimization over projective measurements on
//! atom B ([`discord_oracle`]) that works for any state and is used to audit
//! the former.

use std::f64::consts::PI;

use thiserror::Error;

use crate::dynamics::{off_x_max, DensityMatrix, X_FORM_TOL};
use crate::qmat::{self, tensor2, CMatrix, LinalgError, Mat2, Mat4, C64, ZERO};

/// Slack for arguments of `h(x)` and `eof(c)` outside their domain.
pub const DOMAIN_SLACK: f64 = 1e-12;
/// Eigenvalues this far below zero are clamped inside entropies.
pub const CLAMP_TOL: f64 = 1e-4;
/// Outcomes less likely than this are dropped from the conditional entropy.
pub const MIN_OUTCOME_PROBABILITY: f64 = 1e-12;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CorrelationError {
    #[error("argument {0} outside [0, 1]")]
    OutOfDomain(f64),
    #[error("state is not of X form (largest off-X entry {0:e})")]
    NotXForm(f64),
    #[error("matrix has eigenvalue {0:e}, too negative to be a state")]
    NegativeEigenvalue(f64),
    #[error("matrix trace is {0}, expected 1")]
    TraceNotUnit(f64),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

fn xlog2x(x: f64) -> f64 {
    if x <= 0.0 {
        0.0
    } else {
        x * x.log2()
    }
}

fn h_clamped(x: f64) -> f64 {
    let x = x.clamp(0.0, 1.0);
    -xlog2x(x) - xlog2x(1.0 - x)
}

/// `h(x) = −x log₂x − (1−x) log₂(1−x)` with `0·log 0 = 0`.
pub fn binary_entropy(x: f64) -> Result<f64, CorrelationError> {
    if !x.is_finite() || !(-DOMAIN_SLACK..=1.0 + DOMAIN_SLACK).contains(&x) {
        return Err(CorrelationError::OutOfDomain(x));
    }
    Ok(h_clamped(x))
}

fn entropy_of_spectrum(values: &[f64]) -> Result<f64, CorrelationError> {
    let mut s = 0.0;
    for &v in values {
        if v < -CLAMP_TOL {
            return Err(CorrelationError::NegativeEigenvalue(v));
        }
        s -= xlog2x(v.max(0.0));
    }
    Ok(s)
}

/// `S(ρ) = −Tr ρ log₂ρ` over clamped eigenvalues. Works for the two-atom
/// state and for single-atom reduced states.
pub fn von_neumann_entropy<const N: usize>(rho: &CMatrix<N>) -> Result<f64, CorrelationError> {
    let tr = rho.trace().re;
    if (tr - 1.0).abs() > 1e-9 {
        return Err(CorrelationError::TraceNotUnit(tr));
    }
    entropy_of_spectrum(&qmat::hermitian_eigenvalues(rho)?)
}

/// Reduced state of atom A (first tensor slot).
pub fn partial_trace_b(rho: &Mat4) -> Mat2 {
    let mut out = Mat2::zeros();
    for a in 0..2 {
        for a2 in 0..2 {
            out[(a, a2)] = rho[(2 * a, 2 * a2)] + rho[(2 * a + 1, 2 * a2 + 1)];
        }
    }
    out
}

/// Reduced state of atom B (second tensor slot).
pub fn partial_trace_a(rho: &Mat4) -> Mat2 {
    let mut out = Mat2::zeros();
    for b in 0..2 {
        for b2 in 0..2 {
            out[(b, b2)] = rho[(b, b2)] + rho[(2 + b, 2 + b2)];
        }
    }
    out
}

/// Discord of an X state by the closed expression, with both candidates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct XDiscord {
    pub discord: f64,
    pub q1: f64,
    pub q2: f64,
}

fn require_x(rho: &DensityMatrix) -> Result<(), CorrelationError> {
    let off = off_x_max(rho.matrix());
    if off > X_FORM_TOL {
        return Err(CorrelationError::NotXForm(off));
    }
    Ok(())
}

/// `D = min{Q₁, Q₂}`, clamped to `[0, 1]`, where
/// `Q_j = h(ρ₁₁+ρ₃₃) + Σλ_k log₂λ_k + D_j`,
/// `D₁ = h(τ)` with `τ = ½{1 + √([1−2(ρ₃₃+ρ₄₄)]² + 4(|ρ₁₄|+|ρ₂₃|)²)}`, and
/// `D₂ = −Σρ_kk log₂ρ_kk − h(ρ₁₁+ρ₃₃)`.
pub fn discord_x(rho: &DensityMatrix) -> Result<XDiscord, CorrelationError> {
    require_x(rho)?;
    let [p11, _p22, p33, p44] = rho.populations();
    let c14 = rho.entry(1, 4).norm();
    let c23 = rho.entry(2, 3).norm();

    let spectrum = qmat::hermitian_eigenvalues(rho.matrix())?;
    let s_ab = entropy_of_spectrum(&spectrum)?;
    let h_b = h_clamped(p11 + p33);

    let z = 1.0 - 2.0 * (p33 + p44);
    let tau = 0.5 * (1.0 + (z * z + 4.0 * (c14 + c23).powi(2)).sqrt());
    let d1 = h_clamped(tau);
    let d2 = -rho
        .populations()
        .iter()
        .map(|&p| xlog2x(p.max(0.0)))
        .sum::<f64>()
        - h_b;

    let q1 = h_b - s_ab + d1;
    let q2 = h_b - s_ab + d2;
    Ok(XDiscord {
        discord: q1.min(q2).clamp(0.0, 1.0),
        q1,
        q2,
    })
}

/// Rank-1 projective measurement on atom B along the Bloch direction
/// `(theta, phi)`; the second outcome projects on the antipodal direction.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MeasurementBasis {
    pub theta: f64,
    pub phi: f64,
}

impl MeasurementBasis {
    /// The two orthonormal vectors in the `(|1⟩, |0⟩)` order.
    pub fn vectors(&self) -> [[C64; 2]; 2] {
        let (s, c) = (0.5 * self.theta).sin_cos();
        let phase = C64::from_polar(1.0, self.phi);
        [
            [C64::new(c, 0.0), phase * s],
            [-phase.conj() * s, C64::new(c, 0.0)],
        ]
    }

    pub fn projectors(&self) -> [Mat2; 2] {
        self.vectors().map(|v| Mat2::outer(&v, &v))
    }
}

/// Grid resolution and refinement depth of the measurement search.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct OracleGrid {
    pub n_theta: usize,
    pub n_phi: usize,
    pub refine_iterations: usize,
}

impl Default for OracleGrid {
    fn default() -> Self {
        Self {
            n_theta: 64,
            n_phi: 128,
            refine_iterations: 40,
        }
    }
}

/// Full discord decomposition from the measurement optimization.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OracleDiscord {
    pub discord: f64,
    pub mutual_information: f64,
    pub classical_correlation: f64,
    /// Minimized `Σ p_k S(ρ_A^k)`.
    pub conditional_entropy: f64,
    pub basis: MeasurementBasis,
}

fn entropy_2x2(m: &Mat2) -> f64 {
    let a = m[(0, 0)].re;
    let d = m[(1, 1)].re;
    let b = m[(0, 1)];
    let tr = a + d;
    let disc = ((a - d) * (a - d) + 4.0 * b.norm_sqr()).sqrt();
    -xlog2x(0.5 * (tr + disc)) - xlog2x((0.5 * (tr - disc)).max(0.0))
}

/// `Σ_k p_k S(ρ_A^k)` after measuring B in `basis`.
pub fn conditional_entropy(rho: &Mat4, basis: &MeasurementBasis) -> f64 {
    let mut total = 0.0;
    for u in basis.vectors() {
        // (I ⊗ ⟨u|) ρ (I ⊗ |u⟩)
        let mut sigma = Mat2::zeros();
        for a in 0..2 {
            for a2 in 0..2 {
                let mut acc = ZERO;
                for b in 0..2 {
                    for b2 in 0..2 {
                        acc += u[b].conj() * rho[(2 * a + b, 2 * a2 + b2)] * u[b2];
                    }
                }
                sigma[(a, a2)] = acc;
            }
        }
        let p = sigma.trace().re;
        if p < MIN_OUTCOME_PROBABILITY {
            continue;
        }
        total += p * entropy_2x2(&sigma.scale_re(1.0 / p));
    }
    total
}

fn golden_min<F: Fn(f64) -> f64>(f: F, mut lo: f64, mut hi: f64, iterations: usize) -> (f64, f64) {
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut x1 = hi - inv_phi * (hi - lo);
    let mut x2 = lo + inv_phi * (hi - lo);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    for _ in 0..iterations {
        if f1 <= f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - inv_phi * (hi - lo);
            f1 = f(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + inv_phi * (hi - lo);
            f2 = f(x2);
        }
    }
    if f1 <= f2 {
        (x1, f1)
    } else {
        (x2, f2)
    }
}

/// Discord as `I − C` with `C` maximized over projective measurements on B.
///
/// A coarse `n_theta × n_phi` grid over the Bloch sphere (θ ∈ [0, π]
/// inclusive, φ ∈ [0, 2π)) picks a starting basis; ties go to the
/// lexicographically smallest `(θ, φ)`. Golden-section searches on θ then φ
/// within one grid cell refine it, twice over.
pub fn discord_oracle(
    rho: &DensityMatrix,
    grid: &OracleGrid,
) -> Result<OracleDiscord, CorrelationError> {
    let m = rho.matrix();
    let s_a = von_neumann_entropy(&partial_trace_b(m))?;
    let s_b = von_neumann_entropy(&partial_trace_a(m))?;
    let s_ab = von_neumann_entropy(m)?;
    let mutual_information = s_a + s_b - s_ab;

    let n_theta = grid.n_theta.max(2);
    let n_phi = grid.n_phi.max(1);
    let d_theta = PI / (n_theta - 1) as f64;
    let d_phi = 2.0 * PI / n_phi as f64;

    let mut best = MeasurementBasis {
        theta: 0.0,
        phi: 0.0,
    };
    let mut best_value = f64::INFINITY;
    for i in 0..n_theta {
        let theta = i as f64 * d_theta;
        for j in 0..n_phi {
            let basis = MeasurementBasis {
                theta,
                phi: j as f64 * d_phi,
            };
            let v = conditional_entropy(m, &basis);
            if v < best_value {
                best_value = v;
                best = basis;
            }
        }
    }

    for _ in 0..2 {
        let phi = best.phi;
        let (theta, v) = golden_min(
            |th| conditional_entropy(m, &MeasurementBasis { theta: th, phi }),
            (best.theta - d_theta).max(0.0),
            (best.theta + d_theta).min(PI),
            grid.refine_iterations,
        );
        if v < best_value {
            best_value = v;
            best.theta = theta;
        }
        let theta = best.theta;
        let (phi, v) = golden_min(
            |ph| conditional_entropy(m, &MeasurementBasis { theta, phi: ph }),
            best.phi - d_phi,
            best.phi + d_phi,
            grid.refine_iterations,
        );
        if v < best_value {
            best_value = v;
            best.phi = phi.rem_euclid(2.0 * PI);
        }
    }

    let classical_correlation = s_a - best_value;
    Ok(OracleDiscord {
        discord: mutual_information - classical_correlation,
        mutual_information,
        classical_correlation,
        conditional_entropy: best_value,
        basis: best,
    })
}

/// The two Wootters branches `|ρ₁₄| − √(ρ₂₂ρ₃₃)` and `|ρ₂₃| − √(ρ₁₁ρ₄₄)` of an
/// X state, unclamped. Entanglement is present iff one of them is positive.
pub fn wootters_branches_x(rho: &DensityMatrix) -> Result<(f64, f64), CorrelationError> {
    require_x(rho)?;
    let [p11, p22, p33, p44] = rho.populations().map(|p| p.max(0.0));
    Ok((
        rho.entry(1, 4).norm() - (p22 * p33).sqrt(),
        rho.entry(2, 3).norm() - (p11 * p44).sqrt(),
    ))
}

/// `C = 2 max(0, |ρ₁₄| − √(ρ₂₂ρ₃₃), |ρ₂₃| − √(ρ₁₁ρ₄₄))`.
pub fn concurrence_x(rho: &DensityMatrix) -> Result<f64, CorrelationError> {
    let (b1, b2) = wootters_branches_x(rho)?;
    Ok((2.0 * b1.max(b2).max(0.0)).min(1.0))
}

/// Eigenvalues of `ρ (σ_y⊗σ_y) ρ* (σ_y⊗σ_y)`, sorted by descending real
/// part. Real and non-negative up to rounding for any state.
pub fn wootters_spectrum(rho: &DensityMatrix) -> Result<[C64; 4], CorrelationError> {
    let m = rho.matrix();
    let yy = tensor2(&qmat::sigma_y(), &qmat::sigma_y());
    let mut eig = qmat::general_eigenvalues(&(*m * yy * m.conj() * yy))?;
    eig.sort_by(|a, b| b.re.total_cmp(&a.re));
    Ok(eig)
}

/// Wootters concurrence `max(0, s₁ − s₂ − s₃ − s₄)`, where `s_i²` are the
/// eigenvalues of `ρ (σ_y⊗σ_y) ρ* (σ_y⊗σ_y)` in descending order.
///
/// The `s_i` are taken directly as the singular values of `Wᵀ(σ_y⊗σ_y)W`
/// with `ρ = WW†`, read off the Hermitian dilation `[[0, τ], [τ†, 0]]`.
/// Going through the eigenvalues of `ρρ̃` and then square roots would turn
/// rounding-level noise on its zero eigenvalues (rank-deficient states) into
/// errors of order `√ε ≈ 1e-8`.
pub fn concurrence_general(rho: &DensityMatrix) -> Result<f64, CorrelationError> {
    let pairs = qmat::hermitian_eigen(rho.matrix())?;
    let mut w = Mat4::zeros();
    for (k, pair) in pairs.iter().enumerate() {
        if pair.value < -CLAMP_TOL {
            return Err(CorrelationError::NegativeEigenvalue(pair.value));
        }
        let s = pair.value.max(0.0).sqrt();
        for i in 0..4 {
            w[(i, k)] = pair.vector[i] * s;
        }
    }
    let yy = tensor2(&qmat::sigma_y(), &qmat::sigma_y());
    let tau = w.adjoint().conj() * yy * w;
    let mut dilation = CMatrix::<8>::zeros();
    for i in 0..4 {
        for j in 0..4 {
            dilation[(i, 4 + j)] = tau[(i, j)];
            dilation[(4 + j, i)] = tau[(i, j)].conj();
        }
    }
    let ev = qmat::hermitian_eigenvalues(&dilation)?;
    // ascending ±s_i: the top four are s₄ ≤ s₃ ≤ s₂ ≤ s₁
    let s = [ev[7], ev[6], ev[5], ev[4]].map(|x| x.max(0.0));
    Ok((s[0] - s[1] - s[2] - s[3]).clamp(0.0, 1.0))
}

/// `E = h((1 + √(1 − C²)) / 2)`.
pub fn eof(c: f64) -> Result<f64, CorrelationError> {
    if !c.is_finite() || !(-DOMAIN_SLACK..=1.0 + DOMAIN_SLACK).contains(&c) {
        return Err(CorrelationError::OutOfDomain(c));
    }
    let c = c.clamp(0.0, 1.0);
    Ok(h_clamped(0.5 * (1.0 + (1.0 - c * c).sqrt())))
}

/// Everything computed for one X state by the closed-form routes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CorrelationMeasures {
    pub discord: f64,
    pub eof: f64,
    pub concurrence: f64,
    pub mutual_information: f64,
    pub classical_correlation: f64,
    pub q1: f64,
    pub q2: f64,
}

pub fn measures_x(rho: &DensityMatrix) -> Result<CorrelationMeasures, CorrelationError> {
    let XDiscord { discord, q1, q2 } = discord_x(rho)?;
    let concurrence = concurrence_x(rho)?;
    let m = rho.matrix();
    let mutual_information = (von_neumann_entropy(&partial_trace_b(m))?
        + von_neumann_entropy(&partial_trace_a(m))?
        - von_neumann_entropy(m)?)
    .max(0.0);
    Ok(CorrelationMeasures {
        discord,
        eof: eof(concurrence)?,
        concurrence,
        mutual_information,
        classical_correlation: mutual_information - discord,
        q1,
        q2,
    })
}
