//! Small fixed-size complex matrices.
//!
//! Everything in this crate lives in either a single-atom (2×2) or a two-atom
//! (4×4) Hilbert space, so matrices are stack arrays indexed by a const
//! generic dimension. The two-atom basis is ordered
//! `(|11⟩, |10⟩, |01⟩, |00⟩)` with atom A in the first slot and `|1⟩` the
//! excited level; single-atom matrices use the order `(|1⟩, |0⟩)`. With this
//! ordering `kron(a, b)` places atom A on the left factor.

use std::fmt;
use std::ops::{Add, AddAssign, Index, IndexMut, Mul, Neg, Sub};

use num_complex::Complex64;
use thiserror::Error;

pub type C64 = Complex64;

pub const ZERO: C64 = C64::new(0.0, 0.0);
pub const ONE: C64 = C64::new(1.0, 0.0);
pub const I: C64 = C64::new(0.0, 1.0);

/// Hermiticity tolerance accepted by [`hermitian_eigen`].
pub const HERMITIAN_TOL: f64 = 1e-10;
/// Off-diagonal Frobenius norm at which the Jacobi sweep stops.
pub const JACOBI_TOL: f64 = 1e-13;
pub const JACOBI_MAX_SWEEPS: usize = 100;
/// Iteration budget for the Hessenberg QR eigenvalue routine.
pub const QR_MAX_ITERATIONS: usize = 10_000;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LinalgError {
    #[error("matrix is not Hermitian: max |m - m^H| = {deviation:e}")]
    NotHermitian { deviation: f64 },
    #[error("matrix has non-finite entries")]
    NonFinite,
    #[error(
        "Jacobi iteration did not converge after {sweeps} sweeps (off-diagonal norm {off_norm:e})"
    )]
    JacobiNoConvergence { sweeps: usize, off_norm: f64 },
    #[error("QR iteration did not converge after {iterations} iterations")]
    QrNoConvergence { iterations: usize },
}

/// Dense `N×N` complex matrix, row-major.
#[derive(Clone, Copy, PartialEq)]
pub struct CMatrix<const N: usize> {
    data: [[C64; N]; N],
}

pub type Mat2 = CMatrix<2>;
pub type Mat4 = CMatrix<4>;

impl<const N: usize> CMatrix<N> {
    pub const DIM: usize = N;

    pub fn zeros() -> Self {
        Self {
            data: [[ZERO; N]; N],
        }
    }

    pub fn identity() -> Self {
        let mut m = Self::zeros();
        for i in 0..N {
            m.data[i][i] = ONE;
        }
        m
    }

    pub fn from_rows(data: [[C64; N]; N]) -> Self {
        Self { data }
    }

    pub fn from_real_rows(rows: [[f64; N]; N]) -> Self {
        let mut m = Self::zeros();
        for i in 0..N {
            for j in 0..N {
                m.data[i][j] = C64::new(rows[i][j], 0.0);
            }
        }
        m
    }

    pub fn from_diagonal(diag: [f64; N]) -> Self {
        let mut m = Self::zeros();
        for i in 0..N {
            m.data[i][i] = C64::new(diag[i], 0.0);
        }
        m
    }

    /// `|v⟩⟨w|`
    pub fn outer(v: &[C64; N], w: &[C64; N]) -> Self {
        let mut m = Self::zeros();
        for i in 0..N {
            for j in 0..N {
                m.data[i][j] = v[i] * w[j].conj();
            }
        }
        m
    }

    pub fn rows(&self) -> &[[C64; N]; N] {
        &self.data
    }

    pub fn adjoint(&self) -> Self {
        let mut m = Self::zeros();
        for i in 0..N {
            for j in 0..N {
                m.data[i][j] = self.data[j][i].conj();
            }
        }
        m
    }

    pub fn conj(&self) -> Self {
        let mut m = *self;
        for row in m.data.iter_mut() {
            for z in row.iter_mut() {
                *z = z.conj();
            }
        }
        m
    }

    pub fn trace(&self) -> C64 {
        (0..N).map(|i| self.data[i][i]).sum()
    }

    pub fn scale(&self, s: C64) -> Self {
        let mut m = *self;
        for row in m.data.iter_mut() {
            for z in row.iter_mut() {
                *z *= s;
            }
        }
        m
    }

    pub fn scale_re(&self, s: f64) -> Self {
        self.scale(C64::new(s, 0.0))
    }

    pub fn diagonal(&self) -> [C64; N] {
        std::array::from_fn(|i| self.data[i][i])
    }

    /// Largest entry modulus.
    pub fn max_abs(&self) -> f64 {
        self.data
            .iter()
            .flat_map(|r| r.iter())
            .map(|z| z.norm())
            .fold(0.0, f64::max)
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data
            .iter()
            .flat_map(|r| r.iter())
            .map(|z| z.norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    /// `max |m - m^H|` over entries.
    pub fn hermiticity_error(&self) -> f64 {
        let mut err: f64 = 0.0;
        for i in 0..N {
            for j in i..N {
                err = err.max((self.data[i][j] - self.data[j][i].conj()).norm());
            }
        }
        err
    }

    pub fn is_finite(&self) -> bool {
        self.data
            .iter()
            .flat_map(|r| r.iter())
            .all(|z| z.re.is_finite() && z.im.is_finite())
    }

    pub fn approx_eq(&self, other: &Self, tol: f64) -> bool {
        (*self - *other).max_abs() <= tol
    }

    pub fn commutator(&self, other: &Self) -> Self {
        *self * *other - *other * *self
    }

    pub fn mul_vec(&self, v: &[C64; N]) -> [C64; N] {
        std::array::from_fn(|i| (0..N).map(|j| self.data[i][j] * v[j]).sum())
    }
}

impl<const N: usize> Default for CMatrix<N> {
    fn default() -> Self {
        Self::zeros()
    }
}

impl<const N: usize> Index<(usize, usize)> for CMatrix<N> {
    type Output = C64;
    fn index(&self, (i, j): (usize, usize)) -> &C64 {
        &self.data[i][j]
    }
}

impl<const N: usize> IndexMut<(usize, usize)> for CMatrix<N> {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C64 {
        &mut self.data[i][j]
    }
}

impl<const N: usize> Add for CMatrix<N> {
    type Output = Self;
    fn add(mut self, rhs: Self) -> Self {
        self += rhs;
        self
    }
}

impl<const N: usize> AddAssign for CMatrix<N> {
    fn add_assign(&mut self, rhs: Self) {
        for i in 0..N {
            for j in 0..N {
                self.data[i][j] += rhs.data[i][j];
            }
        }
    }
}

impl<const N: usize> Sub for CMatrix<N> {
    type Output = Self;
    fn sub(mut self, rhs: Self) -> Self {
        for i in 0..N {
            for j in 0..N {
                self.data[i][j] -= rhs.data[i][j];
            }
        }
        self
    }
}

impl<const N: usize> Neg for CMatrix<N> {
    type Output = Self;
    fn neg(self) -> Self {
        self.scale_re(-1.0)
    }
}

impl<const N: usize> Mul for CMatrix<N> {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        let mut out = Self::zeros();
        for i in 0..N {
            for k in 0..N {
                let a = self.data[i][k];
                if a == ZERO {
                    continue;
                }
                for j in 0..N {
                    out.data[i][j] += a * rhs.data[k][j];
                }
            }
        }
        out
    }
}

impl<const N: usize> fmt::Debug for CMatrix<N> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "CMatrix<{N}> [")?;
        for row in &self.data {
            write!(f, "  ")?;
            for z in row {
                write!(f, "{:+.6e}{:+.6e}i  ", z.re, z.im)?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

/// Kronecker product `a ⊗ b` in the fixed two-atom ordering.
pub fn tensor2(a: &Mat2, b: &Mat2) -> Mat4 {
    let mut m = Mat4::zeros();
    for ia in 0..2 {
        for ja in 0..2 {
            for ib in 0..2 {
                for jb in 0..2 {
                    m[(2 * ia + ib, 2 * ja + jb)] = a[(ia, ja)] * b[(ib, jb)];
                }
            }
        }
    }
    m
}

/// Pauli `σ_y` in the standard `[[0, -i], [i, 0]]` form.
pub fn sigma_y() -> Mat2 {
    Mat2::from_rows([[ZERO, -I], [I, ZERO]])
}

/// Raising and lowering operators of the two atoms on the 4×4 space.
#[derive(Debug, Clone, Copy)]
pub struct QubitOperators {
    pub s_plus_a: Mat4,
    pub s_minus_a: Mat4,
    pub s_plus_b: Mat4,
    pub s_minus_b: Mat4,
    pub s_z_a: Mat4,
    pub s_z_b: Mat4,
    pub identity4: Mat4,
}

impl QubitOperators {
    pub fn new() -> Self {
        // |e⟩⟨g| with |e⟩ = |1⟩ first in the single-atom order
        let raise = Mat2::from_real_rows([[0.0, 1.0], [0.0, 0.0]]);
        let lower = raise.adjoint();
        let half_z = Mat2::from_real_rows([[0.5, 0.0], [0.0, -0.5]]);
        let id = Mat2::identity();
        Self {
            s_plus_a: tensor2(&raise, &id),
            s_minus_a: tensor2(&lower, &id),
            s_plus_b: tensor2(&id, &raise),
            s_minus_b: tensor2(&id, &lower),
            s_z_a: tensor2(&half_z, &id),
            s_z_b: tensor2(&id, &half_z),
            identity4: Mat4::identity(),
        }
    }
}

impl Default for QubitOperators {
    fn default() -> Self {
        Self::new()
    }
}

/// Eigenpair of a Hermitian matrix.
#[derive(Debug, Clone, Copy)]
pub struct EigenPair<const N: usize> {
    pub value: f64,
    pub vector: [C64; N],
}

/// Eigenvalues (ascending) and orthonormal eigenvectors of a Hermitian matrix.
///
/// Works on the `2N×2N` real symmetric embedding `[[A, -B], [B, A]]` of
/// `A + iB` with cyclic Jacobi rotations. Every eigenvalue appears twice in
/// the embedding; the complex eigenvectors are recovered by walking the real
/// eigenvectors in ascending order and keeping those not already spanned
/// (over ℂ) by the vectors accepted so far.
pub fn hermitian_eigen<const N: usize>(m: &CMatrix<N>) -> Result<Vec<EigenPair<N>>, LinalgError> {
    if !m.is_finite() {
        return Err(LinalgError::NonFinite);
    }
    let deviation = m.hermiticity_error();
    if deviation > HERMITIAN_TOL {
        return Err(LinalgError::NotHermitian { deviation });
    }

    let n2 = 2 * N;
    let mut a = vec![0.0; n2 * n2];
    for i in 0..N {
        for j in 0..N {
            // symmetrize so rounding-level asymmetry does not leak in
            let z = 0.5 * (m[(i, j)] + m[(j, i)].conj());
            a[i * n2 + j] = z.re;
            a[(i + N) * n2 + (j + N)] = z.re;
            a[i * n2 + (j + N)] = -z.im;
            a[(i + N) * n2 + j] = z.im;
        }
    }
    let (values, vectors) = jacobi_symmetric(&mut a, n2)?;

    let mut order: Vec<usize> = (0..n2).collect();
    order.sort_by(|&x, &y| values[x].total_cmp(&values[y]));

    let mut accepted: Vec<EigenPair<N>> = Vec::with_capacity(N);
    for &col in &order {
        if accepted.len() == N {
            break;
        }
        let mut v: [C64; N] =
            std::array::from_fn(|i| C64::new(vectors[i * n2 + col], vectors[(i + N) * n2 + col]));
        for p in &accepted {
            let overlap: C64 = (0..N).map(|i| p.vector[i].conj() * v[i]).sum();
            for i in 0..N {
                v[i] -= overlap * p.vector[i];
            }
        }
        let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        // a genuinely new direction keeps norm ~1; a duplicate partner drops to ~0
        if norm > 0.5 {
            for z in v.iter_mut() {
                *z /= norm;
            }
            accepted.push(EigenPair {
                value: values[col],
                vector: v,
            });
        }
    }
    debug_assert_eq!(accepted.len(), N);
    accepted.sort_by(|x, y| x.value.total_cmp(&y.value));
    Ok(accepted)
}

/// Eigenvalues only, ascending.
pub fn hermitian_eigenvalues<const N: usize>(m: &CMatrix<N>) -> Result<[f64; N], LinalgError> {
    let pairs = hermitian_eigen(m)?;
    Ok(std::array::from_fn(|i| pairs[i].value))
}

/// Cyclic Jacobi on a dense real symmetric `n×n` matrix stored row-major.
/// Returns eigenvalues and the column-eigenvector matrix.
fn jacobi_symmetric(a: &mut [f64], n: usize) -> Result<(Vec<f64>, Vec<f64>), LinalgError> {
    let mut v = vec![0.0; n * n];
    for i in 0..n {
        v[i * n + i] = 1.0;
    }
    let off_norm = |a: &[f64]| -> f64 {
        let mut s = 0.0;
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    s += a[i * n + j] * a[i * n + j];
                }
            }
        }
        s.sqrt()
    };
    let scale = a.iter().map(|x| x * x).sum::<f64>().sqrt().max(1.0);

    for sweep in 0..=JACOBI_MAX_SWEEPS {
        let off = off_norm(a);
        if off < JACOBI_TOL * scale {
            let values = (0..n).map(|i| a[i * n + i]).collect();
            return Ok((values, v));
        }
        if sweep == JACOBI_MAX_SWEEPS {
            return Err(LinalgError::JacobiNoConvergence {
                sweeps: sweep,
                off_norm: off,
            });
        }
        for p in 0..n - 1 {
            for q in p + 1..n {
                let apq = a[p * n + q];
                if apq == 0.0 {
                    continue;
                }
                let app = a[p * n + p];
                let aqq = a[q * n + q];
                let theta = (aqq - app) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let akp = a[k * n + p];
                    let akq = a[k * n + q];
                    a[k * n + p] = c * akp - s * akq;
                    a[k * n + q] = s * akp + c * akq;
                }
                for k in 0..n {
                    let apk = a[p * n + k];
                    let aqk = a[q * n + k];
                    a[p * n + k] = c * apk - s * aqk;
                    a[q * n + k] = s * apk + c * aqk;
                }
                for k in 0..n {
                    let vkp = v[k * n + p];
                    let vkq = v[k * n + q];
                    v[k * n + p] = c * vkp - s * vkq;
                    v[k * n + q] = s * vkp + c * vkq;
                }
            }
        }
    }
    unreachable!()
}

/// Eigenvalues of a general (possibly non-normal) complex matrix.
///
/// Householder reduction to upper Hessenberg form followed by single-shift
/// complex QR with Wilkinson shifts and deflation. The first few iterations
/// on each active block run unshifted; an exceptional shift is used every
/// 10 stalled iterations.
pub fn general_eigenvalues<const N: usize>(m: &CMatrix<N>) -> Result<[C64; N], LinalgError> {
    if !m.is_finite() {
        return Err(LinalgError::NonFinite);
    }
    let mut h = hessenberg(m);
    let mut eig = [ZERO; N];
    let mut hi = N;
    let mut iterations = 0usize;
    let mut stalled = 0usize;
    let norm = m.frobenius_norm().max(f64::MIN_POSITIVE);

    while hi > 0 {
        if hi == 1 {
            eig[0] = h[(0, 0)];
            break;
        }
        // find the start of the active unreduced block
        let mut lo = hi - 1;
        while lo > 0 {
            let sub = h[(lo, lo - 1)].norm();
            let diag = h[(lo, lo)].norm() + h[(lo - 1, lo - 1)].norm();
            if sub <= f64::EPSILON * diag.max(norm * 1e-3) {
                h[(lo, lo - 1)] = ZERO;
                break;
            }
            lo -= 1;
        }
        if lo == hi - 1 {
            eig[hi - 1] = h[(hi - 1, hi - 1)];
            hi -= 1;
            stalled = 0;
            continue;
        }
        iterations += 1;
        stalled += 1;
        if iterations > QR_MAX_ITERATIONS {
            return Err(LinalgError::QrNoConvergence { iterations });
        }

        let shift = if stalled <= 2 {
            ZERO
        } else if stalled.is_multiple_of(10) {
            h[(hi - 1, hi - 1)] + C64::new(0.75 * h[(hi - 1, hi - 2)].norm(), 0.0)
        } else {
            wilkinson_shift(
                h[(hi - 2, hi - 2)],
                h[(hi - 2, hi - 1)],
                h[(hi - 1, hi - 2)],
                h[(hi - 1, hi - 1)],
            )
        };
        qr_step(&mut h, lo, hi, shift);
    }
    Ok(eig)
}

fn wilkinson_shift(a: C64, b: C64, c: C64, d: C64) -> C64 {
    let tr_half = (a + d) * 0.5;
    let det = a * d - b * c;
    let disc = (tr_half * tr_half - det).sqrt();
    let l1 = tr_half + disc;
    let l2 = tr_half - disc;
    if (l1 - d).norm() < (l2 - d).norm() {
        l1
    } else {
        l2
    }
}

/// One shifted QR sweep on rows/columns `lo..hi` via Givens rotations.
fn qr_step<const N: usize>(h: &mut CMatrix<N>, lo: usize, hi: usize, shift: C64) {
    for i in lo..hi {
        h[(i, i)] -= shift;
    }
    let mut rotations: Vec<(C64, C64)> = Vec::with_capacity(hi - lo);
    for k in lo..hi - 1 {
        let x = h[(k, k)];
        let y = h[(k + 1, k)];
        let r = (x.norm_sqr() + y.norm_sqr()).sqrt();
        let (c, s) = if r == 0.0 {
            (ONE, ZERO)
        } else {
            (x / r, y / r)
        };
        // G = [[c*, s*], [-s, c]] applied to rows k, k+1
        for j in k..N {
            let a = h[(k, j)];
            let b = h[(k + 1, j)];
            h[(k, j)] = c.conj() * a + s.conj() * b;
            h[(k + 1, j)] = -s * a + c * b;
        }
        rotations.push((c, s));
    }
    for (idx, &(c, s)) in rotations.iter().enumerate() {
        let k = lo + idx;
        // right-multiply by G^H on columns k, k+1
        let top = (k + 2).min(hi);
        for i in 0..top {
            let a = h[(i, k)];
            let b = h[(i, k + 1)];
            h[(i, k)] = a * c + b * s;
            h[(i, k + 1)] = -a * s.conj() + b * c.conj();
        }
    }
    for i in lo..hi {
        h[(i, i)] += shift;
    }
}

fn hessenberg<const N: usize>(m: &CMatrix<N>) -> CMatrix<N> {
    let mut h = *m;
    if N < 3 {
        return h;
    }
    for k in 0..N - 2 {
        let mut x: Vec<C64> = (k + 1..N).map(|i| h[(i, k)]).collect();
        let alpha = x.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if alpha == 0.0 {
            continue;
        }
        let phase = if x[0].norm() == 0.0 {
            ONE
        } else {
            x[0] / x[0].norm()
        };
        x[0] += phase * alpha;
        let vnorm = x.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if vnorm == 0.0 {
            continue;
        }
        for z in x.iter_mut() {
            *z /= vnorm;
        }
        // H <- (I - 2vv^H) H (I - 2vv^H)
        for j in 0..N {
            let dot: C64 = x
                .iter()
                .enumerate()
                .map(|(r, v)| v.conj() * h[(k + 1 + r, j)])
                .sum();
            for (r, v) in x.iter().enumerate() {
                h[(k + 1 + r, j)] -= *v * dot * 2.0;
            }
        }
        for i in 0..N {
            let dot: C64 = x
                .iter()
                .enumerate()
                .map(|(c, v)| h[(i, k + 1 + c)] * *v)
                .sum();
            for (c, v) in x.iter().enumerate() {
                h[(i, k + 1 + c)] -= dot * v.conj() * 2.0;
            }
        }
        for i in k + 2..N {
            h[(i, k)] = ZERO;
        }
    }
    h
}
