//! Dense complex linear algebra for 2- and 4-dimensional Hilbert spaces.
//!
//! Everything the rest of the crate needs from a matrix library: products,
//! adjoints, Kronecker products, a Hermitian eigensolver, PSD square roots,
//! Hermitian matrix exponentials, and singular values. All routines are pure
//! functions of their inputs and run in deterministic operation order, so
//! results are bit-identical across runs and thread schedules.

use num_complex::Complex64;
use thiserror::Error;

pub type C64 = Complex64;

/// Eigenvalues whose magnitude falls below this are treated as exact zeros by
/// [`sqrt_psd`]. The Jacobi solver resolves the spectrum to ~1e-15 absolute,
/// so anything smaller than the snap is solver noise, not structure. Without
/// the snap, a rank-deficient state's square root picks up O(√ε) ≈ 1e-8 junk
/// in its null directions, which is exactly the scale the concurrence's
/// 1e-9-level guarantees forbid.
const RANK_SNAP: f64 = 1e-12;

/// Inputs with eigenvalues below this are rejected as not positive
/// semidefinite; values in `[-1e-8, 0)` are integration drift and clamp to 0.
const PSD_FLOOR: f64 = -1e-8;

const HERM_TOL: f64 = 1e-10;
const JACOBI_OFF_TOL: f64 = 1e-15;
const JACOBI_MAX_SWEEPS: usize = 100;

#[derive(Debug, Error, PartialEq)]
pub enum QmatError {
    #[error("matrix is not Hermitian (max |m - m†| = {deviation:.3e})")]
    NotHermitian { deviation: f64 },
    #[error("matrix is not positive semidefinite (min eigenvalue = {min_eigenvalue:.3e})")]
    NotPSD { min_eigenvalue: f64 },
    #[error("dimension mismatch: {left} vs {right}")]
    DimMismatch { left: usize, right: usize },
}

/// Dense square complex matrix, row-major storage.
#[derive(Debug, Clone, PartialEq)]
pub struct CMatrix {
    dim: usize,
    data: Vec<C64>,
}

impl CMatrix {
    pub fn zeros(dim: usize) -> Self {
        CMatrix { dim, data: vec![C64::new(0.0, 0.0); dim * dim] }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = CMatrix::zeros(dim);
        for i in 0..dim {
            m.set(i, i, C64::new(1.0, 0.0));
        }
        m
    }

    /// Builds a matrix from real entries, row-major.
    pub fn from_real(dim: usize, rows: &[f64]) -> Self {
        assert_eq!(rows.len(), dim * dim, "entry count must be dim²");
        CMatrix { dim, data: rows.iter().map(|&x| C64::new(x, 0.0)).collect() }
    }

    pub fn from_entries(dim: usize, entries: Vec<C64>) -> Self {
        assert_eq!(entries.len(), dim * dim, "entry count must be dim²");
        CMatrix { dim, data: entries }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn data(&self) -> &[C64] {
        &self.data
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> C64 {
        self.data[i * self.dim + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: C64) {
        self.data[i * self.dim + j] = v;
    }

    pub fn matmul(&self, rhs: &CMatrix) -> CMatrix {
        assert_eq!(self.dim, rhs.dim, "matmul dimension mismatch");
        let n = self.dim;
        let mut out = CMatrix::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = self.get(i, k);
                if a.re == 0.0 && a.im == 0.0 {
                    continue;
                }
                for j in 0..n {
                    let v = out.get(i, j) + a * rhs.get(k, j);
                    out.set(i, j, v);
                }
            }
        }
        out
    }

    pub fn add(&self, rhs: &CMatrix) -> CMatrix {
        assert_eq!(self.dim, rhs.dim);
        let data = self.data.iter().zip(&rhs.data).map(|(a, b)| a + b).collect();
        CMatrix { dim: self.dim, data }
    }

    pub fn sub(&self, rhs: &CMatrix) -> CMatrix {
        assert_eq!(self.dim, rhs.dim);
        let data = self.data.iter().zip(&rhs.data).map(|(a, b)| a - b).collect();
        CMatrix { dim: self.dim, data }
    }

    pub fn scale(&self, f: C64) -> CMatrix {
        CMatrix { dim: self.dim, data: self.data.iter().map(|a| a * f).collect() }
    }

    pub fn scale_re(&self, f: f64) -> CMatrix {
        self.scale(C64::new(f, 0.0))
    }

    pub fn adjoint(&self) -> CMatrix {
        let n = self.dim;
        let mut out = CMatrix::zeros(n);
        for i in 0..n {
            for j in 0..n {
                out.set(i, j, self.get(j, i).conj());
            }
        }
        out
    }

    pub fn conj(&self) -> CMatrix {
        CMatrix { dim: self.dim, data: self.data.iter().map(|a| a.conj()).collect() }
    }

    pub fn trace(&self) -> C64 {
        (0..self.dim).map(|i| self.get(i, i)).sum()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Max elementwise deviation from the adjoint.
    pub fn hermitian_deviation(&self) -> f64 {
        let mut dev: f64 = 0.0;
        for i in 0..self.dim {
            for j in i..self.dim {
                dev = dev.max((self.get(i, j) - self.get(j, i).conj()).norm());
            }
        }
        dev
    }

    /// `(m + m†)/2`.
    pub fn symmetrize(&self) -> CMatrix {
        self.add(&self.adjoint()).scale_re(0.5)
    }

    pub fn apply(&self, psi: &StateVector) -> StateVector {
        assert_eq!(self.dim, psi.dim(), "apply dimension mismatch");
        let amps = (0..self.dim)
            .map(|i| (0..self.dim).map(|j| self.get(i, j) * psi.get(j)).sum())
            .collect();
        StateVector::new(amps)
    }
}

impl std::ops::Add for &CMatrix {
    type Output = CMatrix;
    fn add(self, rhs: &CMatrix) -> CMatrix {
        CMatrix::add(self, rhs)
    }
}

impl std::ops::Sub for &CMatrix {
    type Output = CMatrix;
    fn sub(self, rhs: &CMatrix) -> CMatrix {
        CMatrix::sub(self, rhs)
    }
}

impl std::ops::Mul for &CMatrix {
    type Output = CMatrix;
    fn mul(self, rhs: &CMatrix) -> CMatrix {
        self.matmul(rhs)
    }
}

/// Complex amplitude vector (a pure state when normalized).
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    data: Vec<C64>,
}

impl StateVector {
    pub fn new(amplitudes: Vec<C64>) -> Self {
        StateVector { data: amplitudes }
    }

    pub fn from_real(amplitudes: &[f64]) -> Self {
        StateVector { data: amplitudes.iter().map(|&x| C64::new(x, 0.0)).collect() }
    }

    pub fn dim(&self) -> usize {
        self.data.len()
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.data
    }

    #[inline]
    pub fn get(&self, i: usize) -> C64 {
        self.data[i]
    }

    pub fn norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn normalized(&self) -> StateVector {
        let n = self.norm();
        assert!(n > 0.0, "cannot normalize the zero vector");
        StateVector { data: self.data.iter().map(|z| z / n).collect() }
    }

    /// `⟨self|other⟩`, conjugate-linear in `self`.
    pub fn inner(&self, other: &StateVector) -> C64 {
        assert_eq!(self.dim(), other.dim());
        self.data.iter().zip(&other.data).map(|(a, b)| a.conj() * b).sum()
    }

    /// `|ψ⟩⟨ψ|`.
    pub fn outer(&self) -> CMatrix {
        let n = self.dim();
        let mut m = CMatrix::zeros(n);
        for i in 0..n {
            for j in 0..n {
                m.set(i, j, self.data[i] * self.data[j].conj());
            }
        }
        m
    }
}

/// Kronecker product; the left factor owns the slow (most significant) index.
pub fn kron(a: &CMatrix, b: &CMatrix) -> CMatrix {
    let (na, nb) = (a.dim(), b.dim());
    let n = na * nb;
    let mut out = CMatrix::zeros(n);
    for ia in 0..na {
        for ja in 0..na {
            let f = a.get(ia, ja);
            for ib in 0..nb {
                for jb in 0..nb {
                    out.set(ia * nb + ib, ja * nb + jb, f * b.get(ib, jb));
                }
            }
        }
    }
    out
}

fn off_diagonal_frobenius(m: &CMatrix) -> f64 {
    let n = m.dim();
    let mut s = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                s += m.get(i, j).norm_sqr();
            }
        }
    }
    s.sqrt()
}

/// Hermitian eigendecomposition by cyclic complex Jacobi rotations.
///
/// Returns eigenvalues in descending order and the matching orthonormal
/// eigenvectors as the columns of the second result. Sweeps run until the
/// off-diagonal Frobenius norm stagnates at machine level (well inside the
/// 1e-12 the callers require); the 100-sweep cap guarantees termination.
pub fn herm_eig(m: &CMatrix) -> Result<(Vec<f64>, CMatrix), QmatError> {
    let dev = m.hermitian_deviation();
    if dev > HERM_TOL {
        return Err(QmatError::NotHermitian { deviation: dev });
    }
    let n = m.dim();
    let mut a = m.symmetrize();
    let mut q = CMatrix::identity(n);

    for _sweep in 0..JACOBI_MAX_SWEEPS {
        if off_diagonal_frobenius(&a) < JACOBI_OFF_TOL {
            break;
        }
        for p in 0..n - 1 {
            for qq in p + 1..n {
                let apq = a.get(p, qq);
                let r = apq.norm();
                if r < 1e-300 {
                    continue;
                }
                // Phase factor making the pivot real, then a real Jacobi
                // rotation annihilating it: U = diag(1, e^{-iφ})·J(θ).
                let f = apq / r;
                let alpha = a.get(p, p).re;
                let beta = a.get(qq, qq).re;
                let tau = (beta - alpha) / (2.0 * r);
                let t = if tau >= 0.0 {
                    1.0 / (tau + (1.0 + tau * tau).sqrt())
                } else {
                    -1.0 / (-tau + (1.0 + tau * tau).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;
                let sf = f * s; // s·e^{iφ}
                // Columns p,q of A and Q: v_p' = c·v_p − s·e^{-iφ} v_q, etc.
                for i in 0..n {
                    let aip = a.get(i, p);
                    let aiq = a.get(i, qq);
                    a.set(i, p, aip * c - aiq * sf.conj());
                    a.set(i, qq, aip * s + aiq * (f.conj() * c));
                    let qip = q.get(i, p);
                    let qiq = q.get(i, qq);
                    q.set(i, p, qip * c - qiq * sf.conj());
                    q.set(i, qq, qip * s + qiq * (f.conj() * c));
                }
                // Rows p,q of A (U† from the left).
                for j in 0..n {
                    let apj = a.get(p, j);
                    let aqj = a.get(qq, j);
                    a.set(p, j, apj * c - aqj * sf);
                    a.set(qq, j, apj * s + aqj * (f * c));
                }
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    let diag: Vec<f64> = (0..n).map(|i| a.get(i, i).re).collect();
    order.sort_by(|&i, &j| diag[j].partial_cmp(&diag[i]).unwrap().then(i.cmp(&j)));
    let eigenvalues: Vec<f64> = order.iter().map(|&i| diag[i]).collect();
    let mut vectors = CMatrix::zeros(n);
    for (col, &src) in order.iter().enumerate() {
        for i in 0..n {
            vectors.set(i, col, q.get(i, src));
        }
    }
    Ok((eigenvalues, vectors))
}

/// Hermitian PSD square root via eigendecomposition.
///
/// Eigenvalues in `[-1e-8, 0)` are clamped to zero (integration drift);
/// magnitudes below [`RANK_SNAP`] are snapped to exact zeros (rank
/// revelation). Anything below `-1e-8` is a genuine positivity violation.
pub fn sqrt_psd(m: &CMatrix) -> Result<CMatrix, QmatError> {
    let (w, v) = herm_eig(m)?;
    let min = w.last().copied().unwrap_or(0.0);
    if min < PSD_FLOOR {
        return Err(QmatError::NotPSD { min_eigenvalue: min });
    }
    let roots: Vec<f64> = w.iter().map(|&x| if x < RANK_SNAP { 0.0 } else { x.sqrt() }).collect();
    Ok(recompose(&v, &roots))
}

/// `exp(scale·m)` for Hermitian `m` (scale may be complex, e.g. `-i·t`).
pub fn herm_exp(m: &CMatrix, scale: C64) -> Result<CMatrix, QmatError> {
    let (w, v) = herm_eig(m)?;
    let n = m.dim();
    let mut out = CMatrix::zeros(n);
    for k in 0..n {
        let e = (scale * w[k]).exp();
        for i in 0..n {
            for j in 0..n {
                let val = out.get(i, j) + e * v.get(i, k) * v.get(j, k).conj();
                out.set(i, j, val);
            }
        }
    }
    Ok(out)
}

fn recompose(v: &CMatrix, diag: &[f64]) -> CMatrix {
    let n = v.dim();
    let mut out = CMatrix::zeros(n);
    for k in 0..n {
        if diag[k] == 0.0 {
            continue;
        }
        for i in 0..n {
            for j in 0..n {
                let val = out.get(i, j) + diag[k] * v.get(i, k) * v.get(j, k).conj();
                out.set(i, j, val);
            }
        }
    }
    out
}

/// `Tr(op·rho)`.
pub fn expect(op: &CMatrix, rho: &CMatrix) -> Result<C64, QmatError> {
    if op.dim() != rho.dim() {
        return Err(QmatError::DimMismatch { left: op.dim(), right: rho.dim() });
    }
    let n = op.dim();
    let mut t = C64::new(0.0, 0.0);
    for i in 0..n {
        for j in 0..n {
            t += op.get(i, j) * rho.get(j, i);
        }
    }
    Ok(t)
}

/// Singular values in descending order, by one-sided Jacobi on the columns.
///
/// Small singular values come out with absolute accuracy ~ε (no squaring of
/// the matrix is ever formed), which the concurrence path relies on: the
/// eigen route through `B†B` would inflate exact zeros to O(√ε) ≈ 1e-8.
pub fn svd_values(m: &CMatrix) -> Vec<f64> {
    let n = m.dim();
    let mut b = m.clone();
    for _sweep in 0..JACOBI_MAX_SWEEPS {
        let mut rotated = false;
        for p in 0..n - 1 {
            for qq in p + 1..n {
                let mut app = 0.0;
                let mut aqq = 0.0;
                let mut apq = C64::new(0.0, 0.0);
                for i in 0..n {
                    let bip = b.get(i, p);
                    let biq = b.get(i, qq);
                    app += bip.norm_sqr();
                    aqq += biq.norm_sqr();
                    apq += bip.conj() * biq;
                }
                let r = apq.norm();
                if r <= 1e-30 + 1e-16 * (app * aqq).sqrt() {
                    continue;
                }
                rotated = true;
                let f = apq / r;
                let tau = (aqq - app) / (2.0 * r);
                let t = if tau >= 0.0 {
                    1.0 / (tau + (1.0 + tau * tau).sqrt())
                } else {
                    -1.0 / (-tau + (1.0 + tau * tau).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;
                let sf = f * s;
                for i in 0..n {
                    let bip = b.get(i, p);
                    let biq = b.get(i, qq);
                    b.set(i, p, bip * c - biq * sf.conj());
                    b.set(i, qq, bip * s + biq * (f.conj() * c));
                }
            }
        }
        if !rotated {
            break;
        }
    }
    let mut sigma: Vec<f64> = (0..n)
        .map(|j| (0..n).map(|i| b.get(i, j).norm_sqr()).sum::<f64>().sqrt())
        .collect();
    sigma.sort_by(|a, b| b.partial_cmp(a).unwrap());
    sigma
}

/// `½‖a − b‖₁` for Hermitian `a`, `b`.
pub fn trace_distance(a: &CMatrix, b: &CMatrix) -> Result<f64, QmatError> {
    if a.dim() != b.dim() {
        return Err(QmatError::DimMismatch { left: a.dim(), right: b.dim() });
    }
    let (w, _) = herm_eig(&a.sub(b))?;
    Ok(0.5 * w.iter().map(|x| x.abs()).sum::<f64>())
}
