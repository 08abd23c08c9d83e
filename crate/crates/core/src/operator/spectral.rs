use alloc::vec::Vec;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex;

use crate::{Error, Result};

pub type C64 = Complex<f64>;
pub type CMatrix = DMatrix<C64>;
pub type CVector = DVector<C64>;

/// Relative Hermiticity tolerance.
pub const HERMITIAN_TOL: f64 = 1e-10;
/// Eigenvalues in `[-PSD_CLIP, 0)` are treated as zero.
pub const PSD_CLIP: f64 = 1e-10;
/// Eigenvalues above `SUPPORT_REL * λ_max` span the support.
pub const SUPPORT_REL: f64 = 1e-10;
/// Largest leak `‖(I-Π_σ)ρ(I-Π_σ)‖` tolerated by a support containment test.
pub const SUPPORT_LEAK: f64 = 1e-9;
/// Relative tolerance under which two eigenvalues are considered equal.
pub const EIGEN_CLUSTER_REL: f64 = 1e-8;

#[inline]
pub(crate) fn re(x: f64) -> C64 {
    Complex::new(x, 0.0)
}

pub(crate) fn max_abs(m: &CMatrix) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

pub(crate) fn hermitian_deviation(m: &CMatrix) -> f64 {
    let n = m.nrows();
    let mut dev: f64 = 0.0;
    for i in 0..n {
        for j in i..n {
            dev = dev.max((m[(i, j)] - m[(j, i)].conj()).norm());
        }
    }
    dev
}

pub(crate) fn trace_re(m: &CMatrix) -> f64 {
    (0..m.nrows()).map(|i| m[(i, i)].re).sum()
}

/// `tr(a b)` without forming the product.
pub(crate) fn trace_product(a: &CMatrix, b: &CMatrix) -> C64 {
    let mut s = C64::new(0.0, 0.0);
    for i in 0..a.nrows() {
        for k in 0..a.ncols() {
            s += a[(i, k)] * b[(k, i)];
        }
    }
    s
}

/// Eigen-decomposition of a Hermitian matrix with ascending eigenvalues.
#[derive(Clone, Debug)]
pub struct Eigensystem {
    pub values: Vec<f64>,
    pub vectors: CMatrix,
}

impl Eigensystem {
    pub fn dim(&self) -> usize {
        self.values.len()
    }

    pub fn max_value(&self) -> f64 {
        self.values.last().copied().unwrap_or(0.0)
    }

    pub fn min_value(&self) -> f64 {
        self.values.first().copied().unwrap_or(0.0)
    }

    /// Threshold separating the support from the kernel of a PSD operator.
    pub fn support_threshold(&self) -> f64 {
        SUPPORT_REL * self.max_value().max(0.0)
    }

    pub fn rank(&self) -> usize {
        let t = self.support_threshold();
        self.values.iter().filter(|&&v| v > t).count()
    }

    /// `V diag(f(λ)) V†`.
    pub fn reconstruct(&self, mut f: impl FnMut(f64) -> f64) -> CMatrix {
        let fs: Vec<f64> = self.values.iter().map(|&v| f(v)).collect();
        self.reconstruct_with(&fs)
    }

    pub(crate) fn reconstruct_with(&self, fs: &[f64]) -> CMatrix {
        let n = self.dim();
        let mut w = self.vectors.clone();
        for (k, &fk) in fs.iter().enumerate() {
            for r in 0..n {
                w[(r, k)] *= fk;
            }
        }
        w * self.vectors.adjoint()
    }

    /// `f` applied on the support of a PSD operator, zero on the kernel.
    pub fn support_function(&self, mut f: impl FnMut(f64) -> f64) -> CMatrix {
        let t = self.support_threshold();
        self.reconstruct(|v| if v > t { f(v) } else { 0.0 })
    }

    pub fn support_projector(&self) -> CMatrix {
        self.support_function(|_| 1.0)
    }

    /// Orthonormal columns spanning the support.
    pub fn support_isometry(&self) -> CMatrix {
        let t = self.support_threshold();
        let cols: Vec<usize> = (0..self.dim()).filter(|&k| self.values[k] > t).collect();
        self.vectors.select_columns(cols.iter())
    }

    /// Eigenvalues with the PSD clip applied.
    pub fn clipped(&self) -> Vec<f64> {
        self.values.iter().map(|&v| v.max(0.0)).collect()
    }
}

/// Eigen-decomposition of the Hermitian part of `m`, eigenvalues ascending.
pub fn eigh(m: &CMatrix) -> Eigensystem {
    let n = m.nrows();
    let h = (m + m.adjoint()) * re(0.5);
    let e = h.symmetric_eigen();
    let mut idx: Vec<usize> = (0..n).collect();
    idx.sort_by(|&a, &b| e.eigenvalues[a].total_cmp(&e.eigenvalues[b]));
    let values = idx.iter().map(|&i| e.eigenvalues[i]).collect();
    let vectors = CMatrix::from_fn(n, n, |r, k| e.eigenvectors[(r, idx[k])]);
    Eigensystem { values, vectors }
}

/// Ascending eigenvalues of the Hermitian part of `m`.
pub fn eigvalsh(m: &CMatrix) -> Vec<f64> {
    let h = (m + m.adjoint()) * re(0.5);
    let mut v: Vec<f64> = h.symmetric_eigenvalues().iter().copied().collect();
    v.sort_by(f64::total_cmp);
    v
}

pub(crate) fn min_eigenvalue(m: &CMatrix) -> f64 {
    eigvalsh(m).first().copied().unwrap_or(0.0)
}

/// Operator norm of a Hermitian matrix.
pub(crate) fn hermitian_norm(m: &CMatrix) -> f64 {
    let v = eigvalsh(m);
    v.iter().map(|x| x.abs()).fold(0.0, f64::max)
}

/// `log₂ tr X^α` for PSD `X`, evaluated without overflow. Returns `-∞` for `X = 0`.
#[cfg(test)]
pub(crate) fn log2_trace_power(x: &CMatrix, alpha: f64) -> f64 {
    log2_sum_powers(&eigvalsh(x), alpha)
}

pub(crate) fn log2_sum_powers(values: &[f64], alpha: f64) -> f64 {
    let m = values.iter().copied().fold(0.0, f64::max);
    if m <= 0.0 {
        return f64::NEG_INFINITY;
    }
    // Eigenvalues at the roundoff level of the largest one are zeros; for
    // α < 1 their powers would otherwise add O(√ε) noise.
    let floor = 64.0 * f64::EPSILON * m;
    let s: f64 = values
        .iter()
        .map(|&v| if v > floor { libm::pow(v / m, alpha) } else { 0.0 })
        .sum();
    alpha * libm::log2(m) + libm::log2(s)
}

/// `log₂ tr 2^H` for Hermitian `H`, evaluated without overflow.
pub(crate) fn log2_trace_exp2(h: &CMatrix) -> f64 {
    let v = eigvalsh(h);
    let m = v.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let s: f64 = v.iter().map(|&x| libm::exp2(x - m)).sum();
    m + libm::log2(s)
}

/// Shannon entropy in bits of a list of (clipped) eigenvalues.
pub(crate) fn entropy_of(values: &[f64]) -> f64 {
    values
        .iter()
        .filter(|&&p| p > 0.0)
        .map(|&p| -p * libm::log2(p))
        .sum()
}

/// A validated Hermitian operator.
#[derive(Clone, Debug, PartialEq)]
pub struct HermitianOperator {
    m: CMatrix,
}

impl HermitianOperator {
    pub fn new(m: CMatrix) -> Result<Self> {
        if m.nrows() != m.ncols() || m.nrows() == 0 {
            return Err(Error::Shape(alloc::format!(
                "expected a nonempty square matrix, got {}x{}",
                m.nrows(),
                m.ncols()
            )));
        }
        let dev = hermitian_deviation(&m);
        if dev > HERMITIAN_TOL * max_abs(&m) {
            return Err(Error::NotHermitian { deviation: dev });
        }
        Ok(Self { m })
    }

    /// Skips validation. The caller guarantees Hermiticity.
    pub(crate) fn new_unchecked(m: CMatrix) -> Self {
        Self { m }
    }

    pub fn from_real_diagonal(d: &[f64]) -> Self {
        let v: Vec<C64> = d.iter().map(|&x| re(x)).collect();
        Self {
            m: CMatrix::from_diagonal(&CVector::from_vec(v)),
        }
    }

    pub fn identity(d: usize) -> Self {
        Self {
            m: CMatrix::identity(d, d),
        }
    }

    pub fn dim(&self) -> usize {
        self.m.nrows()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.m
    }

    pub fn into_matrix(self) -> CMatrix {
        self.m
    }

    pub fn eigensystem(&self) -> Eigensystem {
        eigh(&self.m)
    }

    pub fn is_psd(&self) -> bool {
        min_eigenvalue(&self.m) >= -PSD_CLIP * max_abs(&self.m).max(1.0)
    }

    pub fn trace(&self) -> f64 {
        trace_re(&self.m)
    }
}

/// Eigen-decomposition of a validated Hermitian operator.
pub fn hermitian_eigensystem(h: &HermitianOperator) -> Eigensystem {
    h.eigensystem()
}

/// Applies `f` to the spectrum of a PSD operator.
///
/// Eigenvalues in `[-1e-10, 0)` are clipped to zero first. With `support_only`
/// set, eigenvalues at or below the support threshold map to zero.
pub fn spectral_apply(
    h: &HermitianOperator,
    f: impl Fn(f64) -> f64,
    support_only: bool,
) -> Result<HermitianOperator> {
    let eig = h.eigensystem();
    let scale = eig.max_value().abs().max(1.0);
    let mut fs = Vec::with_capacity(eig.dim());
    let threshold = eig.support_threshold();
    for &v in &eig.values {
        if v < -PSD_CLIP * scale {
            return Err(Error::NotPositive { min_eigenvalue: v });
        }
        let v = v.max(0.0);
        let y = if support_only && v <= threshold { 0.0 } else { f(v) };
        if !y.is_finite() {
            return Err(Error::Domain { eigenvalue: v });
        }
        fs.push(y);
    }
    Ok(HermitianOperator::new_unchecked(eig.reconstruct_with(&fs)))
}

/// `X^p` on the support of a PSD matrix (zero on the kernel).
#[cfg(test)]
pub(crate) fn psd_power(m: &CMatrix, p: f64) -> CMatrix {
    eigh(m).support_function(|v| libm::pow(v, p))
}

/// `√X` of a PSD matrix with negative roundoff clipped.
pub(crate) fn psd_sqrt(m: &CMatrix) -> CMatrix {
    eigh(m).reconstruct(|v| libm::sqrt(v.max(0.0)))
}

/// `log₂ X` on the support of a PSD matrix.
#[cfg(test)]
pub(crate) fn psd_log2(m: &CMatrix) -> CMatrix {
    eigh(m).support_function(libm::log2)
}

/// `2^H` for Hermitian `H`.
pub(crate) fn exp2_hermitian(h: &CMatrix) -> CMatrix {
    eigh(h).reconstruct(libm::exp2)
}
