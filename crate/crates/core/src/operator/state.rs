use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use super::spectral::{
    eigh, min_eigenvalue, psd_sqrt, re, trace_re, CMatrix, CVector, HermitianOperator,
    PSD_CLIP,
};
use super::tensor::{check_dims, partial_trace_matrix, permute_subsystems};
use crate::{Error, Result};

const TRACE_TOL: f64 = 1e-10;
const NORM_TOL: f64 = 1e-10;

/// A density operator with declared subsystem dimensions.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityOperator {
    op: HermitianOperator,
    dims: Vec<usize>,
}

impl DensityOperator {
    pub fn new(m: CMatrix, dims: &[usize]) -> Result<Self> {
        let op = HermitianOperator::new(m)?;
        check_dims(op.dim(), dims)?;
        let tr = op.trace();
        if (tr - 1.0).abs() > TRACE_TOL {
            return Err(Error::TraceNotOne { trace: tr });
        }
        let lmin = min_eigenvalue(op.matrix());
        if lmin < -PSD_CLIP {
            return Err(Error::NotPositive { min_eigenvalue: lmin });
        }
        Ok(Self {
            op,
            dims: dims.to_vec(),
        })
    }

    /// Single-system state.
    pub fn from_matrix(m: CMatrix) -> Result<Self> {
        let d = m.nrows();
        Self::new(m, &[d])
    }

    pub(crate) fn new_unchecked(m: CMatrix, dims: &[usize]) -> Self {
        Self {
            op: HermitianOperator::new_unchecked(m),
            dims: dims.to_vec(),
        }
    }

    pub fn from_diagonal(p: &[f64]) -> Result<Self> {
        Self::from_matrix(HermitianOperator::from_real_diagonal(p).into_matrix())
    }

    pub fn maximally_mixed(d: usize) -> Self {
        Self::new_unchecked(CMatrix::identity(d, d) * re(1.0 / d as f64), &[d])
    }

    pub fn basis_state(d: usize, k: usize) -> Self {
        let mut m = CMatrix::zeros(d, d);
        m[(k, k)] = re(1.0);
        Self::new_unchecked(m, &[d])
    }

    pub fn matrix(&self) -> &CMatrix {
        self.op.matrix()
    }

    pub fn operator(&self) -> &HermitianOperator {
        &self.op
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn dim(&self) -> usize {
        self.op.dim()
    }

    /// Same matrix with a different factorization of the dimension.
    pub fn with_dims(&self, dims: &[usize]) -> Result<Self> {
        check_dims(self.dim(), dims)?;
        Ok(Self::new_unchecked(self.matrix().clone(), dims))
    }

    pub fn tensor(&self, other: &DensityOperator) -> Self {
        let mut dims = self.dims.clone();
        dims.extend_from_slice(&other.dims);
        Self::new_unchecked(self.matrix().kronecker(other.matrix()), &dims)
    }

    /// Partial trace keeping the listed subsystems.
    pub fn partial_trace(&self, keep: &[usize]) -> Result<Self> {
        let m = partial_trace_matrix(self.matrix(), &self.dims, keep)?;
        let mut keep = keep.to_vec();
        keep.sort_unstable();
        keep.dedup();
        let dims: Vec<usize> = keep.iter().map(|&k| self.dims[k]).collect();
        Ok(Self::new_unchecked(m, &dims))
    }

    /// Reorders subsystems: new system `k` is old system `order[k]`.
    pub fn permute(&self, order: &[usize]) -> Result<Self> {
        let m = permute_subsystems(self.matrix(), &self.dims, order)?;
        let dims: Vec<usize> = order.iter().map(|&o| self.dims[o]).collect();
        Ok(Self::new_unchecked(m, &dims))
    }

    pub fn eigenvalues(&self) -> Vec<f64> {
        eigh(self.matrix()).clipped()
    }
}

/// A unit vector with declared subsystem dimensions.
#[derive(Clone, Debug, PartialEq)]
pub struct PureState {
    v: CVector,
    dims: Vec<usize>,
}

impl PureState {
    pub fn new(v: CVector, dims: &[usize]) -> Result<Self> {
        check_dims(v.len(), dims)?;
        let norm = v.norm();
        if (norm - 1.0).abs() > NORM_TOL {
            return Err(Error::NotNormalized { norm });
        }
        Ok(Self {
            v,
            dims: dims.to_vec(),
        })
    }

    /// Normalizes `v` first.
    pub fn normalized(v: CVector, dims: &[usize]) -> Result<Self> {
        let n = v.norm();
        if n == 0.0 || !n.is_finite() {
            return Err(Error::NotNormalized { norm: n });
        }
        Self::new(v / re(n), dims)
    }

    pub fn basis(d: usize, k: usize) -> Self {
        let mut v = CVector::zeros(d);
        v[k] = re(1.0);
        Self { v, dims: vec![d] }
    }

    /// `Σ_x |x⟩|x⟩ / √d` on two `d`-dimensional systems.
    pub fn maximally_entangled(d: usize) -> Self {
        let mut v = CVector::zeros(d * d);
        for x in 0..d {
            v[x * d + x] = re(1.0 / libm::sqrt(d as f64));
        }
        Self { v, dims: vec![d, d] }
    }

    pub fn vector(&self) -> &CVector {
        &self.v
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn dim(&self) -> usize {
        self.v.len()
    }

    pub fn density(&self) -> DensityOperator {
        DensityOperator::new_unchecked(&self.v * self.v.adjoint(), &self.dims)
    }

    pub fn tensor(&self, other: &PureState) -> Self {
        let mut dims = self.dims.clone();
        dims.extend_from_slice(&other.dims);
        Self {
            v: self.v.kronecker(&other.v),
            dims,
        }
    }
}

/// `ψ(ρ) = (1 ⊗ √ρ)|Γ⟩`, `|Γ⟩ = Σ_x |x⟩|x⟩`, on `A ⊗ A'`.
///
/// The `A'` marginal is `ρ` and the `A` marginal is `ρᵀ`.
pub fn canonical_input_state(rho: &DensityOperator) -> Result<PureState> {
    if rho.dims().len() != 1 {
        return Err(Error::Shape(format!(
            "input state must be a single system, got dims {:?}",
            rho.dims()
        )));
    }
    let d = rho.dim();
    let v = canonical_input_vector(&psd_sqrt(rho.matrix()));
    PureState::normalized(v, &[d, d])
}

pub(crate) fn canonical_input_vector(sqrt_rho: &CMatrix) -> CVector {
    let d = sqrt_rho.nrows();
    let mut v = CVector::zeros(d * d);
    for x in 0..d {
        for j in 0..d {
            v[x * d + j] = sqrt_rho[(j, x)];
        }
    }
    v
}

/// Finitely many weighted states sharing subsystem dimensions.
#[derive(Clone, Debug, PartialEq)]
pub struct StateEnsemble {
    items: Vec<(f64, DensityOperator)>,
}

impl StateEnsemble {
    pub fn new(items: Vec<(f64, DensityOperator)>) -> Result<Self> {
        if items.is_empty() {
            return Err(Error::InvalidParameter("empty ensemble".into()));
        }
        let dims = items[0].1.dims().to_vec();
        let mut total = 0.0;
        for (q, s) in &items {
            if !(*q >= 0.0 && *q <= 1.0) {
                return Err(Error::Probability(*q));
            }
            if s.dims() != dims.as_slice() {
                return Err(Error::Shape("ensemble states have different dims".into()));
            }
            total += q;
        }
        if (total - 1.0).abs() > 1e-10 {
            return Err(Error::InvalidParameter(format!(
                "ensemble weights sum to {total}"
            )));
        }
        Ok(Self { items })
    }

    pub fn single(state: DensityOperator) -> Self {
        Self {
            items: vec![(1.0, state)],
        }
    }

    pub fn items(&self) -> &[(f64, DensityOperator)] {
        &self.items
    }

    pub fn len(&self) -> usize {
        self.items.len()
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }

    pub fn average(&self) -> DensityOperator {
        let first = &self.items[0].1;
        let mut m = CMatrix::zeros(first.dim(), first.dim());
        for (q, s) in &self.items {
            m += s.matrix() * re(*q);
        }
        DensityOperator::new_unchecked(m, first.dims())
    }
}

/// Normalizes a PSD matrix to unit trace, clipping tiny negative eigenvalues.
pub(crate) fn normalize_psd(m: &CMatrix) -> CMatrix {
    let tr = trace_re(m);
    let out = m * re(1.0 / tr);
    (&out + out.adjoint()) * re(0.5)
}

#[cfg(test)]
pub(crate) fn is_close(a: &CMatrix, b: &CMatrix, tol: f64) -> bool {
    super::spectral::max_abs(&(a - b)) <= tol
}
