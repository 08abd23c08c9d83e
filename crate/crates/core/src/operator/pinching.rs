use alloc::format;
use alloc::vec::Vec;

use super::spectral::{eigh, max_abs, CMatrix, Eigensystem, HermitianOperator, EIGEN_CLUSTER_REL};
use crate::{Error, Result};

/// Groups ascending eigenvalues into clusters of (numerically) equal values.
///
/// A value joins the current cluster when it is within
/// `1e-8·max(1, |λ|)` of the cluster's first element.
pub(crate) fn cluster_eigenvalues(values: &[f64]) -> Vec<core::ops::Range<usize>> {
    let mut out = Vec::new();
    let mut start = 0;
    for i in 1..=values.len() {
        let split = i == values.len() || {
            let anchor = values[start];
            (values[i] - anchor).abs() > EIGEN_CLUSTER_REL * anchor.abs().max(1.0)
        };
        if split {
            out.push(start..i);
            start = i;
        }
    }
    out
}

/// Number of distinct eigenvalues `v(σ)`.
pub fn distinct_eigenvalue_count(sigma: &HermitianOperator) -> usize {
    cluster_eigenvalues(&sigma.eigensystem().values).len()
}

/// Projection-averaging map `X ↦ Σ_i P_i X P_i`.
#[derive(Clone, Debug)]
pub struct Pinching {
    projections: Vec<CMatrix>,
}

impl Pinching {
    /// The pinching onto the eigenspaces of `sigma`.
    pub fn of(sigma: &CMatrix) -> Self {
        Self::from_eigensystem(&eigh(sigma))
    }

    pub(crate) fn from_eigensystem(eig: &Eigensystem) -> Self {
        let projections = cluster_eigenvalues(&eig.values)
            .into_iter()
            .map(|r| {
                let v = eig.vectors.columns(r.start, r.len());
                &v * v.adjoint()
            })
            .collect();
        Self { projections }
    }

    /// An explicit family of orthogonal projections summing to the identity.
    pub fn from_projections(projections: Vec<CMatrix>) -> Result<Self> {
        let Some(first) = projections.first() else {
            return Err(Error::InvalidParameter("empty projection family".into()));
        };
        let d = first.nrows();
        let mut sum = CMatrix::zeros(d, d);
        for p in &projections {
            if p.shape() != (d, d) {
                return Err(Error::Shape("projections differ in shape".into()));
            }
            let dev = max_abs(&(p * p - p)).max(max_abs(&(p - p.adjoint())));
            if dev > 1e-9 {
                return Err(Error::InvalidParameter(format!(
                    "not an orthogonal projection (deviation {dev:e})"
                )));
            }
            sum += p;
        }
        if max_abs(&(sum - CMatrix::identity(d, d))) > 1e-9 {
            return Err(Error::InvalidParameter(
                "projections do not resolve the identity".into(),
            ));
        }
        Ok(Self { projections })
    }

    pub fn len(&self) -> usize {
        self.projections.len()
    }

    pub fn is_empty(&self) -> bool {
        self.projections.is_empty()
    }

    pub fn projections(&self) -> &[CMatrix] {
        &self.projections
    }

    pub fn apply(&self, x: &CMatrix) -> CMatrix {
        let mut out = CMatrix::zeros(x.nrows(), x.ncols());
        for p in &self.projections {
            out += p * x * p;
        }
        out
    }
}

/// `𝒫_σ(X)`.
pub fn pinching(sigma: &HermitianOperator, x: &HermitianOperator) -> Result<HermitianOperator> {
    if sigma.dim() != x.dim() {
        return Err(Error::Shape(format!(
            "pinching dims differ: {} vs {}",
            sigma.dim(),
            x.dim()
        )));
    }
    let p = Pinching::of(sigma.matrix()).apply(x.matrix());
    Ok(HermitianOperator::new_unchecked(p))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operator::spectral::{min_eigenvalue, re, C64};
    use crate::random;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn identity_pinching_is_trivial() {
        let sigma = HermitianOperator::identity(3);
        assert_eq!(distinct_eigenvalue_count(&sigma), 1);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let x = HermitianOperator::new(random::hermitian(&mut rng, 3)).unwrap();
        let p = pinching(&sigma, &x).unwrap();
        assert!(max_abs(&(p.matrix() - x.matrix())) < 1e-14);
    }

    #[test]
    fn off_diagonal_killed() {
        let sigma = HermitianOperator::from_real_diagonal(&[1.0, 2.0]);
        let z = C64::new(0.0, 0.0);
        let x = HermitianOperator::new(CMatrix::from_row_slice(2, 2, &[z, re(1.0), re(1.0), z]))
            .unwrap();
        let p = pinching(&sigma, &x).unwrap();
        assert!(max_abs(p.matrix()) < 1e-15);
        assert_eq!(distinct_eigenvalue_count(&sigma), 2);
    }

    #[test]
    fn degenerate_count() {
        let sigma = HermitianOperator::from_real_diagonal(&[0.5, 0.5, 0.25]);
        assert_eq!(distinct_eigenvalue_count(&sigma), 2);
    }

    #[test]
    fn pinching_inequality_and_commutation() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..50 {
            let d = rng.gen_range(2..=8);
            let sigma = random::degenerate_density(&mut rng, d);
            let x = random::density(&mut rng, d);
            let pin = Pinching::of(&sigma);
            let px = pin.apply(&x);
            assert!(max_abs(&(&px * &sigma - &sigma * &px)) < 1e-10);
            let gap = &px * re(pin.len() as f64) - &x;
            assert!(min_eigenvalue(&gap) >= -1e-9);
            assert!((px.trace() - x.trace()).norm() < 1e-12);
        }
    }

    #[test]
    fn rejects_bad_projection_family() {
        let p = CMatrix::identity(2, 2) * re(0.5);
        assert!(Pinching::from_projections(alloc::vec![p]).is_err());
    }
}
