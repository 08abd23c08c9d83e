use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use super::spectral::{CMatrix, CVector, C64};
use crate::{Error, Result};

/// Kronecker product `x ⊗ y` (row-major composite index).
pub fn tensor_product(x: &CMatrix, y: &CMatrix) -> CMatrix {
    x.kronecker(y)
}

pub fn tensor_all(ms: &[CMatrix]) -> CMatrix {
    let mut out = CMatrix::identity(1, 1);
    for m in ms {
        out = out.kronecker(m);
    }
    out
}

pub fn tensor_vectors(x: &CVector, y: &CVector) -> CVector {
    x.kronecker(y)
}

pub(crate) fn check_dims(total: usize, dims: &[usize]) -> Result<()> {
    let p: usize = dims.iter().product();
    if dims.is_empty() || dims.contains(&0) || p != total {
        return Err(Error::Shape(format!(
            "subsystem dims {dims:?} do not multiply to {total}"
        )));
    }
    Ok(())
}

fn strides(dims: &[usize]) -> Vec<usize> {
    let mut s = vec![1; dims.len()];
    for k in (0..dims.len().saturating_sub(1)).rev() {
        s[k] = s[k + 1] * dims[k + 1];
    }
    s
}

/// Partial trace keeping the listed subsystems, in their original order.
pub fn partial_trace_matrix(m: &CMatrix, dims: &[usize], keep: &[usize]) -> Result<CMatrix> {
    check_dims(m.nrows(), dims)?;
    let mut keep: Vec<usize> = keep.to_vec();
    keep.sort_unstable();
    keep.dedup();
    if keep.is_empty() || keep.iter().any(|&k| k >= dims.len()) {
        return Err(Error::Shape(format!(
            "invalid keep set {keep:?} for {} subsystems",
            dims.len()
        )));
    }
    let traced: Vec<usize> = (0..dims.len()).filter(|k| !keep.contains(k)).collect();
    let st = strides(dims);
    let kdims: Vec<usize> = keep.iter().map(|&k| dims[k]).collect();
    let tdims: Vec<usize> = traced.iter().map(|&k| dims[k]).collect();
    let kd: usize = kdims.iter().product();
    let td: usize = tdims.iter().product();
    let offsets = |sys: &[usize], sdims: &[usize], count: usize| -> Vec<usize> {
        (0..count)
            .map(|mut idx| {
                let mut off = 0;
                for j in (0..sys.len()).rev() {
                    off += (idx % sdims[j]) * st[sys[j]];
                    idx /= sdims[j];
                }
                off
            })
            .collect()
    };
    let koff = offsets(&keep, &kdims, kd);
    let toff = offsets(&traced, &tdims, td);
    let mut out = CMatrix::zeros(kd, kd);
    for r in 0..kd {
        for c in 0..kd {
            let mut s = C64::new(0.0, 0.0);
            for &t in &toff {
                s += m[(koff[r] + t, koff[c] + t)];
            }
            out[(r, c)] = s;
        }
    }
    Ok(out)
}

/// Index map of a subsystem permutation: new system `k` is old system `order[k]`.
pub(crate) fn permutation_index_map(dims: &[usize], order: &[usize]) -> Result<Vec<usize>> {
    let n = dims.len();
    let mut seen = vec![false; n];
    if order.len() != n {
        return Err(Error::Shape(format!("order {order:?} has wrong length")));
    }
    for &o in order {
        if o >= n || seen[o] {
            return Err(Error::Shape(format!("{order:?} is not a permutation")));
        }
        seen[o] = true;
    }
    let total: usize = dims.iter().product();
    let old_st = strides(dims);
    let new_dims: Vec<usize> = order.iter().map(|&o| dims[o]).collect();
    let mut map = vec![0usize; total];
    for (new_idx, slot) in map.iter_mut().enumerate() {
        let mut rem = new_idx;
        let mut old = 0;
        for k in (0..n).rev() {
            let digit = rem % new_dims[k];
            rem /= new_dims[k];
            old += digit * old_st[order[k]];
        }
        *slot = old;
    }
    Ok(map)
}

/// Reorders tensor factors: new system `k` is old system `order[k]`.
pub fn permute_subsystems(m: &CMatrix, dims: &[usize], order: &[usize]) -> Result<CMatrix> {
    check_dims(m.nrows(), dims)?;
    let map = permutation_index_map(dims, order)?;
    let d = map.len();
    Ok(CMatrix::from_fn(d, d, |r, c| m[(map[r], map[c])]))
}

pub fn permute_vector(v: &CVector, dims: &[usize], order: &[usize]) -> Result<CVector> {
    check_dims(v.len(), dims)?;
    let map = permutation_index_map(dims, order)?;
    Ok(CVector::from_fn(map.len(), |r, _| v[map[r]]))
}

/// `I_left ⊗ k ⊗ I_right` for a possibly rectangular `k`.
pub(crate) fn embed(k: &CMatrix, left: usize, right: usize) -> CMatrix {
    let l = CMatrix::identity(left, left);
    let r = CMatrix::identity(right, right);
    l.kronecker(k).kronecker(&r)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operator::spectral::{max_abs, re};
    use crate::random;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn product_of_maximally_mixed() {
        let h = CMatrix::identity(2, 2) * re(0.5);
        let t = tensor_product(&h, &h);
        assert!(max_abs(&(t - CMatrix::identity(4, 4) * re(0.25))) < 1e-15);
    }

    #[test]
    fn partial_trace_inverts_tensor_product() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let a = random::density(&mut rng, 2);
        let b = random::density(&mut rng, 3);
        let ab = tensor_product(&a, &b);
        let ra = partial_trace_matrix(&ab, &[2, 3], &[0]).unwrap();
        let rb = partial_trace_matrix(&ab, &[2, 3], &[1]).unwrap();
        assert!(max_abs(&(ra - &a)) < 1e-14);
        assert!(max_abs(&(rb - &b)) < 1e-14);
    }

    #[test]
    fn middle_system_trace() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let a = random::density(&mut rng, 2);
        let b = random::density(&mut rng, 3);
        let c = random::density(&mut rng, 2);
        let abc = tensor_all(&[a.clone(), b, c.clone()]);
        let ac = partial_trace_matrix(&abc, &[2, 3, 2], &[0, 2]).unwrap();
        assert!(max_abs(&(ac - tensor_product(&a, &c))) < 1e-14);
    }

    #[test]
    fn permutation_swaps_factors() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let a = random::density(&mut rng, 2);
        let b = random::density(&mut rng, 3);
        let ab = tensor_product(&a, &b);
        let ba = permute_subsystems(&ab, &[2, 3], &[1, 0]).unwrap();
        assert!(max_abs(&(ba - tensor_product(&b, &a))) < 1e-15);
    }

    #[test]
    fn shape_errors() {
        let m = CMatrix::identity(4, 4);
        assert!(partial_trace_matrix(&m, &[2, 3], &[0]).is_err());
        assert!(partial_trace_matrix(&m, &[2, 2], &[]).is_err());
        assert!(permute_subsystems(&m, &[2, 2], &[0, 0]).is_err());
    }
}
