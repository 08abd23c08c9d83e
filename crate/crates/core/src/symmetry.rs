//! Method of types, the permutation representation and universal symmetric states.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::operator::{
    eigh, max_abs, permutation_index_map, permute_vector, re, tensor_vectors, CMatrix, CVector,
    DensityOperator, Pinching, PureState, QuantumChannel, StateEnsemble,
};
use crate::{random, Error, Result};

/// Largest `|A|^n·|A'|^n` accepted by [`type_decomposition`].
pub const TYPE_DECOMPOSITION_MAX_DIM: usize = 1 << 12;
/// Largest `d^n` accepted by [`universal_symmetric_state`].
pub const SYMMETRIC_STATE_MAX_DIM: usize = 256;
/// Largest `|B|^m` accepted by [`pinched_channel`].
pub const PINCHED_OUTPUT_MAX_DIM: usize = 64;
/// Schmidt coefficients below this are treated as zero.
pub const SCHMIDT_TOL: f64 = 1e-10;
/// Dominance is accepted down to this margin.
pub const DOMINANCE_TOL: f64 = 1e-9;

/// Letter counts of a sequence of length `n`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TypeVector {
    counts: Vec<usize>,
}

impl TypeVector {
    pub fn new(counts: Vec<usize>) -> Result<Self> {
        if counts.is_empty() {
            return Err(Error::InvalidParameter("empty alphabet".into()));
        }
        Ok(Self { counts })
    }

    /// The type of a sequence over `{0, …, k-1}`.
    pub fn of_sequence(seq: &[usize], k: usize) -> Result<Self> {
        let mut counts = vec![0; k];
        for &x in seq {
            if x >= k {
                return Err(Error::InvalidParameter(format!("letter {x} outside alphabet of size {k}")));
            }
            counts[x] += 1;
        }
        Self::new(counts)
    }

    pub fn n(&self) -> usize {
        self.counts.iter().sum()
    }

    pub fn alphabet_size(&self) -> usize {
        self.counts.len()
    }

    pub fn counts(&self) -> &[usize] {
        &self.counts
    }

    /// The empirical distribution `count / n`.
    pub fn distribution(&self) -> Vec<f64> {
        let n = self.n().max(1) as f64;
        self.counts.iter().map(|&c| c as f64 / n).collect()
    }
}

/// All types of length `n` over `k` letters, in lexicographically decreasing order.
pub fn enumerate_types(n: usize, k: usize) -> Result<Vec<TypeVector>> {
    if n == 0 || k == 0 {
        return Err(Error::InvalidParameter(format!("need n ≥ 1 and k ≥ 1, got n = {n}, k = {k}")));
    }
    fn rec(left: usize, slots: usize, prefix: &mut Vec<usize>, out: &mut Vec<TypeVector>) {
        if slots == 1 {
            prefix.push(left);
            out.push(TypeVector { counts: prefix.clone() });
            prefix.pop();
            return;
        }
        for c in (0..=left).rev() {
            prefix.push(c);
            rec(left - c, slots - 1, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    rec(n, k, &mut Vec::with_capacity(k), &mut out);
    Ok(out)
}

/// `|T_n^t|`, the multinomial coefficient `n! / Π counts!`.
pub fn type_class_size(t: &TypeVector) -> u128 {
    let mut size: u128 = 1;
    let mut seen = 0u128;
    for &c in &t.counts {
        for j in 1..=c as u128 {
            seen += 1;
            size = size * seen / j;
        }
    }
    size
}

/// Every sequence of type `t`, in lexicographic order.
pub fn type_class(t: &TypeVector) -> Vec<Vec<usize>> {
    fn rec(left: &mut [usize], prefix: &mut Vec<usize>, total: usize, out: &mut Vec<Vec<usize>>) {
        if prefix.len() == total {
            out.push(prefix.clone());
            return;
        }
        for x in 0..left.len() {
            if left[x] > 0 {
                left[x] -= 1;
                prefix.push(x);
                rec(left, prefix, total, out);
                prefix.pop();
                left[x] += 1;
            }
        }
    }
    let mut out = Vec::new();
    let mut left = t.counts.clone();
    rec(&mut left, &mut Vec::new(), t.n(), &mut out);
    out
}

/// One term `√p^n(t) |Ψ^t⟩` of a type decomposition.
#[derive(Clone, Debug)]
pub struct TypeBlock {
    pub type_vector: TypeVector,
    /// `p^n(t) = Σ_{x^n ∈ T_n^t} p(x_1)⋯p(x_n)`.
    pub probability: f64,
    /// `|T_n^t|`.
    pub class_size: u128,
    /// `|Ψ^t⟩ = |T_n^t|^{-1/2} Σ_{x^n ∈ T_n^t} |a_{x^n}⟩|b_{x^n}⟩` on `A^n ⊗ A'^n`.
    pub state: PureState,
}

/// `|ψ⟩^{⊗n} = Σ_t √p^n(t) |Ψ^t⟩` with `A^n` ordered before `A'^n`.
#[derive(Clone, Debug)]
pub struct TypeDecomposition {
    pub n: usize,
    /// Squared Schmidt coefficients `p(x)`, in decreasing order.
    pub schmidt: Vec<f64>,
    /// Types of positive probability.
    pub blocks: Vec<TypeBlock>,
}

impl TypeDecomposition {
    /// `Σ_t √p^n(t) |Ψ^t⟩`.
    pub fn reassemble(&self) -> CVector {
        let len = self.blocks[0].state.dim();
        let mut v = CVector::zeros(len);
        for b in &self.blocks {
            v += b.state.vector() * re(libm::sqrt(b.probability));
        }
        v
    }

    /// The ensemble `{p^n(t), Ψ^t}`.
    pub fn ensemble(&self) -> Result<StateEnsemble> {
        let total: f64 = self.blocks.iter().map(|b| b.probability).sum();
        StateEnsemble::new(self.blocks.iter().map(|b| (b.probability / total, b.state.density())).collect())
    }
}

/// Reorders `|ψ⟩^{⊗n}` on `(AA')^n` into `A^n A'^n`.
pub fn tensor_power_grouped(psi: &PureState, n: usize) -> Result<CVector> {
    let [da, db] = bipartite_dims(psi.dims())?;
    let mut v = psi.vector().clone();
    for _ in 1..n {
        v = tensor_vectors(&v, psi.vector());
    }
    let dims: Vec<usize> = (0..n).flat_map(|_| [da, db]).collect();
    let order: Vec<usize> = (0..n).map(|i| 2 * i).chain((0..n).map(|i| 2 * i + 1)).collect();
    permute_vector(&v, &dims, &order)
}

fn bipartite_dims(dims: &[usize]) -> Result<[usize; 2]> {
    match *dims {
        [a, b] => Ok([a, b]),
        _ => Err(Error::Shape(format!("expected a bipartite state, got dims {dims:?}"))),
    }
}

fn checked_pow(d: usize, n: usize, limit: usize, what: &str) -> Result<usize> {
    let mut total: usize = 1;
    for _ in 0..n {
        total = total.checked_mul(d).filter(|&t| t <= limit).ok_or_else(|| {
            Error::SizeLimit(format!("{what}: {d}^{n} exceeds {limit}"))
        })?;
    }
    Ok(total)
}

/// Type decomposition of `|ψ⟩^{⊗n}` in the Schmidt basis of `ψ`.
///
/// Letters are the Schmidt indices in decreasing order of coefficient; ties
/// keep the order returned by the singular value decomposition.
pub fn type_decomposition(psi: &PureState, n: usize) -> Result<TypeDecomposition> {
    if n == 0 {
        return Err(Error::InvalidParameter("n must be at least 1".into()));
    }
    let [da, db] = bipartite_dims(psi.dims())?;
    let dan = checked_pow(da, n, TYPE_DECOMPOSITION_MAX_DIM, "A^n")?;
    let dbn = checked_pow(db, n, TYPE_DECOMPOSITION_MAX_DIM, "A'^n")?;
    if dan * dbn > TYPE_DECOMPOSITION_MAX_DIM {
        return Err(Error::SizeLimit(format!(
            "type decomposition dimension {} exceeds {TYPE_DECOMPOSITION_MAX_DIM}",
            dan * dbn
        )));
    }
    let m = CMatrix::from_fn(da, db, |i, j| psi.vector()[i * db + j]);
    let svd = m.svd(true, true);
    let u = svd.u.expect("requested");
    let vt = svd.v_t.expect("requested");
    let k = da.min(db);
    let mut idx: Vec<usize> = (0..k).collect();
    idx.sort_by(|&a, &b| svd.singular_values[b].total_cmp(&svd.singular_values[a]));
    let coeff: Vec<f64> = idx
        .iter()
        .map(|&x| {
            let s = svd.singular_values[x];
            if s < SCHMIDT_TOL {
                0.0
            } else {
                s
            }
        })
        .collect();
    let a: Vec<CVector> = idx.iter().map(|&x| u.column(x).into_owned()).collect();
    // M = U S V†, so the A' partner of u_x is the conjugate of column x of V, which is row x of V†.
    let b: Vec<CVector> = idx.iter().map(|&x| vt.row(x).transpose()).collect();
    let p: Vec<f64> = coeff.iter().map(|s| s * s).collect();
    let mut blocks = Vec::new();
    for t in enumerate_types(n, k)? {
        let class_size = type_class_size(&t);
        let weight: f64 = t.counts.iter().zip(&p).map(|(&c, &px)| libm::pow(px, c as f64)).product();
        let probability = class_size as f64 * weight;
        if probability == 0.0 {
            continue;
        }
        let mut v = CVector::zeros(dan * dbn);
        for seq in type_class(&t) {
            let mut va = a[seq[0]].clone();
            let mut vb = b[seq[0]].clone();
            for &x in &seq[1..] {
                va = tensor_vectors(&va, &a[x]);
                vb = tensor_vectors(&vb, &b[x]);
            }
            v += tensor_vectors(&va, &vb);
        }
        v *= re(1.0 / libm::sqrt(class_size as f64));
        blocks.push(TypeBlock {
            type_vector: t,
            probability,
            class_size,
            state: PureState::new(v, &[dan, dbn])?,
        });
    }
    Ok(TypeDecomposition { n, schmidt: p, blocks })
}

fn check_permutation(perm: &[usize]) -> Result<()> {
    let mut seen = vec![false; perm.len()];
    for &i in perm {
        if i >= perm.len() || seen[i] {
            return Err(Error::InvalidParameter(format!("{perm:?} is not a permutation")));
        }
        seen[i] = true;
    }
    Ok(())
}

/// `ι⁻¹`.
pub fn inverse_permutation(perm: &[usize]) -> Vec<usize> {
    let mut inv = vec![0; perm.len()];
    for (i, &p) in perm.iter().enumerate() {
        inv[p] = i;
    }
    inv
}

/// `(a ∘ b)(i) = a(b(i))`.
pub fn compose_permutations(a: &[usize], b: &[usize]) -> Vec<usize> {
    b.iter().map(|&i| a[i]).collect()
}

/// All `n!` permutations of `{0, …, n-1}` in lexicographic order.
pub fn all_permutations(n: usize) -> Vec<Vec<usize>> {
    let mut p: Vec<usize> = (0..n).collect();
    let mut out = vec![p.clone()];
    loop {
        let Some(i) = (1..n).rev().find(|&i| p[i - 1] < p[i]) else {
            return out;
        };
        let j = (i..n).rev().find(|&j| p[j] > p[i - 1]).expect("exists");
        p.swap(i - 1, j);
        p[i..].reverse();
        out.push(p.clone());
    }
}

/// `W^ι` on `(ℂ^d)^{⊗n}`: `|ψ_1⟩⊗⋯⊗|ψ_n⟩ ↦ |ψ_{ι⁻¹(1)}⟩⊗⋯⊗|ψ_{ι⁻¹(n)}⟩`.
pub fn permutation_unitary(perm: &[usize], d: usize) -> Result<CMatrix> {
    check_permutation(perm)?;
    let map = permutation_map(perm, d)?;
    let dim = map.len();
    let mut w = CMatrix::zeros(dim, dim);
    for (new, &old) in map.iter().enumerate() {
        w[(new, old)] = re(1.0);
    }
    Ok(w)
}

fn permutation_map(perm: &[usize], d: usize) -> Result<Vec<usize>> {
    permutation_index_map(&vec![d; perm.len()], &inverse_permutation(perm))
}

/// `W^ι X W^ι†`, computed by index relabelling.
pub fn conjugate_by_permutation(x: &CMatrix, perm: &[usize], d: usize) -> Result<CMatrix> {
    check_permutation(perm)?;
    let map = permutation_map(perm, d)?;
    if map.len() != x.nrows() {
        return Err(Error::Shape(format!("matrix of size {} is not on {d}^{}", x.nrows(), perm.len())));
    }
    Ok(CMatrix::from_fn(map.len(), map.len(), |r, c| x[(map[r], map[c])]))
}

/// The group average `(1/n!) Σ_ι W^ι X W^ι†`.
pub fn symmetrize(x: &CMatrix, d: usize, n: usize) -> Result<CMatrix> {
    let perms = all_permutations(n);
    let mut out = CMatrix::zeros(x.nrows(), x.ncols());
    for p in &perms {
        out += conjugate_by_permutation(x, p, d)?;
    }
    Ok(out * re(1.0 / perms.len() as f64))
}

/// Largest deviation `‖W X W† - X‖_max` over the adjacent transpositions, which generate `S_n`.
pub fn permutation_deviation(x: &CMatrix, d: usize, n: usize) -> Result<f64> {
    let mut dev: f64 = 0.0;
    for i in 0..n.saturating_sub(1) {
        let mut p: Vec<usize> = (0..n).collect();
        p.swap(i, i + 1);
        dev = dev.max(max_abs(&(conjugate_by_permutation(x, &p, d)? - x)));
    }
    Ok(dev)
}

/// Partitions of `n` with at most `rows` parts, in decreasing lexicographic order.
pub fn partitions(n: usize, rows: usize) -> Vec<Vec<usize>> {
    fn rec(left: usize, max: usize, rows: usize, prefix: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if left == 0 {
            out.push(prefix.clone());
            return;
        }
        if rows == 0 {
            return;
        }
        for part in (1..=left.min(max)).rev() {
            prefix.push(part);
            rec(left - part, part, rows - 1, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    rec(n, n, rows, &mut Vec::new(), &mut out);
    out
}

/// `Σ (column - row)` over the boxes of the Young diagram.
fn content_sum(shape: &[usize]) -> i64 {
    shape
        .iter()
        .enumerate()
        .map(|(r, &len)| (0..len).map(|c| c as i64 - r as i64).sum::<i64>())
        .sum()
}

/// Dimension of the `S_n` irrep of the given shape (hook length formula).
pub fn permutation_irrep_dim(shape: &[usize]) -> u128 {
    let n: usize = shape.iter().sum();
    let mut num: u128 = (1..=n as u128).product();
    let mut hooks: u128 = 1;
    for (r, &len) in shape.iter().enumerate() {
        for c in 0..len {
            let below = shape[r + 1..].iter().filter(|&&l| l > c).count();
            hooks *= (len - c + below) as u128;
        }
    }
    num /= hooks;
    num
}

/// Dimension of the `U(d)` irrep of the given shape (Weyl dimension formula).
pub fn unitary_irrep_dim(shape: &[usize], d: usize) -> u128 {
    let l: Vec<i64> = (0..d).map(|i| shape.get(i).copied().unwrap_or(0) as i64).collect();
    let mut num: i128 = 1;
    let mut den: i128 = 1;
    for i in 0..d {
        for j in i + 1..d {
            num *= (l[i] - l[j] + (j - i) as i64) as i128;
            den *= (j - i) as i128;
        }
    }
    (num / den) as u128
}

/// An isotypic component `U_λ ⊗ V_λ` of `(ℂ^d)^{⊗n}`.
#[derive(Clone, Debug)]
pub struct IsotypicComponent {
    /// Young diagram `λ`.
    pub shape: Vec<usize>,
    /// `dim U_λ`, the unitary-group factor.
    pub unitary_dim: usize,
    /// `dim V_λ`, the permutation-group factor.
    pub permutation_dim: usize,
    /// Orthogonal projector onto the component.
    pub projector: CMatrix,
}

/// A symmetric state dominating every symmetric state up to the factor `v`.
#[derive(Clone, Debug)]
pub struct UniversalSymmetricState {
    pub n: usize,
    pub local_dim: usize,
    /// `σ^u = (1/K) Σ_λ P_λ / tr P_λ` over the `K` isotypic components.
    pub state: DensityOperator,
    pub components: Vec<IsotypicComponent>,
    /// `v = K · max_λ dim U_λ`.
    pub v: f64,
    /// `(n+1)^{(d+2)(d-1)/2}`.
    pub general_bound: f64,
    /// Smallest eigenvalue of `v σ^u - σ` over the witnesses checked at construction.
    pub margin: f64,
}

impl UniversalSymmetricState {
    /// The pinching onto the eigenspaces of `σ^u`.
    pub fn pinching(&self) -> Pinching {
        Pinching::of(self.state.matrix())
    }

    /// `λ_min(v σ^u - σ)`.
    pub fn dominance_margin(&self, sigma: &CMatrix) -> f64 {
        eigh(&(self.state.matrix() * re(self.v) - sigma)).min_value()
    }
}

/// `(n+1)^{(d+2)(d-1)/2}`.
pub fn dominance_bound(n: usize, d: usize) -> f64 {
    libm::pow((n + 1) as f64, ((d + 2) * (d - 1)) as f64 / 2.0)
}

/// Isotypic projectors of `S_n` on `(ℂ^d)^{⊗n}`.
///
/// The class sum of transpositions acts on the component `λ` as its content
/// sum, so Lagrange interpolation in that operator yields each projector.
pub fn isotypic_components(n: usize, d: usize) -> Result<Vec<IsotypicComponent>> {
    if n == 0 || d == 0 {
        return Err(Error::InvalidParameter("need n ≥ 1 and d ≥ 1".into()));
    }
    let dim = checked_pow(d, n, SYMMETRIC_STATE_MAX_DIM, "universal symmetric state")?;
    let shapes = partitions(n, d);
    let contents: Vec<i64> = shapes.iter().map(|s| content_sum(s)).collect();
    for i in 0..contents.len() {
        if contents[i + 1..].contains(&contents[i]) {
            return Err(Error::SizeLimit(format!(
                "content sums of partitions of {n} with at most {d} rows collide"
            )));
        }
    }
    let mut class_sum = CMatrix::zeros(dim, dim);
    for i in 0..n {
        for j in i + 1..n {
            let mut p: Vec<usize> = (0..n).collect();
            p.swap(i, j);
            for (new, old) in permutation_map(&p, d)?.into_iter().enumerate() {
                class_sum[(new, old)] += re(1.0);
            }
        }
    }
    let id = CMatrix::identity(dim, dim);
    let mut out = Vec::new();
    for (k, shape) in shapes.iter().enumerate() {
        let mut p = id.clone();
        for (j, &c) in contents.iter().enumerate() {
            if j != k {
                p = p * (&class_sum - &id * re(c as f64)) * re(1.0 / (contents[k] - c) as f64);
            }
        }
        let p = (&p + p.adjoint()) * re(0.5);
        let unitary_dim = unitary_irrep_dim(shape, d) as usize;
        let permutation_dim = permutation_irrep_dim(shape) as usize;
        let rank = p.trace().re;
        if (rank - (unitary_dim * permutation_dim) as f64).abs() > 1e-6 {
            return Err(Error::InvalidParameter(format!(
                "component {shape:?} has trace {rank}, expected {}",
                unitary_dim * permutation_dim
            )));
        }
        out.push(IsotypicComponent {
            shape: shape.clone(),
            unitary_dim,
            permutation_dim,
            projector: p,
        });
    }
    Ok(out)
}

/// `σ^u` on `(ℂ^d)^{⊗n}` with its dominance constant, checked on a fixed witness family.
///
/// Witnesses: the normalized isotypic projectors, `|φ⟩⟨φ|^{⊗n}` for basis and
/// seeded random pure `φ`, and, for `n ≤ 5`, group averages of seeded random states.
pub fn universal_symmetric_state(n: usize, d: usize) -> Result<UniversalSymmetricState> {
    let components = isotypic_components(n, d)?;
    let dim = components[0].projector.nrows();
    let k = components.len() as f64;
    let mut sigma = CMatrix::zeros(dim, dim);
    for c in &components {
        sigma += &c.projector * re(1.0 / (k * (c.unitary_dim * c.permutation_dim) as f64));
    }
    let v = k * components.iter().map(|c| c.unitary_dim).max().unwrap_or(1) as f64;
    let mut u = UniversalSymmetricState {
        n,
        local_dim: d,
        state: DensityOperator::new_unchecked(sigma, &vec![d; n]),
        components,
        v,
        general_bound: dominance_bound(n, d),
        margin: f64::INFINITY,
    };
    for (name, w) in dominance_witnesses(&u)? {
        let m = u.dominance_margin(&w);
        if m < -DOMINANCE_TOL {
            return Err(Error::Dominance { margin: m, witness: name });
        }
        u.margin = u.margin.min(m);
    }
    Ok(u)
}

fn dominance_witnesses(u: &UniversalSymmetricState) -> Result<Vec<(String, CMatrix)>> {
    let (n, d) = (u.n, u.local_dim);
    let mut out = Vec::new();
    for c in &u.components {
        let p = &c.projector * re(1.0 / c.projector.trace().re);
        out.push((format!("isotypic projector {:?}", c.shape), p));
    }
    let power = |phi: &CVector| {
        let mut v = phi.clone();
        for _ in 1..n {
            v = tensor_vectors(&v, phi);
        }
        &v * v.adjoint()
    };
    for j in 0..d {
        let mut e = CVector::zeros(d);
        e[j] = re(1.0);
        out.push((format!("product basis state {j}"), power(&e)));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(0x5e11 + (n * 31 + d) as u64);
    for j in 0..4 {
        let phi = random::pure_vector(&mut rng, d);
        let phi = &phi * re(1.0 / phi.norm());
        out.push((format!("random product pure state {j}"), power(&phi)));
    }
    if n <= 5 {
        for j in 0..3 {
            let rank = if j == 0 { 1 } else { u.state.dim() };
            let rho = random::density_of_rank(&mut rng, u.state.dim(), rank);
            out.push((format!("symmetrized random state {j}"), symmetrize(&rho, d, n)?));
        }
    }
    Ok(out)
}

/// `𝒩^{(m)} = 𝒫_{σ^u_{B^m}} ∘ 𝒩^{⊗m}`.
pub fn pinched_channel(channel: &QuantumChannel, m: usize) -> Result<QuantumChannel> {
    if m == 0 {
        return Err(Error::InvalidParameter("m must be at least 1".into()));
    }
    checked_pow(channel.output_dim(), m, PINCHED_OUTPUT_MAX_DIM, "pinched channel output")?;
    let u = universal_symmetric_state(m, channel.output_dim())?;
    let pinch = u.pinching();
    let power = channel.tensor_power(m);
    let mut kraus = Vec::new();
    for p in pinch.projections() {
        for k in power.kraus() {
            let pk = p * k;
            if max_abs(&pk) > 1e-14 {
                kraus.push(pk);
            }
        }
    }
    QuantumChannel::new(kraus)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operator::{partial_trace_matrix, tensor_product};
    use proptest::prelude::*;

    fn factorial(n: u128) -> u128 {
        (1..=n).product()
    }

    #[test]
    fn type_enumeration_examples() {
        let t = enumerate_types(2, 2).unwrap();
        let counts: Vec<&[usize]> = t.iter().map(|t| t.counts()).collect();
        assert_eq!(counts, [&[2, 0][..], &[1, 1], &[0, 2]]);
        assert_eq!(enumerate_types(1, 3).unwrap().len(), 3);
        assert_eq!(enumerate_types(4, 2).unwrap().len(), 5);
        assert!(enumerate_types(0, 2).is_err());
    }

    #[test]
    fn type_class_sizes() {
        let t = |c: &[usize]| TypeVector::new(c.to_vec()).unwrap();
        assert_eq!(type_class_size(&t(&[1, 1])), 2);
        assert_eq!(type_class_size(&t(&[2, 0])), 1);
        assert_eq!(type_class_size(&t(&[2, 1, 1])), 12);
        for c in [[1, 1], [3, 2]] {
            assert_eq!(type_class(&t(&c)).len() as u128, type_class_size(&t(&c)));
        }
    }

    proptest! {
        #[test]
        fn types_partition_all_sequences(n in 1usize..7, k in 1usize..4) {
            let types = enumerate_types(n, k).unwrap();
            prop_assert!(types.len() as f64 <= libm::pow((n + 1) as f64, k as f64));
            let total: u128 = types.iter().map(type_class_size).sum();
            prop_assert_eq!(total, (k as u128).pow(n as u32));
            let mut sorted = types.clone();
            sorted.dedup();
            prop_assert_eq!(sorted.len(), types.len());
            for t in &types {
                for seq in type_class(t) {
                    prop_assert_eq!(&TypeVector::of_sequence(&seq, k).unwrap(), t);
                }
            }
        }

        #[test]
        fn multinomial_matches_factorials(counts in proptest::collection::vec(0usize..5, 1..4)) {
            let t = TypeVector::new(counts.clone()).unwrap();
            let n: usize = counts.iter().sum();
            let den: u128 = counts.iter().map(|&c| factorial(c as u128)).product();
            prop_assert_eq!(type_class_size(&t), factorial(n as u128) / den);
        }
    }

    #[test]
    fn maximally_entangled_type_probabilities() {
        let dec = type_decomposition(&PureState::maximally_entangled(2), 2).unwrap();
        let p: Vec<(Vec<usize>, f64)> = dec.blocks.iter().map(|b| (b.type_vector.counts().to_vec(), b.probability)).collect();
        assert_eq!(p.len(), 3);
        for (c, prob) in p {
            let expect = if c == [1, 1] { 0.5 } else { 0.25 };
            assert!((prob - expect).abs() < 1e-12, "{c:?}: {prob}");
        }
    }

    #[test]
    fn product_state_has_a_single_type() {
        let psi = PureState::basis(2, 0).tensor(&PureState::basis(2, 0));
        for n in 1..=3 {
            let dec = type_decomposition(&psi, n).unwrap();
            assert_eq!(dec.blocks.len(), 1);
            assert_eq!(dec.blocks[0].type_vector.counts(), &[n, 0]);
            let v = dec.blocks[0].state.vector();
            assert!((v[0].norm() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn type_decomposition_reassembles_the_tensor_power() {
        let mut rng = ChaCha8Rng::seed_from_u64(40);
        for (da, db) in [(2, 2), (2, 3)] {
            let psi = PureState::normalized(random::pure_vector(&mut rng, da * db), &[da, db]).unwrap();
            let dec = type_decomposition(&psi, 3).unwrap();
            let target = tensor_power_grouped(&psi, 3).unwrap();
            assert!((dec.reassemble() - target).camax() < 1e-9);
            let total: f64 = dec.blocks.iter().map(|b| b.probability).sum();
            assert!((total - 1.0).abs() < 1e-10);
            for (i, a) in dec.blocks.iter().enumerate() {
                for b in &dec.blocks[i + 1..] {
                    assert!(a.state.vector().dotc(b.state.vector()).norm() < 1e-12);
                }
                let ra = partial_trace_matrix(&a.state.density().matrix().clone(), a.state.dims(), &[0]).unwrap();
                let e = eigh(&ra);
                let r = e.rank() as f64;
                assert!((r - a.class_size as f64).abs() < 0.5);
                assert!(e.values.iter().filter(|&&x| x > 1e-9).all(|&x| (x * r - 1.0).abs() < 1e-9));
            }
        }
    }

    #[test]
    fn type_decomposition_size_limit() {
        assert!(matches!(
            type_decomposition(&PureState::maximally_entangled(2), 7),
            Err(Error::SizeLimit(_))
        ));
    }

    #[test]
    fn permutation_unitary_examples() {
        assert_eq!(permutation_unitary(&[0, 1, 2], 2).unwrap(), CMatrix::identity(8, 8));
        let swap = permutation_unitary(&[1, 0], 2).unwrap();
        let mut expect = CMatrix::zeros(4, 4);
        for (r, c) in [(0, 0), (1, 2), (2, 1), (3, 3)] {
            expect[(r, c)] = re(1.0);
        }
        assert_eq!(swap, expect);
        let w = permutation_unitary(&[1, 2, 0], 2).unwrap();
        assert!(max_abs(&(&w * &w * &w - CMatrix::identity(8, 8))) < 1e-15);
        assert!(permutation_unitary(&[0, 0], 2).is_err());
    }

    #[test]
    fn permutation_unitary_moves_factors() {
        let mut rng = ChaCha8Rng::seed_from_u64(41);
        let vs: Vec<CVector> = (0..3).map(|_| random::pure_vector(&mut rng, 2)).collect();
        let perm = [2, 0, 1];
        let inv = inverse_permutation(&perm);
        let lhs = permutation_unitary(&perm, 2).unwrap() * tensor_vectors(&tensor_vectors(&vs[0], &vs[1]), &vs[2]);
        let rhs = tensor_vectors(&tensor_vectors(&vs[inv[0]], &vs[inv[1]]), &vs[inv[2]]);
        assert!((lhs - rhs).camax() < 1e-14);
    }

    proptest! {
        #[test]
        fn permutation_representation_is_a_homomorphism(seed in 0u64..1000, d in 2usize..4) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let perms = all_permutations(3);
            let a = &perms[rand::Rng::gen_range(&mut rng, 0..6)];
            let b = &perms[rand::Rng::gen_range(&mut rng, 0..6)];
            let lhs = permutation_unitary(a, d).unwrap() * permutation_unitary(b, d).unwrap();
            let rhs = permutation_unitary(&compose_permutations(a, b), d).unwrap();
            prop_assert!(max_abs(&(lhs - rhs)) < 1e-15);
        }
    }

    #[test]
    fn irrep_dimensions() {
        assert_eq!(permutation_irrep_dim(&[2, 1]), 2);
        assert_eq!(permutation_irrep_dim(&[3, 1]), 3);
        assert_eq!(permutation_irrep_dim(&[2, 2]), 2);
        assert_eq!(unitary_irrep_dim(&[2], 2), 3);
        assert_eq!(unitary_irrep_dim(&[1, 1], 2), 1);
        assert_eq!(unitary_irrep_dim(&[2, 1], 3), 8);
        for (n, d) in [(3, 2), (4, 2), (3, 3), (2, 4)] {
            let total: u128 = partitions(n, d)
                .iter()
                .map(|s| unitary_irrep_dim(s, d) * permutation_irrep_dim(s))
                .sum();
            assert_eq!(total, (d as u128).pow(n as u32));
        }
    }

    #[test]
    fn two_qubit_universal_state_is_symmetric_plus_antisymmetric() {
        let u = universal_symmetric_state(2, 2).unwrap();
        let dims: Vec<usize> = u.components.iter().map(|c| c.projector.trace().re.round() as usize).collect();
        assert_eq!(dims, [3, 1]);
        let swap = permutation_unitary(&[1, 0], 2).unwrap();
        let id = CMatrix::identity(4, 4);
        let sym = (&id + &swap) * re(0.5);
        let anti = (&id - &swap) * re(0.5);
        let expect = (sym * re(1.0 / 3.0) + anti) * re(0.5);
        assert!(max_abs(&(u.state.matrix() - expect)) < 1e-12);
        assert_eq!(u.v, 6.0);
        assert!(u.v <= 16.0);
    }

    #[test]
    fn single_copy_universal_state_is_maximally_mixed() {
        for d in 2..=4 {
            let u = universal_symmetric_state(1, d).unwrap();
            assert!(max_abs(&(u.state.matrix() - CMatrix::identity(d, d) * re(1.0 / d as f64))) < 1e-12);
            assert_eq!(u.v, d as f64);
        }
    }

    #[test]
    fn universal_state_invariants() {
        for (n, d) in [(2, 2), (3, 2), (4, 2), (5, 2), (8, 2), (2, 3), (3, 3), (4, 3), (2, 4)] {
            let u = universal_symmetric_state(n, d).unwrap();
            assert!(permutation_deviation(u.state.matrix(), d, n).unwrap() < 1e-10);
            assert!(u.v <= u.general_bound, "n = {n}, d = {d}: {} > {}", u.v, u.general_bound);
            let count = crate::operator::distinct_eigenvalue_count(u.state.operator()) as f64;
            assert!(count <= u.v);
            assert!(u.margin >= -DOMINANCE_TOL);
            assert!((u.state.matrix().trace().re - 1.0).abs() < 1e-10);
        }
        assert_eq!(universal_symmetric_state(3, 2).unwrap().v, 8.0);
        let four = universal_symmetric_state(4, 2).unwrap();
        assert_eq!(four.v, 15.0);
        assert!(four.general_bound == 25.0);
        assert!(matches!(universal_symmetric_state(9, 2), Err(Error::SizeLimit(_))));
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]
        #[test]
        fn universal_state_dominates_symmetric_states(seed in 0u64..10_000, rank in 1usize..9) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let u = universal_symmetric_state(3, 2).unwrap();
            let rho = symmetrize(&random::density_of_rank(&mut rng, 8, rank), 2, 3).unwrap();
            prop_assert!(u.dominance_margin(&rho) >= -1e-9);
        }
    }

    #[test]
    fn trivial_pinching_keeps_the_channel() {
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        let ch = random::channel(&mut rng, 2, 2, 2);
        let p = pinched_channel(&ch, 1).unwrap();
        let rho = random::density(&mut rng, 2);
        assert!(max_abs(&(p.apply_matrix(&rho) - ch.apply_matrix(&rho))) < 1e-12);
    }

    #[test]
    fn pinched_identity_block_diagonalizes() {
        let mut rng = ChaCha8Rng::seed_from_u64(43);
        let p = pinched_channel(&QuantumChannel::identity(2), 2).unwrap();
        let u = universal_symmetric_state(2, 2).unwrap();
        let x = random::density(&mut rng, 4);
        let out = p.apply_matrix(&x);
        assert!((out.trace().re - 1.0).abs() < 1e-12);
        assert!(max_abs(&(&out - u.pinching().apply(&x))) < 1e-12);
        assert!(max_abs(&(&out * u.state.matrix() - u.state.matrix() * &out)) < 1e-12);
    }

    #[test]
    fn pinched_depolarizing_composes() {
        let mut rng = ChaCha8Rng::seed_from_u64(44);
        let ch = QuantumChannel::depolarizing(2, 0.3).unwrap();
        let p = pinched_channel(&ch, 2).unwrap();
        let pinch = universal_symmetric_state(2, 2).unwrap().pinching();
        let two = ch.tensor_power(2);
        for _ in 0..5 {
            let x = random::density(&mut rng, 4);
            assert!(max_abs(&(p.apply_matrix(&x) - pinch.apply(&two.apply_matrix(&x)))) < 1e-10);
        }
        assert!(matches!(pinched_channel(&ch, 7), Err(Error::SizeLimit(_))));
    }

    #[test]
    fn pinched_channel_is_permutation_covariant() {
        let mut rng = ChaCha8Rng::seed_from_u64(45);
        let ch = random::channel(&mut rng, 2, 2, 2);
        for m in [2, 3] {
            let p = pinched_channel(&ch, m).unwrap();
            let dim = 1 << m;
            for perm in all_permutations(m) {
                let x = random::density(&mut rng, dim);
                let lhs = p.apply_matrix(&conjugate_by_permutation(&x, &perm, 2).unwrap());
                let rhs = conjugate_by_permutation(&p.apply_matrix(&x), &perm, 2).unwrap();
                assert!(max_abs(&(lhs - rhs)) < 1e-9);
            }
        }
    }

    #[test]
    fn symmetric_marginal_minimizer_suffices() {
        use crate::divergence::{log_euclidean_raw, RenyiOrder};
        use crate::optimize::log_euclidean_mutual_info;
        let mut rng = ChaCha8Rng::seed_from_u64(46);
        let ch = random::channel(&mut rng, 2, 2, 2);
        let p = pinched_channel(&ch, 2).unwrap();
        let psi = PureState::normalized(random::pure_vector(&mut rng, 4), &[2, 2]).unwrap();
        let v = tensor_power_grouped(&psi, 2).unwrap();
        let rho = p.apply_to_second(&(&v * v.adjoint()), 4);
        let state = DensityOperator::new(rho.clone(), &[4, 4]).unwrap();
        let alpha = 1.5;
        let min = log_euclidean_mutual_info(&state, RenyiOrder::new(alpha).unwrap()).unwrap();
        let rho_a = partial_trace_matrix(&rho, &[4, 4], &[0]).unwrap();
        let sym = symmetrize(min.sigma.matrix(), 2, 2).unwrap();
        let at_sym = log_euclidean_raw(&rho, &tensor_product(&rho_a, &sym), alpha).unwrap().value();
        assert!((at_sym - min.value).abs() < 1e-5, "{at_sym} vs {}", min.value);
        assert!(permutation_deviation(min.sigma.matrix(), 2, 2).unwrap() < 1e-3);
    }
}
