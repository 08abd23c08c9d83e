//! Entropic functionals in bits.
//!
//! The sandwiched divergence follows the support rules of its definition:
//! `+∞` if `α > 1` and `supp ρ ⊄ supp σ`, or if `α < 1` and `ρ ⟂ σ`. The
//! log-Euclidean divergence is `+∞` if `α > 1` and `supp ρ ⊄ supp σ`, or if
//! `α < 1` and the supports intersect trivially. Singular pairs that are
//! finite are evaluated as the limit of the `ε`-regularized trace, see
//! [`log_euclidean_divergence`].

use alloc::vec;
use alloc::vec::Vec;

use crate::operator::{
    eigh, entropy_of, log2_sum_powers, log2_trace_exp2, max_abs, min_eigenvalue, re, CMatrix,
    DensityOperator, Eigensystem, HermitianOperator, StateEnsemble, PSD_CLIP, SUPPORT_LEAK,
};
use crate::{Error, Result};

/// Rényi order `α ∈ (0,1) ∪ (1,∞)` or the `α → 1` limit.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RenyiOrder {
    alpha: f64,
    limit: bool,
}

impl RenyiOrder {
    pub fn new(alpha: f64) -> Result<Self> {
        if !(alpha.is_finite() && alpha > 0.0) || alpha == 1.0 {
            return Err(Error::InvalidOrder(alpha));
        }
        Ok(Self {
            alpha,
            limit: false,
        })
    }

    /// The `α → 1` limit (relative entropy).
    pub fn limit() -> Self {
        Self {
            alpha: 1.0,
            limit: true,
        }
    }

    /// `α = 1/(1-λ)`, so `λ = (α-1)/α`. `λ = 0` gives the limit marker.
    pub fn from_lambda(lambda: f64) -> Result<Self> {
        if !(lambda.is_finite() && lambda < 1.0) {
            return Err(Error::InvalidOrder(1.0 / (1.0 - lambda)));
        }
        if lambda == 0.0 {
            return Ok(Self::limit());
        }
        Self::new(1.0 / (1.0 - lambda))
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn lambda(&self) -> f64 {
        (self.alpha - 1.0) / self.alpha
    }

    pub fn is_limit(&self) -> bool {
        self.limit
    }
}

/// A divergence value in bits, possibly `+∞` by a support condition.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum DivergenceValue {
    Finite(f64),
    InfiniteBySupport,
}

impl DivergenceValue {
    pub fn is_finite(&self) -> bool {
        matches!(self, Self::Finite(_))
    }

    pub fn finite(&self) -> Option<f64> {
        match *self {
            Self::Finite(v) => Some(v),
            Self::InfiniteBySupport => None,
        }
    }

    /// The value as an extended real `f64` (`+∞` for the infinite variant).
    pub fn value(&self) -> f64 {
        self.finite().unwrap_or(f64::INFINITY)
    }
}

fn check_psd(sigma: &HermitianOperator) -> Result<()> {
    let lmin = min_eigenvalue(sigma.matrix());
    if lmin < -PSD_CLIP * max_abs(sigma.matrix()).max(1.0) {
        return Err(Error::NotPositive {
            min_eigenvalue: lmin,
        });
    }
    Ok(())
}

fn check_same_dim(a: usize, b: usize) -> Result<()> {
    if a != b {
        return Err(Error::Shape(alloc::format!("dimensions differ: {a} vs {b}")));
    }
    Ok(())
}

/// Diagonal of `V† ρ V` (weights of `ρ` on the eigenvectors of `σ`).
fn weights_in_basis(rho: &CMatrix, eig: &Eigensystem) -> Vec<f64> {
    let w = rho * &eig.vectors;
    (0..eig.dim())
        .map(|k| {
            let mut s = 0.0;
            for i in 0..eig.dim() {
                s += (eig.vectors[(i, k)].conj() * w[(i, k)]).re;
            }
            s
        })
        .collect()
}

/// Weight of `ρ` outside the support of `σ`.
fn support_leak(rho: &CMatrix, sigma: &Eigensystem) -> f64 {
    let t = sigma.support_threshold();
    weights_in_basis(rho, sigma)
        .iter()
        .zip(&sigma.values)
        .filter(|(_, &v)| v <= t)
        .map(|(w, _)| *w)
        .sum()
}

/// Weight of `ρ` inside the support of `σ`.
fn support_overlap(rho: &CMatrix, sigma: &Eigensystem) -> f64 {
    let t = sigma.support_threshold();
    weights_in_basis(rho, sigma)
        .iter()
        .zip(&sigma.values)
        .filter(|(_, &v)| v > t)
        .map(|(w, _)| *w)
        .sum()
}

/// `supp ρ ∩ supp σ = {0}` up to a principal-angle tolerance.
fn supports_intersect_trivially(rho: &Eigensystem, sigma: &Eigensystem) -> bool {
    intersection_dim(rho, sigma) == 0
}

pub(crate) fn relative_entropy_raw(rho: &CMatrix, sigma: &CMatrix) -> DivergenceValue {
    relative_entropy_eig(rho, &eigh(rho), &eigh(sigma))
}

fn relative_entropy_eig(rho: &CMatrix, er: &Eigensystem, es: &Eigensystem) -> DivergenceValue {
    if support_leak(rho, es) > SUPPORT_LEAK {
        return DivergenceValue::InfiniteBySupport;
    }
    let t = es.support_threshold();
    let cross: f64 = weights_in_basis(rho, es)
        .iter()
        .zip(&es.values)
        .filter(|(_, &v)| v > t)
        .map(|(w, &v)| w * libm::log2(v))
        .sum();
    DivergenceValue::Finite(-entropy_of(&er.clipped()) - cross)
}

/// `D(ρ‖σ) = tr ρ(log ρ - log σ)`, `+∞` unless `supp ρ ⊆ supp σ`.
pub fn relative_entropy(rho: &DensityOperator, sigma: &HermitianOperator) -> Result<DivergenceValue> {
    check_same_dim(rho.dim(), sigma.dim())?;
    check_psd(sigma)?;
    Ok(relative_entropy_raw(rho.matrix(), sigma.matrix()))
}

/// `log₂ tr (σ^s ρ σ^s)^α` with `s = (1-α)/(2α)`, `σ^s` taken on the support.
pub(crate) fn sandwiched_log_trace(rho: &CMatrix, sigma_pow: &CMatrix, alpha: f64) -> f64 {
    let x = sigma_pow * rho * sigma_pow;
    log2_sum_powers(&crate::operator::eigvalsh(&x), alpha)
}

pub(crate) fn sandwiched_raw(rho: &CMatrix, sigma: &CMatrix, alpha: f64) -> DivergenceValue {
    let es = eigh(sigma);
    if alpha > 1.0 && support_leak(rho, &es) > SUPPORT_LEAK {
        return DivergenceValue::InfiniteBySupport;
    }
    if alpha < 1.0 && support_overlap(rho, &es) <= SUPPORT_LEAK {
        return DivergenceValue::InfiniteBySupport;
    }
    let s = (1.0 - alpha) / (2.0 * alpha);
    let sp = es.support_function(|v| libm::pow(v, s));
    DivergenceValue::Finite(sandwiched_log_trace(rho, &sp, alpha) / (alpha - 1.0))
}

/// `D*_α(ρ‖σ) = (1/(α-1)) log tr(σ^{(1-α)/2α} ρ σ^{(1-α)/2α})^α`.
pub fn sandwiched_divergence(
    rho: &DensityOperator,
    sigma: &HermitianOperator,
    order: RenyiOrder,
) -> Result<DivergenceValue> {
    check_same_dim(rho.dim(), sigma.dim())?;
    check_psd(sigma)?;
    if order.is_limit() {
        return Ok(relative_entropy_raw(rho.matrix(), sigma.matrix()));
    }
    Ok(sandwiched_raw(rho.matrix(), sigma.matrix(), order.alpha()))
}

/// `log₂(1/ε)` for the regularization parameters of the singular
/// log-Euclidean evaluation: `ε = 2^{-32}, 2^{-64}, …, 2^{-2048}`.
///
/// Only `log ε` ever enters the computation, so these tiny values are exact.
pub const LOG_INV_EPSILON_SCHEDULE: [f64; 7] = [32.0, 64.0, 128.0, 256.0, 512.0, 1024.0, 2048.0];
/// Convergence threshold on the last two extrapolants.
pub const EXTRAPOLATION_TOL: f64 = 1e-6;

/// Neville extrapolants at `x = 0`: entry `k` interpolates the last `k+1` points.
pub(crate) fn neville_at_zero(xs: &[f64], ys: &[f64]) -> Vec<f64> {
    let n = xs.len();
    let mut p = ys.to_vec();
    let mut out = vec![ys[n - 1]];
    // p[i] holds the interpolant through points i-k..=i after round k.
    for k in 1..n {
        for i in (k..n).rev() {
            let (xa, xb) = (xs[i - k], xs[i]);
            p[i] = (xb * p[i - 1] - xa * p[i]) / (xb - xa);
        }
        out.push(p[n - 1]);
    }
    out
}

/// Result of an `ε`-extrapolated trace.
#[derive(Clone, Debug, PartialEq)]
pub struct Extrapolation {
    pub log_inv_epsilons: Vec<f64>,
    pub values: Vec<f64>,
    pub extrapolants: Vec<f64>,
    pub limit: f64,
}

/// Extrapolates the regularized log-trace to `ε → 0` in `x = 1/log₂(1/ε)`.
///
/// Inputs are compressed onto `supp(ρ+σ)`. Kernel eigenvalues are replaced
/// by `ε` while support eigenvalues are kept exact, which changes the
/// regularized trace only by `O(ε)`. Only the `r = dim(supp ρ ∩ supp σ)`
/// largest exponent eigenvalues stay bounded as `ε → 0`; the rest decay like
/// a power of `ε`. The bounded group is analytic in `x`, so it is summed
/// alone and extrapolated with Neville's scheme.
pub(crate) fn extrapolate_log_trace(rho: &CMatrix, sigma: &CMatrix, alpha: f64) -> Result<Extrapolation> {
    let er = eigh(rho);
    let es = eigh(sigma);
    let r = intersection_dim(&er, &es);
    if r == 0 {
        return Err(Error::Extrapolation {
            log_inv_epsilons: LOG_INV_EPSILON_SCHEDULE.to_vec(),
            values: Vec::new(),
            extrapolants: Vec::new(),
        });
    }
    let (tr, ts) = (er.support_threshold(), es.support_threshold());
    let mut xs = Vec::with_capacity(LOG_INV_EPSILON_SCHEDULE.len());
    let mut values = Vec::with_capacity(LOG_INV_EPSILON_SCHEDULE.len());
    for &l in &LOG_INV_EPSILON_SCHEDULE {
        let le = -l;
        let lr = er.reconstruct(|v| if v > tr { libm::log2(v) } else { le });
        let ls = es.reconstruct(|v| if v > ts { libm::log2(v) } else { le });
        let h = lr * re(alpha) + ls * re(1.0 - alpha);
        let mu = crate::operator::eigvalsh(&h);
        let top = &mu[mu.len() - r..];
        let m = top.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let s: f64 = top.iter().map(|&x| libm::exp2(x - m)).sum();
        xs.push(-1.0 / le);
        values.push(m + libm::log2(s));
    }
    let extrapolants = neville_at_zero(&xs, &values);
    let n = extrapolants.len();
    let limit = extrapolants[n - 1];
    if !((extrapolants[n - 1] - extrapolants[n - 2]).abs() < EXTRAPOLATION_TOL) {
        return Err(Error::Extrapolation {
            log_inv_epsilons: LOG_INV_EPSILON_SCHEDULE.to_vec(),
            values,
            extrapolants,
        });
    }
    Ok(Extrapolation {
        log_inv_epsilons: LOG_INV_EPSILON_SCHEDULE.to_vec(),
        values,
        extrapolants,
        limit,
    })
}

/// `dim(supp ρ ∩ supp σ)`.
fn intersection_dim(rho: &Eigensystem, sigma: &Eigensystem) -> usize {
    let pr = rho.support_projector();
    let ps = sigma.support_projector();
    let m = &pr * &ps * &pr;
    crate::operator::eigvalsh(&m)
        .iter()
        .filter(|&&v| v > 1.0 - 1e-8)
        .count()
}

/// `log₂` of the log-Euclidean trace functional, `None` when infinite.
pub(crate) fn log_euclidean_log_trace(rho: &CMatrix, sigma: &CMatrix, alpha: f64) -> Result<Option<f64>> {
    let er = eigh(rho);
    let es = eigh(sigma);
    if alpha > 1.0 && support_leak(rho, &es) > SUPPORT_LEAK {
        return Ok(None);
    }
    if alpha < 1.0 && supports_intersect_trivially(&er, &es) {
        return Ok(None);
    }
    // On the common kernel the regularized exponent is log ε, contributing
    // dim·ε to the trace, so compressing onto supp(ρ+σ) leaves the limit intact.
    let v = eigh(&(rho + sigma)).support_isometry();
    let rc = v.adjoint() * rho * &v;
    let sc = v.adjoint() * sigma * &v;
    let erc = eigh(&rc);
    let esc = eigh(&sc);
    let full = |e: &Eigensystem| e.rank() == e.dim();
    if full(&erc) && full(&esc) {
        let h = erc.reconstruct(libm::log2) * re(alpha) + esc.reconstruct(libm::log2) * re(1.0 - alpha);
        return Ok(Some(log2_trace_exp2(&h)));
    }
    if alpha > 1.0 && full(&esc) {
        // The kernel of ρ enters with weight α log ε → -∞, so the limit is the
        // exponential of the exponent compressed onto supp ρ.
        let v = erc.support_isometry();
        let h = v.adjoint() * (erc.support_function(libm::log2) * re(alpha) + esc.reconstruct(libm::log2) * re(1.0 - alpha)) * &v;
        return Ok(Some(log2_trace_exp2(&h)));
    }
    Ok(Some(extrapolate_log_trace(&rc, &sc, alpha)?.limit))
}

pub(crate) fn log_euclidean_raw(rho: &CMatrix, sigma: &CMatrix, alpha: f64) -> Result<DivergenceValue> {
    Ok(match log_euclidean_log_trace(rho, sigma, alpha)? {
        Some(q) => DivergenceValue::Finite(q / (alpha - 1.0)),
        None => DivergenceValue::InfiniteBySupport,
    })
}

/// `D♭_α(ρ‖σ) = (1/(α-1)) log tr 2^{α log ρ + (1-α) log σ}`.
///
/// For singular pairs that are not infinite by support, the regularized
/// trace is evaluated on [`LOG_INV_EPSILON_SCHEDULE`] and extrapolated to `ε = 0`;
/// failure to converge is reported with the whole sequence.
pub fn log_euclidean_divergence(
    rho: &DensityOperator,
    sigma: &HermitianOperator,
    order: RenyiOrder,
) -> Result<DivergenceValue> {
    check_same_dim(rho.dim(), sigma.dim())?;
    check_psd(sigma)?;
    if order.is_limit() {
        return Ok(relative_entropy_raw(rho.matrix(), sigma.matrix()));
    }
    log_euclidean_raw(rho.matrix(), sigma.matrix(), order.alpha())
}

pub(crate) fn entropy_raw(rho: &CMatrix) -> f64 {
    entropy_of(&eigh(rho).clipped())
}

/// `H(ρ) = -tr ρ log ρ`.
pub fn von_neumann_entropy(rho: &DensityOperator) -> f64 {
    entropy_raw(rho.matrix())
}

pub(crate) fn mutual_information_raw(rho: &CMatrix, da: usize, db: usize) -> f64 {
    let dims = [da, db];
    let a = crate::operator::partial_trace_matrix(rho, &dims, &[0]).expect("dims checked");
    let b = crate::operator::partial_trace_matrix(rho, &dims, &[1]).expect("dims checked");
    entropy_raw(&a) + entropy_raw(&b) - entropy_raw(rho)
}

/// `I(A:B) = D(ρ_AB‖ρ_A⊗ρ_B)` for a state with two declared subsystems.
pub fn mutual_information(rho_ab: &DensityOperator) -> Result<f64> {
    let d = rho_ab.dims();
    if d.len() != 2 {
        return Err(Error::Shape(alloc::format!(
            "mutual information needs two subsystems, got {d:?}"
        )));
    }
    Ok(mutual_information_raw(rho_ab.matrix(), d[0], d[1]).max(0.0))
}

/// `χ = Σ p_x D(ρ_x‖ρ̄) = H(ρ̄) - Σ p_x H(ρ_x)`.
pub fn holevo_information(ensemble: &StateEnsemble) -> f64 {
    let avg = ensemble.average();
    let mixed: f64 = ensemble
        .items()
        .iter()
        .map(|(q, s)| q * von_neumann_entropy(s))
        .sum();
    (von_neumann_entropy(&avg) - mixed).max(0.0)
}

pub(crate) fn fidelity_raw(rho: &CMatrix, sigma: &CMatrix) -> f64 {
    let sr = crate::operator::psd_sqrt(rho);
    let m = &sr * sigma * &sr;
    let f: f64 = crate::operator::eigvalsh(&m)
        .iter()
        .map(|&v| libm::sqrt(v.max(0.0)))
        .sum();
    f.clamp(0.0, 1.0)
}

/// `F(ρ,σ) = ‖√ρ√σ‖₁`.
pub fn fidelity(rho: &DensityOperator, sigma: &DensityOperator) -> Result<f64> {
    check_same_dim(rho.dim(), sigma.dim())?;
    Ok(fidelity_raw(rho.matrix(), sigma.matrix()))
}

/// Classical Rényi divergence `(1/(α-1)) log Σ p^α q^{1-α}` (`α → 1`: KL).
pub fn classical_renyi(p: &[f64], q: &[f64], order: RenyiOrder) -> DivergenceValue {
    let a = order.alpha();
    if order.is_limit() {
        let mut s = 0.0;
        for (&pi, &qi) in p.iter().zip(q) {
            if pi > 0.0 {
                if qi <= 0.0 {
                    return DivergenceValue::InfiniteBySupport;
                }
                s += pi * libm::log2(pi / qi);
            }
        }
        return DivergenceValue::Finite(s);
    }
    let mut s = 0.0;
    for (&pi, &qi) in p.iter().zip(q) {
        if pi > 0.0 && qi <= 0.0 && a > 1.0 {
            return DivergenceValue::InfiniteBySupport;
        }
        if pi > 0.0 && qi > 0.0 {
            s += libm::pow(pi, a) * libm::pow(qi, 1.0 - a);
        }
    }
    if s <= 0.0 {
        return DivergenceValue::InfiniteBySupport;
    }
    DivergenceValue::Finite(libm::log2(s) / (a - 1.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operator::PureState;
    use crate::random;
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn diag(p: &[f64]) -> DensityOperator {
        DensityOperator::from_diagonal(p).unwrap()
    }

    fn herm(p: &[f64]) -> HermitianOperator {
        HermitianOperator::from_real_diagonal(p)
    }

    fn order(a: f64) -> RenyiOrder {
        RenyiOrder::new(a).unwrap()
    }

    #[test]
    fn order_validation_and_lambda() {
        assert!(RenyiOrder::new(1.0).is_err());
        assert!(RenyiOrder::new(0.0).is_err());
        assert!(RenyiOrder::new(f64::NAN).is_err());
        let o = RenyiOrder::from_lambda(0.5).unwrap();
        assert!((o.alpha() - 2.0).abs() < 1e-15);
        assert!((o.lambda() - 0.5).abs() < 1e-15);
        assert!(RenyiOrder::from_lambda(0.0).unwrap().is_limit());
        assert!(RenyiOrder::from_lambda(1.0).is_err());
    }

    #[test]
    fn relative_entropy_examples() {
        let rho = diag(&[0.5, 0.5]);
        assert!(relative_entropy(&rho, rho.operator()).unwrap().value().abs() < 1e-14);
        let kl = 0.5 * libm::log2(2.0) + 0.5 * libm::log2(2.0 / 3.0);
        let v = relative_entropy(&rho, &herm(&[0.25, 0.75])).unwrap().value();
        assert!((v - kl).abs() < 1e-12);
        assert!((v - 0.2075).abs() < 1e-4);
        let v = relative_entropy(&diag(&[1.0, 0.0]), &herm(&[0.0, 1.0])).unwrap();
        assert_eq!(v, DivergenceValue::InfiniteBySupport);
    }

    #[test]
    fn sandwiched_examples() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let rho = DensityOperator::from_matrix(random::density(&mut rng, 3)).unwrap();
        for a in [0.5, 2.0, 5.0] {
            let v = sandwiched_divergence(&rho, rho.operator(), order(a)).unwrap();
            assert!(v.value().abs() < 1e-12);
        }
        let v = sandwiched_divergence(&diag(&[0.5, 0.5]), &herm(&[0.25, 0.75]), order(2.0)).unwrap();
        let oracle = libm::log2(0.25 / 0.25 + 0.25 / 0.75);
        assert!((v.value() - oracle).abs() < 1e-12);
        assert!((v.value() - 0.41504).abs() < 1e-5);
        let v = sandwiched_divergence(&diag(&[1.0, 0.0]), &herm(&[0.5, 0.5]), order(2.0)).unwrap();
        assert!((v.value() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn sandwiched_support_rules() {
        let p0 = diag(&[1.0, 0.0]);
        let s1 = herm(&[0.0, 1.0]);
        assert!(!sandwiched_divergence(&p0, &s1, order(2.0)).unwrap().is_finite());
        assert!(!sandwiched_divergence(&p0, &s1, order(0.7)).unwrap().is_finite());
        // Overlapping but not contained: finite below one, infinite above.
        let rho = diag(&[0.5, 0.5]);
        let s = herm(&[1.0, 0.0]);
        assert!(sandwiched_divergence(&rho, &s, order(0.7)).unwrap().is_finite());
        assert!(!sandwiched_divergence(&rho, &s, order(1.5)).unwrap().is_finite());
    }

    #[test]
    fn log_euclidean_examples() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let rho = DensityOperator::from_matrix(random::density(&mut rng, 3)).unwrap();
        assert!(log_euclidean_divergence(&rho, rho.operator(), order(2.0)).unwrap().value().abs() < 1e-12);
        let v = log_euclidean_divergence(&diag(&[1.0, 0.0]), &herm(&[0.0, 1.0]), order(2.0)).unwrap();
        assert_eq!(v, DivergenceValue::InfiniteBySupport);
        let p = [0.2, 0.3, 0.5];
        let q = [0.6, 0.1, 0.3];
        for a in [0.3, 0.6, 2.0, 3.0] {
            let le = log_euclidean_divergence(&diag(&p), &herm(&q), order(a)).unwrap().value();
            let sw = sandwiched_divergence(&diag(&p), &herm(&q), order(a)).unwrap().value();
            let cl = classical_renyi(&p, &q, order(a)).value();
            assert!((le - cl).abs() < 1e-10 && (sw - cl).abs() < 1e-10);
        }
    }

    /// `lim_ε tr 2^{α log(ρ+ε) + (1-α) log(σ+ε)} = tr P 2^{P(α log ρ + (1-α) log σ)P}`
    /// with `P` the projector onto `supp ρ ∩ supp σ`; for `supp ρ ⊆ supp σ` that is `Π_ρ`.
    fn projected_oracle(rho: &CMatrix, sigma: &CMatrix, alpha: f64) -> f64 {
        let v = eigh(rho).support_isometry();
        let lr = crate::operator::psd_log2(rho);
        let ls = crate::operator::psd_log2(sigma);
        let h = v.adjoint() * (lr * re(alpha) + ls * re(1.0 - alpha)) * &v;
        log2_trace_exp2(&h) / (alpha - 1.0)
    }

    #[test]
    fn singular_log_euclidean_matches_projected_limit() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..10 {
            let rho = random::density_of_rank(&mut rng, 4, 2);
            let sigma = random::density(&mut rng, 4);
            for a in [1.5, 2.0, 4.0] {
                let v = log_euclidean_raw(&rho, &sigma, a).unwrap().value();
                let o = projected_oracle(&rho, &sigma, a);
                assert!((v - o).abs() < 1e-9, "alpha {a}: {v} vs {o}");
                let e = extrapolate_log_trace(&rho, &sigma, a).unwrap().limit / (a - 1.0);
                assert!((e - o).abs() < 1e-6, "alpha {a}: {e} vs {o}");
            }
        }
    }

    #[test]
    fn maximally_entangled_against_product() {
        let phi = PureState::maximally_entangled(2).density();
        let pp = CMatrix::identity(4, 4) * re(0.25);
        for a in [1.5, 2.0, 5.0] {
            let v = log_euclidean_raw(phi.matrix(), &pp, a).unwrap().value();
            assert!((v - 2.0).abs() < 1e-10, "{v}");
            let w = sandwiched_raw(phi.matrix(), &pp, a).value();
            assert!((w - 2.0).abs() < 1e-12);
        }
    }

    #[test]
    fn entropy_examples() {
        assert!(von_neumann_entropy(&diag(&[1.0, 0.0])).abs() < 1e-15);
        assert!((von_neumann_entropy(&diag(&[0.5, 0.5])) - 1.0).abs() < 1e-15);
        let h = -0.75 * libm::log2(0.75) - 0.25 * libm::log2(0.25);
        assert!((von_neumann_entropy(&diag(&[0.75, 0.25])) - h).abs() < 1e-14);
        assert!((h - 0.8113).abs() < 1e-4);
    }

    #[test]
    fn mutual_information_examples() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let a = DensityOperator::from_matrix(random::density(&mut rng, 2)).unwrap();
        let b = DensityOperator::from_matrix(random::density(&mut rng, 3)).unwrap();
        assert!(mutual_information(&a.tensor(&b)).unwrap().abs() < 1e-12);
        let phi = PureState::maximally_entangled(2).density();
        assert!((mutual_information(&phi).unwrap() - 2.0).abs() < 1e-12);
        let werner = phi.matrix() * re(0.925) + (CMatrix::identity(4, 4) - phi.matrix()) * re(0.025);
        let w = DensityOperator::new(werner, &[2, 2]).unwrap();
        let oracle = 1.0 + 1.0 - entropy_of(&[0.925, 0.025, 0.025, 0.025]);
        assert!((mutual_information(&w).unwrap() - oracle).abs() < 1e-12);
        let d = relative_entropy_raw(w.matrix(), &(CMatrix::identity(4, 4) * re(0.25))).value();
        assert!((d - oracle).abs() < 1e-12);
    }

    #[test]
    fn holevo_examples() {
        let e = StateEnsemble::new(vec![(0.5, diag(&[1.0, 0.0])), (0.5, diag(&[0.0, 1.0]))]).unwrap();
        assert!((holevo_information(&e) - 1.0).abs() < 1e-14);
        assert!(holevo_information(&StateEnsemble::single(diag(&[0.3, 0.7]))).abs() < 1e-14);
        let plus = PureState::new(
            crate::operator::CVector::from_vec(vec![re(libm::sqrt(0.5)), re(libm::sqrt(0.5))]),
            &[2],
        )
        .unwrap()
        .density();
        let e = StateEnsemble::new(vec![(0.5, diag(&[1.0, 0.0])), (0.5, plus)]).unwrap();
        let l = (1.0 + core::f64::consts::FRAC_1_SQRT_2) / 2.0;
        let oracle = entropy_of(&[l, 1.0 - l]);
        assert!((holevo_information(&e) - oracle).abs() < 1e-12);
        assert!((oracle - 0.6009).abs() < 1e-4);
    }

    #[test]
    fn fidelity_examples() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let rho = DensityOperator::from_matrix(random::density(&mut rng, 3)).unwrap();
        assert!((fidelity(&rho, &rho).unwrap() - 1.0).abs() < 1e-10);
        assert!(fidelity(&diag(&[1.0, 0.0]), &diag(&[0.0, 1.0])).unwrap() < 1e-12);
        let f = fidelity(&diag(&[1.0, 0.0]), &diag(&[0.5, 0.5])).unwrap();
        assert!((f - core::f64::consts::FRAC_1_SQRT_2).abs() < 1e-12);
        let sigma = DensityOperator::from_matrix(random::density(&mut rng, 3)).unwrap();
        let (f1, f2) = (fidelity(&rho, &sigma).unwrap(), fidelity(&sigma, &rho).unwrap());
        assert!((f1 - f2).abs() < 1e-10);
    }

    #[test]
    fn neville_reproduces_polynomials() {
        let xs = [0.1, 0.2, 0.3, 0.5];
        let ys: Vec<f64> = xs.iter().map(|x| 2.0 - 3.0 * x + x * x).collect();
        let e = neville_at_zero(&xs, &ys);
        assert!((e[2] - 2.0).abs() < 1e-12 && (e[3] - 2.0).abs() < 1e-12);
    }

    #[test]
    fn singular_below_one_matches_projected_limit() {
        // Overlapping singular supports: the limit lives on the intersection.
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        for _ in 0..5 {
            let u = random::unitary(&mut rng, 3);
            let a = random::density(&mut rng, 2);
            let b = random::density(&mut rng, 2);
            let mut ra = CMatrix::zeros(3, 3);
            ra.view_mut((0, 0), (2, 2)).copy_from(&a);
            let mut sb = CMatrix::zeros(3, 3);
            sb.view_mut((1, 1), (2, 2)).copy_from(&b);
            let (rho, sigma) = (&u * ra * u.adjoint(), &u * sb * u.adjoint());
            for alpha in [0.3, 0.7] {
                let v = log_euclidean_raw(&rho, &sigma, alpha).unwrap().value();
                let p = u.column(1).into_owned();
                let lr = crate::operator::psd_log2(&rho);
                let ls = crate::operator::psd_log2(&sigma);
                let h = (p.adjoint() * (lr * re(alpha) + ls * re(1.0 - alpha)) * &p)[(0, 0)].re;
                assert!((v - h / (alpha - 1.0)).abs() < 1e-9, "{v} vs {}", h / (alpha - 1.0));
            }
        }
    }

    #[test]
    fn extrapolation_needs_an_intersection() {
        let p0 = CMatrix::from_diagonal(&crate::operator::CVector::from_vec(vec![re(1.0), re(0.0)]));
        let p1 = CMatrix::from_diagonal(&crate::operator::CVector::from_vec(vec![re(0.0), re(1.0)]));
        assert!(matches!(
            extrapolate_log_trace(&p0, &p1, 0.5),
            Err(Error::Extrapolation { .. })
        ));
        assert_eq!(log_euclidean_raw(&p0, &p1, 0.5).unwrap(), DivergenceValue::InfiniteBySupport);
    }

    fn pair(seed: u64, d: usize) -> (CMatrix, CMatrix) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (random::density(&mut rng, d), random::density(&mut rng, d))
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]

        #[test]
        fn divergences_are_nonnegative(seed in 0u64..1_000_000, d in 2usize..=4, a in 0.5f64..6.0) {
            prop_assume!((a - 1.0).abs() > 1e-3);
            let (rho, sigma) = pair(seed, d);
            prop_assert!(sandwiched_raw(&rho, &sigma, a).value() >= -1e-10);
            prop_assert!(log_euclidean_raw(&rho, &sigma, a).unwrap().value() >= -1e-10);
            prop_assert!(relative_entropy_raw(&rho, &sigma).value() >= -1e-10);
        }

        #[test]
        fn log_euclidean_below_sandwiched_above_one(seed in 0u64..1_000_000, d in 2usize..=4, a in 1.01f64..6.0) {
            // Golden-Thompson gives D♭ ≤ D* for α > 1.
            let (rho, sigma) = pair(seed, d);
            let s = sandwiched_raw(&rho, &sigma, a).value();
            let l = log_euclidean_raw(&rho, &sigma, a).unwrap().value();
            prop_assert!(l <= s + 1e-9);
        }

        #[test]
        fn unitary_invariance(seed in 0u64..1_000_000, d in 2usize..=4, a in 0.5f64..4.0) {
            prop_assume!((a - 1.0).abs() > 1e-3);
            let (rho, sigma) = pair(seed, d);
            let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0xabc);
            let u = random::unitary(&mut rng, d);
            let r2 = &u * &rho * u.adjoint();
            let s2 = &u * &sigma * u.adjoint();
            let x = sandwiched_raw(&rho, &sigma, a).value();
            let y = sandwiched_raw(&r2, &s2, a).value();
            prop_assert!((x - y).abs() < 1e-9);
        }
    }
}
