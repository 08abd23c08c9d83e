//! Rényi mutual information: `min_σ D_α(ρ_AB‖ρ_A⊗σ_B)` for the sandwiched and
//! log-Euclidean divergences.
//!
//! Both objectives are convex in `σ`. Before solving, `A` is compressed onto
//! `supp ρ_A` and `B` onto `supp ρ_B`; a minimizer always lives there.

use alloc::format;
use alloc::vec::Vec;

use super::calculus::{frechet, log2_divided, power_divided};
use super::solver::{minimize, BlockObjective, HermitianBasis, SolverOptions};
use crate::divergence::{log_euclidean_log_trace, sandwiched_log_trace, RenyiOrder};
use crate::operator::{
    eigh, log2_sum_powers, partial_trace_matrix, re, tensor_product, CMatrix, DensityOperator,
    Eigensystem,
};
use crate::{Error, Result};

const LN2: f64 = core::f64::consts::LN_2;

/// A minimized Rényi mutual information.
#[derive(Clone, Debug, PartialEq)]
pub struct MarginalMinimum {
    /// Value in bits.
    pub value: f64,
    /// The minimizing `σ_B`.
    pub sigma: DensityOperator,
    pub iterations: usize,
    /// First-order residual at `sigma` (zero for closed-form cases).
    pub residual: f64,
}

/// `ρ_AB` restricted to `supp ρ_A ⊗ supp ρ_B`.
pub(crate) struct Compressed {
    pub rho: CMatrix,
    pub rho_a: CMatrix,
    pub rho_b: CMatrix,
    pub vb: CMatrix,
    pub ka: usize,
    pub kb: usize,
}

impl Compressed {
    pub fn new(rho: &CMatrix, da: usize, db: usize) -> Self {
        let dims = [da, db];
        let a = partial_trace_matrix(rho, &dims, &[0]).expect("dims checked by caller");
        let b = partial_trace_matrix(rho, &dims, &[1]).expect("dims checked by caller");
        let va = eigh(&a).support_isometry();
        let vb = eigh(&b).support_isometry();
        let v = tensor_product(&va, &vb);
        let rho = v.adjoint() * rho * &v;
        Self {
            rho,
            rho_a: va.adjoint() * a * &va,
            rho_b: vb.adjoint() * b * &vb,
            ka: va.ncols(),
            kb: vb.ncols(),
            vb,
        }
    }

    pub fn expand_b(&self, sigma: &CMatrix) -> CMatrix {
        &self.vb * sigma * self.vb.adjoint()
    }

    pub fn compress_b(&self, sigma: &CMatrix) -> CMatrix {
        let s = self.vb.adjoint() * sigma * &self.vb;
        crate::operator::normalize_psd(&s)
    }
}

/// `tr_A[(a ⊗ 1) z]`.
fn weighted_trace_a(a: &CMatrix, z: &CMatrix, ka: usize, kb: usize) -> CMatrix {
    let mut out = CMatrix::zeros(kb, kb);
    for i in 0..ka {
        for j in 0..ka {
            let w = a[(i, j)];
            if w.norm() == 0.0 {
                continue;
            }
            for b in 0..kb {
                for c in 0..kb {
                    out[(b, c)] += w * z[(j * kb + b, i * kb + c)];
                }
            }
        }
    }
    out
}

/// `σ ↦ D*_α(ρ‖ρ_A⊗σ)` on the compressed space.
pub(crate) struct SandwichedMarginal {
    rho: CMatrix,
    a_pow: CMatrix,
    ka: usize,
    kb: usize,
    alpha: f64,
}

impl SandwichedMarginal {
    pub fn new(c: &Compressed, alpha: f64) -> Self {
        let s = (1.0 - alpha) / (2.0 * alpha);
        Self {
            rho: c.rho.clone(),
            a_pow: eigh(&c.rho_a).reconstruct(|v| libm::pow(v, s)),
            ka: c.ka,
            kb: c.kb,
            alpha,
        }
    }

    fn s(&self) -> f64 {
        (1.0 - self.alpha) / (2.0 * self.alpha)
    }

    pub fn eval(&self, sigma: &CMatrix) -> f64 {
        let e = eigh(sigma);
        if e.min_value() <= 0.0 {
            return f64::INFINITY;
        }
        let s = self.s();
        let sp = e.reconstruct(|v| libm::pow(v, s));
        sandwiched_log_trace(&self.rho, &tensor_product(&self.a_pow, &sp), self.alpha) / (self.alpha - 1.0)
    }

    pub fn grad(&self, sigma: &CMatrix) -> CMatrix {
        let a = self.alpha;
        let es = eigh(sigma);
        let s = self.s();
        let big_s = tensor_product(&self.a_pow, &es.reconstruct(|v| libm::pow(v.max(1e-300), s)));
        let t = &big_s * &self.rho * &big_s;
        let et = eigh(&t);
        let lq = log2_sum_powers(&et.values, a);
        let thr = et.support_threshold();
        let m = et.reconstruct(|v| {
            if v > thr {
                libm::exp2((a - 1.0) * libm::log2(v) - lq)
            } else {
                0.0
            }
        });
        let x = &self.rho * &big_s * m;
        let z = &x + x.adjoint();
        let w = weighted_trace_a(&self.a_pow, &z, self.ka, self.kb);
        frechet(&es, &w, power_divided(s)) * re(a / (LN2 * (a - 1.0)))
    }
}

impl BlockObjective for SandwichedMarginal {
    fn value(&mut self, x: &[CMatrix]) -> Result<f64> {
        Ok(self.eval(&x[0]))
    }

    fn gradient(&mut self, x: &[CMatrix], _: &[HermitianBasis], _: &[f64]) -> Result<Vec<CMatrix>> {
        Ok(alloc::vec![self.grad(&x[0])])
    }
}

/// `σ ↦ D♭_α(ρ‖ρ_A⊗σ)` on the compressed space.
pub(crate) enum FlatMarginal {
    /// `ρ` has full rank, or `α > 1`: with `V` the support isometry of `ρ`,
    /// the value is `log tr 2^{h0 + (1-α) V†(1⊗log σ)V} / (α-1)` where
    /// `h0 = α log ρ|_supp + (1-α) V†(log ρ_A ⊗ 1)V`.
    Smooth { v: CMatrix, h0: CMatrix, ka: usize, alpha: f64 },
    /// `ρ` is singular and `α < 1`; values go through the `ε`-limit.
    Singular { rho: CMatrix, rho_a: CMatrix, alpha: f64 },
}

impl FlatMarginal {
    pub fn new(c: &Compressed, alpha: f64) -> Self {
        let er = eigh(&c.rho);
        if er.rank() == er.dim() || alpha > 1.0 {
            let v = er.support_isometry();
            let lr = v.adjoint() * er.support_function(libm::log2) * &v;
            let la = eigh(&c.rho_a).reconstruct(libm::log2);
            let h0 = lr * re(alpha)
                + v.adjoint() * tensor_product(&la, &CMatrix::identity(c.kb, c.kb)) * &v * re(1.0 - alpha);
            Self::Smooth {
                v,
                h0,
                ka: c.ka,
                alpha,
            }
        } else {
            Self::Singular {
                rho: c.rho.clone(),
                rho_a: c.rho_a.clone(),
                alpha,
            }
        }
    }

    fn exponent(v: &CMatrix, h0: &CMatrix, ka: usize, alpha: f64, es: &Eigensystem) -> CMatrix {
        let ls = tensor_product(&CMatrix::identity(ka, ka), &es.reconstruct(libm::log2));
        h0 + v.adjoint() * ls * v * re(1.0 - alpha)
    }

    pub fn eval(&self, sigma: &CMatrix) -> Result<f64> {
        let es = eigh(sigma);
        if es.min_value() <= 0.0 {
            return Ok(f64::INFINITY);
        }
        match self {
            Self::Smooth { v, h0, ka, alpha } => {
                let k = Self::exponent(v, h0, *ka, *alpha, &es);
                Ok(crate::operator::log2_trace_exp2(&k) / (alpha - 1.0))
            }
            Self::Singular { rho, rho_a, alpha } => {
                let sig = tensor_product(rho_a, sigma);
                match log_euclidean_log_trace(rho, &sig, *alpha)? {
                    Some(q) => Ok(q / (alpha - 1.0)),
                    None => Ok(f64::INFINITY),
                }
            }
        }
    }
}

impl BlockObjective for FlatMarginal {
    fn value(&mut self, x: &[CMatrix]) -> Result<f64> {
        self.eval(&x[0])
    }

    fn gradient(&mut self, x: &[CMatrix], bases: &[HermitianBasis], steps: &[f64]) -> Result<Vec<CMatrix>> {
        match self {
            Self::Smooth { v, h0, ka, alpha } => {
                let es = eigh(&x[0]);
                let k = Self::exponent(v, h0, *ka, *alpha, &es);
                let ek = eigh(&k);
                let m = ek.max_value();
                let y = ek.reconstruct(|t| libm::exp2(t - m));
                let y = &*v * &y * v.adjoint() * re(1.0 / crate::operator::trace_re(&y));
                let kb = x[0].nrows();
                let yb = weighted_trace_a(&CMatrix::identity(*ka, *ka), &y, *ka, kb);
                Ok(alloc::vec![-frechet(&es, &yb, log2_divided)])
            }
            Self::Singular { .. } => super::solver::finite_difference_gradient(self, x, bases, steps),
        }
    }
}

fn bipartite(rho_ab: &DensityOperator) -> Result<(usize, usize)> {
    match rho_ab.dims() {
        [da, db] => Ok((*da, *db)),
        d => Err(Error::Shape(format!("expected a bipartite state, got dims {d:?}"))),
    }
}

fn warm_or_marginal(c: &Compressed, warm: Option<&CMatrix>) -> CMatrix {
    match warm {
        Some(w) if w.nrows() == c.vb.nrows() => super::solver::interior(&c.compress_b(w), 1e-9),
        _ => c.rho_b.clone(),
    }
}

pub(crate) struct RawMinimum {
    pub value: f64,
    pub sigma: CMatrix,
    pub iterations: usize,
    pub residual: f64,
}

fn solve<O: BlockObjective>(obj: &mut O, c: &Compressed, init: CMatrix, opts: &SolverOptions) -> Result<RawMinimum> {
    let sol = minimize(obj, init, &HermitianBasis::traceless(c.kb), opts)?;
    Ok(RawMinimum {
        value: sol.value,
        sigma: c.expand_b(&sol.blocks[0]),
        iterations: sol.iterations,
        residual: sol.residual,
    })
}

pub(crate) fn sandwiched_mi_raw(
    rho: &CMatrix,
    da: usize,
    db: usize,
    order: RenyiOrder,
    opts: &SolverOptions,
    warm: Option<&CMatrix>,
) -> Result<RawMinimum> {
    let c = Compressed::new(rho, da, db);
    if order.is_limit() || c.kb == 1 {
        return closed_form(&c, rho, da, db, order, |c, a| SandwichedMarginal::new(c, a).eval(&c.rho_b));
    }
    let mut obj = SandwichedMarginal::new(&c, order.alpha());
    solve(&mut obj, &c, warm_or_marginal(&c, warm), opts)
}

pub(crate) fn flat_mi_raw(
    rho: &CMatrix,
    da: usize,
    db: usize,
    order: RenyiOrder,
    opts: &SolverOptions,
    warm: Option<&CMatrix>,
) -> Result<RawMinimum> {
    let c = Compressed::new(rho, da, db);
    if order.is_limit() || c.kb == 1 {
        return closed_form(&c, rho, da, db, order, |c, a| {
            FlatMarginal::new(c, a).eval(&c.rho_b).unwrap_or(f64::INFINITY)
        });
    }
    let mut obj = FlatMarginal::new(&c, order.alpha());
    solve(&mut obj, &c, warm_or_marginal(&c, warm), opts)
}

/// `α → 1` (the minimizer is `ρ_B`) or a one-dimensional `B` support.
fn closed_form(
    c: &Compressed,
    rho: &CMatrix,
    da: usize,
    db: usize,
    order: RenyiOrder,
    eval: impl Fn(&Compressed, f64) -> f64,
) -> Result<RawMinimum> {
    let value = if order.is_limit() {
        crate::divergence::mutual_information_raw(rho, da, db).max(0.0)
    } else {
        eval(c, order.alpha())
    };
    Ok(RawMinimum {
        value,
        sigma: c.expand_b(&c.rho_b),
        iterations: 0,
        residual: 0.0,
    })
}

fn finish(raw: RawMinimum, db: usize) -> MarginalMinimum {
    MarginalMinimum {
        value: raw.value,
        sigma: DensityOperator::new_unchecked(crate::operator::normalize_psd(&raw.sigma), &[db]),
        iterations: raw.iterations,
        residual: raw.residual,
    }
}

/// `I*_α(A:B) = min_σ D*_α(ρ_AB‖ρ_A⊗σ_B)` for `α ≥ 1/2`.
pub fn sandwiched_mutual_info(rho_ab: &DensityOperator, order: RenyiOrder) -> Result<MarginalMinimum> {
    sandwiched_mutual_info_with(rho_ab, order, &SolverOptions::default(), None)
}

/// [`sandwiched_mutual_info`] with explicit tolerances and an optional warm start.
pub fn sandwiched_mutual_info_with(
    rho_ab: &DensityOperator,
    order: RenyiOrder,
    opts: &SolverOptions,
    warm: Option<&CMatrix>,
) -> Result<MarginalMinimum> {
    let (da, db) = bipartite(rho_ab)?;
    if !order.is_limit() && order.alpha() < 0.5 {
        return Err(Error::InvalidOrder(order.alpha()));
    }
    Ok(finish(sandwiched_mi_raw(rho_ab.matrix(), da, db, order, opts, warm)?, db))
}

/// `I♭_α(A:B) = min_σ D♭_α(ρ_AB‖ρ_A⊗σ_B)`.
pub fn log_euclidean_mutual_info(rho_ab: &DensityOperator, order: RenyiOrder) -> Result<MarginalMinimum> {
    log_euclidean_mutual_info_with(rho_ab, order, &SolverOptions::default(), None)
}

/// [`log_euclidean_mutual_info`] with explicit tolerances and an optional warm start.
pub fn log_euclidean_mutual_info_with(
    rho_ab: &DensityOperator,
    order: RenyiOrder,
    opts: &SolverOptions,
    warm: Option<&CMatrix>,
) -> Result<MarginalMinimum> {
    let (da, db) = bipartite(rho_ab)?;
    Ok(finish(flat_mi_raw(rho_ab.matrix(), da, db, order, opts, warm)?, db))
}
