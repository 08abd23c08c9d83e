//! Channel Rényi information `max_ρ I*_α(A:B)` at `(id ⊗ N)(ψ(ρ))`.
//!
//! `ρ ↦ I*_α` is maximized by the same mirror descent as the inner problem,
//! run on the negated objective. The gradient uses the envelope theorem: with
//! the inner minimizer `σ*` held fixed, `ρ ↦ D*_α(N(ψ(ρ))‖ρᵀ⊗σ*)` is
//! differentiated by central differences.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::mutual_info::{flat_mi_raw, sandwiched_mi_raw};
use super::solver::{minimize, BlockObjective, HermitianBasis, SolverOptions};
use crate::divergence::{relative_entropy_raw, sandwiched_raw, RenyiOrder};
use crate::operator::{
    canonical_input_vector, psd_sqrt, re, tensor_product, CMatrix, DensityOperator, QuantumChannel,
    StateEnsemble,
};
use crate::{Error, Result};

/// Tolerances of the input maximization.
#[derive(Clone, Debug, PartialEq)]
pub struct InputOptions {
    /// Inner `σ_B` minimization.
    pub inner: SolverOptions,
    /// Outer `ρ` maximization.
    pub outer: SolverOptions,
    /// Seed of the random restart.
    pub seed: u64,
    /// Largest tolerated disagreement between restarts.
    pub spread_tol: f64,
}

impl Default for InputOptions {
    fn default() -> Self {
        Self {
            inner: SolverOptions::default(),
            outer: SolverOptions {
                grad_tol: 1e-6,
                max_iter: 2000,
                fd_step: 1e-5,
            },
            seed: 0x5eed,
            spread_tol: 1e-5,
        }
    }
}

/// A maximized channel information.
#[derive(Clone, Debug, PartialEq)]
pub struct ChannelInfo {
    /// Value in bits.
    pub value: f64,
    /// Optimal input `ρ` on `A'`.
    pub input: DensityOperator,
    /// Inner minimizer `σ_B` at the optimal input.
    pub sigma: DensityOperator,
    /// Outer iterations of the best restart.
    pub iterations: usize,
    /// Outer first-order residual of the best restart.
    pub residual: f64,
    /// Final value of every restart, in start order.
    pub restart_values: Vec<f64>,
}

/// `(id ⊗ N)(ψ(ρ))` on `A ⊗ B`.
pub(crate) fn channel_output(channel: &QuantumChannel, rho: &CMatrix) -> CMatrix {
    let v = canonical_input_vector(&psd_sqrt(rho));
    let v = &v * re(1.0 / v.norm());
    channel.apply_to_second(&(&v * v.adjoint()), rho.nrows())
}

struct InputObjective<'a> {
    channel: &'a QuantumChannel,
    order: RenyiOrder,
    inner: SolverOptions,
    sigma: Option<CMatrix>,
    inner_iterations: usize,
}

impl InputObjective<'_> {
    fn dims(&self) -> (usize, usize) {
        (self.channel.input_dim(), self.channel.output_dim())
    }

    fn information(&mut self, rho: &CMatrix) -> Result<f64> {
        let (d, db) = self.dims();
        let omega = channel_output(self.channel, rho);
        let r = sandwiched_mi_raw(&omega, d, db, self.order, &self.inner, self.sigma.as_ref())?;
        self.sigma = Some(r.sigma);
        self.inner_iterations += r.iterations;
        Ok(r.value)
    }

    /// `D(N(ψ(ρ))‖ρᵀ⊗σ)` with `σ` frozen.
    fn frozen(&self, rho: &CMatrix, sigma: &CMatrix) -> f64 {
        let omega = channel_output(self.channel, rho);
        let reference = tensor_product(&rho.transpose(), sigma);
        if self.order.is_limit() {
            relative_entropy_raw(&omega, &reference).value()
        } else {
            sandwiched_raw(&omega, &reference, self.order.alpha()).value()
        }
    }
}

impl BlockObjective for InputObjective<'_> {
    fn value(&mut self, x: &[CMatrix]) -> Result<f64> {
        Ok(-self.information(&x[0])?)
    }

    fn gradient(&mut self, x: &[CMatrix], bases: &[HermitianBasis], steps: &[f64]) -> Result<Vec<CMatrix>> {
        self.information(&x[0])?;
        let sigma = self.sigma.clone().expect("set by information");
        let h = steps[0];
        let d = x[0].nrows();
        let mut g = CMatrix::zeros(d, d);
        for e in bases[0].elements() {
            let fp = self.frozen(&(&x[0] + e * re(h)), &sigma);
            let fm = self.frozen(&(&x[0] - e * re(h)), &sigma);
            g -= e * re((fp - fm) / (2.0 * h));
        }
        Ok(vec![g])
    }
}

/// Starting inputs: maximally mixed, a skewed diagonal, and a seeded random state.
fn restarts(d: usize, seed: u64) -> Vec<CMatrix> {
    let mixed = CMatrix::identity(d, d) * re(1.0 / d as f64);
    let mut skew = CMatrix::zeros(d, d);
    for i in 0..d {
        skew[(i, i)] = re(if i == 0 { 0.7 } else { 0.3 / (d - 1).max(1) as f64 });
    }
    let skew = crate::operator::normalize_psd(&skew);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let random = super::solver::interior(&crate::random::density(&mut rng, d), 0.2);
    vec![mixed, skew, random]
}

fn check_order(order: RenyiOrder) -> Result<()> {
    if !order.is_limit() && order.alpha() < 0.5 {
        return Err(Error::InvalidOrder(order.alpha()));
    }
    Ok(())
}

/// `I*_α(N) = max_ρ I*_α(A:B)` at `(id ⊗ N)(ψ(ρ))`, for `α ≥ 1/2` or the `α → 1` limit.
pub fn channel_renyi_info(channel: &QuantumChannel, order: RenyiOrder) -> Result<ChannelInfo> {
    channel_renyi_info_with(channel, order, &InputOptions::default(), None)
}

/// [`channel_renyi_info`] with explicit tolerances and an optional extra
/// starting input, tried before the standard restarts.
pub fn channel_renyi_info_with(
    channel: &QuantumChannel,
    order: RenyiOrder,
    opts: &InputOptions,
    warm: Option<&CMatrix>,
) -> Result<ChannelInfo> {
    check_order(order)?;
    let d = channel.input_dim();
    let mut obj = InputObjective {
        channel,
        order,
        inner: opts.inner.clone(),
        sigma: None,
        inner_iterations: 0,
    };
    let basis = HermitianBasis::traceless(d);
    let mut starts = Vec::new();
    if let Some(w) = warm {
        if w.nrows() != d {
            return Err(Error::Shape(format!("warm start has dim {}, channel input {d}", w.nrows())));
        }
        starts.push(super::solver::interior(w, 1e-6));
    }
    starts.extend(restarts(d, opts.seed));
    let mut best: Option<(f64, CMatrix, usize, f64)> = None;
    let mut values = Vec::with_capacity(starts.len());
    for start in starts {
        obj.sigma = None;
        let sol = minimize(&mut obj, start, &basis, &opts.outer)?;
        let value = -sol.value;
        values.push(value);
        if best.as_ref().is_none_or(|b| value > b.0) {
            best = Some((value, sol.blocks[0].clone(), sol.iterations, sol.residual));
        }
    }
    let hi = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let lo = values.iter().copied().fold(f64::INFINITY, f64::min);
    if hi - lo > opts.spread_tol {
        return Err(Error::MultiModal {
            values,
            spread: hi - lo,
        });
    }
    let (value, input, iterations, residual) = best.expect("at least one restart");
    obj.sigma = None;
    obj.information(&input)?;
    let sigma = obj.sigma.take().expect("set by information");
    Ok(ChannelInfo {
        value,
        input: DensityOperator::new_unchecked(input, &[d]),
        sigma: DensityOperator::new_unchecked(crate::operator::normalize_psd(&sigma), &[channel.output_dim()]),
        iterations,
        residual,
        restart_values: values,
    })
}

/// Entanglement-assisted capacity `C_E = max_ψ I(A:B)`.
pub fn ea_capacity(channel: &QuantumChannel) -> Result<ChannelInfo> {
    channel_renyi_info(channel, RenyiOrder::limit())
}

/// Channel outputs `(q(t), N(ψ^t))` of an ensemble on `A ⊗ A'`, with `|A|`.
pub(crate) fn ensemble_outputs(channel: &QuantumChannel, ens: &StateEnsemble) -> Result<(Vec<(f64, CMatrix)>, usize)> {
    let dims = ens.items()[0].1.dims();
    let da = match dims {
        [da, din] if *din == channel.input_dim() => *da,
        _ => {
            return Err(Error::Shape(format!(
                "ensemble states need dims [|A|, {}], got {dims:?}",
                channel.input_dim()
            )))
        }
    };
    let out = ens
        .items()
        .iter()
        .map(|(q, s)| (*q, channel.apply_to_second(s.matrix(), da)))
        .collect();
    Ok((out, da))
}

/// `Σ_t q(t) min_σ D♭_α(ω^t‖ω^t_A⊗σ)`, updating per-type warm starts.
pub(crate) fn flat_ensemble_info(
    outputs: &[(f64, CMatrix)],
    da: usize,
    db: usize,
    order: RenyiOrder,
    opts: &SolverOptions,
    warm: &mut [Option<CMatrix>],
) -> Result<(f64, usize)> {
    let mut total = 0.0;
    let mut iterations = 0;
    for ((q, omega), w) in outputs.iter().zip(warm.iter_mut()) {
        if *q == 0.0 {
            continue;
        }
        let r = flat_mi_raw(omega, da, db, order, opts, w.as_ref())?;
        total += q * r.value;
        iterations += r.iterations;
        *w = Some(r.sigma);
    }
    Ok((total, iterations))
}

/// `I♭_α(N, {q(t), ψ^t}) = Σ_t q(t) min_σ D♭_α(N(ψ^t)‖ψ^t_A⊗σ)` for `α > 1`.
///
/// Ensemble states live on `A ⊗ A'`; a single state gives the one-term sum.
pub fn log_euclidean_channel_info(channel: &QuantumChannel, ens: &StateEnsemble, order: RenyiOrder) -> Result<f64> {
    if order.is_limit() || order.alpha() <= 1.0 {
        return Err(Error::InvalidOrder(order.alpha()));
    }
    let (outputs, da) = ensemble_outputs(channel, ens)?;
    let mut warm = vec![None; outputs.len()];
    let db = channel.output_dim();
    Ok(flat_ensemble_info(&outputs, da, db, order, &SolverOptions::default(), &mut warm)?.0)
}

/// [`log_euclidean_channel_info`] for the single state `ψ`.
pub fn log_euclidean_channel_info_single(
    channel: &QuantumChannel,
    psi: &DensityOperator,
    order: RenyiOrder,
) -> Result<f64> {
    log_euclidean_channel_info(channel, &StateEnsemble::single(psi.clone()), order)
}
