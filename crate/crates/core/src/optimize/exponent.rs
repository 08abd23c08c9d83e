//! Strong converse exponents as a supremum over the Rényi order.
//!
//! With `α = 1/(1-λ)`, every exponent here has the form
//! `sup_{λ∈(0,1)} λ (R - s·I_α)` for a channel information `I_α` that is
//! nondecreasing in `α`. The supremum is searched by golden section on the
//! window `[δ, 1-δ]`.

use alloc::boxed::Box;
use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use super::channel_info::{channel_renyi_info_with, ensemble_outputs, flat_ensemble_info, InputOptions};
use super::solver::{golden_section_max, SolverOptions};
use crate::divergence::RenyiOrder;
use crate::operator::{CMatrix, DensityOperator, QuantumChannel, StateEnsemble};
use crate::{Error, Result};

/// Rate and search window of an exponent computation.
#[derive(Clone, Debug, PartialEq)]
pub struct ExponentQuery {
    /// Rate `R` in bits per channel use.
    pub rate: f64,
    /// Window `[δ, 1-δ]` of `λ = (α-1)/α`.
    pub delta: f64,
    /// Golden-section bracket width at which the search stops.
    pub lambda_tol: f64,
    /// Tolerances of the channel-information solves.
    pub solver: InputOptions,
}

impl ExponentQuery {
    pub fn new(rate: f64) -> Result<Self> {
        Self::with_delta(rate, 1e-4)
    }

    pub fn with_delta(rate: f64, delta: f64) -> Result<Self> {
        let q = Self {
            rate,
            delta,
            lambda_tol: 1e-5,
            solver: InputOptions::default(),
        };
        q.validate()?;
        Ok(q)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.rate.is_finite() && self.rate > 0.0) {
            return Err(Error::InvalidParameter(format!("rate must be positive, got {}", self.rate)));
        }
        if !(self.delta > 0.0 && self.delta < 0.5) {
            return Err(Error::InvalidParameter(format!("delta must lie in (0, 1/2), got {}", self.delta)));
        }
        if !(self.lambda_tol > 0.0) {
            return Err(Error::InvalidParameter(format!("lambda_tol must be positive, got {}", self.lambda_tol)));
        }
        Ok(())
    }
}

/// One evaluation of the `λ`-objective.
#[derive(Clone, Debug, PartialEq)]
pub struct InnerSolve {
    pub lambda: f64,
    pub alpha: f64,
    /// Channel information `I_α` at this order.
    pub information: f64,
    /// `λ (R - s·I_α)`.
    pub objective: f64,
    /// Optimizer iterations spent on this evaluation.
    pub iterations: usize,
    /// First-order residual of the outer solve (zero when there is none).
    pub residual: f64,
}

/// A computed exponent.
#[derive(Clone, Debug, PartialEq)]
pub struct ExponentResult {
    pub rate: f64,
    /// Exponent in bits per channel use, clipped at zero.
    pub value: f64,
    pub lambda_star: f64,
    pub alpha_star: f64,
    /// Optimal channel input at `λ*`, when the information maximizes over inputs.
    pub input: Option<DensityOperator>,
    /// Every evaluation, in search order.
    pub trace: Vec<InnerSolve>,
    /// `δ |R - s·I_{1/δ}|`: how much the supremum can exceed the window's maximum.
    pub truncation_bound: f64,
}

impl ExponentResult {
    pub fn inner_iterations(&self) -> usize {
        self.trace.iter().map(|t| t.iterations).sum()
    }
}

struct Sample {
    information: f64,
    iterations: usize,
    residual: f64,
    input: Option<CMatrix>,
}

fn lambda_sup(q: &ExponentQuery, scale: f64, mut info: impl FnMut(RenyiOrder) -> Result<Sample>) -> Result<ExponentResult> {
    q.validate()?;
    let mut trace = Vec::new();
    let mut inputs: Vec<(f64, Option<CMatrix>)> = Vec::new();
    let hi = 1.0 - q.delta;
    let mut top = None;
    let objective = |lambda: f64| -> Result<f64> {
        let order = RenyiOrder::from_lambda(lambda)?;
        let s = info(order).map_err(|e| Error::AtLambda {
            lambda,
            source: Box::new(e),
        })?;
        let g = lambda * (q.rate - scale * s.information);
        if lambda == hi {
            top = Some(s.information);
        }
        trace.push(InnerSolve {
            lambda,
            alpha: order.alpha(),
            information: s.information,
            objective: g,
            iterations: s.iterations,
            residual: s.residual,
        });
        inputs.push((lambda, s.input));
        Ok(g)
    };
    let (lambda_star, best) = golden_section_max(objective, q.delta, hi, q.lambda_tol)?;
    let top = top.expect("golden section evaluates both endpoints");
    let input = inputs
        .into_iter()
        .find(|(l, _)| *l == lambda_star)
        .and_then(|(_, m)| m)
        .map(|m| {
            let d = m.nrows();
            DensityOperator::new_unchecked(m, &[d])
        });
    Ok(ExponentResult {
        rate: q.rate,
        value: best.max(0.0),
        lambda_star,
        alpha_star: 1.0 / (1.0 - lambda_star),
        input,
        trace,
        truncation_bound: q.delta * (q.rate - scale * top).abs(),
    })
}

fn sandwiched_sup(channel: &QuantumChannel, q: &ExponentQuery, scale: f64) -> Result<ExponentResult> {
    let mut warm: Option<CMatrix> = None;
    lambda_sup(q, scale, |order| {
        let r = channel_renyi_info_with(channel, order, &q.solver, warm.as_ref())?;
        warm = Some(r.input.matrix().clone());
        Ok(Sample {
            information: r.value,
            iterations: r.iterations,
            residual: r.residual,
            input: Some(r.input.matrix().clone()),
        })
    })
}

/// `sc(N, R) = sup_{α>1} (α-1)/α (R - I*_α(N))`.
pub fn strong_converse_exponent(channel: &QuantumChannel, q: &ExponentQuery) -> Result<ExponentResult> {
    sandwiched_sup(channel, q, 1.0)
}

/// The quantum-feedback-assisted exponent, which has the same formula as
/// [`strong_converse_exponent`].
pub fn feedback_exponent(channel: &QuantumChannel, q: &ExponentQuery) -> Result<ExponentResult> {
    strong_converse_exponent(channel, q)
}

/// Entanglement-assisted quantum communication: `sup_{α>1} (α-1)/α (R - I*_α(N)/2)`.
pub fn quantum_exponent(channel: &QuantumChannel, q: &ExponentQuery) -> Result<ExponentResult> {
    sandwiched_sup(channel, q, 0.5)
}

/// `F(N, R, ens) = sup_{α>1} (α-1)/α (R - I♭_α(N, ens))`.
pub fn exponent_candidate_f(channel: &QuantumChannel, ens: &StateEnsemble, q: &ExponentQuery) -> Result<ExponentResult> {
    let (outputs, da) = ensemble_outputs(channel, ens)?;
    let db = channel.output_dim();
    let mut warm = vec![None; outputs.len()];
    let opts: SolverOptions = q.solver.inner.clone();
    lambda_sup(q, 1.0, |order| {
        let (information, iterations) = flat_ensemble_info(&outputs, da, db, order, &opts, &mut warm)?;
        Ok(Sample {
            information,
            iterations,
            residual: 0.0,
            input: None,
        })
    })
}

/// Direction of [`pf_ps_transform`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PfPsDirection {
    /// `P_s*(k²) ↦ P_f*(k) = √P_s*(k²)`.
    SuccessToFidelity,
    /// `P_f*(k) ↦ P_s*(k²) = P_f*(k)²`.
    FidelityToSuccess,
}

/// The relation `P_f*(k)² = P_s*(k²)` between optimal entanglement fidelity
/// and optimal classical success probability.
pub fn pf_ps_transform(value: f64, direction: PfPsDirection) -> Result<f64> {
    if !(0.0..=1.0).contains(&value) {
        return Err(Error::Probability(value));
    }
    Ok(match direction {
        PfPsDirection::SuccessToFidelity => libm::sqrt(value),
        PfPsDirection::FidelityToSuccess => value * value,
    })
}
