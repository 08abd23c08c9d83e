//! Variational forms of the log-Euclidean quantities.
//!
//! For each ensemble member `ω^t = N(ψ^t)` the variable `τ^t` is written as
//! `W X W†` with `W` the support isometry of `ω^t`, so support feasibility
//! holds by construction. With `I(τ) = D(τ‖ψ_A⊗τ_B)` and `D(τ) = D(τ‖ω)`,
//! the Lagrangian
//!
//! `L_λ(τ) = λ (R - Σ q I(τ^t)) + Σ q D(τ^t)`
//!
//! is convex in `τ` for every `λ ≤ 1`, and the information `Σ q I` at its
//! minimizer is nondecreasing in `λ`. `F`, `F₁` and `F₂` are located by
//! bisecting on `λ` for the point where the information crosses `R`.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use super::channel_info::ensemble_outputs;
use super::solver::{minimize, minimize_blocks, BlockObjective, HermitianBasis, SolverOptions};
use crate::operator::{
    eigh, entropy_of, partial_trace_matrix, re, tensor_product, trace_product, CMatrix, DensityOperator,
    QuantumChannel, StateEnsemble,
};
use crate::{Error, Result};

/// Width in `λ` at which the crossing search stops.
const LAMBDA_TOL: f64 = 1e-11;
/// Multipliers tried above 1 for `F₁` (nonconvex region).
const LAMBDA_ABOVE_ONE: [f64; 10] = [1.5, 2.0, 3.0, 5.0, 8.0, 13.0, 21.0, 34.0, 55.0, 64.0];
/// Multipliers tried below 0 for `F₂`.
const LAMBDA_BELOW_ZERO: [f64; 9] = [-0.25, -0.5, -1.0, -2.0, -4.0, -8.0, -16.0, -32.0, -64.0];

/// States `τ^t` attaining a variational value.
#[derive(Clone, Debug, PartialEq)]
pub struct VariationalAssignment {
    /// `τ^t` on `A ⊗ B`, one per ensemble member.
    pub states: Vec<DensityOperator>,
    /// `tr[(1 - P_t) τ^t]` with `P_t` the support projector of `N(ψ^t)`.
    pub support_leak: Vec<f64>,
    /// Multiplier at which the assignment minimizes the Lagrangian.
    pub lambda: f64,
    /// `Σ q D(τ^t‖ψ^t_A⊗τ^t_B)`.
    pub information: f64,
    /// `Σ q D(τ^t‖N(ψ^t))`.
    pub divergence: f64,
}

impl VariationalAssignment {
    /// Every `τ^t` lies in the support of `N(ψ^t)` up to `tol`.
    pub fn is_feasible(&self, tol: f64) -> bool {
        self.support_leak.iter().all(|&l| l <= tol)
    }
}

/// Value of a constrained infimum.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum ConstrainedValue {
    Attained(f64),
    /// The feasible set is empty, so the infimum is `+∞`.
    Infeasible,
}

impl ConstrainedValue {
    pub fn value(&self) -> f64 {
        match *self {
            Self::Attained(v) => v,
            Self::Infeasible => f64::INFINITY,
        }
    }
}

/// `F₁`, `F₂` and their minimum.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SplitValues {
    pub f1: ConstrainedValue,
    pub f2: ConstrainedValue,
    pub min: f64,
}

struct Member {
    q: f64,
    /// Support isometry of `ω`.
    w: CMatrix,
    /// `log W†ωW`.
    log_omega: CMatrix,
    /// `log ψ_A` on its support.
    log_psi_a: CMatrix,
    omega: CMatrix,
    da: usize,
    db: usize,
}

struct Parts {
    information: f64,
    divergence: f64,
    grad_information: CMatrix,
    grad_divergence: CMatrix,
}

impl Member {
    fn new(q: f64, omega: CMatrix, da: usize, db: usize) -> Result<Self> {
        let w = eigh(&omega).support_isometry();
        let inner = w.adjoint() * &omega * &w;
        let psi_a = partial_trace_matrix(&omega, &[da, db], &[0])?;
        Ok(Self {
            q,
            log_omega: eigh(&inner).reconstruct(libm::log2),
            log_psi_a: eigh(&psi_a).support_function(libm::log2),
            w,
            omega,
            da,
            db,
        })
    }

    fn rank(&self) -> usize {
        self.w.ncols()
    }

    /// The starting point `X = W†ωW`, which is `τ = ω`.
    fn omega_point(&self) -> CMatrix {
        crate::operator::normalize_psd(&(self.w.adjoint() * &self.omega * &self.w))
    }

    fn tau(&self, x: &CMatrix) -> CMatrix {
        &self.w * x * self.w.adjoint()
    }

    fn parts(&self, x: &CMatrix) -> Result<Parts> {
        let ex = eigh(x);
        let hx = entropy_of(&ex.clipped());
        let lx = ex.reconstruct(|v| libm::log2(v.max(1e-300)));
        let tau = self.tau(x);
        let dims = [self.da, self.db];
        let tau_a = partial_trace_matrix(&tau, &dims, &[0])?;
        let tau_b = partial_trace_matrix(&tau, &dims, &[1])?;
        let eb = eigh(&tau_b);
        let hb = entropy_of(&eb.clipped());
        let log_b = eb.support_function(libm::log2);
        let cross = trace_product(&tau_a, &self.log_psi_a).re;
        let reference = tensor_product(&self.log_psi_a, &CMatrix::identity(self.db, self.db))
            + tensor_product(&CMatrix::identity(self.da, self.da), &log_b);
        Ok(Parts {
            information: -hx + hb - cross,
            divergence: -hx - trace_product(x, &self.log_omega).re,
            grad_information: &lx - self.w.adjoint() * reference * &self.w,
            grad_divergence: &lx - &self.log_omega,
        })
    }
}

struct Lagrangian<'a> {
    members: &'a [Member],
    rate: f64,
    lambda: f64,
}

impl BlockObjective for Lagrangian<'_> {
    fn value(&mut self, x: &[CMatrix]) -> Result<f64> {
        let mut total = self.lambda * self.rate;
        for (m, x) in self.members.iter().zip(x) {
            let p = m.parts(x)?;
            total += m.q * (p.divergence - self.lambda * p.information);
        }
        Ok(total)
    }

    fn gradient(&mut self, x: &[CMatrix], _: &[HermitianBasis], _: &[f64]) -> Result<Vec<CMatrix>> {
        self.members
            .iter()
            .zip(x)
            .map(|(m, x)| {
                let p = m.parts(x)?;
                Ok((p.grad_divergence - p.grad_information * re(self.lambda)) * re(m.q))
            })
            .collect()
    }
}

/// A Lagrangian minimizer with its information and divergence totals.
#[derive(Clone)]
struct Point {
    lambda: f64,
    blocks: Vec<CMatrix>,
    information: f64,
    divergence: f64,
}

impl Point {
    /// `(R - I)₊ + D`.
    fn hinge(&self, rate: f64) -> f64 {
        (rate - self.information).max(0.0) + self.divergence
    }

    /// `R - I + D`.
    fn linear(&self, rate: f64) -> f64 {
        rate - self.information + self.divergence
    }
}

struct Problem {
    members: Vec<Member>,
    /// Ensemble index of each member; zero-weight types are dropped.
    index: Vec<usize>,
    /// All channel outputs, for the assignment of dropped types.
    outputs: Vec<CMatrix>,
    dims: [usize; 2],
    rate: f64,
    opts: SolverOptions,
}

impl Problem {
    fn new(channel: &QuantumChannel, rate: f64, ens: &StateEnsemble) -> Result<Self> {
        if !(rate.is_finite() && rate >= 0.0) {
            return Err(Error::InvalidParameter(format!("rate must be nonnegative, got {rate}")));
        }
        let (outputs, da) = ensemble_outputs(channel, ens)?;
        let db = channel.output_dim();
        let mut members = Vec::new();
        let mut index = Vec::new();
        for (t, (q, omega)) in outputs.iter().enumerate() {
            if *q > 0.0 {
                members.push(Member::new(*q, omega.clone(), da, db)?);
                index.push(t);
            }
        }
        Ok(Self {
            members,
            index,
            outputs: outputs.into_iter().map(|(_, o)| o).collect(),
            dims: [da, db],
            rate,
            opts: SolverOptions::default(),
        })
    }

    fn totals(&self, blocks: &[CMatrix]) -> Result<(f64, f64)> {
        let mut i = 0.0;
        let mut d = 0.0;
        for (m, x) in self.members.iter().zip(blocks) {
            let p = m.parts(x)?;
            i += m.q * p.information;
            d += m.q * p.divergence;
        }
        Ok((i, d))
    }

    fn omega_point(&self) -> Result<Point> {
        let blocks: Vec<CMatrix> = self.members.iter().map(Member::omega_point).collect();
        let (information, divergence) = self.totals(&blocks)?;
        Ok(Point {
            lambda: 0.0,
            blocks,
            information,
            divergence: divergence.max(0.0),
        })
    }

    fn solve(&self, lambda: f64, warm: &[CMatrix]) -> Result<Point> {
        let bases: Vec<HermitianBasis> = self.members.iter().map(|m| HermitianBasis::traceless(m.rank())).collect();
        let mut obj = Lagrangian {
            members: &self.members,
            rate: self.rate,
            lambda,
        };
        let sol = minimize_blocks(&mut obj, warm.to_vec(), &bases, &self.opts).map_err(|e| Error::AtLambda {
            lambda,
            source: alloc::boxed::Box::new(e),
        })?;
        let (information, divergence) = self.totals(&sol.blocks)?;
        Ok(Point {
            lambda,
            blocks: sol.blocks,
            information,
            divergence,
        })
    }

    /// Bisects between `lo` (information ≤ R) and `hi` (information ≥ R).
    fn crossing(&self, mut lo: Point, mut hi: Point) -> Result<(Point, Point)> {
        while hi.lambda - lo.lambda > LAMBDA_TOL * (1.0 + lo.lambda.abs().max(hi.lambda.abs())) {
            let mid = 0.5 * (lo.lambda + hi.lambda);
            let warm = if mid - lo.lambda < hi.lambda - mid { &lo.blocks } else { &hi.blocks };
            let p = self.solve(mid, &warm.clone())?;
            if p.information <= self.rate {
                lo = p;
            } else {
                hi = p;
            }
        }
        Ok((lo, hi))
    }

    /// First multiplier in `schedule` whose minimizer satisfies `done`, with the previous point.
    fn sweep(&self, start: Point, schedule: &[f64], done: impl Fn(&Point) -> bool) -> Result<Option<(Point, Point)>> {
        let mut prev = start;
        for &lambda in schedule {
            let p = self.solve(lambda, &prev.blocks.clone())?;
            if done(&p) {
                return Ok(Some((prev, p)));
            }
            prev = p;
        }
        Ok(None)
    }

    fn assignment(&self, p: &Point) -> VariationalAssignment {
        let [da, db] = self.dims;
        let mut states: Vec<DensityOperator> = self
            .outputs
            .iter()
            .map(|o| DensityOperator::new_unchecked(o.clone(), &[da, db]))
            .collect();
        let mut support_leak = vec![0.0; self.outputs.len()];
        for ((m, x), &t) in self.members.iter().zip(&p.blocks).zip(&self.index) {
            let tau = crate::operator::normalize_psd(&m.tau(x));
            let proj = &m.w * m.w.adjoint();
            let outside = CMatrix::identity(da * db, da * db) - proj;
            support_leak[t] = trace_product(&outside, &tau).re.abs();
            states[t] = DensityOperator::new_unchecked(tau, &[da, db]);
        }
        VariationalAssignment {
            states,
            support_leak,
            lambda: p.lambda,
            information: p.information,
            divergence: p.divergence,
        }
    }
}

/// `inf_τ (R - Σ q D(τ^t‖ψ^t_A⊗τ^t_B))₊ + Σ q D(τ^t‖N(ψ^t))` over `τ^t ∈ S_{N(ψ^t)}`.
///
/// The hinge is handled branch by branch. If `τ = ω` already carries rate
/// `R` the value is 0. Otherwise the smooth branch `R - I + D` is minimized;
/// if its minimizer stays at information ≤ R it is optimal. Otherwise the
/// optimum sits on the kink and is found by bisection on `λ ∈ [0, 1]`.
pub fn variational_f(channel: &QuantumChannel, rate: f64, ens: &StateEnsemble) -> Result<(f64, VariationalAssignment)> {
    let pb = Problem::new(channel, rate, ens)?;
    let omega = pb.omega_point()?;
    if omega.information >= rate {
        return Ok((0.0, pb.assignment(&omega)));
    }
    let one = pb.solve(1.0, &omega.blocks)?;
    if one.information <= rate {
        return Ok((one.linear(rate).max(0.0), pb.assignment(&one)));
    }
    let (lo, hi) = pb.crossing(omega, one)?;
    let best = if lo.hinge(rate) <= hi.hinge(rate) { lo } else { hi };
    Ok((best.hinge(rate), pb.assignment(&best)))
}

fn check_block_maximally_entangled(ens: &StateEnsemble) -> Result<()> {
    for (t, (_, s)) in ens.items().iter().enumerate() {
        let e = eigh(s.matrix());
        if e.rank() != 1 {
            return Err(Error::InvalidParameter(format!("ensemble member {t} is not pure")));
        }
        let dims = s.dims();
        let a = partial_trace_matrix(s.matrix(), dims, &[0])?;
        let ea = eigh(&a);
        let k = ea.rank();
        let flat = ea.values.iter().filter(|&&v| v > ea.support_threshold()).all(|&v| (v * k as f64 - 1.0).abs() < 1e-8);
        if !flat {
            return Err(Error::InvalidParameter(format!(
                "ensemble member {t} is not maximally entangled on its block"
            )));
        }
    }
    Ok(())
}

/// `F₁ = inf { Σ q D(τ‖N(Ψ^t)) : Σ q D(τ‖π^t_A⊗τ_B) > R }` and
/// `F₂ = inf { R - Σ q D(τ‖π^t_A⊗τ_B) + Σ q D(τ‖N(Ψ^t)) : Σ q D(τ‖π^t_A⊗τ_B) ≤ R }`
/// for an ensemble of states maximally entangled on blocks (so `ψ^t_A = π^t_A`).
///
/// Both are located through minimizers of the Lagrangian. Multipliers in
/// `[0, 1]` and below 0 give convex problems. When `F₁` needs a multiplier
/// above 1 the problem is no longer convex; the value returned is that of a
/// feasible local minimizer, hence an upper bound. `Infeasible` means that no
/// multiplier up to 64 (resp. down to -64) reached the constraint.
pub fn f1_f2_split(channel: &QuantumChannel, rate: f64, ens: &StateEnsemble) -> Result<SplitValues> {
    check_block_maximally_entangled(ens)?;
    let pb = Problem::new(channel, rate, ens)?;
    let omega = pb.omega_point()?;
    let one = pb.solve(1.0, &omega.blocks)?;
    let f1 = if omega.information > rate {
        ConstrainedValue::Attained(0.0)
    } else if one.information >= rate {
        let (_, hi) = pb.crossing(omega.clone(), one.clone())?;
        ConstrainedValue::Attained(hi.divergence.max(0.0))
    } else {
        match pb.sweep(one.clone(), &LAMBDA_ABOVE_ONE, |p| p.information >= rate)? {
            Some((lo, hi)) => {
                let (_, hi) = pb.crossing(lo, hi)?;
                ConstrainedValue::Attained(hi.divergence.max(0.0))
            }
            None => ConstrainedValue::Infeasible,
        }
    };
    let f2 = if one.information <= rate {
        ConstrainedValue::Attained(one.linear(rate).max(0.0))
    } else if omega.information <= rate {
        let (lo, _) = pb.crossing(omega, one)?;
        ConstrainedValue::Attained(lo.linear(rate).max(0.0))
    } else {
        match pb.sweep(omega, &LAMBDA_BELOW_ZERO, |p| p.information <= rate)? {
            Some((hi, lo)) => {
                let (lo, _) = pb.crossing(lo, hi)?;
                ConstrainedValue::Attained(lo.linear(rate).max(0.0))
            }
            None => ConstrainedValue::Infeasible,
        }
    };
    Ok(SplitValues {
        f1,
        f2,
        min: f1.value().min(f2.value()),
    })
}

/// `τ ↦ s(D(τ‖σ) - α/(α-1) D(τ‖ρ))` on `τ = V X V†`, negated for minimization.
struct DivergenceVariational {
    v: CMatrix,
    log_sigma: CMatrix,
    log_rho: CMatrix,
    c: f64,
    sign: f64,
}

impl DivergenceVariational {
    fn parts(&self, x: &CMatrix) -> (f64, CMatrix) {
        let ex = eigh(x);
        let h = entropy_of(&ex.clipped());
        let lx = ex.reconstruct(|v| libm::log2(v.max(1e-300)));
        let tau = &self.v * x * self.v.adjoint();
        let phi = (self.c - 1.0) * h - trace_product(&tau, &self.log_sigma).re + self.c * trace_product(&tau, &self.log_rho).re;
        let grad = lx * re(1.0 - self.c) - self.v.adjoint() * (&self.log_sigma - &self.log_rho * re(self.c)) * &self.v;
        (-self.sign * phi, grad * re(-self.sign))
    }
}

impl BlockObjective for DivergenceVariational {
    fn value(&mut self, x: &[CMatrix]) -> Result<f64> {
        Ok(self.parts(&x[0]).0)
    }

    fn gradient(&mut self, x: &[CMatrix], _: &[HermitianBasis], _: &[f64]) -> Result<Vec<CMatrix>> {
        Ok(vec![self.parts(&x[0]).1])
    }
}

/// `D♭_α(ρ‖σ)` from its variational form: the maximum over `τ ∈ S_ρ` of
/// `D(τ‖σ) - α/(α-1) D(τ‖ρ)` for `α > 1`, the minimum for `α < 1`.
///
/// `σ` must be positive definite. Returns the value and the optimal `τ`.
pub fn log_euclidean_variational(
    rho: &DensityOperator,
    sigma: &DensityOperator,
    order: crate::divergence::RenyiOrder,
) -> Result<(f64, DensityOperator)> {
    if order.is_limit() {
        return Err(Error::InvalidOrder(1.0));
    }
    if rho.dim() != sigma.dim() {
        return Err(Error::Shape(format!("dims {} and {} differ", rho.dim(), sigma.dim())));
    }
    let es = eigh(sigma.matrix());
    if es.min_value() <= 0.0 {
        return Err(Error::Domain {
            eigenvalue: es.min_value(),
        });
    }
    let alpha = order.alpha();
    let er = eigh(rho.matrix());
    let v = er.support_isometry();
    let mut obj = DivergenceVariational {
        log_sigma: es.reconstruct(libm::log2),
        log_rho: er.support_function(libm::log2),
        c: alpha / (alpha - 1.0),
        sign: if alpha > 1.0 { 1.0 } else { -1.0 },
        v,
    };
    let start = crate::operator::normalize_psd(&(obj.v.adjoint() * rho.matrix() * &obj.v));
    let basis = HermitianBasis::traceless(obj.v.ncols());
    let sol = minimize(&mut obj, start, &basis, &SolverOptions::default())?;
    let tau = crate::operator::normalize_psd(&(&obj.v * &sol.blocks[0] * obj.v.adjoint()));
    Ok((-obj.sign * sol.value, DensityOperator::new_unchecked(tau, rho.dims())))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::divergence::{log_euclidean_divergence, RenyiOrder};
    use crate::operator::{HermitianOperator, PureState};
    use crate::optimize::{exponent_candidate_f, ExponentQuery};
    use crate::random;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn bell() -> StateEnsemble {
        StateEnsemble::single(PureState::maximally_entangled(2).density())
    }

    fn two_types(rng: &mut ChaCha8Rng) -> StateEnsemble {
        let psi = |v: crate::CVector| {
            let v = &v * re(1.0 / v.norm());
            DensityOperator::new(&v * v.adjoint(), &[2, 2]).unwrap()
        };
        let s1 = psi(random::pure_vector(rng, 4));
        let s2 = psi(random::pure_vector(rng, 4));
        StateEnsemble::new(vec![(0.4, s1), (0.6, s2)]).unwrap()
    }

    #[test]
    fn zero_rate_is_attained_at_the_channel_output() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        let ch = random::channel(&mut rng, 2, 2, 2);
        let ens = two_types(&mut rng);
        let (v, a) = variational_f(&ch, 0.0, &ens).unwrap();
        assert_eq!(v, 0.0);
        assert!(a.divergence.abs() < 1e-12);
        for (s, (_, psi)) in a.states.iter().zip(ens.items()) {
            let omega = ch.apply_to_second(psi.matrix(), 2);
            assert!(crate::operator::max_abs(&(s.matrix() - omega)) < 1e-12);
        }
    }

    #[test]
    fn identity_on_bell_state_has_rate_excess() {
        let id = QuantumChannel::identity(2);
        let (v, a) = variational_f(&id, 3.0, &bell()).unwrap();
        assert!((v - 1.0).abs() < 1e-9, "{v}");
        assert!(a.is_feasible(1e-9));
        let s = f1_f2_split(&id, 3.0, &bell()).unwrap();
        assert_eq!(s.f1, ConstrainedValue::Infeasible);
        assert!((s.f2.value() - 1.0).abs() < 1e-9);
        assert!((s.min - v).abs() < 1e-9);
    }

    #[test]
    fn pure_output_below_its_information_has_no_second_branch() {
        let id = QuantumChannel::identity(2);
        let s = f1_f2_split(&id, 1.0, &bell()).unwrap();
        assert_eq!(s.f1, ConstrainedValue::Attained(0.0));
        assert_eq!(s.f2, ConstrainedValue::Infeasible);
        assert_eq!(s.min, 0.0);
    }

    #[test]
    fn variational_form_matches_the_lambda_supremum() {
        let mut rng = ChaCha8Rng::seed_from_u64(22);
        let ch = random::channel(&mut rng, 2, 2, 2);
        let ens = two_types(&mut rng);
        let (v, a) = variational_f(&ch, 1.0, &ens).unwrap();
        assert!(a.is_feasible(1e-9));
        let sup = exponent_candidate_f(&ch, &ens, &ExponentQuery::with_delta(1.0, 1e-6).unwrap()).unwrap();
        assert!(v > 1e-3, "{v}");
        assert!((v - sup.value).abs() < 1e-4, "{v} vs {}", sup.value);
    }

    #[test]
    fn split_minimum_recovers_the_variational_value() {
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        let ch = random::channel(&mut rng, 2, 2, 2);
        let ens = bell();
        for rate in [0.5, 1.0, 1.5, 2.2] {
            let (v, _) = variational_f(&ch, rate, &ens).unwrap();
            let s = f1_f2_split(&ch, rate, &ens).unwrap();
            assert!((s.min - v).abs() < 1e-6, "R = {rate}: {s:?} vs {v}");
        }
    }

    #[test]
    fn split_rejects_states_that_are_not_block_maximally_entangled() {
        let mut rng = ChaCha8Rng::seed_from_u64(24);
        let ch = random::channel(&mut rng, 2, 2, 2);
        assert!(f1_f2_split(&ch, 1.0, &two_types(&mut rng)).is_err());
    }

    #[test]
    fn log_euclidean_divergence_variational_form() {
        let mut rng = ChaCha8Rng::seed_from_u64(25);
        for alpha in [0.5, 0.8, 1.5, 3.0] {
            let rho = DensityOperator::from_matrix(random::density_of_rank(&mut rng, 3, 2)).unwrap();
            let sigma = DensityOperator::from_matrix(random::density(&mut rng, 3)).unwrap();
            let o = RenyiOrder::new(alpha).unwrap();
            let (v, tau) = log_euclidean_variational(&rho, &sigma, o).unwrap();
            let direct = log_euclidean_divergence(&rho, &HermitianOperator::new(sigma.matrix().clone()).unwrap(), o)
                .unwrap()
                .value();
            assert!((v - direct).abs() < 1e-5, "α = {alpha}: {v} vs {direct}");
            assert!((tau.matrix().trace().re - 1.0).abs() < 1e-12);
        }
    }
}
