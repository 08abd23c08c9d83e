//! Seeded property suites.
//!
//! Each suite draws its instances from a `ChaCha8Rng` seeded with the given
//! seed, evaluates a list of checks and reports every check whose margin falls
//! below minus its slack. Margins are `rhs - lhs` for inequalities `lhs ≤ rhs`
//! and `-|a - b|` for equalities.

use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::coding::{
    build_ea_code, simulate, success_probability, CodebookSampling, EncodingSide, SharedState,
};
use crate::divergence::{
    classical_renyi, log_euclidean_divergence, mutual_information, sandwiched_divergence,
    RenyiOrder,
};
use crate::operator::{
    distinct_eigenvalue_count, eigh, re, CMatrix, DensityOperator, HermitianOperator, Pinching,
    PureState, QuantumChannel, StateEnsemble,
};
use crate::optimize::{
    channel_renyi_info, ea_capacity, exponent_candidate_f, f1_f2_split, log_euclidean_variational,
    sandwiched_mutual_info, strong_converse_exponent, variational_f, ExponentQuery,
};
use crate::symmetry::{symmetrize, universal_symmetric_state};
use crate::{random, Error, Result};

pub const DEFAULT_SEED: u64 = 20_160_101;

/// Suite names accepted by [`run`], in acceptance order.
pub const SUITE_NAMES: [&str; 8] = [
    "identity",
    "commuting",
    "properties",
    "dominance",
    "variational",
    "threshold",
    "simulator",
    "pinching",
];

/// Slack of inequalities between directly evaluated divergences.
pub const DIRECT_SLACK: f64 = 1e-8;
/// Slack of identities that go through an optimizer.
pub const SOLVER_SLACK: f64 = 1e-6;

/// One failed check.
#[derive(Clone, Debug, PartialEq)]
pub struct Violation {
    pub property: &'static str,
    pub case: usize,
    pub margin: f64,
    pub slack: f64,
    pub detail: String,
}

/// Worst margin seen for one property.
#[derive(Clone, Debug, PartialEq)]
pub struct PropertyMargin {
    pub property: &'static str,
    pub checks: usize,
    pub worst_margin: f64,
    pub slack: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SuiteReport {
    pub name: &'static str,
    pub seed: u64,
    pub cases: usize,
    pub checks: usize,
    pub properties: Vec<PropertyMargin>,
    pub violations: Vec<Violation>,
}

impl SuiteReport {
    fn new(name: &'static str, seed: u64) -> Self {
        Self {
            name,
            seed,
            cases: 0,
            checks: 0,
            properties: Vec::new(),
            violations: Vec::new(),
        }
    }

    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }

    fn check(&mut self, property: &'static str, case: usize, margin: f64, slack: f64, detail: impl FnOnce() -> String) {
        self.checks += 1;
        let ok = margin >= -slack;
        match self.properties.iter_mut().find(|p| p.property == property) {
            Some(p) => {
                p.checks += 1;
                if !(margin >= p.worst_margin) {
                    p.worst_margin = margin;
                }
            }
            None => self.properties.push(PropertyMargin {
                property,
                checks: 1,
                worst_margin: margin,
                slack,
            }),
        }
        if !ok {
            self.violations.push(Violation {
                property,
                case,
                margin,
                slack,
                detail: detail(),
            });
        }
    }

    fn at_most(&mut self, property: &'static str, case: usize, lhs: f64, rhs: f64, slack: f64) {
        let margin = if lhs == rhs { 0.0 } else { rhs - lhs };
        self.check(property, case, margin, slack, || alloc::format!("{lhs} > {rhs}"));
    }

    fn equal(&mut self, property: &'static str, case: usize, a: f64, b: f64, slack: f64) {
        let margin = if a == b { 0.0 } else { -(a - b).abs() };
        self.check(property, case, margin, slack, || alloc::format!("{a} != {b}"));
    }
}

/// Runs the named suite.
pub fn run(name: &str, seed: u64) -> Result<SuiteReport> {
    match name {
        "identity" => identity(seed),
        "commuting" => commuting(seed),
        "properties" => properties(seed),
        "dominance" => dominance(seed),
        "variational" => variational(seed),
        "threshold" => threshold(seed),
        "simulator" => simulator(seed),
        "pinching" => pinching(seed),
        _ => Err(Error::InvalidParameter(alloc::format!(
            "unknown suite {name:?}; expected one of {SUITE_NAMES:?}"
        ))),
    }
}

fn order(alpha: f64) -> RenyiOrder {
    RenyiOrder::new(alpha).expect("suite orders avoid 1")
}

/// Uniform order in `[lo, hi]` kept away from 1.
fn random_alpha(rng: &mut ChaCha8Rng, lo: f64, hi: f64) -> f64 {
    loop {
        let a = rng.gen_range(lo..hi);
        if (a - 1.0).abs() > 0.02 {
            return a;
        }
    }
}

fn herm(m: &CMatrix) -> HermitianOperator {
    HermitianOperator::new(m.clone()).expect("suite operators are Hermitian")
}

fn state(m: CMatrix) -> DensityOperator {
    DensityOperator::from_matrix(m).expect("suite states are valid")
}

fn sandwiched(rho: &DensityOperator, sigma: &CMatrix, alpha: f64) -> Result<f64> {
    Ok(sandwiched_divergence(rho, &herm(sigma), order(alpha))?.value())
}

fn flat(rho: &DensityOperator, sigma: &CMatrix, alpha: f64) -> Result<f64> {
    Ok(log_euclidean_divergence(rho, &herm(sigma), order(alpha))?.value())
}

/// Identity qubit channel: `I*_α = 2` and `sc(R) = (R - 2)₊`.
pub fn identity(seed: u64) -> Result<SuiteReport> {
    let mut r = SuiteReport::new("identity", seed);
    let id = QuantumChannel::identity(2);
    for (k, alpha) in [1.5, 2.0, 5.0].into_iter().enumerate() {
        let info = channel_renyi_info(&id, order(alpha))?;
        r.equal("channel information equals 2", k, info.value, 2.0, 1e-4);
        r.cases += 1;
    }
    for (k, rate) in [1.0, 2.5, 3.0].into_iter().enumerate() {
        let res = strong_converse_exponent(&id, &ExponentQuery::new(rate)?)?;
        let expected = (rate - 2.0).max(0.0);
        r.equal("exponent equals (R - 2)+", k, res.value, expected, 2e-4);
        r.at_most("exponent within its truncation bound", k, expected - res.value, res.truncation_bound, 1e-9);
        r.cases += 1;
    }
    Ok(r)
}

/// Commuting pairs: sandwiched, log-Euclidean and classical divergences agree.
pub fn commuting(seed: u64) -> Result<SuiteReport> {
    let mut r = SuiteReport::new("commuting", seed);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for case in 0..50 {
        let d = rng.gen_range(2..=6);
        let p = random::probabilities(&mut rng, d);
        let q = random::probabilities(&mut rng, d);
        let rho = DensityOperator::from_diagonal(&p)?;
        let sigma = HermitianOperator::from_real_diagonal(&q);
        for alpha in [0.6, 2.0, 3.0] {
            let o = order(alpha);
            let c = classical_renyi(&p, &q, o).value();
            let s = sandwiched_divergence(&rho, &sigma, o)?.value();
            let f = log_euclidean_divergence(&rho, &sigma, o)?.value();
            r.equal("sandwiched equals classical", case, s, c, 1e-8);
            r.equal("log-Euclidean equals classical", case, f, c, 1e-8);
        }
        r.cases += 1;
    }
    Ok(r)
}

/// Random state, rank-deficient one time in four.
fn random_state(rng: &mut ChaCha8Rng, d: usize) -> CMatrix {
    if rng.gen_range(0..4) == 0 {
        random::density_of_rank(rng, d, d - 1)
    } else {
        random::density(rng, d)
    }
}

/// Positive definite operator with trace in `[0.5, 2]`.
fn random_positive(rng: &mut ChaCha8Rng, d: usize) -> CMatrix {
    random::density(rng, d) * re(rng.gen_range(0.5..2.0))
}

/// `ρ_AB ⊗ σ_A'B'` regrouped as `(AA') ⊗ (BB')`.
fn regrouped_product(rho: &DensityOperator, sigma: &DensityOperator) -> Result<DensityOperator> {
    let (a, b) = (rho.dims()[0], rho.dims()[1]);
    let (a2, b2) = (sigma.dims()[0], sigma.dims()[1]);
    rho.tensor(sigma)
        .with_dims(&[a, b, a2, b2])?
        .permute(&[0, 2, 1, 3])?
        .with_dims(&[a * a2, b * b2])
}

/// Monotonicity in `α` and `σ`, additivity of `I*_α`, convexity in `σ`,
/// pinching bounds, and the variational form of `D♭_α`.
pub fn properties(seed: u64) -> Result<SuiteReport> {
    let mut r = SuiteReport::new("properties", seed);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for case in 0..100 {
        let d = rng.gen_range(2..=4);
        let rho = state(random_state(&mut rng, d));
        let sigma = random_positive(&mut rng, d);

        // Monotonicity in the order.
        let (a, b) = (random_alpha(&mut rng, 0.5, 6.0), random_alpha(&mut rng, 0.5, 6.0));
        let (a, b) = (a.min(b), a.max(b));
        r.at_most("sandwiched nondecreasing in alpha", case, sandwiched(&rho, &sigma, a)?, sandwiched(&rho, &sigma, b)?, DIRECT_SLACK);
        let (a, b) = (random_alpha(&mut rng, 0.1, 6.0), random_alpha(&mut rng, 0.1, 6.0));
        let (a, b) = (a.min(b), a.max(b));
        r.at_most("log-Euclidean nondecreasing in alpha", case, flat(&rho, &sigma, a)?, flat(&rho, &sigma, b)?, DIRECT_SLACK);

        // Antimonotonicity in sigma.
        let rank = rng.gen_range(1..=d);
        let bigger = &sigma + random::density_of_rank(&mut rng, d, rank) * re(rng.gen_range(0.05..1.0));
        let a = random_alpha(&mut rng, 0.5, 6.0);
        r.at_most("sandwiched antimonotone in sigma", case, sandwiched(&rho, &bigger, a)?, sandwiched(&rho, &sigma, a)?, DIRECT_SLACK);
        let a = random_alpha(&mut rng, 0.1, 6.0);
        r.at_most("log-Euclidean antimonotone in sigma", case, flat(&rho, &bigger, a)?, flat(&rho, &sigma, a)?, DIRECT_SLACK);

        // Additivity of the sandwiched mutual information.
        let ab = DensityOperator::new(random_state(&mut rng, 4), &[2, 2])?;
        let ab2 = DensityOperator::new(random::density(&mut rng, 4), &[2, 2])?;
        let a = random_alpha(&mut rng, 0.5, 6.0);
        let joint = sandwiched_mutual_info(&regrouped_product(&ab, &ab2)?, order(a))?.value;
        let parts = sandwiched_mutual_info(&ab, order(a))?.value + sandwiched_mutual_info(&ab2, order(a))?.value;
        r.equal("sandwiched mutual information additive", case, joint, parts, SOLVER_SLACK);

        // Convexity in sigma.
        let other = random_positive(&mut rng, d);
        let t = rng.gen_range(0.0..1.0);
        let mix = &sigma * re(t) + &other * re(1.0 - t);
        let a = random_alpha(&mut rng, 0.5, 6.0);
        let chord = t * sandwiched(&rho, &sigma, a)? + (1.0 - t) * sandwiched(&rho, &other, a)?;
        r.at_most("sandwiched convex in sigma", case, sandwiched(&rho, &mix, a)?, chord, DIRECT_SLACK);
        let a = random_alpha(&mut rng, 0.1, 6.0);
        let chord = t * flat(&rho, &sigma, a)? + (1.0 - t) * flat(&rho, &other, a)?;
        r.at_most("log-Euclidean convex in sigma", case, flat(&rho, &mix, a)?, chord, DIRECT_SLACK);

        // Pinching.
        let degenerate = random::degenerate_density(&mut rng, d) * re(rng.gen_range(0.5..2.0));
        let pinch = Pinching::of(&degenerate);
        let v = distinct_eigenvalue_count(&herm(&degenerate)) as f64;
        let pinched = state(pinch.apply(rho.matrix()));
        let a = random_alpha(&mut rng, 0.5, 6.0);
        let full = sandwiched(&rho, &degenerate, a)?;
        let inner = sandwiched(&pinched, &degenerate, a)?;
        r.at_most("pinching lowers the sandwiched divergence", case, inner, full, DIRECT_SLACK);
        r.at_most("pinching costs at most 2 log v", case, full, inner + 2.0 * libm::log2(v), DIRECT_SLACK);

        // Variational form, on full-rank pairs.
        if case < 20 {
            let rho = state(random::density(&mut rng, d));
            let sigma = state(random::density(&mut rng, d));
            let a = random_alpha(&mut rng, 0.2, 5.0);
            let (value, _) = log_euclidean_variational(&rho, &sigma, order(a))?;
            r.equal("variational form of log-Euclidean", case, value, flat(&rho, sigma.matrix(), a)?, 1e-5);
        }
        r.cases += 1;
    }
    Ok(r)
}

/// Random permutation-invariant state on `(C^d)^{⊗n}` of one of four kinds.
fn random_symmetric_state(rng: &mut ChaCha8Rng, kind: usize, n: usize, d: usize) -> Result<CMatrix> {
    let dim = d.pow(n as u32);
    Ok(match kind % 4 {
        0 => symmetrize(&random::density(rng, dim), d, n)?,
        1 => symmetrize(&random::density_of_rank(rng, dim, 1), d, n)?,
        2 => {
            let one = random::density(rng, d);
            (1..n).fold(one.clone(), |acc, _| acc.kronecker(&one))
        }
        _ => {
            let v = random::pure_vector(rng, d);
            let one = &v * v.adjoint();
            (1..n).fold(one.clone(), |acc, _| acc.kronecker(&one))
        }
    })
}

/// Dominance of the universal symmetric state for qubits, `n ∈ {2, 3, 4}`.
pub fn dominance(seed: u64) -> Result<SuiteReport> {
    let mut r = SuiteReport::new("dominance", seed);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let d = 2;
    for n in [2usize, 3, 4] {
        let u = universal_symmetric_state(n, d)?;
        let bound = ((n + 1) * (n + 1)) as f64;
        r.at_most("v within (n+1)^2", n, u.v, bound, 0.0);
        r.at_most("v within the general bound", n, u.v, u.general_bound, 0.0);
        let distinct = distinct_eigenvalue_count(u.state.operator()) as f64;
        r.at_most("distinct eigenvalues within v", n, distinct, u.v, 0.0);
        for k in 0..200 {
            let s = random_symmetric_state(&mut rng, k, n, d)?;
            r.check("dominance", n * 1000 + k, u.dominance_margin(&s), 1e-9, || {
                alloc::format!("n = {n}, state {k}")
            });
            r.cases += 1;
        }
    }
    Ok(r)
}

/// `|t⟩_A ⊗ |u_t⟩_A'` for an orthonormal pair `u_t`, with random weights.
fn two_type_ensemble(rng: &mut ChaCha8Rng) -> Result<StateEnsemble> {
    let u = random::unitary(rng, 2);
    let q = rng.gen_range(0.2..0.8);
    let items = (0..2)
        .map(|t| {
            let v = PureState::basis(2, t).vector().kronecker(&u.column(t).into_owned());
            Ok((if t == 0 { q } else { 1.0 - q }, PureState::new(v, &[2, 2])?.density()))
        })
        .collect::<Result<Vec<_>>>()?;
    StateEnsemble::new(items)
}

/// `(1 ⊗ U)|Φ⟩` for a random `U`.
fn rotated_bell(rng: &mut ChaCha8Rng) -> Result<StateEnsemble> {
    let u = random::unitary(rng, 2);
    let phi = PureState::maximally_entangled(2);
    let v = CMatrix::identity(2, 2).kronecker(&u) * phi.vector();
    Ok(StateEnsemble::single(PureState::new(v, &[2, 2])?.density()))
}

/// The log-Euclidean exponent candidate `F` three ways: `λ`-supremum,
/// constrained variational form, and the minimum of its two branches.
pub fn variational(seed: u64) -> Result<SuiteReport> {
    let mut r = SuiteReport::new("variational", seed);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut case = 0;
    for _ in 0..10 {
        let kraus = rng.gen_range(2..=3);
        let ch = random::channel(&mut rng, kraus, 2, 2);
        let ensembles = [rotated_bell(&mut rng)?, two_type_ensemble(&mut rng)?];
        for ens in &ensembles {
            for rate in [0.5, 1.5] {
                let sup = exponent_candidate_f(&ch, ens, &ExponentQuery::with_delta(rate, 1e-6)?)?.value;
                let (value, _) = variational_f(&ch, rate, ens)?;
                let split = f1_f2_split(&ch, rate, ens)?;
                r.equal("supremum form equals variational form", case, sup, value, 1e-4);
                r.equal("branch minimum equals variational form", case, split.min, value, 1e-4);
                r.cases += 1;
                case += 1;
            }
        }
    }
    Ok(r)
}

/// Depolarizing qubit channel (p = 0.1): the exponent vanishes below capacity and not above.
pub fn threshold(seed: u64) -> Result<SuiteReport> {
    let mut r = SuiteReport::new("threshold", seed);
    let ch = QuantumChannel::depolarizing(2, 0.1)?;
    let ce = ea_capacity(&ch)?.value;
    let oracle = mutual_information(&ch.choi_state())?;
    r.equal("capacity equals maximally entangled mutual information", 0, ce, oracle, 1e-4);
    let below = strong_converse_exponent(&ch, &ExponentQuery::new(ce - 0.05)?)?;
    r.at_most("exponent zero below capacity", 1, below.value, 0.0, 1e-9);
    let above = strong_converse_exponent(&ch, &ExponentQuery::new(ce + 0.1)?)?;
    r.at_most("exponent positive above capacity", 2, 1e-3, above.value, 0.0);
    r.cases = 3;
    Ok(r)
}

/// Dense coding, the converse-direction inequality for random codes, and rate padding.
pub fn simulator(seed: u64) -> Result<SuiteReport> {
    let mut r = SuiteReport::new("simulator", seed);
    let id = QuantumChannel::identity(2);
    let phi = SharedState::maximally_entangled(2);
    let dense = build_ea_code(&id, 1, &phi, 2.0, seed, CodebookSampling::WithoutReplacement)?;
    r.equal("dense coding is exact", 0, success_probability(&id, &dense, EncodingSide::Sender)?, 1.0, 1e-12);
    r.cases += 1;

    let ch = QuantumChannel::depolarizing(2, 0.1)?;
    let rate = ea_capacity(&ch)?.value + 0.2;
    let sc = strong_converse_exponent(&ch, &ExponentQuery::new(rate)?)?.value;
    let sim = simulate(&ch, &phi, rate, &[1, 2, 3, 4, 5], seed, CodebookSampling::Independent)?;
    for p in &sim.points {
        r.at_most("measured exponent at least sc - 0.05", p.n, sc - 0.05, p.exponent, 0.0);
        r.cases += 1;
    }

    for n in [1usize, 2] {
        let code = build_ea_code(&ch, n, &phi, 1.0, seed ^ 0x9e37, CodebookSampling::Independent)?;
        let base = success_probability(&ch, &code, EncodingSide::Sender)?;
        let size = 2 * code.size + 1;
        let padded = success_probability(&ch, &code.pad_to(size)?, EncodingSide::Sender)?;
        r.equal("padding scales by M'/M", n, padded, base * code.size as f64 / size as f64, 1e-12);
        r.cases += 1;
    }
    Ok(r)
}

/// Projections summing to the identity, each inside an eigenspace of `sigma`,
/// obtained by randomly splitting the eigenspaces.
fn refined_projections(rng: &mut ChaCha8Rng, sigma: &CMatrix) -> Vec<CMatrix> {
    let mut out = Vec::new();
    for p in Pinching::of(sigma).projections() {
        let e = eigh(p);
        let d = p.nrows();
        let rank = e.rank();
        let basis = e.vectors.columns(d - rank, rank) * random::unitary(rng, rank);
        let mut start = 0;
        while start < rank {
            let len = rng.gen_range(1..=rank - start);
            let v = basis.columns(start, len);
            out.push(&v * v.adjoint());
            start += len;
        }
    }
    out
}

/// The pinching inequality `X ≤ v(σ) P_σ(X)` and the refined pinching bound
/// `D*_α(ρ‖σ) ≤ D*_α(P(ρ)‖σ) + f_α(M)`.
pub fn pinching(seed: u64) -> Result<SuiteReport> {
    let mut r = SuiteReport::new("pinching", seed);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for case in 0..100 {
        let d = rng.gen_range(2..=8);
        let sigma = random::degenerate_density(&mut rng, d) * re(rng.gen_range(0.5..2.0));
        let v = distinct_eigenvalue_count(&herm(&sigma)) as f64;
        let rank = rng.gen_range(1..=d);
        let x = random::density_of_rank(&mut rng, d, rank) * re(rng.gen_range(0.1..10.0));
        let gap = Pinching::of(&sigma).apply(&x) * re(v) - &x;
        let scale = x.trace().re;
        r.check("X <= v(sigma) P(X)", case, eigh(&gap).min_value() / scale, 1e-10, || {
            alloc::format!("d = {d}, v = {v}")
        });

        let projections = refined_projections(&mut rng, &sigma);
        let m = projections.len() as f64;
        let pinch = Pinching::from_projections(projections)?;
        let rho = state(random_state(&mut rng, d));
        let a = random_alpha(&mut rng, 0.5, 5.0);
        let f = if a <= 2.0 { libm::log2(m) } else { 2.0 * libm::log2(m) };
        let full = sandwiched(&rho, &sigma, a)?;
        let pinched = sandwiched(&state(pinch.apply(rho.matrix())), &sigma, a)?;
        r.at_most("D(rho||sigma) <= D(P(rho)||sigma) + f(M)", case, full, pinched + f, DIRECT_SLACK);
        r.cases += 1;
    }
    Ok(r)
}

/// Name and suite function pairs, for callers that iterate over all suites.
pub fn all() -> Vec<(&'static str, fn(u64) -> Result<SuiteReport>)> {
    vec![
        ("identity", identity as fn(u64) -> Result<SuiteReport>),
        ("commuting", commuting),
        ("properties", properties),
        ("dominance", dominance),
        ("variational", variational),
        ("threshold", threshold),
        ("simulator", simulator),
        ("pinching", pinching),
    ]
}

#[cfg(test)]
mod tests {
    use super::*;

    fn assert_passes(r: &SuiteReport) {
        assert!(r.passed(), "{}: {:#?}", r.name, r.violations);
        assert!(r.checks > 0);
    }

    #[test]
    fn fast_suites_pass() {
        for f in [commuting, dominance, pinching] {
            assert_passes(&f(DEFAULT_SEED).unwrap());
        }
    }

    #[test]
    fn properties_passes() {
        let r = properties(DEFAULT_SEED).unwrap();
        assert_eq!(r.cases, 100);
        assert_passes(&r);
    }

    #[test]
    fn reports_are_deterministic() {
        assert_eq!(commuting(5).unwrap(), commuting(5).unwrap());
    }

    #[test]
    fn violations_are_recorded() {
        let mut r = SuiteReport::new("t", 0);
        r.at_most("p", 0, 1.0, 0.0, 0.5);
        r.at_most("p", 1, 0.0, 1.0, 0.5);
        r.equal("q", 2, 1.0, 1.0 + 1e-3, 1e-2);
        assert_eq!(r.checks, 3);
        assert_eq!(r.violations.len(), 1);
        assert_eq!(r.violations[0].case, 0);
        assert_eq!(r.properties[0].worst_margin, -1.0);
        assert!(!r.passed());
    }

    #[test]
    fn unknown_suite_is_rejected() {
        assert!(run("nope", 0).is_err());
        assert_eq!(all().len(), SUITE_NAMES.len());
    }

    #[test]
    fn refined_projections_resolve_the_identity() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let sigma = random::degenerate_density(&mut rng, 6);
        let ps = refined_projections(&mut rng, &sigma);
        assert!(ps.len() >= distinct_eigenvalue_count(&herm(&sigma)));
        let pinch = Pinching::from_projections(ps.clone()).unwrap();
        for p in &ps {
            assert!(crate::operator::max_abs(&(p * &sigma - &sigma * p)) < 1e-10);
        }
        assert_eq!(pinch.len(), ps.len());
    }
}
