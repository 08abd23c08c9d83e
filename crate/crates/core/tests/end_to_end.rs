use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use scexp_core::divergence::{sandwiched_divergence, RenyiOrder};
use scexp_core::optimize::{quantum_exponent, strong_converse_exponent, ExponentQuery};
use scexp_core::{random, DensityOperator, HermitianOperator, QuantumChannel};

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn sandwiched_data_processing(seed in 0u64..1_000_000, d in 2usize..=3, alpha in 0.5f64..6.0) {
        prop_assume!((alpha - 1.0).abs() > 1e-3);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let ch = random::channel(&mut rng, 2, d, 2);
        let rho = DensityOperator::from_matrix(random::density(&mut rng, d)).unwrap();
        let sigma = DensityOperator::from_matrix(random::density(&mut rng, d)).unwrap();
        let o = RenyiOrder::new(alpha).unwrap();
        let before = sandwiched_divergence(&rho, sigma.operator(), o).unwrap().value();
        let rho_out = ch.apply(&rho, 0).unwrap();
        let sigma_out = HermitianOperator::new(ch.apply(&sigma, 0).unwrap().matrix().clone()).unwrap();
        let after = sandwiched_divergence(&rho_out, &sigma_out, o).unwrap().value();
        prop_assert!(after <= before + 1e-9, "{after} > {before}");
    }
}

#[test]
fn quantum_exponent_is_half_the_classical_one_at_twice_the_rate() {
    let ch = QuantumChannel::amplitude_damping(0.2).unwrap();
    for rate in [0.9, 1.2] {
        let q = quantum_exponent(&ch, &ExponentQuery::new(rate).unwrap()).unwrap();
        let c = strong_converse_exponent(&ch, &ExponentQuery::new(2.0 * rate).unwrap()).unwrap();
        assert!((q.value - c.value / 2.0).abs() < 1e-5, "R = {rate}: {} vs {}", q.value, c.value);
    }
}

#[test]
fn exponent_is_nondecreasing_in_the_rate() {
    let ch = QuantumChannel::depolarizing(2, 0.2).unwrap();
    let values: Vec<f64> = [1.2, 1.5, 1.8, 2.1]
        .iter()
        .map(|&r| strong_converse_exponent(&ch, &ExponentQuery::new(r).unwrap()).unwrap().value)
        .collect();
    for w in values.windows(2) {
        assert!(w[1] >= w[0] - 1e-7, "{values:?}");
    }
    assert!(values[3] > 0.0);
}

#[test]
fn suites_are_reproducible_per_seed() {
    use scexp_core::suites;
    let a = suites::run("pinching", 11).unwrap();
    let b = suites::run("pinching", 11).unwrap();
    assert_eq!(a, b);
    assert!(a.passed());
    assert_ne!(a, suites::run("pinching", 12).unwrap());
}
