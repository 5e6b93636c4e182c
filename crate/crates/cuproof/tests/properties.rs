//! Kernel property suites, 10,000 cases each.

mod common;

use common::*;
use proptest::prelude::*;
use rand::rngs::StdRng;
use rand::SeedableRng;

fn cfg() -> ProptestConfig {
    ProptestConfig {
        cases: 10_000,
        failure_persistence: None,
        ..ProptestConfig::default()
    }
}

proptest! {
    #![proptest_config(cfg())]

    #[test]
    fn typing_survives_substitution_beta_and_fixbeta(seed in any::<u64>()) {
        prop_type_preservation(seed).map_err(TestCaseError::fail)?;
    }

    #[test]
    fn alpha_equivalence_is_a_congruence(seed in any::<u64>()) {
        prop_alpha_congruence(seed).map_err(TestCaseError::fail)?;
    }

    #[test]
    fn beta_normalization_is_idempotent(seed in any::<u64>()) {
        prop_beta_idempotent(seed).map_err(TestCaseError::fail)?;
    }

    #[test]
    fn tree_distance_is_an_ultrametric(x in arb_tree(), y in arb_tree(), z in arb_tree()) {
        prop_ultrametric(&x, &y, &z).map_err(TestCaseError::fail)?;
    }

    #[test]
    fn consequence_operator_is_monotone(seed in any::<u64>()) {
        prop_t_monotone(seed).map_err(TestCaseError::fail)?;
    }

    #[test]
    fn found_proofs_check_in_every_larger_calculus(seed in any::<u64>()) {
        prop_search_check_agreement(seed).map_err(TestCaseError::fail)?;
    }
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 500, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn gfp_matches_the_powerset_oracle(seed in any::<u64>()) {
        let rp = RProgram::generate(&mut StdRng::seed_from_u64(seed), false);
        prop_gfp_oracle(&rp).map_err(TestCaseError::fail)?;
    }
}

#[test]
fn self_loop_separates_greatest_and_least_fixed_points() {
    let rp = RProgram::self_loop();
    assert_eq!(rp.brute_gfp().len(), 1);
    assert!(rp.brute_lfp().is_empty());
    prop_gfp_oracle(&rp).unwrap();
}
