use proptest::prelude::*;

use pdp_core::agent::{agent_oracle, greedy_solve, greedy_solve_signed, is_feasible_with, respond};
use pdp_core::chain::GeneralChain;
use pdp_core::instances::{gen_random_flower, gen_random_signed_flower, RandomRanges};
use pdp_core::model::stationary_distribution_flower;
use pdp_core::rational::rat;
use pdp_core::{Rational, StateSet};

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn greedy_matches_oracle(n in 1usize..=10, seed in any::<u64>()) {
        let inst = gen_random_flower(n, seed, &RandomRanges::default(), &rat(1, 2)).unwrap();
        let dp = inst.derived();
        let (greedy, trace) = greedy_solve(&dp).unwrap();
        prop_assert_eq!(&greedy.utility, &agent_oracle(&dp).unwrap().utility);
        // the trace accepts a prefix and rejects at most once
        let accepted = trace.steps.iter().take_while(|s| s.accepted).count();
        prop_assert_eq!(accepted, greedy.states.len());
        prop_assert!(trace.steps.len() <= accepted + 1);
    }

    #[test]
    fn signed_matches_oracle(n in 1usize..=9, seed in any::<u64>()) {
        let inst = gen_random_signed_flower(n, seed, &RandomRanges::default()).unwrap();
        let dp = inst.derived();
        let signed = greedy_solve_signed(&dp);
        prop_assert_eq!(&signed.utility, &agent_oracle(&dp).unwrap().utility);
        prop_assert_eq!(&signed.utility, &dp.utility(&signed.states));
    }

    #[test]
    fn feasible_iff_value_below_every_potential(n in 1usize..=7, seed in any::<u64>(), mask in any::<u64>()) {
        let inst = gen_random_flower(n, seed, &RandomRanges::default(), &rat(1, 3)).unwrap();
        let dp = inst.derived();
        let set = StateSet::from_mask(mask & ((1 << n) - 1));
        let value = dp.utility(&set);
        let expected = set.iter().all(|j| value < dp.phi[j]);
        prop_assert_eq!(is_feasible_with(&dp, &set), expected);
        // the response never adopts something that was not offered
        prop_assert!(respond(&dp, &set).states.is_subset(&set));
    }

    #[test]
    fn closed_form_matches_linear_solve(n in 1usize..=6, seed in any::<u64>(), mask in any::<u64>()) {
        let inst = gen_random_signed_flower(n, seed, &RandomRanges::default()).unwrap();
        let set = StateSet::from_mask(mask & ((1 << n) - 1));
        let closed = stationary_distribution_flower(&inst, &set).unwrap();
        let solved = GeneralChain::from_flower(&inst, &set).unwrap().steady_state().unwrap();
        prop_assert_eq!(&closed, &solved);
        let rewards = inst.reward_vector(&set).unwrap();
        let average: Rational = solved.iter().zip(&rewards).map(|(x, r)| x * r).sum();
        prop_assert_eq!(average, inst.derived().utility(&set));
    }
}

#[test]
fn signed_revisits_positive_petals() {
    // Adopting the shortening platforms lifts the value above a positive
    // petal that a single forward pass would already have kept.
    let inst = gen_random_signed_flower(9, 8, &RandomRanges::default()).unwrap();
    let dp = inst.derived();
    let oracle = agent_oracle(&dp).unwrap();
    assert_eq!(oracle.utility, rat(472871, 32257));
    assert_eq!(greedy_solve_signed(&dp), oracle);
}
