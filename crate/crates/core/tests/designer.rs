use num_bigint::BigInt;
use proptest::prelude::*;

use pdp_core::agent::is_feasible;
use pdp_core::designer::{designer_oracle, fptas_solve, preprocess, DropReason};
use pdp_core::instances::{gen_random_flower, RandomRanges};
use pdp_core::model::designer_profit;
use pdp_core::rational::rat;
use pdp_core::{Error, Rational, StateSet};

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn fptas_within_factor(n in 1usize..=9, seed in any::<u64>(), coarse in any::<bool>()) {
        let delta = rat(1, 2);
        let eps = if coarse { rat(1, 2) } else { rat(1, 10) };
        let inst = gen_random_flower(n, seed, &RandomRanges::default(), &delta).unwrap();
        let best = designer_oracle(&inst).unwrap();
        match preprocess(&inst, &delta, &eps) {
            Err(Error::EmptyInstance) => prop_assert!(best.offered.is_empty()),
            Err(e) => return Err(TestCaseError::fail(e.to_string())),
            Ok(qi) => {
                let out = fptas_solve(&qi);
                let set = &out.design.offered;
                prop_assert!(is_feasible(&inst, set).unwrap());
                prop_assert_eq!(&designer_profit(&inst, set, set).unwrap(), &out.design.profit);
                prop_assert!(out.design.profit >= (Rational::one() - &eps) * &best.profit);
                prop_assert!(BigInt::from(out.stats.max_bins) <= out.stats.bin_bound);
                prop_assert_eq!(out.stats.bins_per_step.len(), qi.survivors.len());
            }
        }
    }

    #[test]
    fn dropped_petals_are_useless_alone(n in 1usize..=8, seed in any::<u64>()) {
        let delta = rat(1, 2);
        let inst = gen_random_flower(n, seed, &RandomRanges::default(), &delta).unwrap();
        if let Ok(qi) = preprocess(&inst, &delta, &rat(1, 4)) {
            for (j, why) in &qi.dropped {
                let single: StateSet = [*j].into_iter().collect();
                match why {
                    DropReason::Refused => prop_assert!(!is_feasible(&inst, &single).unwrap()),
                    DropReason::Unprofitable => prop_assert!(!designer_profit(&inst, &single, &single).unwrap().is_positive()),
                }
            }
            for &j in &qi.survivors {
                let single: StateSet = [j].into_iter().collect();
                prop_assert!(designer_profit(&inst, &single, &single).unwrap() <= qi.best_single);
            }
        }
    }
}
