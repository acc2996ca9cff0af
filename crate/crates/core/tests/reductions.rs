use proptest::prelude::*;

use pdp_core::designer::designer_oracle;
use pdp_core::instances::{gen_partition_instance, gen_two_agent_partition, SetCoverChoice, SetCoverInstance};
use pdp_core::multiagent::multi_agent_solve;
use pdp_core::rational::{cmp_fractions, mediant, rat};
use pdp_core::Rational;

#[test]
fn partition_gap() {
    let yes = gen_partition_instance(&[1, 2, 3]).unwrap();
    assert_eq!(designer_oracle(&yes.instance).unwrap().profit, yes.adjusted_target);
    let no = gen_partition_instance(&[1, 2]).unwrap();
    assert!(designer_oracle(&no.instance).unwrap().profit < no.adjusted_target);
}

#[test]
fn two_agent_partition_gap() {
    let yes = gen_two_agent_partition(&[1, 1]).unwrap();
    let out = multi_agent_solve(&yes.instance).unwrap();
    assert_eq!(out.profit, yes.adjusted_target);
    assert!(out.offered.contains(yes.special));
    let no = gen_two_agent_partition(&[1, 2]).unwrap();
    let out = multi_agent_solve(&no.instance).unwrap();
    assert!(out.profit < no.adjusted_target);
    // the best the no-instance does is petal 1 plus the special petal
    assert_eq!(out.offered, [0, 4].into_iter().collect());
    assert_eq!(out.profit + rat(2, 1_000_000), rat(70, 23));
}

#[test]
fn two_agent_partition_is_symmetric() {
    let a = gen_two_agent_partition(&[1, 3, 2]).unwrap();
    let swapped = pdp_core::multiagent::MultiAgentInstance::new(
        a.instance.agents().iter().rev().cloned().collect(),
        a.instance.delta().clone(),
        a.instance.delta_prime().clone(),
    )
    .unwrap();
    assert_eq!(multi_agent_solve(&a.instance).unwrap().profit, multi_agent_solve(&swapped).unwrap().profit);
}

#[test]
fn set_cover_budget_two() {
    let sc = SetCoverInstance::new(2, vec![vec![0], vec![1]], 2).unwrap();
    let (_, best) = sc.optimum().unwrap();
    assert!(best.is_positive());
    let sc = SetCoverInstance::new(3, vec![vec![0], vec![1], vec![2]], 2).unwrap();
    let (_, best) = sc.optimum().unwrap();
    assert!(!best.is_positive());
}

#[test]
fn set_cover_single_set_breaks_even() {
    // With a budget of one the set-state is left every step, so it holds
    // exactly half the mass: revenue 2 * 1/2 against a cost of 1.
    let sc = SetCoverInstance::new(2, vec![vec![0], vec![1], vec![0, 1]], 1).unwrap();
    let cover = SetCoverChoice { sets: [2].into_iter().collect(), links: vec![Some(2), Some(2)] };
    assert_eq!(sc.profit(&cover).unwrap(), Rational::zero());
    let mass = sc.chain(&cover).unwrap().steady_state().unwrap();
    assert_eq!(mass[2], rat(1, 2));
    assert_eq!(sc.optimum().unwrap().1, Rational::zero());
}

#[test]
fn set_cover_mass_on_sets() {
    let sc = SetCoverInstance::new(2, vec![vec![0, 1]], 2).unwrap();
    let cover = SetCoverChoice { sets: [0].into_iter().collect(), links: vec![Some(0), Some(0)] };
    let mass = sc.chain(&cover).unwrap().steady_state().unwrap();
    // k^2 / (1 + k^2) of the time on the set-state, nothing on the bad state
    assert_eq!(mass[0], rat(4, 5));
    assert_eq!(mass[3], Rational::zero());
}

proptest! {
    #[test]
    fn mediant_lies_between(x in -500i64..500, y in 1i64..500, r in -500i64..500, s in 1i64..500) {
        let (x, y, r, s) = (rat(x, 1), rat(y, 1), rat(r, 1), rat(s, 1));
        prop_assume!(cmp_fractions(&x, &y, &r, &s).is_lt());
        let m = mediant(&x, &y, &r, &s);
        prop_assert!(&x / &y < m && m < &r / &s);
    }
}
