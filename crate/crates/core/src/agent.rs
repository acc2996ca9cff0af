//! The agent's best response: which offered platforms to adopt.
//!
//! The agent maximizes its average reward `(A + sum z*phi) / (B + sum z)`.
//! Adding a petal with `z > 0` pulls the ratio towards its potential, so the
//! agent takes petals in decreasing potential while the current value is
//! strictly below the next potential. Ties are resolved towards not adopting.

use std::cmp::Ordering;

use crate::error::{Error, Result};
use crate::model::{DerivedParams, FlowerInstance, StateSet};
use crate::rational::{cmp_fractions, Rational};

/// Largest instance the exhaustive oracle accepts by default.
pub const ORACLE_LIMIT: usize = 25;

#[derive(Debug, Clone, PartialEq)]
pub struct AdoptionSet {
    pub states: StateSet,
    pub utility: Rational,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GreedyStep {
    pub state: usize,
    pub potential: Rational,
    pub utility_before: Rational,
    pub accepted: bool,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct GreedyTrace {
    pub steps: Vec<GreedyStep>,
}

/// Runs the greedy rule over `order` (already sorted by potential, highest first).
/// Stops at the first petal whose potential does not beat the running value.
fn greedy_pass(
    dp: &DerivedParams,
    order: impl Iterator<Item = usize>,
    num: &mut Rational,
    den: &mut Rational,
    chosen: &mut Vec<usize>,
    mut trace: Option<&mut GreedyTrace>,
) {
    for j in order {
        // u < phi  <=>  num < phi * den   (den > 0)
        let accept = *num < &dp.phi[j] * &*den;
        if let Some(t) = trace.as_deref_mut() {
            t.steps.push(GreedyStep {
                state: j,
                potential: dp.phi[j].clone(),
                utility_before: &*num / &*den,
                accepted: accept,
            });
        }
        if !accept {
            break;
        }
        *num += &dp.z[j] * &dp.phi[j];
        *den += &dp.z[j];
        chosen.push(j);
    }
}

/// Best response when every `z` is positive.
pub fn greedy_solve(dp: &DerivedParams) -> Result<(AdoptionSet, GreedyTrace)> {
    if let Some(j) = (0..dp.n()).find(|&j| !dp.z[j].is_positive()) {
        return Err(Error::Sign { state: j, z: Box::new(dp.z[j].clone()) });
    }
    let mut trace = GreedyTrace::default();
    let (mut num, mut den) = (dp.a.clone(), dp.b.clone());
    let mut chosen = Vec::new();
    greedy_pass(dp, dp.potential_order().into_iter(), &mut num, &mut den, &mut chosen, Some(&mut trace));
    let states: StateSet = chosen.into_iter().collect();
    Ok((AdoptionSet { states, utility: num / den }, trace))
}

fn signed_over(dp: &DerivedParams, candidates: &[usize]) -> AdoptionSet {
    // Fixed point of u -> value of {z > 0, phi > u} + {z < 0, phi < u}. Each
    // round can only raise u, and a repeated set means no petal wants to flip.
    let (mut num, mut den) = (dp.a.clone(), dp.b.clone());
    let mut chosen: Vec<usize> = Vec::new();
    loop {
        let next: Vec<usize> = candidates
            .iter()
            .copied()
            .filter(|&j| match dp.z[j].cmp(&Rational::zero()) {
                Ordering::Greater => num < &dp.phi[j] * &den,
                Ordering::Less => num > &dp.phi[j] * &den,
                Ordering::Equal => false,
            })
            .collect();
        if next == chosen {
            break;
        }
        (num, den) = dp.objective_parts(next.iter().copied());
        chosen = next;
    }
    AdoptionSet { states: chosen.into_iter().collect(), utility: num / den }
}

/// Best response allowing negative `z`: every petal whose adoption moves the
/// value towards its potential, iterated until the adopted set is stable.
pub fn greedy_solve_signed(dp: &DerivedParams) -> AdoptionSet {
    let all: Vec<usize> = (0..dp.n()).collect();
    signed_over(dp, &all)
}

/// What the agent adopts when only the platforms in `offered` exist.
pub fn respond(dp: &DerivedParams, offered: &StateSet) -> AdoptionSet {
    signed_over(dp, offered.as_slice())
}

/// Whether the agent adopts every platform in `offered`.
pub fn is_feasible(inst: &FlowerInstance, offered: &StateSet) -> Result<bool> {
    inst.check_subset(offered)?;
    Ok(is_feasible_with(&inst.derived(), offered))
}

pub fn is_feasible_with(dp: &DerivedParams, offered: &StateSet) -> bool {
    respond(dp, offered).states == *offered
}

/// Exhaustive best response; ties go to the smallest set, then lexicographic.
pub fn agent_oracle(dp: &DerivedParams) -> Result<AdoptionSet> {
    agent_oracle_with_limit(dp, ORACLE_LIMIT)
}

pub fn agent_oracle_with_limit(dp: &DerivedParams, limit: usize) -> Result<AdoptionSet> {
    let n = dp.n();
    if n > limit || n >= 64 {
        return Err(Error::TooLarge { what: "agent oracle", size: n as u128, limit: limit as u128 });
    }
    let (mut num, mut den) = (dp.a.clone(), dp.b.clone());
    let (mut best_num, mut best_den, mut best_mask) = (num.clone(), den.clone(), 0u64);
    let mut mask = 0u64;
    // Gray-code walk: one petal enters or leaves per step.
    for step in 1u64..(1u64 << n) {
        let bit = step.trailing_zeros() as usize;
        let term = &dp.z[bit] * &dp.phi[bit];
        if mask >> bit & 1 == 0 {
            num += term;
            den += &dp.z[bit];
        } else {
            num -= term;
            den -= &dp.z[bit];
        }
        mask ^= 1 << bit;
        let better = match cmp_fractions(&num, &den, &best_num, &best_den) {
            Ordering::Greater => true,
            Ordering::Less => false,
            Ordering::Equal => StateSet::from_mask(mask).cmp_size_lex(&StateSet::from_mask(best_mask)) == Ordering::Less,
        };
        if better {
            best_num = num.clone();
            best_den = den.clone();
            best_mask = mask;
        }
    }
    Ok(AdoptionSet { states: StateSet::from_mask(best_mask), utility: best_num / best_den })
}
