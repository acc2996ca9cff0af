//! Choosing which platforms to offer a single agent.
//!
//! The designer only earns on platforms the agent adopts, and offering one
//! the agent refuses is pure cost, so it suffices to search over offer sets
//! the agent adopts in full. The approximation scheme grows such sets one
//! petal at a time and keeps one representative per bin of (rounded
//! profit, rounded revenue, exact added stationary weight). Within a bin it
//! keeps the set with the smaller `sum z*phi`, which leaves the agent the
//! most room to accept further petals.

use std::collections::BTreeMap;

use num_bigint::BigInt;

use crate::agent::is_feasible_with;
use crate::error::{Error, Result};
use crate::model::{profit_with, DerivedParams, FlowerInstance, StateSet};
use crate::rational::Rational;

/// Largest instance the exhaustive designer oracle accepts.
pub const DESIGNER_ORACLE_LIMIT: usize = 22;

#[derive(Debug, Clone, PartialEq)]
pub struct DesignSet {
    pub offered: StateSet,
    pub adopted: StateSet,
    pub profit: Rational,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DropReason {
    /// The agent would not adopt this platform even alone.
    Refused,
    /// Offering this platform alone does not pay.
    Unprofitable,
}

#[derive(Debug, Clone)]
pub struct QuantizedInstance {
    pub instance: FlowerInstance,
    pub params: DerivedParams,
    pub delta: Rational,
    pub epsilon: Rational,
    /// Petals kept by preprocessing, increasing.
    pub survivors: Vec<usize>,
    pub dropped: Vec<(usize, DropReason)>,
    /// Best single-platform profit.
    pub best_single: Rational,
    /// Largest cost relative to `best_single`.
    pub cost_ratio: Rational,
    /// `z / delta` for every petal (meaningful on survivors).
    pub z_steps: Vec<i64>,
}

#[derive(Debug, Clone)]
pub struct PreprocessOptions {
    pub cost_ratio_ceiling: Rational,
}

impl Default for PreprocessOptions {
    fn default() -> Self {
        PreprocessOptions { cost_ratio_ceiling: Rational::from_integer(1000) }
    }
}

pub fn preprocess(inst: &FlowerInstance, delta: &Rational, epsilon: &Rational) -> Result<QuantizedInstance> {
    preprocess_with(inst, delta, epsilon, &PreprocessOptions::default())
}

pub fn preprocess_with(inst: &FlowerInstance, delta: &Rational, epsilon: &Rational, opts: &PreprocessOptions) -> Result<QuantizedInstance> {
    if !epsilon.is_positive() || *epsilon >= Rational::one() {
        return Err(Error::Range(format!("epsilon = {epsilon} must lie in (0, 1)")));
    }
    if !delta.is_positive() {
        return Err(Error::Range(format!("delta = {delta} must be positive")));
    }
    let dp = inst.derived();
    let mut survivors = Vec::new();
    let mut dropped = Vec::new();
    let mut best_single: Option<Rational> = None;
    for i in 0..inst.n() {
        let single: StateSet = [i].into_iter().collect();
        if !is_feasible_with(&dp, &single) {
            dropped.push((i, DropReason::Refused));
            continue;
        }
        let profit = profit_with(inst, &dp, &single, &single);
        if !profit.is_positive() {
            dropped.push((i, DropReason::Unprofitable));
            continue;
        }
        if best_single.as_ref().is_none_or(|b| profit > *b) {
            best_single = Some(profit);
        }
        survivors.push(i);
    }
    let best_single = best_single.ok_or(Error::EmptyInstance)?;
    let max_cost = survivors.iter().map(|&i| &inst.state(i).cost).max().unwrap();
    let cost_ratio = max_cost / &best_single;
    if cost_ratio > opts.cost_ratio_ceiling {
        return Err(Error::CostBound { ratio: Box::new(cost_ratio), ceiling: Box::new(opts.cost_ratio_ceiling.clone()) });
    }
    let mut z_steps = vec![0i64; inst.n()];
    for &i in &survivors {
        z_steps[i] = dp.z[i]
            .steps_of(delta)
            .filter(|&s| s != 0)
            .ok_or_else(|| Error::Quantization(format!("state {i}: z = {} is not a multiple of delta = {delta}", dp.z[i])))?;
    }
    Ok(QuantizedInstance {
        instance: inst.clone(),
        params: dp,
        delta: delta.clone(),
        epsilon: epsilon.clone(),
        survivors,
        dropped,
        best_single,
        cost_ratio,
        z_steps,
    })
}

#[derive(Debug, Clone)]
struct Entry {
    set: StateSet,
    /// sum of z*phi over the set
    weight: Rational,
    /// sum of d*w over the set
    revenue: Rational,
    cost: Rational,
    z_steps: i64,
    profit: Rational,
}

type BinKey = (BigInt, BigInt, i64);

#[derive(Debug, Clone, PartialEq)]
pub struct FptasStats {
    /// Occupied bins after each processed petal.
    pub bins_per_step: Vec<usize>,
    pub max_bins: usize,
    /// Product of the three coordinate ranges.
    pub bin_bound: BigInt,
    pub candidates_considered: usize,
    pub candidates_refused: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FptasOutcome {
    pub design: DesignSet,
    pub stats: FptasStats,
}

/// Approximation scheme over a preprocessed instance. The returned profit is
/// at least `(1 - epsilon)` times the optimum.
pub fn fptas_solve(qi: &QuantizedInstance) -> FptasOutcome {
    let inst = &qi.instance;
    let dp = &qi.params;
    let n = qi.survivors.len() as i64;
    // bin width eps*K/(2n)
    let width = &qi.epsilon * &qi.best_single / Rational::from_integer(2 * n);
    let key_of = |e: &Entry| -> BinKey {
        ((&e.profit / &width).ceil(), ((&e.profit + &e.cost) / &width).ceil(), e.z_steps)
    };

    let empty = Entry {
        set: StateSet::new(),
        weight: Rational::zero(),
        revenue: Rational::zero(),
        cost: Rational::zero(),
        z_steps: 0,
        profit: Rational::zero(),
    };
    let mut table: BTreeMap<BinKey, Entry> = BTreeMap::new();
    table.insert((BigInt::from(0), BigInt::from(0), 0), empty);

    let mut bins_per_step = Vec::new();
    let mut considered = 0;
    let mut refused = 0;
    for &k in &qi.survivors {
        let snapshot: Vec<Entry> = table.values().cloned().collect();
        let st = inst.state(k);
        for e in snapshot {
            let set = e.set.with(k);
            considered += 1;
            if !is_feasible_with(dp, &set) {
                refused += 1;
                continue;
            }
            let revenue = &e.revenue + &st.d * &dp.w[k];
            let cost = &e.cost + &st.cost;
            let z_steps = e.z_steps + qi.z_steps[k];
            let den = &dp.b + &qi.delta * Rational::from_integer(z_steps);
            let profit = &revenue / &den - &cost;
            if !profit.is_positive() {
                continue;
            }
            let cand = Entry { set, weight: &e.weight + &dp.z[k] * &dp.phi[k], revenue, cost, z_steps, profit };
            let key = key_of(&cand);
            match table.get(&key) {
                Some(cur) if (&cur.weight, &cur.set) <= (&cand.weight, &cand.set) => {}
                _ => {
                    table.insert(key, cand);
                }
            }
        }
        bins_per_step.push(table.len());
    }

    let best = table
        .values()
        .max_by(|a, b| a.profit.cmp(&b.profit).then_with(|| b.set.cmp_size_lex(&a.set)))
        .unwrap();
    let design = DesignSet { offered: best.set.clone(), adopted: best.set.clone(), profit: best.profit.clone() };
    let stats = FptasStats {
        max_bins: bins_per_step.iter().copied().max().unwrap_or(1),
        bins_per_step,
        bin_bound: bin_bound(qi),
        candidates_considered: considered,
        candidates_refused: refused,
    };
    FptasOutcome { design, stats }
}

/// Number of distinct bins the table can ever use:
/// `(2n^2/eps + 1) * (2n^2 (1 + r)/eps + 1) * (sum |z|/delta + 1)`.
pub fn bin_bound(qi: &QuantizedInstance) -> BigInt {
    let n = Rational::from_integer(qi.survivors.len() as i64);
    let two_n2_eps = Rational::from_integer(2) * &n * &n / &qi.epsilon;
    let first = two_n2_eps.ceil() + 1;
    let second = (&two_n2_eps * (Rational::one() + &qi.cost_ratio)).ceil() + 1;
    let third: i64 = qi.survivors.iter().map(|&i| qi.z_steps[i].abs()).sum::<i64>() + 1;
    first * second * BigInt::from(third)
}

/// Preprocess and run the approximation scheme in one call.
pub fn solve_designer(inst: &FlowerInstance, delta: &Rational, epsilon: &Rational) -> Result<FptasOutcome> {
    let qi = preprocess(inst, delta, epsilon)?;
    Ok(fptas_solve(&qi))
}

/// Exhaustive optimum over offer sets the agent adopts in full. Ties go to
/// fewer platforms, then to the lexicographically smaller set.
pub fn designer_oracle(inst: &FlowerInstance) -> Result<DesignSet> {
    let n = inst.n();
    if n > DESIGNER_ORACLE_LIMIT {
        return Err(Error::TooLarge { what: "designer oracle", size: n as u128, limit: DESIGNER_ORACLE_LIMIT as u128 });
    }
    let dp = inst.derived();
    let mut best = DesignSet { offered: StateSet::new(), adopted: StateSet::new(), profit: Rational::zero() };
    for mask in 1u64..(1u64 << n) {
        let set = StateSet::from_mask(mask);
        if !is_feasible_with(&dp, &set) {
            continue;
        }
        let profit = profit_with(inst, &dp, &set, &set);
        if profit > best.profit || (profit == best.profit && set.cmp_size_lex(&best.offered).is_lt()) {
            best = DesignSet { offered: set.clone(), adopted: set, profit };
        }
    }
    Ok(best)
}
