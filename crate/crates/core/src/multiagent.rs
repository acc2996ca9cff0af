//! One designer, several agents with their own chains over the same petals.
//!
//! Each agent adopts exactly the offered petals whose potential reaches a
//! threshold determined by its final average reward. The solver guesses,
//! per agent, that threshold `theta` (a potential, or infinity) and the
//! next lower potential `theta_next`; under the guess each petal's
//! contribution to every agent's objective is fixed, so a subset-sum style
//! table over integer slot coordinates `(sum z*phi / (delta*delta'),
//! sum z / delta)` finds the most profitable set per slot. A slot is
//! consistent when the reward it implies lies in `[theta_next, theta)` for
//! every agent; then the table's value is the set's true profit.

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet};

use crate::agent::respond;
use crate::error::{Error, Result};
use crate::model::{DerivedParams, FlowerInstance, StateSet};
use crate::rational::Rational;

/// Default cap on `max(z/delta, phi/delta')`.
pub const STEP_CEILING: i64 = 1_000_000;
/// Default cap on the nominal `(theta, D)` grid size.
pub const GRID_BUDGET: u128 = 1_000_000_000_000;
/// Largest instance the exhaustive multi-agent oracle accepts.
pub const MULTI_AGENT_ORACLE_LIMIT: usize = 22;

#[derive(Debug, Clone, PartialEq)]
pub struct MultiAgentInstance {
    agents: Vec<FlowerInstance>,
    params: Vec<DerivedParams>,
    delta: Rational,
    delta_prime: Rational,
    z_steps: Vec<Vec<i64>>,
    phi_steps: Vec<Vec<i64>>,
}

impl MultiAgentInstance {
    /// Agents must share the number of petals and the platform costs; every
    /// `z` must be a positive multiple of `delta` and every potential a
    /// nonnegative multiple of `delta_prime`.
    pub fn new(agents: Vec<FlowerInstance>, delta: Rational, delta_prime: Rational) -> Result<Self> {
        Self::with_step_ceiling(agents, delta, delta_prime, STEP_CEILING)
    }

    pub fn with_step_ceiling(agents: Vec<FlowerInstance>, delta: Rational, delta_prime: Rational, ceiling: i64) -> Result<Self> {
        let first = agents.first().ok_or_else(|| Error::Shape("no agents".into()))?;
        let n = first.n();
        if !delta.is_positive() || !delta_prime.is_positive() {
            return Err(Error::Range("quantization steps must be positive".into()));
        }
        for (i, ag) in agents.iter().enumerate() {
            if ag.n() != n {
                return Err(Error::Shape(format!("agent {i} has {} petals, agent 0 has {n}", ag.n())));
            }
            for j in 0..n {
                if ag.state(j).cost != first.state(j).cost {
                    return Err(Error::Shape(format!("agent {i} disagrees on the cost of petal {j}")));
                }
            }
        }
        let params: Vec<DerivedParams> = agents.iter().map(FlowerInstance::derived).collect();
        let mut z_steps = Vec::new();
        let mut phi_steps = Vec::new();
        for (i, dp) in params.iter().enumerate() {
            if dp.a.is_negative() {
                return Err(Error::Range(format!("agent {i}: off-platform reward rate {} is negative", dp.a)));
            }
            let mut zs = Vec::with_capacity(n);
            let mut ps = Vec::with_capacity(n);
            for j in 0..n {
                let l = dp.z[j].steps_of(&delta).filter(|&l| l > 0).ok_or_else(|| {
                    Error::Quantization(format!("agent {i}, petal {j}: z = {} is not a positive multiple of {delta}", dp.z[j]))
                })?;
                let lp = dp.phi[j].steps_of(&delta_prime).filter(|&l| l >= 0).ok_or_else(|| {
                    Error::Quantization(format!(
                        "agent {i}, petal {j}: potential {} is not a nonnegative multiple of {delta_prime}",
                        dp.phi[j]
                    ))
                })?;
                if l > ceiling || lp > ceiling {
                    return Err(Error::Quantization(format!("agent {i}, petal {j}: step count exceeds {ceiling}")));
                }
                zs.push(l);
                ps.push(lp);
            }
            z_steps.push(zs);
            phi_steps.push(ps);
        }
        Ok(MultiAgentInstance { agents, params, delta, delta_prime, z_steps, phi_steps })
    }

    pub fn n(&self) -> usize {
        self.agents[0].n()
    }

    pub fn k(&self) -> usize {
        self.agents.len()
    }

    pub fn agents(&self) -> &[FlowerInstance] {
        &self.agents
    }

    pub fn params(&self, agent: usize) -> &DerivedParams {
        &self.params[agent]
    }

    pub fn delta(&self) -> &Rational {
        &self.delta
    }

    pub fn delta_prime(&self) -> &Rational {
        &self.delta_prime
    }

    pub fn cost(&self, j: usize) -> &Rational {
        &self.agents[0].state(j).cost
    }

    pub fn z_steps(&self, agent: usize, j: usize) -> i64 {
        self.z_steps[agent][j]
    }

    pub fn phi_steps(&self, agent: usize, j: usize) -> i64 {
        self.phi_steps[agent][j]
    }

    /// Designer's reward rate `d * w` for agent `i` on petal `j`.
    pub fn revenue_rate(&self, i: usize, j: usize) -> Rational {
        &self.agents[i].state(j).d * &self.params[i].w[j]
    }
}

/// A guessed reward threshold: a potential, or infinity (the agent adopts nothing).
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub enum Threshold {
    Finite(Rational),
    Infinite,
}

impl Threshold {
    /// `value >= self`.
    pub fn reached_by(&self, value: &Rational) -> bool {
        match self {
            Threshold::Finite(t) => value >= t,
            Threshold::Infinite => false,
        }
    }

    /// `self > value`.
    pub fn exceeds(&self, value: &Rational) -> bool {
        match self {
            Threshold::Finite(t) => t > value,
            Threshold::Infinite => true,
        }
    }
}

/// All `(theta, theta_next)` pairs for one agent, from a list of potentials.
/// `theta_next` is the next smaller potential, `-1` below the smallest one,
/// and the largest potential when `theta` is infinite.
pub fn threshold_grid(potentials: &[Rational]) -> Vec<(Threshold, Rational)> {
    let distinct: Vec<Rational> = potentials.iter().cloned().collect::<BTreeSet<_>>().into_iter().collect();
    let mut grid = Vec::with_capacity(distinct.len() + 1);
    for (t, v) in distinct.iter().enumerate() {
        let next = if t == 0 { Rational::from_integer(-1) } else { distinct[t - 1].clone() };
        grid.push((Threshold::Finite(v.clone()), next));
    }
    let top = distinct.last().cloned().unwrap_or_else(|| Rational::from_integer(-1));
    grid.push((Threshold::Infinite, top));
    grid
}

/// Effect of adopting one petal on one agent's slot coordinates.
#[derive(Debug, Clone)]
pub(crate) struct Increment {
    pub a: i64,
    pub b: i64,
    pub revenue: Rational,
}

/// Everything fixed by one threshold guess.
#[derive(Debug, Clone)]
pub(crate) struct ThetaProblem {
    pub base_a: Vec<Rational>,
    pub base_b: Vec<Rational>,
    pub theta: Vec<Threshold>,
    pub theta_next: Vec<Rational>,
    /// `incr[j][i]` is set when petal `j` would be adopted by agent `i`.
    pub incr: Vec<Vec<Option<Increment>>>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct SlotStats {
    pub thresholds_examined: u64,
    pub slots_reached: u64,
    pub consistent_slots: u64,
    pub denominators_examined: u64,
    pub nominal_grid: u128,
}

type SlotKey = Vec<i64>;

impl ThetaProblem {
    fn step(&self, key: &SlotKey, j: usize) -> SlotKey {
        let k = self.theta.len();
        let mut next = key.clone();
        for (i, inc) in self.incr[j].iter().enumerate() {
            if let Some(inc) = inc {
                next[i] += inc.a;
                next[k + i] += inc.b;
            }
        }
        next
    }

    fn denominators(&self, key: &SlotKey, delta: &Rational) -> Vec<Rational> {
        let k = self.theta.len();
        (0..k).map(|i| &self.base_b[i] + delta * Rational::from_integer(key[k + i])).collect()
    }

    fn consistent(&self, key: &SlotKey, delta: &Rational, dd: &Rational) -> bool {
        let den = self.denominators(key, delta);
        (0..self.theta.len()).all(|i| {
            if !den[i].is_positive() {
                return false;
            }
            let u = (&self.base_a[i] + dd * Rational::from_integer(key[i])) / &den[i];
            self.theta[i].exceeds(&u) && u >= self.theta_next[i]
        })
    }

    /// Most profitable consistent set under this guess.
    fn solve(&self, cost: &[Rational], delta: &Rational, dd: &Rational, stats: &mut SlotStats) -> Option<(Rational, StateSet)> {
        let n = self.incr.len();
        let k = self.theta.len();
        let mut keys: BTreeSet<SlotKey> = BTreeSet::new();
        keys.insert(vec![0; 2 * k]);
        for j in 0..n {
            let grown: Vec<SlotKey> = keys.iter().map(|key| self.step(key, j)).collect();
            keys.extend(grown);
        }
        stats.slots_reached += keys.len() as u64;
        // Only denominators that some consistent slot actually has can produce a result.
        let mut by_den: BTreeMap<Vec<i64>, Vec<SlotKey>> = BTreeMap::new();
        for key in keys.into_iter().filter(|key| self.consistent(key, delta, dd)) {
            stats.consistent_slots += 1;
            by_den.entry(key[k..].to_vec()).or_default().push(key);
        }

        let mut best: Option<(Rational, StateSet)> = None;
        for (bvec, targets) in by_den {
            stats.denominators_examined += 1;
            let den: Vec<Rational> = (0..k).map(|i| &self.base_b[i] + delta * Rational::from_integer(bvec[i])).collect();
            let coef: Vec<Rational> = (0..n)
                .map(|j| {
                    let rev: Rational = self.incr[j]
                        .iter()
                        .enumerate()
                        .filter_map(|(i, inc)| inc.as_ref().map(|inc| &inc.revenue / &den[i]))
                        .sum();
                    rev - &cost[j]
                })
                .collect();
            let mut table: BTreeMap<SlotKey, (Rational, StateSet)> = BTreeMap::new();
            table.insert(vec![0; 2 * k], (Rational::zero(), StateSet::new()));
            for j in 0..n {
                let snapshot: Vec<(SlotKey, (Rational, StateSet))> = table.iter().map(|(a, b)| (a.clone(), b.clone())).collect();
                for (key, (value, set)) in snapshot {
                    let nk = self.step(&key, j);
                    let cand = (value + &coef[j], set.with(j));
                    match table.get(&nk) {
                        Some(cur) if !better(&cand, cur) => {}
                        _ => {
                            table.insert(nk, cand);
                        }
                    }
                }
            }
            for key in targets {
                if let Some(entry) = table.get(&key) {
                    if best.as_ref().is_none_or(|b| better_overall(entry, b)) {
                        best = Some(entry.clone());
                    }
                }
            }
        }
        best
    }
}

/// Slot tie rule: higher value, then lexicographically smaller set.
fn better(a: &(Rational, StateSet), b: &(Rational, StateSet)) -> bool {
    match a.0.cmp(&b.0) {
        Ordering::Greater => true,
        Ordering::Less => false,
        Ordering::Equal => a.1 < b.1,
    }
}

/// Final tie rule: higher value, then fewer petals, then lexicographic.
fn better_overall(a: &(Rational, StateSet), b: &(Rational, StateSet)) -> bool {
    match a.0.cmp(&b.0) {
        Ordering::Greater => true,
        Ordering::Less => false,
        Ordering::Equal => a.1.cmp_size_lex(&b.1).is_lt(),
    }
}

/// Runs the slot table for every combination of per-agent threshold guesses.
pub(crate) fn search_thresholds(
    grids: &[Vec<(Threshold, Rational)>],
    cost: &[Rational],
    delta: &Rational,
    dd: &Rational,
    mut build: impl FnMut(&[&(Threshold, Rational)]) -> ThetaProblem,
    stats: &mut SlotStats,
) -> (Rational, StateSet) {
    let mut best: (Rational, StateSet) = (Rational::zero(), StateSet::new());
    let mut found = false;
    let mut idx = vec![0usize; grids.len()];
    loop {
        let choice: Vec<&(Threshold, Rational)> = idx.iter().zip(grids).map(|(&t, g)| &g[t]).collect();
        let problem = build(&choice);
        stats.thresholds_examined += 1;
        if let Some(cand) = problem.solve(cost, delta, dd, stats) {
            if !found || better_overall(&cand, &best) {
                best = cand;
                found = true;
            }
        }
        let mut i = 0;
        while i < idx.len() {
            idx[i] += 1;
            if idx[i] < grids[i].len() {
                break;
            }
            idx[i] = 0;
            i += 1;
        }
        if i == idx.len() {
            break;
        }
    }
    debug_assert!(found, "the empty set is consistent under some guess");
    best
}

#[derive(Debug, Clone, PartialEq)]
pub struct MultiAgentOutcome {
    pub offered: StateSet,
    pub adopted: Vec<StateSet>,
    pub profit: Rational,
    pub stats: SlotStats,
}

/// Profit of offering `offered`, and what each agent adopts.
pub fn multi_agent_profit(mi: &MultiAgentInstance, offered: &StateSet) -> Result<(Rational, Vec<StateSet>)> {
    mi.agents[0].check_subset(offered)?;
    let mut profit = Rational::zero();
    let mut adopted = Vec::with_capacity(mi.k());
    for i in 0..mi.k() {
        let dp = &mi.params[i];
        let set = respond(dp, offered).states;
        let revenue: Rational = set.iter().map(|j| mi.revenue_rate(i, j)).sum();
        let den: Rational = &dp.b + set.iter().map(|j| &dp.z[j]).sum::<Rational>();
        profit += revenue / den;
        adopted.push(set);
    }
    let cost: Rational = offered.iter().map(|j| mi.cost(j)).sum();
    Ok((profit - cost, adopted))
}

pub fn multi_agent_solve(mi: &MultiAgentInstance) -> Result<MultiAgentOutcome> {
    multi_agent_solve_with_budget(mi, GRID_BUDGET)
}

pub fn multi_agent_solve_with_budget(mi: &MultiAgentInstance, budget: u128) -> Result<MultiAgentOutcome> {
    let n = mi.n();
    let k = mi.k();
    let grids: Vec<Vec<(Threshold, Rational)>> = (0..k).map(|i| threshold_grid(&mi.params[i].phi)).collect();
    let mut nominal: u128 = 1;
    for i in 0..k {
        let d_range = (0..n).map(|j| mi.z_steps[i][j] as u128).sum::<u128>() + 1;
        nominal = nominal.saturating_mul(grids[i].len() as u128).saturating_mul(d_range);
    }
    if nominal > budget {
        return Err(Error::GuardExceeded(format!("threshold/denominator grid of size {nominal} exceeds {budget}")));
    }
    let mut stats = SlotStats { nominal_grid: nominal, ..SlotStats::default() };
    let cost: Vec<Rational> = (0..n).map(|j| mi.cost(j).clone()).collect();
    let dd = &mi.delta * &mi.delta_prime;
    let (profit, offered) = search_thresholds(
        &grids,
        &cost,
        &mi.delta,
        &dd,
        |choice| {
            let mut incr = vec![vec![None; k]; n];
            for (i, (theta, _)) in choice.iter().enumerate() {
                for (j, row) in incr.iter_mut().enumerate() {
                    if theta.reached_by(&mi.params[i].phi[j]) {
                        row[i] = Some(Increment {
                            a: mi.z_steps[i][j] * mi.phi_steps[i][j],
                            b: mi.z_steps[i][j],
                            revenue: mi.revenue_rate(i, j),
                        });
                    }
                }
            }
            ThetaProblem {
                base_a: mi.params.iter().map(|p| p.a.clone()).collect(),
                base_b: mi.params.iter().map(|p| p.b.clone()).collect(),
                theta: choice.iter().map(|c| c.0.clone()).collect(),
                theta_next: choice.iter().map(|c| c.1.clone()).collect(),
                incr,
            }
        },
        &mut stats,
    );
    let (check, adopted) = multi_agent_profit(mi, &offered)?;
    debug_assert_eq!(check, profit);
    Ok(MultiAgentOutcome { offered, adopted, profit, stats })
}

/// Exhaustive optimum over all offer sets; ties go to fewer petals, then lexicographic.
pub fn multi_agent_brute_force(mi: &MultiAgentInstance) -> Result<(StateSet, Rational)> {
    let n = mi.n();
    if n > MULTI_AGENT_ORACLE_LIMIT {
        return Err(Error::TooLarge { what: "multi-agent oracle", size: n as u128, limit: MULTI_AGENT_ORACLE_LIMIT as u128 });
    }
    let mut best = (StateSet::new(), Rational::zero());
    for mask in 1u64..(1u64 << n) {
        let set = StateSet::from_mask(mask);
        let (profit, _) = multi_agent_profit(mi, &set)?;
        if profit > best.1 || (profit == best.1 && set.cmp_size_lex(&best.0).is_lt()) {
            best = (set, profit);
        }
    }
    Ok(best)
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;
    use crate::model::StateParams;
    use crate::rational::rat;

    /// Petals with `p = 1/n`, `q = 1/2`, off-platform reward 0, and the given
    /// `z` and potential (`lambda = 2/n`).
    pub(crate) fn agent(zs: &[Rational], phis: &[Rational], ds: &[i64], cost: &Rational) -> FlowerInstance {
        let n = zs.len() as i64;
        let states = zs
            .iter()
            .zip(phis)
            .zip(ds)
            .map(|((z, phi), &d)| {
                let p = rat(1, n);
                let q = rat(1, 2);
                let lambda = &p / (Rational::one() - &q);
                let w = &lambda + z;
                let y = Rational::one() - &q - &p / &w;
                StateParams { p, q, y, c_life: rat(0, 1), c_platform: phi * z / &w, d: rat(d, 1), cost: cost.clone() }
            })
            .collect();
        FlowerInstance::new(states).unwrap()
    }

    #[test]
    fn thresholds() {
        let grid = threshold_grid(&[rat(3, 1), rat(1, 1), rat(3, 1)]);
        assert_eq!(
            grid,
            vec![
                (Threshold::Finite(rat(1, 1)), rat(-1, 1)),
                (Threshold::Finite(rat(3, 1)), rat(1, 1)),
                (Threshold::Infinite, rat(3, 1)),
            ]
        );
    }

    #[test]
    fn two_agents_small() {
        let c = rat(1, 10);
        let one = rat(1, 1);
        let a1 = agent(&[one.clone(), one.clone(), rat(2, 1)], &[rat(4, 1), rat(2, 1), rat(1, 1)], &[5, 1, 3], &c);
        let a2 = agent(&[rat(2, 1), one.clone(), one.clone()], &[rat(1, 1), rat(5, 1), rat(3, 1)], &[1, 4, 2], &c);
        let mi = MultiAgentInstance::new(vec![a1, a2], one.clone(), one).unwrap();
        let dp = mi.solve_and_check();
        assert!(dp.profit.is_positive());
    }

    impl MultiAgentInstance {
        fn solve_and_check(&self) -> MultiAgentOutcome {
            let out = multi_agent_solve(self).unwrap();
            let (set, profit) = multi_agent_brute_force(self).unwrap();
            assert_eq!(out.profit, profit, "dp chose {:?}, oracle {:?}", out.offered, set);
            out
        }
    }

    #[test]
    fn quantization_errors() {
        let c = rat(1, 10);
        let a = agent(&[rat(1, 2)], &[rat(1, 1)], &[1], &c);
        assert!(matches!(MultiAgentInstance::new(vec![a.clone()], rat(1, 1), rat(1, 1)), Err(Error::Quantization(_))));
        let b = agent(&[rat(1, 1)], &[rat(1, 3)], &[1], &c);
        assert!(matches!(MultiAgentInstance::new(vec![b], rat(1, 1), rat(1, 1)), Err(Error::Quantization(_))));
        let d = agent(&[rat(1, 1)], &[rat(1, 1)], &[1], &rat(1, 5));
        let e = agent(&[rat(1, 1)], &[rat(1, 1)], &[1], &c);
        assert!(matches!(MultiAgentInstance::new(vec![d, e], rat(1, 1), rat(1, 1)), Err(Error::Shape(_))));
    }

    #[test]
    fn grid_guard() {
        let c = rat(1, 10);
        let a = agent(&[rat(1, 1), rat(1, 1)], &[rat(1, 1), rat(2, 1)], &[1, 1], &c);
        let mi = MultiAgentInstance::new(vec![a], rat(1, 1), rat(1, 1)).unwrap();
        // 3 thresholds times 3 denominators
        assert!(multi_agent_solve_with_budget(&mi, 9).is_ok());
        assert!(matches!(multi_agent_solve_with_budget(&mi, 8), Err(Error::GuardExceeded(_))));
    }
}
