//! Best response of one designer when other platforms already exist.
//!
//! Agents choose among the incumbents and the designer's candidates with the
//! multi-platform rule. Under a threshold guess every agent's choice on
//! each petal is fixed: the designer's candidate if it sits on the petal's
//! envelope at the right place, otherwise a fallback incumbent (or nothing).
//! The slot table then tracks the change each candidate makes relative to
//! its fallback.

use std::collections::BTreeSet;

use crate::error::{Error, Result};
use crate::model::StateSet;
use crate::multiagent::{search_thresholds, threshold_grid, Increment, MultiAgentInstance, SlotStats, ThetaProblem, GRID_BUDGET};
use crate::multiplatform::{multi_greedy_solve, prune_redundant, MultiSelection, Owner, ParetoCurve, Platform};
use crate::rational::Rational;

/// A platform the designer does not control, described per agent.
#[derive(Debug, Clone, PartialEq)]
pub struct ExternalPlatform {
    pub id: usize,
    pub state: usize,
    pub z: Vec<Rational>,
    pub phi: Vec<Rational>,
    pub owner: Owner,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CompetitiveInstance {
    pub base: MultiAgentInstance,
    pub externals: Vec<ExternalPlatform>,
    /// Id given to the designer's candidate on petal `j` is `id_base + j`.
    /// On exact ties between identical platforms the smaller id is chosen.
    pub id_base: usize,
    pub designer: Owner,
}

impl CompetitiveInstance {
    /// Candidates get ids after every external one, so incumbents win exact ties.
    pub fn new(base: MultiAgentInstance, externals: Vec<ExternalPlatform>) -> Result<Self> {
        let id_base = externals.iter().map(|e| e.id + 1).max().unwrap_or(0);
        Self::with_ids(base, externals, id_base, Owner::Designer(0))
    }

    pub fn with_ids(base: MultiAgentInstance, externals: Vec<ExternalPlatform>, id_base: usize, designer: Owner) -> Result<Self> {
        let (n, k) = (base.n(), base.k());
        let mut ids = BTreeSet::new();
        for e in &externals {
            if e.state >= n {
                return Err(Error::Subset(format!("external platform {} sits on unknown petal {}", e.id, e.state)));
            }
            if e.z.len() != k || e.phi.len() != k {
                return Err(Error::Shape(format!("external platform {} must describe all {k} agents", e.id)));
            }
            if (id_base..id_base + n).contains(&e.id) || !ids.insert(e.id) {
                return Err(Error::Shape(format!("platform id {} is used twice", e.id)));
            }
            for i in 0..k {
                if e.z[i].steps_of(base.delta()).is_none_or(|l| l <= 0) {
                    return Err(Error::Quantization(format!("external {} agent {i}: z = {} is not a positive multiple of {}", e.id, e.z[i], base.delta())));
                }
                if e.phi[i].steps_of(base.delta_prime()).is_none_or(|l| l < 0) {
                    return Err(Error::Quantization(format!(
                        "external {} agent {i}: potential {} is not a nonnegative multiple of {}",
                        e.id,
                        e.phi[i],
                        base.delta_prime()
                    )));
                }
            }
        }
        Ok(CompetitiveInstance { base, externals, id_base, designer })
    }

    fn external_for(&self, agent: usize, state: Option<usize>) -> Vec<Platform> {
        self.externals
            .iter()
            .filter(|e| state.is_none_or(|s| e.state == s))
            .map(|e| Platform { id: e.id, state: e.state, z: e.z[agent].clone(), phi: e.phi[agent].clone(), owner: e.owner })
            .collect()
    }

    pub fn candidate(&self, agent: usize, j: usize) -> Platform {
        let dp = self.base.params(agent);
        Platform { id: self.id_base + j, state: j, z: dp.z[j].clone(), phi: dp.phi[j].clone(), owner: self.designer }
    }

    /// Every platform agent `agent` can choose from when the designer offers `offered`.
    pub fn platforms_for(&self, agent: usize, offered: &StateSet) -> Vec<Platform> {
        let mut all = self.external_for(agent, None);
        all.extend(offered.iter().map(|j| self.candidate(agent, j)));
        all
    }

    fn is_candidate(&self, id: usize) -> bool {
        (self.id_base..self.id_base + self.base.n()).contains(&id)
    }
}

/// Designer's profit when offering `offered`, with each agent's choice.
pub fn competitive_profit(ci: &CompetitiveInstance, offered: &StateSet) -> Result<(Rational, Vec<MultiSelection>)> {
    if let Some(j) = offered.iter().find(|&j| j >= ci.base.n()) {
        return Err(Error::Subset(format!("petal {j} does not exist")));
    }
    let mut profit = Rational::zero();
    let mut choices = Vec::new();
    for i in 0..ci.base.k() {
        let dp = ci.base.params(i);
        let curves = prune_redundant(&ci.platforms_for(i, offered))?.curves;
        let sel = multi_greedy_solve(&curves, &dp.a, &dp.b);
        let den = &dp.b + sel.total_z();
        let revenue: Rational = sel.platforms.iter().filter(|p| ci.is_candidate(p.id)).map(|p| ci.base.revenue_rate(i, p.state)).sum();
        profit += revenue / den;
        choices.push(sel);
    }
    let cost: Rational = offered.iter().map(|j| ci.base.cost(j)).sum();
    Ok((profit - cost, choices))
}

#[derive(Debug, Clone, PartialEq)]
pub struct CompetitiveOutcome {
    pub offered: StateSet,
    pub profit: Rational,
    /// Platform ids each agent ends up using.
    pub chosen: Vec<Vec<usize>>,
    pub stats: SlotStats,
}

struct PetalCurves {
    /// Envelope of the incumbents alone, if any.
    without: Option<ParetoCurve>,
    /// Envelope with the candidate added.
    with: ParetoCurve,
}

/// Member chosen at a value in `[theta_next, theta)`: the last one whose
/// marginal potential reaches `theta`.
fn chosen_member<'a>(curve: &'a ParetoCurve, theta: &crate::multiagent::Threshold) -> Option<(usize, &'a Platform)> {
    curve.psi.iter().rposition(|psi| theta.reached_by(psi)).map(|k| (k, &curve.members[k]))
}

pub fn competitive_solve(ci: &CompetitiveInstance) -> Result<CompetitiveOutcome> {
    competitive_solve_with_budget(ci, GRID_BUDGET)
}

pub fn competitive_solve_with_budget(ci: &CompetitiveInstance, budget: u128) -> Result<CompetitiveOutcome> {
    let mi = &ci.base;
    let (n, k) = (mi.n(), mi.k());
    let delta = mi.delta();
    let dd = delta * mi.delta_prime();

    let mut curves: Vec<Vec<PetalCurves>> = Vec::with_capacity(k);
    let mut grids = Vec::with_capacity(k);
    let mut nominal: u128 = 1;
    for i in 0..k {
        let mut per_petal = Vec::with_capacity(n);
        let mut potentials = Vec::new();
        let mut d_range: u128 = 1;
        for j in 0..n {
            let incumbents = ci.external_for(i, Some(j));
            let without = if incumbents.is_empty() { None } else { prune_redundant(&incumbents)?.curves.pop() };
            let mut all = incumbents;
            all.push(ci.candidate(i, j));
            let with = prune_redundant(&all)?.curves.pop().unwrap();
            potentials.extend(with.psi.iter().cloned());
            if let Some(w) = &without {
                potentials.extend(w.psi.iter().cloned());
            }
            let widest = all.iter().map(|p| p.z.steps_of(delta).unwrap_or(0)).max().unwrap_or(0);
            d_range += widest as u128;
            per_petal.push(PetalCurves { without, with });
        }
        let grid = threshold_grid(&potentials);
        nominal = nominal.saturating_mul(grid.len() as u128).saturating_mul(d_range);
        grids.push(grid);
        curves.push(per_petal);
    }
    if nominal > budget {
        return Err(Error::GuardExceeded(format!("threshold/denominator grid of size {nominal} exceeds {budget}")));
    }

    let mut stats = SlotStats { nominal_grid: nominal, ..SlotStats::default() };
    let cost: Vec<Rational> = (0..n).map(|j| mi.cost(j).clone()).collect();
    let (profit, offered) = search_thresholds(
        &grids,
        &cost,
        delta,
        &dd,
        |choice| {
            let mut incr = vec![vec![None; k]; n];
            let mut base_a = Vec::with_capacity(k);
            let mut base_b = Vec::with_capacity(k);
            for (i, (theta, theta_next)) in choice.iter().map(|c| (&c.0, &c.1)).enumerate() {
                let dp = mi.params(i);
                let mut a = dp.a.clone();
                let mut b = dp.b.clone();
                for (j, pc) in curves[i].iter().enumerate() {
                    let fallback = pc.without.as_ref().and_then(|c| chosen_member(c, theta)).map(|(_, p)| p);
                    let (fz, fw) = match fallback {
                        Some(p) => (p.z.clone(), p.weight()),
                        None => (Rational::zero(), Rational::zero()),
                    };
                    let cand = ci.id_base + j;
                    let picked = pc.with.members.iter().position(|p| p.id == cand).is_some_and(|pos| {
                        theta.reached_by(&pc.with.psi[pos]) && pc.with.psi.get(pos + 1).is_none_or(|next| next <= theta_next)
                    });
                    if picked {
                        let c = &pc.with.members.iter().find(|p| p.id == cand).unwrap();
                        let sigma = c.weight() - &fw;
                        let tau = &c.z - &fz;
                        incr[j][i] = Some(Increment {
                            a: sigma.steps_of(&dd).expect("quantized weights"),
                            b: tau.steps_of(delta).expect("quantized z"),
                            revenue: mi.revenue_rate(i, j),
                        });
                    }
                    a += fw;
                    b += fz;
                }
                base_a.push(a);
                base_b.push(b);
            }
            ThetaProblem {
                base_a,
                base_b,
                theta: choice.iter().map(|c| c.0.clone()).collect(),
                theta_next: choice.iter().map(|c| c.1.clone()).collect(),
                incr,
            }
        },
        &mut stats,
    );
    let (check, choices) = competitive_profit(ci, &offered)?;
    debug_assert_eq!(check, profit);
    let chosen = choices.iter().map(MultiSelection::ids).collect();
    Ok(CompetitiveOutcome { offered, profit, chosen, stats })
}

/// Exhaustive best response using the multi-platform agent; ties go to fewer petals, then lexicographic.
pub fn competitive_brute_force(ci: &CompetitiveInstance) -> Result<(StateSet, Rational)> {
    let n = ci.base.n();
    if n > crate::multiagent::MULTI_AGENT_ORACLE_LIMIT {
        return Err(Error::TooLarge { what: "competitive oracle", size: n as u128, limit: crate::multiagent::MULTI_AGENT_ORACLE_LIMIT as u128 });
    }
    let mut best = (StateSet::new(), competitive_profit(ci, &StateSet::new())?.0);
    for mask in 1u64..(1u64 << n) {
        let set = StateSet::from_mask(mask);
        let (profit, _) = competitive_profit(ci, &set)?;
        if profit > best.1 || (profit == best.1 && set.cmp_size_lex(&best.0).is_lt()) {
            best = (set, profit);
        }
    }
    Ok(best)
}
