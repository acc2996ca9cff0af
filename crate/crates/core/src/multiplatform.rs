//! Agents that may choose among several platforms on the same petal.
//!
//! Each platform is a point `(z, z*phi)`. On one petal only the upper
//! concave envelope of those points can ever be chosen; along it potentials
//! and envelope slopes both strictly decrease. The greedy walks all
//! envelopes at once by decreasing "marginal potential" (the potential of
//! the first member, the incoming slope of later ones), either adopting a
//! first member or swapping a petal's current choice for its successor.

use std::cmp::Ordering;
use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::rational::{cmp_fractions, Rational};

/// Limit on the number of joint choices the exhaustive oracle will visit.
pub const MULTI_ORACLE_LIMIT: u128 = 1_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Owner {
    Incumbent,
    Designer(usize),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Platform {
    pub id: usize,
    pub state: usize,
    pub z: Rational,
    pub phi: Rational,
    pub owner: Owner,
}

impl Platform {
    pub fn weight(&self) -> Rational {
        &self.z * &self.phi
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ParetoCurve {
    pub state: usize,
    /// Surviving platforms in increasing `z`.
    pub members: Vec<Platform>,
    /// Marginal potential of each member: `phi` for the first, incoming slope after.
    pub psi: Vec<Rational>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PruneRule {
    /// Same `z` and `phi` as a platform with a smaller id.
    Duplicate { kept: usize },
    /// Another platform has at least as much `z` and potential.
    Dominated { by: usize, equal_potential: bool },
    /// A platform with less `z` has at least as much `z * phi`.
    NotIncreasing { by: usize },
    /// On or below the segment between two envelope members.
    BelowSegment { left: usize, right: usize },
}

#[derive(Debug, Clone, PartialEq)]
pub struct Removal {
    pub id: usize,
    pub state: usize,
    pub rule: PruneRule,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PruneOutcome {
    pub curves: Vec<ParetoCurve>,
    pub removed: Vec<Removal>,
}

fn slope(a: &Platform, b: &Platform) -> Rational {
    (b.weight() - a.weight()) / (&b.z - &a.z)
}

/// Reduces every petal's platforms to its envelope.
pub fn prune_redundant(platforms: &[Platform]) -> Result<PruneOutcome> {
    if let Some(p) = platforms.iter().find(|p| !p.z.is_positive()) {
        return Err(Error::Sign { state: p.state, z: Box::new(p.z.clone()) });
    }
    let mut by_state: BTreeMap<usize, Vec<Platform>> = BTreeMap::new();
    for p in platforms {
        by_state.entry(p.state).or_default().push(p.clone());
    }
    let mut curves = Vec::new();
    let mut removed = Vec::new();
    for (state, pts) in by_state {
        let (curve, gone) = prune_state(state, pts);
        curves.push(curve);
        removed.extend(gone);
    }
    removed.sort_by_key(|r| r.id);
    Ok(PruneOutcome { curves, removed })
}

fn prune_state(state: usize, mut pts: Vec<Platform>) -> (ParetoCurve, Vec<Removal>) {
    let mut removed = Vec::new();
    pts.sort_by(|a, b| a.z.cmp(&b.z).then_with(|| a.phi.cmp(&b.phi)).then(a.id.cmp(&b.id)));
    let mut distinct: Vec<Platform> = Vec::with_capacity(pts.len());
    for p in pts {
        match distinct.last() {
            Some(q) if q.z == p.z && q.phi == p.phi => {
                removed.push(Removal { id: p.id, state, rule: PruneRule::Duplicate { kept: q.id } })
            }
            _ => distinct.push(p),
        }
    }

    // First member: highest potential, largest z among those.
    let first = distinct
        .iter()
        .enumerate()
        .max_by(|(_, a), (_, b)| a.phi.cmp(&b.phi).then_with(|| a.z.cmp(&b.z)))
        .map(|(i, _)| i)
        .unwrap();
    let mut chain = vec![distinct[first].clone()];
    for p in distinct.iter().filter(|p| p.z > distinct[first].z) {
        if chain.last().is_some_and(|c| c.z == p.z) {
            // Same z, and `distinct` is sorted by phi within z: the newcomer dominates.
            chain.pop();
        }
        while chain.len() >= 2 && slope(&chain[chain.len() - 2], &chain[chain.len() - 1]) <= slope(&chain[chain.len() - 1], p) {
            chain.pop();
        }
        chain.push(p.clone());
    }
    if let Some(cut) = (1..chain.len()).find(|&k| !slope(&chain[k - 1], &chain[k]).is_positive()) {
        chain.truncate(cut);
    }

    let survivors: Vec<usize> = chain.iter().map(|p| p.id).collect();
    for p in &distinct {
        if survivors.contains(&p.id) {
            continue;
        }
        removed.push(Removal { id: p.id, state, rule: classify(p, &distinct, &chain) });
    }

    let mut psi = vec![chain[0].phi.clone()];
    for k in 1..chain.len() {
        psi.push(slope(&chain[k - 1], &chain[k]));
    }
    (ParetoCurve { state, members: chain, psi }, removed)
}

fn classify(p: &Platform, all: &[Platform], chain: &[Platform]) -> PruneRule {
    let dominator = |q: &&Platform| q.id != p.id && p.z <= q.z && p.phi <= q.phi && (p.z < q.z || p.phi < q.phi);
    if let Some(q) = chain.iter().find(dominator).or_else(|| all.iter().find(dominator)) {
        return PruneRule::Dominated { by: q.id, equal_potential: p.phi == q.phi };
    }
    let lower = |q: &&Platform| q.id != p.id && p.z > q.z && p.weight() <= q.weight();
    if let Some(q) = chain.iter().find(lower).or_else(|| all.iter().find(lower)) {
        return PruneRule::NotIncreasing { by: q.id };
    }
    let k = chain.iter().position(|q| q.z > p.z).unwrap_or(chain.len() - 1).max(1);
    PruneRule::BelowSegment { left: chain[k - 1].id, right: chain[k].id }
}

#[derive(Debug, Clone, PartialEq)]
pub enum MultiAction {
    Add,
    Swap { from: usize },
    Stop,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MultiStep {
    pub platform: usize,
    pub psi: Rational,
    pub utility_before: Rational,
    pub action: MultiAction,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MultiSelection {
    /// Chosen platforms, at most one per petal, sorted by petal.
    pub platforms: Vec<Platform>,
    pub utility: Rational,
    pub trace: Vec<MultiStep>,
}

impl MultiSelection {
    pub fn ids(&self) -> Vec<usize> {
        let mut ids: Vec<usize> = self.platforms.iter().map(|p| p.id).collect();
        ids.sort_unstable();
        ids
    }

    pub fn total_z(&self) -> Rational {
        self.platforms.iter().map(|p| &p.z).sum()
    }
}

pub fn selection_utility(a: &Rational, b: &Rational, chosen: &[Platform]) -> Rational {
    let num: Rational = a + chosen.iter().map(Platform::weight).sum::<Rational>();
    let den: Rational = b + chosen.iter().map(|p| &p.z).sum::<Rational>();
    num / den
}

/// Best response over pruned envelopes.
pub fn multi_greedy_solve(curves: &[ParetoCurve], a: &Rational, b: &Rational) -> MultiSelection {
    let mut items: Vec<(usize, usize)> = curves
        .iter()
        .enumerate()
        .flat_map(|(c, curve)| (0..curve.members.len()).map(move |k| (c, k)))
        .collect();
    items.sort_by(|&(c1, k1), &(c2, k2)| {
        curves[c2].psi[k2]
            .cmp(&curves[c1].psi[k1])
            .then(curves[c1].state.cmp(&curves[c2].state))
            .then(k1.cmp(&k2))
    });
    let mut num = a.clone();
    let mut den = b.clone();
    let mut chosen: Vec<Option<usize>> = vec![None; curves.len()];
    let mut trace = Vec::new();
    for (c, k) in items {
        let p = &curves[c].members[k];
        let psi = &curves[c].psi[k];
        let before = &num / &den;
        // psi <= u  <=>  psi * den <= num
        if psi * &den <= num {
            trace.push(MultiStep { platform: p.id, psi: psi.clone(), utility_before: before, action: MultiAction::Stop });
            break;
        }
        let action = if k == 0 {
            MultiAction::Add
        } else {
            let prev = &curves[c].members[k - 1];
            debug_assert_eq!(chosen[c], Some(k - 1));
            num -= prev.weight();
            den -= &prev.z;
            MultiAction::Swap { from: prev.id }
        };
        num += p.weight();
        den += &p.z;
        chosen[c] = Some(k);
        trace.push(MultiStep { platform: p.id, psi: psi.clone(), utility_before: before, action });
    }
    let platforms = chosen
        .iter()
        .enumerate()
        .filter_map(|(c, k)| k.map(|k| curves[c].members[k].clone()))
        .collect();
    MultiSelection { platforms, utility: num / den, trace }
}

/// Checks the envelope optimality conditions for a selection given by platform ids:
/// each chosen member's marginal potential is at least the value and its
/// successor's at most the value; unused petals have first potential at most the value.
pub fn local_optimality_check(curves: &[ParetoCurve], selection: &[usize], a: &Rational, b: &Rational) -> Result<bool> {
    let mut picked: Vec<Option<usize>> = vec![None; curves.len()];
    let mut chosen = Vec::new();
    for &id in selection {
        let (c, k) = curves
            .iter()
            .enumerate()
            .find_map(|(c, curve)| curve.members.iter().position(|p| p.id == id).map(|k| (c, k)))
            .ok_or_else(|| Error::Feasibility(format!("platform {id} is not on any envelope")))?;
        if picked[c].is_some() {
            return Err(Error::Feasibility(format!("two platforms selected on petal {}", curves[c].state)));
        }
        picked[c] = Some(k);
        chosen.push(curves[c].members[k].clone());
    }
    let u = selection_utility(a, b, &chosen);
    for (c, curve) in curves.iter().enumerate() {
        let ok = match picked[c] {
            Some(k) => curve.psi[k] >= u && curve.psi.get(k + 1).is_none_or(|next| *next <= u),
            None => curve.psi[0] <= u,
        };
        if !ok {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Exhaustive best response over raw (unpruned) platforms. Ties go to the
/// smaller total `z`, then to the lexicographically smaller id list.
pub fn multi_oracle(platforms: &[Platform], a: &Rational, b: &Rational) -> Result<MultiSelection> {
    multi_oracle_with_limit(platforms, a, b, MULTI_ORACLE_LIMIT)
}

pub fn multi_oracle_with_limit(platforms: &[Platform], a: &Rational, b: &Rational, limit: u128) -> Result<MultiSelection> {
    let mut by_state: BTreeMap<usize, Vec<&Platform>> = BTreeMap::new();
    for p in platforms {
        by_state.entry(p.state).or_default().push(p);
    }
    let groups: Vec<Vec<&Platform>> = by_state.into_values().collect();
    let combos = groups.iter().try_fold(1u128, |acc, g| acc.checked_mul(g.len() as u128 + 1));
    match combos {
        Some(c) if c <= limit => {}
        _ => return Err(Error::GuardExceeded(format!("multi-platform oracle over {} petals exceeds {limit} choices", groups.len()))),
    }

    let mut digits = vec![0usize; groups.len()];
    let mut best: Option<(Rational, Rational, Rational, Vec<usize>, Vec<usize>)> = None;
    loop {
        let mut num = a.clone();
        let mut den = b.clone();
        let mut ids = Vec::new();
        for (g, &d) in groups.iter().zip(&digits) {
            if d > 0 {
                let p = g[d - 1];
                num += p.weight();
                den += &p.z;
                ids.push(p.id);
            }
        }
        ids.sort_unstable();
        let total_z = &den - b;
        let better = match &best {
            None => true,
            Some((bn, bd, bz, bids, _)) => match cmp_fractions(&num, &den, bn, bd) {
                Ordering::Greater => true,
                Ordering::Less => false,
                Ordering::Equal => (&total_z, &ids) < (bz, bids),
            },
        };
        if better {
            best = Some((num, den, total_z, ids, digits.clone()));
        }
        // advance the mixed-radix counter
        let mut i = 0;
        while i < digits.len() {
            digits[i] += 1;
            if digits[i] <= groups[i].len() {
                break;
            }
            digits[i] = 0;
            i += 1;
        }
        if i == digits.len() {
            break;
        }
    }
    let (num, den, _, _, digits) = best.unwrap();
    let platforms = groups
        .iter()
        .zip(&digits)
        .filter(|(_, &d)| d > 0)
        .map(|(g, &d)| g[d - 1].clone())
        .collect();
    Ok(MultiSelection { platforms, utility: num / den, trace: Vec::new() })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::rat;

    fn plat(id: usize, state: usize, z: i64, phi: i64) -> Platform {
        Platform { id, state, z: rat(z, 1), phi: rat(phi, 1), owner: Owner::Incumbent }
    }

    #[test]
    fn prune_drops_middle_point() {
        let pts = vec![plat(0, 0, 1, 6), plat(1, 0, 2, 4), plat(2, 0, 3, 4)];
        let out = prune_redundant(&pts).unwrap();
        let ids: Vec<usize> = out.curves[0].members.iter().map(|p| p.id).collect();
        assert_eq!(ids, vec![0, 2]);
        assert_eq!(out.curves[0].psi, vec![rat(6, 1), rat(3, 1)]);
        assert_eq!(out.removed.len(), 1);
        assert_eq!(out.removed[0].id, 1);
        assert_eq!(out.removed[0].rule, PruneRule::Dominated { by: 2, equal_potential: true });
    }

    #[test]
    fn prune_rules() {
        let pr = |id, z, num, den| Platform { id, state: 0, z: rat(z, 1), phi: rat(num, den), owner: Owner::Incumbent };
        // (1,10) first; (3,8) kept; (2,33/4) lies under the segment between them;
        // (4,5/2) carries no more weight than (1,10); id 4 repeats (3,8).
        let pts = vec![pr(0, 1, 10, 1), pr(1, 4, 5, 2), pr(2, 3, 8, 1), pr(3, 2, 33, 4), pr(4, 3, 8, 1), pr(5, 2, 7, 1)];
        let out = prune_redundant(&pts).unwrap();
        let ids: Vec<usize> = out.curves[0].members.iter().map(|p| p.id).collect();
        assert_eq!(ids, vec![0, 2]);
        let rule = |id| out.removed.iter().find(|r| r.id == id).unwrap().rule;
        assert_eq!(rule(1), PruneRule::NotIncreasing { by: 0 });
        assert_eq!(rule(3), PruneRule::BelowSegment { left: 0, right: 2 });
        assert_eq!(rule(4), PruneRule::Duplicate { kept: 2 });
        assert_eq!(rule(5), PruneRule::Dominated { by: 2, equal_potential: false });
    }

    #[test]
    fn envelope_invariants() {
        let pts = vec![plat(0, 1, 1, 9), plat(1, 1, 2, 8), plat(2, 1, 4, 6), plat(3, 1, 5, 5), plat(4, 1, 8, 3)];
        let curve = &prune_redundant(&pts).unwrap().curves[0];
        for k in 1..curve.members.len() {
            assert!(curve.members[k].phi < curve.members[k - 1].phi);
            assert!(curve.members[k].z > curve.members[k - 1].z);
            assert!(curve.members[k].weight() > curve.members[k - 1].weight());
            assert!(curve.psi[k] < curve.psi[k - 1]);
        }
    }

    #[test]
    fn swap_example() {
        let pts = vec![plat(1, 0, 1, 5), plat(2, 0, 2, 4)];
        let curves = prune_redundant(&pts).unwrap().curves;
        let (a, b) = (rat(10, 1), rat(10, 1));
        let sel = multi_greedy_solve(&curves, &a, &b);
        assert_eq!(sel.ids(), vec![2]);
        assert_eq!(sel.utility, rat(3, 2));
        assert_eq!(sel.trace[1].action, MultiAction::Swap { from: 1 });
        assert_eq!(selection_utility(&a, &b, &[pts[0].clone()]), rat(15, 11));
        assert!(local_optimality_check(&curves, &[2], &a, &b).unwrap());
        assert!(!local_optimality_check(&curves, &[1], &a, &b).unwrap());
        assert_eq!(multi_oracle(&pts, &a, &b).unwrap().ids(), vec![2]);
    }

    #[test]
    fn local_check_rejects_two_on_one_petal() {
        let pts = vec![plat(1, 0, 1, 5), plat(2, 0, 2, 4)];
        let curves = prune_redundant(&pts).unwrap().curves;
        assert!(matches!(local_optimality_check(&curves, &[1, 2], &rat(1, 1), &rat(1, 1)), Err(Error::Feasibility(_))));
    }

    #[test]
    fn oracle_guard() {
        let pts: Vec<Platform> = (0..8).map(|s| plat(s, s, 1, 1)).collect();
        assert!(matches!(multi_oracle_with_limit(&pts, &rat(0, 1), &rat(1, 1), 255), Err(Error::GuardExceeded(_))));
        assert!(multi_oracle_with_limit(&pts, &rat(0, 1), &rat(1, 1), 256).is_ok());
    }

    #[test]
    fn nonpositive_z_rejected() {
        let pts = vec![plat(0, 0, 0, 1)];
        assert!(matches!(prune_redundant(&pts), Err(Error::Sign { .. })));
    }
}
