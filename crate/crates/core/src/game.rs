//! Several designers competing for the same agents.
//!
//! Every designer has one candidate platform per petal. A profile lists the
//! petals each designer builds on; agents respond with the multi-platform
//! rule over everything built. Platform ids are `designer * n + petal`, so
//! between two identical platforms the lower-numbered designer's is chosen.

use std::collections::{BTreeMap, HashMap};

use crate::competitive::{competitive_profit, competitive_solve, CompetitiveInstance, ExternalPlatform};
use crate::error::{Error, Result};
use crate::model::StateSet;
use crate::multiagent::MultiAgentInstance;
use crate::multiplatform::Owner;
use crate::rational::Rational;

/// Limit on the number of profiles the equilibrium search will enumerate.
pub const PROFILE_LIMIT: u128 = 1_000_000;

pub type Profile = Vec<StateSet>;

#[derive(Debug, Clone, PartialEq)]
pub struct GameInstance {
    /// Each designer's candidates, as seen by the shared population of agents.
    designers: Vec<MultiAgentInstance>,
}

impl GameInstance {
    /// All designers must describe the same agents: same petals, visit
    /// probabilities, stay probabilities and off-platform rewards.
    pub fn new(designers: Vec<MultiAgentInstance>) -> Result<Self> {
        let first = designers.first().ok_or_else(|| Error::Shape("no designers".into()))?;
        for (d, g) in designers.iter().enumerate().skip(1) {
            if g.n() != first.n() || g.k() != first.k() {
                return Err(Error::Shape(format!("designer {d} sees a different population")));
            }
            if g.delta() != first.delta() || g.delta_prime() != first.delta_prime() {
                return Err(Error::Shape(format!("designer {d} uses different quantization steps")));
            }
            for (a, b) in g.agents().iter().zip(first.agents()) {
                for (s, t) in a.states().iter().zip(b.states()) {
                    if s.p != t.p || s.q != t.q || s.c_life != t.c_life {
                        return Err(Error::Shape(format!("designer {d} disagrees on an agent's chain")));
                    }
                }
            }
        }
        Ok(GameInstance { designers })
    }

    pub fn designers(&self) -> &[MultiAgentInstance] {
        &self.designers
    }

    pub fn n(&self) -> usize {
        self.designers[0].n()
    }

    fn check_profile(&self, profile: &Profile) -> Result<()> {
        if profile.len() != self.designers.len() {
            return Err(Error::Shape(format!("profile has {} entries for {} designers", profile.len(), self.designers.len())));
        }
        match profile.iter().flat_map(|s| s.iter()).find(|&j| j >= self.n()) {
            Some(j) => Err(Error::Subset(format!("petal {j} does not exist"))),
            None => Ok(()),
        }
    }

    /// The competitive view of designer `d`: everyone else's built platforms are fixed.
    pub fn view(&self, d: usize, profile: &Profile) -> Result<CompetitiveInstance> {
        self.check_profile(profile)?;
        let n = self.n();
        let mut externals = Vec::new();
        for (e, set) in profile.iter().enumerate() {
            if e == d {
                continue;
            }
            let g = &self.designers[e];
            for j in set.iter() {
                externals.push(ExternalPlatform {
                    id: e * n + j,
                    state: j,
                    z: (0..g.k()).map(|i| g.params(i).z[j].clone()).collect(),
                    phi: (0..g.k()).map(|i| g.params(i).phi[j].clone()).collect(),
                    owner: Owner::Designer(e),
                });
            }
        }
        CompetitiveInstance::with_ids(self.designers[d].clone(), externals, d * n, Owner::Designer(d))
    }

    pub fn profit(&self, d: usize, profile: &Profile) -> Result<Rational> {
        Ok(competitive_profit(&self.view(d, profile)?, &profile[d])?.0)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Response {
    pub set: StateSet,
    pub profit: Rational,
}

/// Designer `d`'s most profitable portfolio against the rest of `profile`.
pub fn best_response(game: &GameInstance, d: usize, profile: &Profile) -> Result<Response> {
    let out = competitive_solve(&game.view(d, profile)?)?;
    Ok(Response { set: out.offered, profit: out.profit })
}

#[derive(Debug, Clone, PartialEq)]
pub enum DynamicsOutcome {
    /// No designer can improve.
    Equilibrium { profile: Profile, trajectory: Vec<Profile> },
    /// A profile repeated with the same designer about to move.
    Cycle { trajectory: Vec<Profile>, cycle: Vec<Profile>, period: usize },
    /// The round limit was reached first.
    Exhausted { trajectory: Vec<Profile> },
}

/// Designers move in turn, each switching to a best response when it is
/// strictly better than what it currently earns.
pub fn best_response_dynamics(game: &GameInstance, init: Profile, max_rounds: usize) -> Result<DynamicsOutcome> {
    game.check_profile(&init)?;
    let m = game.designers.len();
    let mut profile = init;
    let mut trajectory = vec![profile.clone()];
    let mut seen: HashMap<(Profile, usize), usize> = HashMap::new();
    seen.insert((profile.clone(), 0), 0);
    let mut idle = 0;
    for step in 0..max_rounds * m {
        let d = step % m;
        let current = game.profit(d, &profile)?;
        let br = best_response(game, d, &profile)?;
        if br.profit > current {
            profile[d] = br.set;
            trajectory.push(profile.clone());
            idle = 0;
            let key = (profile.clone(), (d + 1) % m);
            if let Some(&start) = seen.get(&key) {
                let cycle = trajectory[start..trajectory.len() - 1].to_vec();
                let period = cycle.len();
                return Ok(DynamicsOutcome::Cycle { trajectory, cycle, period });
            }
            seen.insert(key, trajectory.len() - 1);
        } else {
            idle += 1;
            if idle == m {
                return Ok(DynamicsOutcome::Equilibrium { profile, trajectory });
            }
        }
    }
    Ok(DynamicsOutcome::Exhausted { trajectory })
}

/// First profile (in lexicographic order) where every designer already plays
/// a best response, if any.
pub fn pure_nash_search(game: &GameInstance) -> Result<Option<Profile>> {
    let n = game.n();
    let m = game.designers.len();
    let total = if n < 64 { (0..m).try_fold(1u128, |acc, _| acc.checked_mul(1u128 << n)) } else { None };
    match total {
        Some(t) if t <= PROFILE_LIMIT => {}
        _ => return Err(Error::GuardExceeded(format!("{m} designers over {n} petals exceed {PROFILE_LIMIT} profiles"))),
    }
    let mut sets: Vec<StateSet> = (0..1u64 << n).map(StateSet::from_mask).collect();
    sets.sort();
    let mut best_cache: BTreeMap<(usize, Profile), Rational> = BTreeMap::new();
    let mut idx = vec![0usize; m];
    loop {
        let profile: Profile = idx.iter().map(|&i| sets[i].clone()).collect();
        let mut stable = true;
        for d in 0..m {
            let mut others = profile.clone();
            others[d] = StateSet::new();
            let best = match best_cache.get(&(d, others.clone())) {
                Some(b) => b.clone(),
                None => {
                    let b = best_response(game, d, &profile)?.profit;
                    best_cache.insert((d, others), b.clone());
                    b
                }
            };
            if game.profit(d, &profile)? < best {
                stable = false;
                break;
            }
        }
        if stable {
            return Ok(Some(profile));
        }
        // odometer, last designer fastest
        let mut i = m;
        loop {
            if i == 0 {
                return Ok(None);
            }
            i -= 1;
            idx[i] += 1;
            if idx[i] < sets.len() {
                break;
            }
            idx[i] = 0;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instances::three_petal_game;
    use crate::rational::rat;

    fn set(v: &[usize]) -> StateSet {
        v.iter().copied().collect()
    }

    #[test]
    fn profits_and_responses() {
        let g = three_petal_game().unwrap();
        let start = vec![set(&[0]), set(&[1])];
        assert_eq!(g.profit(0, &start).unwrap(), rat(99997, 3000));
        assert_eq!(g.profit(1, &start).unwrap(), rat(99997, 3000));
        let br = best_response(&g, 1, &start).unwrap();
        assert_eq!((br.set, br.profit), (set(&[2]), rat(799999, 1000)));
        // both on petal 3: the higher potential wins it outright
        let both = vec![set(&[2]), set(&[2])];
        assert_eq!(g.profit(0, &both).unwrap(), rat(19999, 1000));
        assert_eq!(g.profit(1, &both).unwrap(), rat(-1, 1000));
        assert_eq!(best_response(&g, 1, &both).unwrap().set, set(&[]));
    }

    #[test]
    fn no_pure_equilibrium_and_a_cycle() {
        let g = three_petal_game().unwrap();
        assert_eq!(pure_nash_search(&g).unwrap(), None);
        match best_response_dynamics(&g, vec![set(&[0]), set(&[1])], 20).unwrap() {
            DynamicsOutcome::Cycle { cycle, period, .. } => {
                assert_eq!(period, 4);
                assert_eq!(
                    cycle,
                    vec![
                        vec![set(&[0]), set(&[2])],
                        vec![set(&[2]), set(&[2])],
                        vec![set(&[2]), set(&[])],
                        vec![set(&[0]), set(&[])],
                    ]
                );
            }
            other => panic!("expected a cycle, got {other:?}"),
        }
    }

    #[test]
    fn rejects_bad_profiles() {
        let g = three_petal_game().unwrap();
        assert!(matches!(g.profit(0, &vec![set(&[0])]), Err(Error::Shape(_))));
        assert!(matches!(g.profit(0, &vec![set(&[5]), set(&[])]), Err(Error::Subset(_))));
    }
}
