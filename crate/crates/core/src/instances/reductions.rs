//! Structured instances: partition and set-cover encodings, and a small
//! two-designer game without a pure equilibrium.

use crate::chain::GeneralChain;
use crate::error::{Error, Result};
use crate::game::GameInstance;
use crate::model::{FlowerInstance, StateParams, StateSet};
use crate::multiagent::MultiAgentInstance;
use crate::rational::Rational;

/// Platform cost used where the encodings would want zero.
pub fn tiny_cost() -> Rational {
    Rational::new(1, 1_000_000)
}

/// Shared chain of the partition encodings: `2n + 1` petals, each with
/// off-platform weight `n^2`, on-platform weight `n^2 + 1` and `z = 1`.
struct PartitionChain {
    n: i64,
    q: Rational,
    p: Rational,
    y: Rational,
    /// `1 + (2n + 1) n^2`
    b: Rational,
    /// Potential bump on the special petal, small enough that no new set becomes adoptable.
    bump: Rational,
}

impl PartitionChain {
    fn new(n: usize) -> Self {
        let n = n as i64;
        let petals = 2 * n + 1;
        let leave = Rational::new(1, n * n * petals);
        let b = Rational::from_integer(1 + petals * n * n);
        PartitionChain {
            n,
            q: Rational::one() - &leave,
            p: Rational::new(1, petals),
            y: leave / Rational::from_integer(n * n + 1),
            bump: Rational::one() / (Rational::from_integer(2 * (2 * n + 2)) * &b),
            b,
        }
    }

    fn w(&self) -> Rational {
        Rational::from_integer(self.n * self.n + 1)
    }

    /// Potential step that every potential of the encoding is a multiple of.
    fn potential_step(&self) -> Rational {
        Rational::one() / (Rational::from_integer(2 * (2 * self.n + 2)) * &self.b)
    }

    /// Petals with potentials `base + values[i]` and a special last petal at `base + bump`,
    /// where `base = sum(values) / (2B)`.
    fn agent(&self, values: &[Rational], rewards: &[Rational], special_reward: &Rational, cost: &Rational) -> Result<FlowerInstance> {
        let total: Rational = values.iter().sum();
        let base = total / (Rational::from_integer(2) * &self.b);
        let w = self.w();
        let mk = |phi: Rational, d: &Rational| StateParams {
            p: self.p.clone(),
            q: self.q.clone(),
            y: self.y.clone(),
            c_life: Rational::zero(),
            c_platform: phi / &w,
            d: d.clone(),
            cost: cost.clone(),
        };
        let mut states: Vec<StateParams> = values.iter().zip(rewards).map(|(v, d)| mk(&base + v, d)).collect();
        states.push(mk(&base + &self.bump, special_reward));
        FlowerInstance::new(states)
    }
}

fn partition_values(a: &[u64]) -> Result<(i64, Vec<i64>)> {
    if a.is_empty() || a.contains(&0) {
        return Err(Error::Range("partition input must be a nonempty list of positive integers".into()));
    }
    let n = a.len() as i64;
    let sum: i64 = a.iter().map(|&x| x as i64).sum();
    let h = n * sum;
    let mut b: Vec<i64> = a.iter().map(|&x| h + x as i64).collect();
    b.extend(std::iter::repeat_n(h, a.len()));
    Ok((h, b))
}

#[derive(Debug, Clone)]
pub struct PartitionInstance {
    pub instance: FlowerInstance,
    /// Index of the special petal (the last one).
    pub special: usize,
    /// Optimal profit of a yes-instance with free platforms.
    pub target: Rational,
    /// `target` minus the cost of the `n + 1` platforms a yes-certificate offers.
    pub adjusted_target: Rational,
}

/// Single-agent encoding of partition for `a`: the designer can reach
/// `adjusted_target` exactly when `a` splits into two halves of equal sum.
pub fn gen_partition_instance(a: &[u64]) -> Result<PartitionInstance> {
    let (h, b) = partition_values(a)?;
    let chain = PartitionChain::new(a.len());
    let n = chain.n;
    let values: Vec<Rational> = b.iter().map(|&x| Rational::from_integer(x)).collect();
    let special_reward = Rational::from_integer(4 * n * h);
    let cost = tiny_cost();
    let instance = chain.agent(&values, &values, &special_reward, &cost)?;
    let half: Rational = Rational::new(b.iter().sum(), 2);
    let target = chain.w() * (&special_reward + half) / (&chain.b + Rational::from_integer(n + 1));
    let adjusted_target = &target - Rational::from_integer(n + 1) * &cost;
    Ok(PartitionInstance { special: instance.n() - 1, instance, target, adjusted_target })
}

#[derive(Debug, Clone)]
pub struct TwoAgentPartition {
    pub instance: MultiAgentInstance,
    pub special: usize,
    pub target: Rational,
    pub adjusted_target: Rational,
}

/// Two-agent encoding: the second agent sees the complemented values
/// `2H - b`, so only an exact half satisfies both.
pub fn gen_two_agent_partition(a: &[u64]) -> Result<TwoAgentPartition> {
    let (h, b) = partition_values(a)?;
    let chain = PartitionChain::new(a.len());
    let n = chain.n;
    let first: Vec<Rational> = b.iter().map(|&x| Rational::from_integer(x)).collect();
    let second: Vec<Rational> = b.iter().map(|&x| Rational::from_integer(2 * h - x)).collect();
    let ones = vec![Rational::one(); b.len()];
    let special_reward = Rational::from_integer(3 * n);
    let cost = tiny_cost();
    let agents = vec![
        chain.agent(&first, &ones, &special_reward, &cost)?,
        chain.agent(&second, &ones, &special_reward, &cost)?,
    ];
    let special = agents[0].n() - 1;
    let instance = MultiAgentInstance::new(agents, Rational::one(), chain.potential_step())?;
    let target = Rational::from_integer(8 * n) * chain.w() / (&chain.b + Rational::from_integer(n + 1));
    let adjusted_target = &target - Rational::from_integer(n + 1) * &cost;
    Ok(TwoAgentPartition { instance, special, target, adjusted_target })
}

/// Limit on the number of designer choices [`SetCoverInstance::optimum`] enumerates.
pub const SET_COVER_CHOICE_LIMIT: u128 = 200_000;

/// Set-cover encoding on a general chain. States are laid out as the sets,
/// then the elements, then one absorbing-ish "bad" state.
#[derive(Debug, Clone, PartialEq)]
pub struct SetCoverInstance {
    pub universe: usize,
    pub family: Vec<Vec<usize>>,
    pub k: usize,
}

/// What the designer builds: platforms on some set-states, and for each
/// element optionally a platform routing it to one set containing it.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct SetCoverChoice {
    pub sets: StateSet,
    pub links: Vec<Option<usize>>,
}

impl SetCoverInstance {
    pub fn new(universe: usize, family: Vec<Vec<usize>>, k: usize) -> Result<Self> {
        if universe == 0 || k == 0 {
            return Err(Error::Range("universe and budget must be positive".into()));
        }
        if let Some(e) = family.iter().flatten().find(|&&e| e >= universe) {
            return Err(Error::Range(format!("element {e} is outside a universe of {universe}")));
        }
        let family = family
            .into_iter()
            .map(|mut s| {
                s.sort_unstable();
                s.dedup();
                s
            })
            .collect();
        Ok(SetCoverInstance { universe, family, k })
    }

    fn bad(&self) -> usize {
        self.family.len() + self.universe
    }

    fn element(&self, e: usize) -> usize {
        self.family.len() + e
    }

    /// Designer reward per step on a set-state with a platform: `k^2 + k`.
    pub fn reward_rate(&self) -> Rational {
        let k = self.k as i64;
        Rational::from_integer(k * k + k)
    }

    /// Cost of one set platform; element platforms are free.
    pub fn set_cost(&self) -> Rational {
        Rational::from_integer(self.k as i64)
    }

    fn check_choice(&self, choice: &SetCoverChoice) -> Result<()> {
        if choice.links.len() != self.universe || choice.sets.iter().any(|s| s >= self.family.len()) {
            return Err(Error::Shape("choice does not match the instance".into()));
        }
        for (e, link) in choice.links.iter().enumerate() {
            if let Some(s) = link {
                if !self.family.get(*s).is_some_and(|set| set.contains(&e)) {
                    return Err(Error::Subset(format!("element {e} cannot link to set {s}")));
                }
            }
        }
        Ok(())
    }

    /// Chain induced when the agent adopts everything in `choice`.
    pub fn chain(&self, choice: &SetCoverChoice) -> Result<GeneralChain> {
        self.check_choice(choice)?;
        let total = self.bad() + 1;
        let n = self.universe as i64;
        let k = self.k as i64;
        let mut t = vec![vec![Rational::zero(); total]; total];
        let mut reward = vec![Rational::zero(); total];
        let spread = |row: &mut Vec<Rational>, mass: &Rational| {
            for e in 0..self.universe {
                row[self.family.len() + e] += mass / Rational::from_integer(n);
            }
        };
        for s in 0..self.family.len() {
            if choice.sets.contains(s) {
                let leave = Rational::new(1, k * k);
                t[s][s] = Rational::one() - &leave;
                spread(&mut t[s], &leave);
                reward[s] = self.reward_rate();
            } else {
                t[s][self.bad()] = Rational::one();
            }
        }
        for e in 0..self.universe {
            let target = match choice.links[e] {
                Some(s) => s,
                None => self.bad(),
            };
            t[self.element(e)][target] = Rational::one();
        }
        let bad = self.bad();
        let leave = Rational::new(1, n * k.pow(4));
        t[bad][bad] = Rational::one() - &leave;
        spread(&mut t[bad], &leave);
        GeneralChain::new(t, reward, (0..self.universe).map(|e| self.element(e)).collect())
    }

    pub fn profit(&self, choice: &SetCoverChoice) -> Result<Rational> {
        let revenue = self.chain(choice)?.designer_revenue()?;
        Ok(revenue - self.set_cost() * Rational::from_integer(choice.sets.len() as i64))
    }

    /// Every designer choice, in a fixed order.
    pub fn choices(&self) -> Result<Vec<SetCoverChoice>> {
        let m = self.family.len();
        let options: Vec<Vec<Option<usize>>> = (0..self.universe)
            .map(|e| std::iter::once(None).chain((0..m).filter(|&s| self.family[s].contains(&e)).map(Some)).collect())
            .collect();
        let count = options
            .iter()
            .try_fold(if m < 64 { 1u128 << m } else { u128::MAX }, |acc, o| acc.checked_mul(o.len() as u128));
        match count {
            Some(c) if c <= SET_COVER_CHOICE_LIMIT => {}
            _ => return Err(Error::GuardExceeded(format!("set-cover enumeration exceeds {SET_COVER_CHOICE_LIMIT} choices"))),
        }
        let mut out = Vec::new();
        for mask in 0u64..(1u64 << m) {
            let sets = StateSet::from_mask(mask);
            let mut digits = vec![0usize; self.universe];
            loop {
                out.push(SetCoverChoice { sets: sets.clone(), links: digits.iter().zip(&options).map(|(&d, o)| o[d]).collect() });
                let mut i = 0;
                while i < digits.len() {
                    digits[i] += 1;
                    if digits[i] < options[i].len() {
                        break;
                    }
                    digits[i] = 0;
                    i += 1;
                }
                if i == digits.len() {
                    break;
                }
            }
        }
        Ok(out)
    }

    /// Best choice by exhaustive evaluation; ties go to the first in enumeration order.
    pub fn optimum(&self) -> Result<(SetCoverChoice, Rational)> {
        let mut best: Option<(SetCoverChoice, Rational)> = None;
        for choice in self.choices()? {
            let profit = self.profit(&choice)?;
            if best.as_ref().is_none_or(|(_, b)| profit > *b) {
                best = Some((choice, profit));
            }
        }
        Ok(best.expect("at least the empty choice"))
    }
}

/// Three petals, two designers, one agent with `z = 1` everywhere.
///
/// Designer 1 earns on petals 1 and 3 (`d = 100, 0, 50`) with potentials
/// 50 and 2000 there; designer 2 earns on petals 2 and 3 (`d = 0, 100, 2000`)
/// with potentials 50 and 1000. Every platform costs `1/1000`.
pub fn three_petal_game() -> Result<GameInstance> {
    let cost = Rational::new(1, 1000);
    let designer = |phi: [i64; 3], d: [i64; 3]| -> Result<MultiAgentInstance> {
        let states = (0..3)
            .map(|j| StateParams {
                p: Rational::new(1, 3),
                q: Rational::new(2, 3),
                y: Rational::new(1, 6),
                c_life: Rational::zero(),
                // w = 2, so the potential is twice the reward
                c_platform: Rational::new(phi[j], 2),
                d: Rational::from_integer(d[j]),
                cost: cost.clone(),
            })
            .collect();
        MultiAgentInstance::new(vec![FlowerInstance::new(states)?], Rational::one(), Rational::from_integer(50))
    };
    GameInstance::new(vec![designer([50, 0, 2000], [100, 0, 50])?, designer([0, 50, 1000], [0, 100, 2000])?])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::rat;

    #[test]
    fn partition_one_one() {
        let p = gen_partition_instance(&[1, 1]).unwrap();
        assert_eq!(p.target, rat(205, 24));
        let dp = p.instance.derived();
        assert_eq!(dp.b, rat(21, 1));
        assert!(dp.z.iter().all(|z| *z == rat(1, 1)));
        assert!(dp.lambda.iter().all(|l| *l == rat(4, 1)));
        assert_eq!(dp.phi[0], rat(3, 7) + rat(5, 1));
        assert_eq!(dp.phi[4], rat(3, 7) + rat(1, 252));
    }

    #[test]
    fn two_agent_target() {
        let t = gen_two_agent_partition(&[1, 1]).unwrap();
        assert_eq!(t.target, rat(10, 3));
        assert_eq!(t.instance.k(), 2);
    }

    #[test]
    fn set_cover_chain_is_stochastic() {
        let sc = SetCoverInstance::new(2, vec![vec![0], vec![1], vec![0, 1]], 2).unwrap();
        let choices = sc.choices().unwrap();
        // 8 set choices times (1 + 2) options for each of the two elements
        assert_eq!(choices.len(), 8 * 9);
        let cover = SetCoverChoice { sets: [2].into_iter().collect(), links: vec![Some(2), Some(2)] };
        // one set platform: 4/5 of the time on it, reward 6, cost 2
        assert_eq!(sc.profit(&cover).unwrap(), rat(6 * 4, 5) - rat(2, 1));
    }

    #[test]
    fn game_potentials() {
        let g = three_petal_game().unwrap();
        assert_eq!(g.designers()[0].params(0).phi, vec![rat(50, 1), rat(0, 1), rat(2000, 1)]);
        assert_eq!(g.designers()[1].params(0).b, rat(4, 1));
    }
}
