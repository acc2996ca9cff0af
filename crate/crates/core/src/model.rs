//! Flower-shaped agent chains and the quantities derived from them.
//!
//! The chain has a rest state (index 0 of any distribution vector) and `n`
//! petals. From rest the agent jumps to petal `i` with probability `p[i]`;
//! on petal `i` it stays with probability `q[i]` (or `q[i] + y[i]` when the
//! designer's platform is adopted there) and otherwise returns to rest.
//! Petals are indexed `0..n` in this API.

use std::fmt;

use crate::error::{Error, Result};
use crate::rational::Rational;

/// A sorted set of petal indices. Ordering is lexicographic on the sorted list.
#[derive(Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct StateSet(Vec<usize>);

impl StateSet {
    pub fn new() -> Self {
        StateSet(Vec::new())
    }

    pub fn from_mask(mask: u64) -> Self {
        StateSet((0..64).filter(|i| mask >> i & 1 == 1).collect())
    }

    pub fn mask(&self) -> u64 {
        self.0.iter().fold(0u64, |m, &i| m | 1 << i)
    }

    pub fn contains(&self, i: usize) -> bool {
        self.0.binary_search(&i).is_ok()
    }

    pub fn insert(&mut self, i: usize) {
        if let Err(pos) = self.0.binary_search(&i) {
            self.0.insert(pos, i);
        }
    }

    pub fn with(&self, i: usize) -> StateSet {
        let mut s = self.clone();
        s.insert(i);
        s
    }

    pub fn remove(&mut self, i: usize) {
        if let Ok(pos) = self.0.binary_search(&i) {
            self.0.remove(pos);
        }
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.0.iter().copied()
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.0
    }

    pub fn is_subset(&self, other: &StateSet) -> bool {
        self.iter().all(|i| other.contains(i))
    }

    /// Order used by the exhaustive oracles: fewer states first, then lexicographic.
    pub fn cmp_size_lex(&self, other: &StateSet) -> std::cmp::Ordering {
        self.len().cmp(&other.len()).then_with(|| self.cmp(other))
    }
}

impl FromIterator<usize> for StateSet {
    fn from_iter<I: IntoIterator<Item = usize>>(iter: I) -> Self {
        let mut v: Vec<usize> = iter.into_iter().collect();
        v.sort_unstable();
        v.dedup();
        StateSet(v)
    }
}

impl fmt::Debug for StateSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.0.iter()).finish()
    }
}

/// Raw description of one petal.
#[derive(Debug, Clone, PartialEq)]
pub struct StateParams {
    pub p: Rational,
    pub q: Rational,
    pub y: Rational,
    pub c_life: Rational,
    pub c_platform: Rational,
    pub d: Rational,
    pub cost: Rational,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FlowerInstance {
    states: Vec<StateParams>,
}

impl FlowerInstance {
    pub fn new(states: Vec<StateParams>) -> Result<Self> {
        if states.is_empty() {
            return Err(Error::Probability("instance has no petals".into()));
        }
        for (i, s) in states.iter().enumerate() {
            if !s.p.is_positive() {
                return Err(Error::Probability(format!("state {i}: p = {} is not positive", s.p)));
            }
            if !s.q.is_positive() || s.q >= Rational::one() {
                return Err(Error::Probability(format!("state {i}: q = {} is outside (0, 1)", s.q)));
            }
            if s.y.is_zero() {
                return Err(Error::Probability(format!("state {i}: y must be nonzero")));
            }
            let stay = &s.q + &s.y;
            if stay >= Rational::one() {
                return Err(Error::DegenerateState { state: i, total: Box::new(stay) });
            }
            if !stay.is_positive() {
                return Err(Error::Probability(format!("state {i}: q + y = {stay} is not positive")));
            }
            if !s.cost.is_positive() {
                return Err(Error::NonpositiveCost { state: i, cost: Box::new(s.cost.clone()) });
            }
        }
        let total: Rational = states.iter().map(|s| &s.p).sum();
        if total != Rational::one() {
            return Err(Error::Probability(format!("outgoing probabilities of the rest state sum to {total}")));
        }
        Ok(FlowerInstance { states })
    }

    pub fn n(&self) -> usize {
        self.states.len()
    }

    pub fn state(&self, i: usize) -> &StateParams {
        &self.states[i]
    }

    pub fn states(&self) -> &[StateParams] {
        &self.states
    }

    pub fn derived(&self) -> DerivedParams {
        DerivedParams::from_instance(self)
    }

    pub(crate) fn check_subset(&self, s: &StateSet) -> Result<()> {
        match s.iter().find(|&i| i >= self.n()) {
            Some(i) => Err(Error::Subset(format!("state {i} is not a petal of an instance with {} petals", self.n()))),
            None => Ok(()),
        }
    }

    /// Row-stochastic transition matrix of the induced chain; row/column 0 is rest.
    pub fn transition_matrix(&self, adopted: &StateSet) -> Result<Vec<Vec<Rational>>> {
        self.check_subset(adopted)?;
        let n = self.n();
        let mut m = vec![vec![Rational::zero(); n + 1]; n + 1];
        for (i, s) in self.states.iter().enumerate() {
            m[0][i + 1] = s.p.clone();
            let stay = if adopted.contains(i) { &s.q + &s.y } else { s.q.clone() };
            m[i + 1][0] = Rational::one() - &stay;
            m[i + 1][i + 1] = stay;
        }
        Ok(m)
    }

    /// Per-step agent reward on each chain state under `adopted`; rest earns nothing.
    pub fn reward_vector(&self, adopted: &StateSet) -> Result<Vec<Rational>> {
        self.check_subset(adopted)?;
        let mut r = vec![Rational::zero()];
        for (i, s) in self.states.iter().enumerate() {
            r.push(if adopted.contains(i) { s.c_platform.clone() } else { s.c_life.clone() });
        }
        Ok(r)
    }
}

/// Closed-form parameters of a flower instance.
///
/// `lambda[i]` and `w[i]` are the unnormalized stationary weights of petal `i`
/// off and on platform, `z = w - lambda`, and `phi` is the potential: adopting
/// petal `i` moves the agent's average reward towards `phi[i]`.
#[derive(Debug, Clone, PartialEq)]
pub struct DerivedParams {
    pub lambda: Vec<Rational>,
    pub w: Vec<Rational>,
    pub z: Vec<Rational>,
    pub phi: Vec<Rational>,
    pub a: Rational,
    pub b: Rational,
}

impl DerivedParams {
    pub fn from_instance(inst: &FlowerInstance) -> Self {
        let mut lambda = Vec::with_capacity(inst.n());
        let mut w = Vec::with_capacity(inst.n());
        let mut z = Vec::with_capacity(inst.n());
        let mut phi = Vec::with_capacity(inst.n());
        let mut a = Rational::zero();
        let mut b = Rational::one();
        for s in inst.states() {
            let l = &s.p / (Rational::one() - &s.q);
            let wi = &s.p / (Rational::one() - &s.q - &s.y);
            let zi = &wi - &l;
            let ph = (&wi * &s.c_platform - &l * &s.c_life) / &zi;
            a += &l * &s.c_life;
            b += &l;
            lambda.push(l);
            w.push(wi);
            z.push(zi);
            phi.push(ph);
        }
        DerivedParams { lambda, w, z, phi, a, b }
    }

    /// Builds parameters directly from the objective's ingredients, for
    /// callers that do not start from a chain. `lambda` is spread evenly so
    /// that `b = 1 + sum(lambda)` holds.
    pub fn from_objective(a: Rational, b: Rational, z: Vec<Rational>, phi: Vec<Rational>) -> Self {
        assert_eq!(z.len(), phi.len());
        let n = z.len();
        let share = if n == 0 { Rational::zero() } else { (&b - Rational::one()) / Rational::from_integer(n as i64) };
        let lambda = vec![share; n];
        let w = lambda.iter().zip(&z).map(|(l, zi)| l + zi).collect();
        DerivedParams { lambda, w, z, phi, a, b }
    }

    pub fn n(&self) -> usize {
        self.z.len()
    }

    /// Numerator and denominator of the agent's average reward under `set`.
    pub fn objective_parts<I: IntoIterator<Item = usize>>(&self, set: I) -> (Rational, Rational) {
        let mut num = self.a.clone();
        let mut den = self.b.clone();
        for j in set {
            num += &self.z[j] * &self.phi[j];
            den += &self.z[j];
        }
        (num, den)
    }

    pub fn utility(&self, set: &StateSet) -> Rational {
        let (num, den) = self.objective_parts(set.iter());
        num / den
    }

    /// Petals ordered by potential, highest first, ties by index.
    pub fn potential_order(&self) -> Vec<usize> {
        let mut order: Vec<usize> = (0..self.n()).collect();
        order.sort_by(|&i, &j| self.phi[j].cmp(&self.phi[i]).then(i.cmp(&j)));
        order
    }
}

/// Agent's long-run average reward when it adopts the platforms in `set`.
pub fn agent_utility(inst: &FlowerInstance, set: &StateSet) -> Result<Rational> {
    inst.check_subset(set)?;
    Ok(inst.derived().utility(set))
}

/// Stationary distribution in closed form; entry 0 is the rest state.
pub fn stationary_distribution_flower(inst: &FlowerInstance, adopted: &StateSet) -> Result<Vec<Rational>> {
    inst.check_subset(adopted)?;
    let dp = inst.derived();
    let mut x = vec![Rational::one()];
    for i in 0..inst.n() {
        x.push(if adopted.contains(i) { dp.w[i].clone() } else { dp.lambda[i].clone() });
    }
    let total: Rational = x.iter().sum();
    Ok(x.into_iter().map(|v| v / &total).collect())
}

/// Designer's long-run profit: rewards on adopted petals weighted by their
/// stationary mass, minus the cost of every offered platform.
pub fn designer_profit(inst: &FlowerInstance, offered: &StateSet, adopted: &StateSet) -> Result<Rational> {
    inst.check_subset(offered)?;
    if !adopted.is_subset(offered) {
        return Err(Error::Subset(format!("adopted {adopted:?} is not contained in offered {offered:?}")));
    }
    let dp = inst.derived();
    Ok(profit_with(inst, &dp, offered, adopted))
}

pub(crate) fn profit_with(inst: &FlowerInstance, dp: &DerivedParams, offered: &StateSet, adopted: &StateSet) -> Rational {
    let mut revenue = Rational::zero();
    let mut den = dp.b.clone();
    for j in adopted.iter() {
        revenue += &inst.state(j).d * &dp.w[j];
        den += &dp.z[j];
    }
    let cost: Rational = offered.iter().map(|j| &inst.state(j).cost).sum();
    revenue / den - cost
}
