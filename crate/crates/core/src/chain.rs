//! Arbitrary finite chains with exact steady states.
//!
//! Used to cross-check the closed forms of the flower model and to evaluate
//! instances that are not flower-shaped.

use std::collections::VecDeque;

use crate::error::{Error, Result};
use crate::model::{FlowerInstance, StateSet};
use crate::rational::Rational;

#[derive(Debug, Clone, PartialEq)]
pub struct GeneralChain {
    /// Row-stochastic transition matrix.
    pub transitions: Vec<Vec<Rational>>,
    /// Designer's reward per step spent in each state.
    pub designer_reward: Vec<Rational>,
    /// States the agent may start from; the steady state lives on what they reach.
    pub start: Vec<usize>,
}

impl GeneralChain {
    pub fn new(transitions: Vec<Vec<Rational>>, designer_reward: Vec<Rational>, start: Vec<usize>) -> Result<Self> {
        let n = transitions.len();
        if designer_reward.len() != n {
            return Err(Error::Shape(format!("{} rewards for {n} states", designer_reward.len())));
        }
        if start.is_empty() || start.iter().any(|&s| s >= n) {
            return Err(Error::Shape("start states must be a nonempty subset of the chain".into()));
        }
        for (i, row) in transitions.iter().enumerate() {
            if row.len() != n {
                return Err(Error::Shape(format!("row {i} has {} entries, expected {n}", row.len())));
            }
            if row.iter().any(|x| x.is_negative()) {
                return Err(Error::Probability(format!("row {i} has a negative entry")));
            }
            let total: Rational = row.iter().sum();
            if total != Rational::one() {
                return Err(Error::Probability(format!("row {i} sums to {total}")));
            }
        }
        Ok(GeneralChain { transitions, designer_reward, start })
    }

    /// The flower chain induced by `adopted`, with the designer's rewards on adopted petals.
    pub fn from_flower(inst: &FlowerInstance, adopted: &StateSet) -> Result<Self> {
        let t = inst.transition_matrix(adopted)?;
        let mut r = vec![Rational::zero()];
        for i in 0..inst.n() {
            r.push(if adopted.contains(i) { inst.state(i).d.clone() } else { Rational::zero() });
        }
        GeneralChain::new(t, r, vec![0])
    }

    pub fn len(&self) -> usize {
        self.transitions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.transitions.is_empty()
    }

    fn reach(&self, from: &[usize], reverse: bool) -> Vec<bool> {
        let n = self.len();
        let mut seen = vec![false; n];
        let mut queue: VecDeque<usize> = from.iter().copied().collect();
        for &s in from {
            seen[s] = true;
        }
        while let Some(u) = queue.pop_front() {
            for v in 0..n {
                let edge = if reverse { &self.transitions[v][u] } else { &self.transitions[u][v] };
                if !seen[v] && !edge.is_zero() {
                    seen[v] = true;
                    queue.push_back(v);
                }
            }
        }
        seen
    }

    /// Unique stationary distribution on the states reachable from `start`,
    /// with zero mass elsewhere. The reachable part must be irreducible.
    pub fn steady_state(&self) -> Result<Vec<Rational>> {
        let reachable = self.reach(&self.start, false);
        let members: Vec<usize> = (0..self.len()).filter(|&i| reachable[i]).collect();
        // Irreducible iff every reachable state can get back to the first one
        // (all of them are reachable from it by construction of `members`).
        let back = self.reach(&[members[0]], true);
        let forward = self.reach(&[members[0]], false);
        if members.iter().any(|&i| !back[i] || !forward[i]) {
            return Err(Error::ReducibleChain);
        }
        let m = members.len();
        // Solve pi (P - I) = 0 with sum(pi) = 1: transpose, replace the last equation by normalization.
        let mut rows: Vec<Vec<Rational>> = (0..m)
            .map(|r| {
                let mut row: Vec<Rational> = (0..m)
                    .map(|c| {
                        let mut v = self.transitions[members[c]][members[r]].clone();
                        if r == c {
                            v -= Rational::one();
                        }
                        v
                    })
                    .collect();
                row.push(Rational::zero());
                row
            })
            .collect();
        rows[m - 1] = vec![Rational::one(); m + 1];
        let sol = solve_linear(rows).ok_or(Error::ReducibleChain)?;
        let mut pi = vec![Rational::zero(); self.len()];
        for (k, &i) in members.iter().enumerate() {
            pi[i] = sol[k].clone();
        }
        Ok(pi)
    }

    /// Long-run designer reward per step (platform costs excluded).
    pub fn designer_revenue(&self) -> Result<Rational> {
        let pi = self.steady_state()?;
        Ok(pi.iter().zip(&self.designer_reward).map(|(p, r)| p * r).sum())
    }
}

/// Gaussian elimination on an augmented matrix; `None` when singular.
fn solve_linear(mut rows: Vec<Vec<Rational>>) -> Option<Vec<Rational>> {
    let m = rows.len();
    for col in 0..m {
        let pivot = (col..m).find(|&r| !rows[r][col].is_zero())?;
        rows.swap(col, pivot);
        let inv = rows[col][col].recip();
        for v in rows[col].iter_mut().skip(col) {
            *v *= &inv;
        }
        for r in 0..m {
            if r != col && !rows[r][col].is_zero() {
                let factor = rows[r][col].clone();
                for c in col..=m {
                    let delta = &factor * &rows[col][c];
                    rows[r][c] -= delta;
                }
            }
        }
    }
    Some(rows.into_iter().map(|mut r| r.pop().unwrap()).collect())
}

/// Steady state of `chain` restricted to the part reachable from its start states.
pub fn steady_state_general(chain: &GeneralChain) -> Result<Vec<Rational>> {
    chain.steady_state()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::fixtures::two_petal;
    use crate::model::stationary_distribution_flower;
    use crate::rational::rat;

    #[test]
    fn matches_flower_closed_form() {
        let inst = two_petal();
        for mask in 0..4u64 {
            let s = StateSet::from_mask(mask);
            let chain = GeneralChain::from_flower(&inst, &s).unwrap();
            assert_eq!(chain.steady_state().unwrap(), stationary_distribution_flower(&inst, &s).unwrap());
        }
    }

    #[test]
    fn unreachable_states_get_zero_mass() {
        let one = rat(1, 1);
        let zero = rat(0, 1);
        let half = rat(1, 2);
        // 0 <-> 1, state 2 only leads into the cycle.
        let t = vec![
            vec![zero.clone(), one.clone(), zero.clone()],
            vec![one.clone(), zero.clone(), zero.clone()],
            vec![half.clone(), half.clone(), zero.clone()],
        ];
        let c = GeneralChain::new(t, vec![zero.clone(), one.clone(), zero.clone()], vec![0]).unwrap();
        assert_eq!(c.steady_state().unwrap(), vec![half.clone(), half.clone(), zero.clone()]);
        assert_eq!(c.designer_revenue().unwrap(), half);
    }

    #[test]
    fn reducible_is_rejected() {
        let one = rat(1, 1);
        let zero = rat(0, 1);
        // 0 -> 1, and 1 is absorbing.
        let t = vec![vec![zero.clone(), one.clone()], vec![zero.clone(), one.clone()]];
        let c = GeneralChain::new(t, vec![zero.clone(), zero], vec![0]).unwrap();
        assert_eq!(c.steady_state(), Err(Error::ReducibleChain));
    }

    #[test]
    fn rejects_bad_rows() {
        let t = vec![vec![rat(1, 2), rat(1, 3)], vec![rat(0, 1), rat(1, 1)]];
        assert!(matches!(GeneralChain::new(t, vec![rat(0, 1); 2], vec![0]), Err(Error::Probability(_))));
    }
}
