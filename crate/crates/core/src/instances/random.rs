//! Seeded random instances. The same seed always yields the same instance.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::competitive::{CompetitiveInstance, ExternalPlatform};
use crate::error::Result;
use crate::model::{FlowerInstance, StateParams};
use crate::multiagent::MultiAgentInstance;
use crate::multiplatform::{Owner, Platform};
use crate::rational::Rational;

/// Knobs for the random generators. Integers are drawn uniformly from the
/// inclusive ranges described on each field.
#[derive(Debug, Clone)]
pub struct RandomRanges {
    /// Stay probabilities are `k / q_den` for `k` in `1..q_den`.
    pub q_den: i64,
    /// `z` is `delta` times a step in `1..=z_steps`.
    pub z_steps: i64,
    /// Potentials are `delta'` times a step in `0..=phi_steps` (multi-agent generators).
    pub phi_steps: i64,
    /// On-platform rewards in `0..=reward_max`.
    pub reward_max: i64,
    /// Off-platform rewards in `0..=life_max`.
    pub life_max: i64,
    /// Designer rewards in `1..=d_max`.
    pub d_max: i64,
    /// Costs are `c / cost_den` for `c` in `1..=cost_max`.
    pub cost_max: i64,
    pub cost_den: i64,
}

impl Default for RandomRanges {
    fn default() -> Self {
        RandomRanges { q_den: 8, z_steps: 6, phi_steps: 8, reward_max: 20, life_max: 5, d_max: 20, cost_max: 20, cost_den: 10 }
    }
}

fn rng_for(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn int(rng: &mut ChaCha8Rng, lo: i64, hi: i64) -> Rational {
    Rational::from_integer(rng.gen_range(lo..=hi))
}

fn visit_probabilities(rng: &mut ChaCha8Rng, n: usize) -> Vec<Rational> {
    let weights: Vec<i64> = (0..n).map(|_| rng.gen_range(1..=10)).collect();
    let total: i64 = weights.iter().sum();
    weights.into_iter().map(|w| Rational::new(w, total)).collect()
}

/// Stay-on-platform adjustment giving weight `w` on a petal with visit probability `p`
/// and stay probability `q`.
fn y_for(p: &Rational, q: &Rational, w: &Rational) -> Rational {
    Rational::one() - q - p / w
}

/// Flower instance whose `z` values are positive multiples of `delta`.
pub fn gen_random_flower(n: usize, seed: u64, ranges: &RandomRanges, delta: &Rational) -> Result<FlowerInstance> {
    let mut rng = rng_for(seed);
    let ps = visit_probabilities(&mut rng, n);
    let states = ps
        .into_iter()
        .map(|p| {
            let q = Rational::new(rng.gen_range(1..ranges.q_den), ranges.q_den);
            let lambda = &p / (Rational::one() - &q);
            let z = delta * int(&mut rng, 1, ranges.z_steps);
            let w = &lambda + &z;
            StateParams {
                y: y_for(&p, &q, &w),
                p,
                q,
                c_life: int(&mut rng, 0, ranges.life_max),
                c_platform: int(&mut rng, 0, ranges.reward_max),
                d: int(&mut rng, 1, ranges.d_max),
                cost: Rational::new(rng.gen_range(1..=ranges.cost_max), ranges.cost_den),
            }
        })
        .collect();
    FlowerInstance::new(states)
}

/// Flower instance where roughly half the platforms shorten the agent's stay (`z < 0`).
pub fn gen_random_signed_flower(n: usize, seed: u64, ranges: &RandomRanges) -> Result<FlowerInstance> {
    let mut rng = rng_for(seed);
    let ps = visit_probabilities(&mut rng, n);
    let states = ps
        .into_iter()
        .map(|p| {
            let q = Rational::new(rng.gen_range(1..ranges.q_den), ranges.q_den);
            let lambda = &p / (Rational::one() - &q);
            let w = if rng.gen_bool(0.5) {
                &lambda + Rational::new(rng.gen_range(1..=ranges.z_steps), 2)
            } else {
                // strictly between p and lambda, so the stay probability stays in (0, q)
                let f = Rational::new(rng.gen_range(1..=9), 10);
                &lambda - (&lambda - &p) * f
            };
            StateParams {
                y: y_for(&p, &q, &w),
                p,
                q,
                c_life: int(&mut rng, 0, ranges.life_max),
                c_platform: int(&mut rng, 0, ranges.reward_max),
                d: int(&mut rng, 1, ranges.d_max),
                cost: Rational::new(rng.gen_range(1..=ranges.cost_max), ranges.cost_den),
            }
        })
        .collect();
    FlowerInstance::new(states)
}

/// One agent's chain with prescribed `z` steps and potential steps.
fn quantized_agent(
    rng: &mut ChaCha8Rng,
    n: usize,
    ranges: &RandomRanges,
    delta: &Rational,
    delta_prime: &Rational,
    costs: &[Rational],
) -> Result<FlowerInstance> {
    let ps = visit_probabilities(rng, n);
    let states = ps
        .into_iter()
        .zip(costs)
        .map(|(p, cost)| {
            let q = Rational::new(rng.gen_range(1..ranges.q_den), ranges.q_den);
            let lambda = &p / (Rational::one() - &q);
            let z = delta * int(rng, 1, ranges.z_steps);
            let phi = delta_prime * int(rng, 0, ranges.phi_steps);
            let c_life = int(rng, 0, ranges.life_max);
            let w = &lambda + &z;
            // phi = (w * c_platform - lambda * c_life) / z
            let c_platform = (&phi * &z + &lambda * &c_life) / &w;
            StateParams { y: y_for(&p, &q, &w), p, q, c_life, c_platform, d: int(rng, 0, ranges.d_max), cost: cost.clone() }
        })
        .collect();
    FlowerInstance::new(states)
}

/// `k` agents over `n` shared petals with double-quantized parameters.
pub fn gen_random_multi_agent(
    k: usize,
    n: usize,
    seed: u64,
    ranges: &RandomRanges,
    delta: &Rational,
    delta_prime: &Rational,
) -> Result<MultiAgentInstance> {
    let mut rng = rng_for(seed);
    let costs: Vec<Rational> = (0..n).map(|_| Rational::new(rng.gen_range(1..=ranges.cost_max), ranges.cost_den)).collect();
    let agents = (0..k).map(|_| quantized_agent(&mut rng, n, ranges, delta, delta_prime, &costs)).collect::<Result<Vec<_>>>()?;
    MultiAgentInstance::new(agents, delta.clone(), delta_prime.clone())
}

/// Platforms for the multi-platform agent, up to `max_per_state` on each of `n` petals,
/// together with the agent's off-platform numerator and denominator.
pub fn gen_random_platforms(n: usize, max_per_state: usize, seed: u64, ranges: &RandomRanges) -> (Vec<Platform>, Rational, Rational) {
    let mut rng = rng_for(seed);
    let mut platforms = Vec::new();
    for state in 0..n {
        let count = rng.gen_range(0..=max_per_state);
        for _ in 0..count {
            platforms.push(Platform {
                id: platforms.len(),
                state,
                z: Rational::new(rng.gen_range(1..=ranges.z_steps), 2),
                phi: int(&mut rng, 0, ranges.reward_max),
                owner: Owner::Incumbent,
            });
        }
    }
    let b = Rational::one() + Rational::new(rng.gen_range(1..=4 * n as i64 + 1), 2);
    let a = &b * int(&mut rng, 0, ranges.reward_max / 2);
    (platforms, a, b)
}

/// A multi-agent instance plus up to `max_incumbents` incumbent platforms per petal.
pub fn gen_random_competitive(
    k: usize,
    n: usize,
    max_incumbents: usize,
    seed: u64,
    ranges: &RandomRanges,
    delta: &Rational,
    delta_prime: &Rational,
) -> Result<CompetitiveInstance> {
    let base = gen_random_multi_agent(k, n, seed, ranges, delta, delta_prime)?;
    let mut rng = rng_for(seed ^ 0x9e37_79b9_7f4a_7c15);
    let mut externals = Vec::new();
    for state in 0..n {
        for _ in 0..rng.gen_range(0..=max_incumbents) {
            externals.push(ExternalPlatform {
                id: externals.len(),
                state,
                z: (0..k).map(|_| delta * int(&mut rng, 1, ranges.z_steps)).collect(),
                phi: (0..k).map(|_| delta_prime * int(&mut rng, 0, ranges.phi_steps)).collect(),
                owner: Owner::Incumbent,
            });
        }
    }
    CompetitiveInstance::new(base, externals)
}
