//! Exit gate: one PASS/FAIL line per criterion, nonzero exit if any fails.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use pdp_core::agent::{agent_oracle, greedy_solve, greedy_solve_signed, is_feasible};
use pdp_core::chain::GeneralChain;
use pdp_core::competitive::{competitive_solve, CompetitiveInstance};
use pdp_core::designer::{designer_oracle, fptas_solve, preprocess};
use pdp_core::game::{best_response_dynamics, pure_nash_search, DynamicsOutcome};
use pdp_core::instances::{
    gen_partition_instance, gen_random_flower, gen_random_multi_agent, gen_random_platforms, gen_random_signed_flower,
    gen_two_agent_partition, three_petal_game, RandomRanges, SetCoverInstance,
};
use pdp_core::model::{designer_profit, stationary_distribution_flower};
use pdp_core::multiagent::{multi_agent_brute_force, multi_agent_profit, multi_agent_solve};
use pdp_core::multiplatform::{multi_greedy_solve, multi_oracle, prune_redundant, Owner, Platform};
use pdp_core::rational::{mediant, rat};
use pdp_core::{Error, Rational, StateSet};

type Outcome = Result<String, String>;

fn within(elapsed: Duration, limit: Duration, detail: String) -> Outcome {
    if elapsed < limit {
        Ok(format!("{detail}, {:.2} s", elapsed.as_secs_f64()))
    } else {
        Err(format!("{detail}, but took {:.2} s (limit {} s)", elapsed.as_secs_f64(), limit.as_secs()))
    }
}

fn agent_greedy() -> Outcome {
    let ranges = RandomRanges::default();
    let start = Instant::now();
    for seed in 0..500u64 {
        let n = 1 + (seed % 12) as usize;
        let inst = gen_random_flower(n, seed, &ranges, &rat(1, 2)).map_err(|e| format!("seed {seed}: {e}"))?;
        let dp = inst.derived();
        let (greedy, _) = greedy_solve(&dp).map_err(|e| format!("seed {seed}: {e}"))?;
        let oracle = agent_oracle(&dp).map_err(|e| e.to_string())?;
        if greedy.utility != oracle.utility {
            return Err(format!("seed {seed}: greedy {} vs oracle {}", greedy.utility, oracle.utility));
        }
    }
    within(start.elapsed(), Duration::from_secs(5), "500 instances, n <= 12, all equal".into())
}

fn signed_greedy() -> Outcome {
    let ranges = RandomRanges::default();
    let mut mixed = 0;
    for seed in 0..300u64 {
        let n = 1 + (seed % 10) as usize;
        let inst = gen_random_signed_flower(n, seed, &ranges).map_err(|e| format!("seed {seed}: {e}"))?;
        let dp = inst.derived();
        if dp.z.iter().any(|z| z.is_negative()) && dp.z.iter().any(|z| z.is_positive()) {
            mixed += 1;
        }
        let greedy = greedy_solve_signed(&dp);
        let oracle = agent_oracle(&dp).map_err(|e| e.to_string())?;
        if greedy.utility != oracle.utility {
            return Err(format!("seed {seed}: signed greedy {} vs oracle {}", greedy.utility, oracle.utility));
        }
    }
    Ok(format!("300 instances, n <= 10, {mixed} with both signs, all equal"))
}

fn objective_equivalence() -> Outcome {
    let ranges = RandomRanges::default();
    let mut sets = 0;
    for seed in 0..100u64 {
        let n = 1 + (seed % 8) as usize;
        let inst = gen_random_flower(n, 1000 + seed, &ranges, &rat(1, 3)).map_err(|e| e.to_string())?;
        let dp = inst.derived();
        for mask in 0..1u64 << n {
            let s = StateSet::from_mask(mask);
            let closed = stationary_distribution_flower(&inst, &s).map_err(|e| e.to_string())?;
            let solved = GeneralChain::from_flower(&inst, &s)
                .and_then(|c| c.steady_state())
                .map_err(|e| e.to_string())?;
            if closed != solved {
                return Err(format!("seed {seed}, set {s:?}: closed-form distribution differs from the linear solve"));
            }
            let rewards = inst.reward_vector(&s).map_err(|e| e.to_string())?;
            let average: Rational = solved.iter().zip(&rewards).map(|(x, r)| x * r).sum();
            if average != dp.utility(&s) {
                return Err(format!("seed {seed}, set {s:?}: ratio {} vs chain average {average}", dp.utility(&s)));
            }
            sets += 1;
        }
    }
    Ok(format!("100 instances, n <= 8, {sets} sets, all equal"))
}

fn fptas_guarantee() -> Outcome {
    let ranges = RandomRanges::default();
    let delta = rat(1, 2);
    let start = Instant::now();
    let mut worst = Rational::one();
    let mut empty = 0;
    for seed in 0..300u64 {
        let n = 1 + (seed % 12) as usize;
        let eps = if seed % 2 == 0 { rat(1, 10) } else { rat(1, 4) };
        let inst = gen_random_flower(n, 5000 + seed, &ranges, &delta).map_err(|e| e.to_string())?;
        let oracle = designer_oracle(&inst).map_err(|e| e.to_string())?;
        let qi = match preprocess(&inst, &delta, &eps) {
            Ok(qi) => qi,
            Err(Error::EmptyInstance) => {
                if oracle.profit.is_positive() {
                    return Err(format!("seed {seed}: preprocessing dropped everything but the optimum is {}", oracle.profit));
                }
                empty += 1;
                continue;
            }
            Err(e) => return Err(format!("seed {seed}: {e}")),
        };
        let out = fptas_solve(&qi);
        let offered = &out.design.offered;
        if !is_feasible(&inst, offered).map_err(|e| e.to_string())? {
            return Err(format!("seed {seed}: {offered:?} is not adopted in full"));
        }
        let exact = designer_profit(&inst, offered, offered).map_err(|e| e.to_string())?;
        if exact != out.design.profit {
            return Err(format!("seed {seed}: reported {} but the set earns {exact}", out.design.profit));
        }
        if exact < (Rational::one() - &eps) * &oracle.profit {
            return Err(format!("seed {seed}: {exact} is below (1 - {eps}) * {}", oracle.profit));
        }
        if num_bigint::BigInt::from(out.stats.max_bins) > out.stats.bin_bound {
            return Err(format!("seed {seed}: {} bins exceed the bound {}", out.stats.max_bins, out.stats.bin_bound));
        }
        if oracle.profit.is_positive() {
            worst = worst.min(exact / &oracle.profit);
        }
    }
    let detail = format!("300 instances, n <= 12, {empty} with nothing worth offering, worst ratio {}", worst.to_decimal(4));
    within(start.elapsed(), Duration::from_secs(30), detail)
}

/// Nonincreasing sequences of positive integers with sum at most `max_sum`.
fn multisets(max_sum: u64) -> Vec<Vec<u64>> {
    fn extend(prefix: &mut Vec<u64>, largest: u64, room: u64, out: &mut Vec<Vec<u64>>) {
        for v in 1..=largest.min(room) {
            prefix.push(v);
            out.push(prefix.clone());
            extend(prefix, v, room - v, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    extend(&mut Vec::new(), max_sum, max_sum, &mut out);
    out
}

fn has_partition(a: &[u64]) -> bool {
    let total: u64 = a.iter().sum();
    total.is_multiple_of(2) && (0..1u64 << a.len()).any(|m| (0..a.len()).filter(|&i| m >> i & 1 == 1).map(|i| a[i]).sum::<u64>() * 2 == total)
}

fn partition_fixture() -> Outcome {
    let small = gen_partition_instance(&[1, 1]).map_err(|e| e.to_string())?;
    if small.target != rat(205, 24) {
        return Err(format!("a = (1, 1): unperturbed optimum {} instead of 205/24", small.target));
    }
    let corpus = multisets(8);
    let mut yes = 0;
    for a in &corpus {
        let p = gen_partition_instance(a).map_err(|e| e.to_string())?;
        let best = designer_oracle(&p.instance).map_err(|e| format!("{a:?}: {e}"))?;
        let attains = best.profit == p.adjusted_target;
        if best.profit > p.adjusted_target {
            return Err(format!("{a:?}: optimum {} exceeds the target {}", best.profit, p.adjusted_target));
        }
        if attains != has_partition(a) {
            return Err(format!("{a:?}: optimum {} vs target {}, partition exists: {}", best.profit, p.adjusted_target, has_partition(a)));
        }
        yes += attains as usize;
    }
    Ok(format!("{} multisets with sum <= 8 ({yes} splittable), a = (1, 1) gives 205/24", corpus.len()))
}

fn multi_agent_exactness() -> Outcome {
    let ranges = RandomRanges::default();
    for seed in 0..200u64 {
        let n = 1 + (seed % 6) as usize;
        let mi = gen_random_multi_agent(2, n, seed, &ranges, &rat(1, 2), &rat(1, 3)).map_err(|e| e.to_string())?;
        let out = multi_agent_solve(&mi).map_err(|e| format!("seed {seed}: {e}"))?;
        let (_, brute) = multi_agent_brute_force(&mi).map_err(|e| e.to_string())?;
        if out.profit != brute {
            return Err(format!("seed {seed}: dynamic program {} vs brute force {brute}", out.profit));
        }
        let (check, _) = multi_agent_profit(&mi, &out.offered).map_err(|e| e.to_string())?;
        if check != out.profit {
            return Err(format!("seed {seed}: reported {} but the set earns {check}", out.profit));
        }
    }
    let tp = gen_two_agent_partition(&[1, 1]).map_err(|e| e.to_string())?;
    let out = multi_agent_solve(&tp.instance).map_err(|e| e.to_string())?;
    let gross = &out.profit + Rational::from_integer(out.offered.len() as i64) * tp.instance.cost(0);
    if tp.target != rat(10, 3) || gross != rat(10, 3) || out.profit != tp.adjusted_target {
        return Err(format!("two-agent a = (1, 1): profit {} (gross {gross}), expected 10/3 before costs", out.profit));
    }
    Ok("200 instances, k = 2, n <= 6, all equal; two-agent a = (1, 1) gives 10/3".into())
}

fn competitive_reduction() -> Outcome {
    let ranges = RandomRanges::default();
    for seed in 0..200u64 {
        let n = 1 + (seed % 6) as usize;
        let mi = gen_random_multi_agent(2, n, seed, &ranges, &rat(1, 2), &rat(1, 3)).map_err(|e| e.to_string())?;
        let plain = multi_agent_solve(&mi).map_err(|e| e.to_string())?;
        let ci = CompetitiveInstance::new(mi, Vec::new()).map_err(|e| e.to_string())?;
        let comp = competitive_solve(&ci).map_err(|e| format!("seed {seed}: {e}"))?;
        if comp.profit != plain.profit {
            return Err(format!("seed {seed}: competitive {} vs multi-agent {}", comp.profit, plain.profit));
        }
    }
    Ok("200 instances without incumbents, all equal".into())
}

fn multi_platform() -> Outcome {
    let ranges = RandomRanges::default();
    for seed in 0..300u64 {
        let n = 1 + (seed % 6) as usize;
        let (platforms, a, b) = gen_random_platforms(n, 4, seed, &ranges);
        let pruned = prune_redundant(&platforms).map_err(|e| e.to_string())?;
        let greedy = multi_greedy_solve(&pruned.curves, &a, &b);
        let oracle = multi_oracle(&platforms, &a, &b).map_err(|e| e.to_string())?;
        if greedy.utility != oracle.utility {
            return Err(format!("seed {seed}: greedy {} vs oracle {}", greedy.utility, oracle.utility));
        }
        let kept: Vec<Platform> = pruned.curves.iter().flat_map(|c| c.members.iter().cloned()).collect();
        let reduced = multi_oracle(&kept, &a, &b).map_err(|e| e.to_string())?;
        if reduced.utility != oracle.utility {
            return Err(format!("seed {seed}: pruning lost utility, {} vs {}", reduced.utility, oracle.utility));
        }
    }
    let plat = |id, z, phi| Platform { id, state: 0, z: rat(z, 1), phi: rat(phi, 1), owner: Owner::Incumbent };
    let pts = vec![plat(1, 1, 5), plat(2, 2, 4)];
    let curves = prune_redundant(&pts).map_err(|e| e.to_string())?.curves;
    let sel = multi_greedy_solve(&curves, &rat(10, 1), &rat(10, 1));
    if sel.utility != rat(18, 12) {
        return Err(format!("two-platform swap example: utility {} instead of 3/2", sel.utility));
    }
    Ok("300 instances, n <= 6, up to 4 platforms per petal, all equal; swap example gives 3/2".into())
}

fn covers_within(universe: usize, family: &[Vec<usize>], k: usize) -> bool {
    (0..1u32 << family.len()).any(|m| {
        m.count_ones() as usize <= k
            && (0..universe).all(|e| (0..family.len()).any(|s| m >> s & 1 == 1 && family[s].contains(&e)))
    })
}

fn set_cover_fixture() -> Outcome {
    let mut checked = 0;
    let mut wrong = Vec::new();
    for universe in 1..=3usize {
        let subsets: Vec<Vec<usize>> =
            (1..1u32 << universe).map(|m| (0..universe).filter(|&e| m >> e & 1 == 1).collect()).collect();
        let mut families: Vec<Vec<Vec<usize>>> = Vec::new();
        for i in 0..subsets.len() {
            families.push(vec![subsets[i].clone()]);
            for j in i + 1..subsets.len() {
                families.push(vec![subsets[i].clone(), subsets[j].clone()]);
                for l in j + 1..subsets.len() {
                    families.push(vec![subsets[i].clone(), subsets[j].clone(), subsets[l].clone()]);
                }
            }
        }
        for family in families {
            for k in 1..=2 {
                let sc = SetCoverInstance::new(universe, family.clone(), k).map_err(|e| e.to_string())?;
                let (_, best) = sc.optimum().map_err(|e| e.to_string())?;
                checked += 1;
                if best.is_positive() != covers_within(universe, &family, k) {
                    wrong.push(format!("|U| = {universe}, F = {family:?}, k = {k}: optimum {best}"));
                }
            }
        }
    }
    if wrong.is_empty() {
        Ok(format!("{checked} instances, positivity matches cover existence"))
    } else {
        Err(format!("{} of {checked} instances disagree, first: {}", wrong.len(), wrong[0]))
    }
}

fn three_petal_game_fixture() -> Outcome {
    let start = Instant::now();
    let game = three_petal_game().map_err(|e| e.to_string())?;
    let set = |v: &[usize]| v.iter().copied().collect::<StateSet>();
    if let Some(p) = pure_nash_search(&game).map_err(|e| e.to_string())? {
        return Err(format!("found a pure equilibrium {p:?}"));
    }
    let expected = vec![vec![set(&[0]), set(&[1])], vec![set(&[0]), set(&[2])], vec![set(&[0, 2]), set(&[1])]];
    let outcome = best_response_dynamics(&game, vec![set(&[0]), set(&[1])], 50).map_err(|e| e.to_string())?;
    let elapsed = start.elapsed();
    match outcome {
        DynamicsOutcome::Cycle { cycle, period, .. } if period == 3 && cycle == expected => {
            within(elapsed, Duration::from_secs(1), "no pure equilibrium, period-3 cycle".into())
        }
        DynamicsOutcome::Cycle { cycle, period, .. } => {
            Err(format!("no pure equilibrium, but the dynamics cycle with period {period} through {cycle:?} (petals 0-based)"))
        }
        other => Err(format!("no pure equilibrium, but the dynamics ended with {other:?}")),
    }
}

fn mediant_property() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mut draw = |lo: i64, hi: i64| Rational::new(rng.gen_range(lo..=hi), rng.gen_range(1..=50));
    let mut tested = 0;
    while tested < 10_000 {
        let (x, y, r, s) = (draw(-1000, 1000), draw(1, 1000), draw(-1000, 1000), draw(1, 1000));
        let (lo, hi) = (&x / &y, &r / &s);
        if lo >= hi {
            continue;
        }
        tested += 1;
        let m = mediant(&x, &y, &r, &s);
        if !(lo < m && m < hi) {
            return Err(format!("{x}/{y} < {r}/{s} but the mediant is {m}"));
        }
    }
    Ok("10000 quadruples, no violations".into())
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Outcome); 11] = [
        ("agent greedy optimality", agent_greedy),
        ("signed greedy optimality", signed_greedy),
        ("stationary/objective equivalence", objective_equivalence),
        ("approximation guarantee", fptas_guarantee),
        ("partition hardness fixture", partition_fixture),
        ("multi-agent exactness", multi_agent_exactness),
        ("competitive reduction", competitive_reduction),
        ("multi-platform agent", multi_platform),
        ("set-cover fixture", set_cover_fixture),
        ("three-petal game", three_petal_game_fixture),
        ("mediant inequality", mediant_property),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        match check() {
            Ok(detail) => println!("PASS [{:>2}] {name}: {detail}", i + 1),
            Err(detail) => {
                failed += 1;
                println!("FAIL [{:>2}] {name}: {detail}", i + 1);
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
