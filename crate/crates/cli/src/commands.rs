use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::json;

use pdp_core::agent::{agent_oracle, greedy_solve, greedy_solve_signed};
use pdp_core::competitive::{competitive_brute_force, competitive_solve, CompetitiveInstance};
use pdp_core::designer::{designer_oracle, fptas_solve, preprocess, FptasOutcome};
use pdp_core::game::{best_response, best_response_dynamics, pure_nash_search, DynamicsOutcome, GameInstance, Profile};
use pdp_core::instances::{self, RandomRanges};
use pdp_core::multiagent::{multi_agent_brute_force, multi_agent_solve, MultiAgentInstance, SlotStats};
use pdp_core::multiplatform::{multi_greedy_solve, multi_oracle, prune_redundant, MultiAction, Platform};
use pdp_core::{FlowerInstance, Rational, StateSet};

use crate::document::{quantization_of, Instance, InstanceDocument, Loaded, Quantization};
use crate::report::{profile_json, ResultDocument};
use crate::CliError;

#[derive(Debug, Parser)]
#[command(name = "pdp", version, about = "Exact solvers for platform design on flower chains")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

fn parse_rational(s: &str) -> Result<Rational, String> {
    s.parse().map_err(|e: pdp_core::rational::ParseRationalError| e.to_string())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum GenKind {
    Flower,
    SignedFlower,
    Platforms,
    MultiAgent,
    Competitive,
    Partition,
    TwoAgentPartition,
    ThreePetalGame,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Best response of a single agent to every platform in the file.
    SolveAgent { file: PathBuf },
    /// Best response of an agent choosing among several platforms per petal.
    SolveMultiplatformAgent { file: PathBuf },
    /// The designer's platform portfolio for a single agent.
    SolveDesigner {
        file: PathBuf,
        #[arg(long, value_parser = parse_rational)]
        epsilon: Option<Rational>,
        #[arg(long, value_parser = parse_rational)]
        delta: Option<Rational>,
        /// Enumerate every offer instead of running the approximation scheme.
        #[arg(long)]
        exact: bool,
    },
    /// The designer's portfolio against several agents (and incumbents, if any).
    SolveMultiAgent { file: PathBuf },
    /// One designer's best portfolio with the others fixed.
    BestResponse {
        file: PathBuf,
        /// Designer number, from 1.
        #[arg(long)]
        designer: usize,
        /// Profile such as `1,3;2` (designers separated by `;`, `-` for nothing).
        #[arg(long)]
        profile: Option<String>,
    },
    /// Round-robin best-response dynamics.
    Dynamics {
        file: PathBuf,
        #[arg(long)]
        init: Option<String>,
        #[arg(long, default_value_t = 100)]
        max_rounds: usize,
    },
    /// Exhaustive search for a pure equilibrium.
    Nash { file: PathBuf },
    /// Stationary distribution and designer revenue of a general chain.
    SteadyState { file: PathBuf },
    /// Writes a generated instance document to standard output.
    Gen {
        #[arg(long, value_enum)]
        kind: GenKind,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Number of petals.
        #[arg(long, default_value_t = 6)]
        n: usize,
        #[arg(long, default_value_t = 2)]
        agents: usize,
        /// Partition input, such as `1,2,3`.
        #[arg(long)]
        values: Option<String>,
        #[arg(long, value_parser = parse_rational, default_value = "1/2")]
        delta: Rational,
        #[arg(long, value_parser = parse_rational, default_value = "1/2")]
        delta_prime: Rational,
    },
    /// Compares solvers with exhaustive oracles on a file or on a seed range.
    Verify {
        file: Option<PathBuf>,
        #[arg(long)]
        against_oracle: bool,
        /// Seed range for the sweep when no file is given, such as `0..50`.
        #[arg(long, default_value = "0..50")]
        seeds: String,
        #[arg(long, value_parser = parse_rational, default_value = "1/10")]
        epsilon: Rational,
    },
}

/// What a command prints and the status it exits with.
#[derive(Debug)]
pub struct Outcome {
    pub stdout: String,
    pub status: u8,
}

pub fn run(cli: Cli) -> Result<Outcome, CliError> {
    let start = Instant::now();
    let mut report = match cli.command {
        Command::Gen { kind, seed, n, agents, values, delta, delta_prime } => {
            let loaded = generate(kind, seed, n, agents, values.as_deref(), &delta, &delta_prime)?;
            return Ok(Outcome { stdout: InstanceDocument::from_loaded(&loaded).to_json(), status: 0 });
        }
        Command::SolveAgent { file } => solve_agent(&flower_of(&load(&file)?)?.0),
        Command::SolveMultiplatformAgent { file } => {
            let loaded = load(&file)?;
            let (inst, platforms) = flower_of(&loaded)?;
            solve_multiplatform(&inst, &platforms)?
        }
        Command::SolveDesigner { file, epsilon, delta, exact } => {
            let loaded = load(&file)?;
            let inst = flower_of(&loaded)?.0;
            if exact {
                solve_designer_exact(&inst)?
            } else {
                let delta = delta.or(loaded.quantization.delta.clone()).unwrap_or_else(|| default_delta(&inst));
                let epsilon = epsilon.or(loaded.quantization.epsilon.clone()).unwrap_or(Rational::new(1, 10));
                solve_designer_fptas(&inst, &delta, &epsilon)?
            }
        }
        Command::SolveMultiAgent { file } => match load(&file)?.instance {
            Instance::MultiAgent(mi) => solve_multi_agent(&mi)?,
            Instance::Competitive(ci) => solve_competitive(&ci)?,
            _ => return Err(wrong_kind("multi-agent or competitive")),
        },
        Command::BestResponse { file, designer, profile } => {
            let game = game_of(load(&file)?)?;
            let d = designer_index(&game, designer)?;
            let profile = parse_profile(profile.as_deref(), &game, "--profile")?;
            let current = game.profit(d, &profile).map_err(|e| CliError::solver("--profile", e))?;
            let br = best_response(&game, d, &profile).map_err(|e| CliError::solver("--designer", e))?;
            let mut r = ResultDocument::new("best-response");
            r.set(format!("designer {designer}"), &br.set).value("profit", &br.profit).value("current profit", &current);
            r
        }
        Command::Dynamics { file, init, max_rounds } => {
            let game = game_of(load(&file)?)?;
            let init = parse_profile(init.as_deref(), &game, "--init")?;
            dynamics(&game, init, max_rounds)?
        }
        Command::Nash { file } => {
            let game = game_of(load(&file)?)?;
            let mut r = ResultDocument::new("pure-nash-search");
            match pure_nash_search(&game).map_err(|e| CliError::solver("designers", e))? {
                Some(p) => {
                    for (d, set) in p.iter().enumerate() {
                        let profit = game.profit(d, &p).map_err(|e| CliError::solver("designers", e))?;
                        r.set(format!("designer {}", d + 1), set).value(format!("designer {} profit", d + 1), &profit);
                    }
                    r.trace = json!({ "equilibrium": profile_json(&p) });
                }
                None => r.trace = json!({ "equilibrium": null }),
            }
            r
        }
        Command::SteadyState { file } => {
            let Instance::GeneralChain(chain) = load(&file)?.instance else {
                return Err(wrong_kind("general-chain"));
            };
            let pi = chain.steady_state().map_err(|e| CliError::solver("chain", e))?;
            let revenue = chain.designer_revenue().map_err(|e| CliError::solver("chain", e))?;
            let mut r = ResultDocument::new("steady-state");
            r.value("revenue", &revenue);
            for (i, x) in pi.iter().enumerate() {
                r.value(format!("pi[{i}]"), x);
            }
            r
        }
        Command::Verify { file, against_oracle, seeds, epsilon } => {
            if !against_oracle {
                return Err(CliError::Schema { path: "--against-oracle".into(), message: "verify needs a reference; pass --against-oracle".into() });
            }
            let (mut r, mismatches) = match file {
                Some(f) => verify_file(&load(&f)?, &epsilon)?,
                None => verify_sweep(&parse_seeds(&seeds)?, &epsilon)?,
            };
            r.wall_clock_seconds = start.elapsed().as_secs_f64();
            return Ok(Outcome { stdout: r.to_json(), status: if mismatches == 0 { 0 } else { 1 } });
        }
    };
    report.wall_clock_seconds = start.elapsed().as_secs_f64();
    Ok(Outcome { stdout: report.to_json(), status: 0 })
}

fn load(path: &Path) -> Result<Loaded, CliError> {
    let io = |e: std::io::Error| CliError::Io { path: path.display().to_string(), message: e.to_string() };
    let text = if path == Path::new("-") {
        std::io::read_to_string(std::io::stdin()).map_err(io)?
    } else {
        std::fs::read_to_string(path).map_err(io)?
    };
    crate::parse_instance(&text)
}

fn wrong_kind(expected: &str) -> CliError {
    CliError::Schema { path: "kind".into(), message: format!("this command needs a {expected} instance") }
}

fn flower_of(loaded: &Loaded) -> Result<(FlowerInstance, Vec<Platform>), CliError> {
    match &loaded.instance {
        Instance::Flower { instance, platforms } => Ok((instance.clone(), platforms.clone())),
        _ => Err(wrong_kind("flower")),
    }
}

fn game_of(loaded: Loaded) -> Result<GameInstance, CliError> {
    match loaded.instance {
        Instance::Game(g) => Ok(g),
        _ => Err(wrong_kind("game")),
    }
}

fn designer_index(game: &GameInstance, designer: usize) -> Result<usize, CliError> {
    if designer == 0 || designer > game.designers().len() {
        return Err(CliError::Schema {
            path: "--designer".into(),
            message: format!("designer {designer} is outside 1..={}", game.designers().len()),
        });
    }
    Ok(designer - 1)
}

/// `1,3;2` is designer 1 on petals 1 and 3, designer 2 on petal 2. A missing
/// profile means nobody builds anything.
pub fn parse_profile(text: Option<&str>, game: &GameInstance, flag: &str) -> Result<Profile, CliError> {
    let m = game.designers().len();
    let Some(text) = text else { return Ok(vec![StateSet::new(); m]) };
    let err = |message: String| CliError::Schema { path: flag.to_string(), message };
    let parts: Vec<&str> = text.split(';').collect();
    if parts.len() != m {
        return Err(err(format!("{} entries for {m} designers", parts.len())));
    }
    parts
        .iter()
        .map(|part| {
            let part = part.trim();
            if part.is_empty() || part == "-" {
                return Ok(StateSet::new());
            }
            part.split(',')
                .map(|p| match p.trim().parse::<usize>() {
                    Ok(j) if j >= 1 && j <= game.n() => Ok(j - 1),
                    _ => Err(err(format!("`{p}` is not a petal in 1..={}", game.n()))),
                })
                .collect()
        })
        .collect()
}

fn parse_seeds(text: &str) -> Result<std::ops::Range<u64>, CliError> {
    let err = || CliError::Parse { path: "--seeds".into(), message: format!("`{text}` is not a range like 0..50") };
    let (a, b) = text.split_once("..").ok_or_else(err)?;
    Ok(a.trim().parse().map_err(|_| err())?..b.trim().parse().map_err(|_| err())?)
}

/// Largest step every `z` is a multiple of.
fn default_delta(inst: &FlowerInstance) -> Rational {
    let dp = inst.derived();
    dp.z.iter().skip(1).fold(dp.z[0].abs(), |g, z| g.gcd(z))
}

fn solve_agent(inst: &FlowerInstance) -> ResultDocument {
    let dp = inst.derived();
    match greedy_solve(&dp) {
        Ok((set, trace)) => {
            let mut r = ResultDocument::new("greedy");
            r.set("agent", &set.states).value("utility", &set.utility);
            r.trace = json!(trace
                .steps
                .iter()
                .map(|s| json!({
                    "state": s.state + 1,
                    "potential": s.potential.to_string(),
                    "utility_before": s.utility_before.to_string(),
                    "accepted": s.accepted,
                }))
                .collect::<Vec<_>>());
            r
        }
        Err(_) => {
            let set = greedy_solve_signed(&dp);
            let mut r = ResultDocument::new("signed-greedy");
            r.set("agent", &set.states).value("utility", &set.utility);
            r
        }
    }
}

fn solve_multiplatform(inst: &FlowerInstance, platforms: &[Platform]) -> Result<ResultDocument, CliError> {
    let dp = inst.derived();
    let pruned = prune_redundant(platforms).map_err(|e| CliError::solver("platforms", e))?;
    let sel = multi_greedy_solve(&pruned.curves, &dp.a, &dp.b);
    let mut r = ResultDocument::new("multi-platform-greedy");
    r.ids("platforms", sel.ids())
        .ids("states", sel.platforms.iter().map(|p| p.state + 1).collect())
        .value("utility", &sel.utility);
    let action = |a: &MultiAction| match a {
        MultiAction::Add => "add".to_string(),
        MultiAction::Swap { from } => format!("swap out {from}"),
        MultiAction::Stop => "stop".to_string(),
    };
    r.trace = json!({
        "removed": pruned.removed.iter().map(|x| json!({ "id": x.id, "rule": format!("{:?}", x.rule) })).collect::<Vec<_>>(),
        "steps": sel.trace.iter().map(|s| json!({
            "platform": s.platform,
            "psi": s.psi.to_string(),
            "utility_before": s.utility_before.to_string(),
            "action": action(&s.action),
        })).collect::<Vec<_>>(),
    });
    Ok(r)
}

fn solve_designer_exact(inst: &FlowerInstance) -> Result<ResultDocument, CliError> {
    let best = designer_oracle(inst).map_err(|e| CliError::solver("states", e))?;
    let mut r = ResultDocument::new("designer-oracle");
    r.set("offered", &best.offered).value("profit", &best.profit);
    Ok(r)
}

fn fptas(inst: &FlowerInstance, delta: &Rational, epsilon: &Rational) -> Result<Option<FptasOutcome>, CliError> {
    match preprocess(inst, delta, epsilon) {
        Ok(qi) => Ok(Some(fptas_solve(&qi))),
        Err(pdp_core::Error::EmptyInstance) => Ok(None),
        Err(e @ pdp_core::Error::Quantization(_)) => Err(CliError::solver("--delta", e)),
        Err(e @ pdp_core::Error::Range(_)) => Err(CliError::solver("--epsilon", e)),
        Err(e) => Err(CliError::solver("states", e)),
    }
}

fn solve_designer_fptas(inst: &FlowerInstance, delta: &Rational, epsilon: &Rational) -> Result<ResultDocument, CliError> {
    let mut r = ResultDocument::new("fptas");
    match fptas(inst, delta, epsilon)? {
        Some(out) => {
            r.set("offered", &out.design.offered).value("profit", &out.design.profit);
            r.trace = json!({
                "bins_per_step": out.stats.bins_per_step,
                "max_bins": out.stats.max_bins,
                "bin_bound": out.stats.bin_bound.to_string(),
                "candidates_considered": out.stats.candidates_considered,
                "candidates_refused": out.stats.candidates_refused,
            });
        }
        None => {
            r.set("offered", &StateSet::new()).value("profit", &Rational::zero());
            r.trace = json!({ "note": "no platform is worth offering on its own" });
        }
    }
    r.value("epsilon", epsilon).value("delta", delta);
    Ok(r)
}

fn stats_json(s: &SlotStats) -> serde_json::Value {
    json!({
        "thresholds_examined": s.thresholds_examined,
        "slots_reached": s.slots_reached,
        "consistent_slots": s.consistent_slots,
        "denominators_examined": s.denominators_examined,
        "nominal_grid": s.nominal_grid.to_string(),
    })
}

fn solve_multi_agent(mi: &MultiAgentInstance) -> Result<ResultDocument, CliError> {
    let out = multi_agent_solve(mi).map_err(|e| CliError::solver("agents", e))?;
    let mut r = ResultDocument::new("multi-agent-dp");
    r.set("offered", &out.offered).value("profit", &out.profit);
    for (i, a) in out.adopted.iter().enumerate() {
        r.set(format!("agent {}", i + 1), a);
    }
    r.trace = stats_json(&out.stats);
    Ok(r)
}

fn solve_competitive(ci: &CompetitiveInstance) -> Result<ResultDocument, CliError> {
    let out = competitive_solve(ci).map_err(|e| CliError::solver("agents", e))?;
    let mut r = ResultDocument::new("competitive-dp");
    r.set("offered", &out.offered).value("profit", &out.profit);
    for (i, ids) in out.chosen.iter().enumerate() {
        r.ids(format!("agent {} platforms", i + 1), ids.clone());
    }
    r.trace = stats_json(&out.stats);
    Ok(r)
}

fn dynamics(game: &GameInstance, init: Profile, max_rounds: usize) -> Result<ResultDocument, CliError> {
    let outcome = best_response_dynamics(game, init, max_rounds).map_err(|e| CliError::solver("--init", e))?;
    let mut r = ResultDocument::new("best-response-dynamics");
    let profiles = |ps: &[Profile]| ps.iter().map(|p| profile_json(p)).collect::<Vec<_>>();
    let last = match &outcome {
        DynamicsOutcome::Equilibrium { profile, trajectory } => {
            r.trace = json!({ "outcome": "equilibrium", "trajectory": profiles(trajectory) });
            profile.clone()
        }
        DynamicsOutcome::Cycle { trajectory, cycle, period } => {
            r.value("period", &Rational::from_integer(*period as i64));
            r.trace = json!({ "outcome": "cycle", "period": period, "cycle": profiles(cycle), "trajectory": profiles(trajectory) });
            trajectory.last().cloned().unwrap_or_default()
        }
        DynamicsOutcome::Exhausted { trajectory } => {
            r.trace = json!({ "outcome": "exhausted", "trajectory": profiles(trajectory) });
            trajectory.last().cloned().unwrap_or_default()
        }
    };
    for (d, set) in last.iter().enumerate() {
        let profit = game.profit(d, &last).map_err(|e| CliError::solver("--init", e))?;
        r.set(format!("designer {}", d + 1), set).value(format!("designer {} profit", d + 1), &profit);
    }
    Ok(r)
}

fn generate(
    kind: GenKind,
    seed: u64,
    n: usize,
    agents: usize,
    values: Option<&str>,
    delta: &Rational,
    delta_prime: &Rational,
) -> Result<Loaded, CliError> {
    let ranges = RandomRanges::default();
    let gen_err = |e| CliError::solver("--kind", e);
    let partition_input = || -> Result<Vec<u64>, CliError> {
        let text = values.ok_or_else(|| CliError::Schema { path: "--values".into(), message: "required for partition kinds".into() })?;
        text.split(',')
            .map(|v| v.trim().parse().map_err(|_| CliError::Parse { path: "--values".into(), message: format!("`{v}` is not a positive integer") }))
            .collect()
    };
    let flower = |instance| Instance::Flower { instance, platforms: Vec::new() };
    let instance = match kind {
        GenKind::Flower => flower(instances::gen_random_flower(n, seed, &ranges, delta).map_err(gen_err)?),
        GenKind::SignedFlower => flower(instances::gen_random_signed_flower(n, seed, &ranges).map_err(gen_err)?),
        GenKind::Platforms => {
            let instance = instances::gen_random_flower(n, seed, &ranges, delta).map_err(gen_err)?;
            let (platforms, _, _) = instances::gen_random_platforms(n, 3, seed, &ranges);
            Instance::Flower { instance, platforms }
        }
        GenKind::MultiAgent => {
            Instance::MultiAgent(instances::gen_random_multi_agent(agents, n, seed, &ranges, delta, delta_prime).map_err(gen_err)?)
        }
        GenKind::Competitive => Instance::Competitive(
            instances::gen_random_competitive(agents, n, 2, seed, &ranges, delta, delta_prime).map_err(gen_err)?,
        ),
        GenKind::Partition => flower(instances::gen_partition_instance(&partition_input()?).map_err(gen_err)?.instance),
        GenKind::TwoAgentPartition => {
            Instance::MultiAgent(instances::gen_two_agent_partition(&partition_input()?).map_err(gen_err)?.instance)
        }
        GenKind::ThreePetalGame => Instance::Game(instances::three_petal_game().map_err(gen_err)?),
    };
    let mut quantization = quantization_of(&instance);
    if matches!(kind, GenKind::Flower | GenKind::Platforms) {
        quantization = Quantization { delta: Some(delta.clone()), ..Quantization::default() };
    }
    Ok(Loaded { instance, quantization })
}

/// Counts of agreements and the first few disagreements of one comparison family.
#[derive(Default)]
struct Tally {
    checked: u64,
    mismatches: Vec<String>,
}

impl Tally {
    fn check(&mut self, ok: bool, what: impl FnOnce() -> String) {
        self.checked += 1;
        if !ok {
            self.mismatches.push(what());
        }
    }
}

fn verify_flower(inst: &FlowerInstance, platforms: &[Platform], epsilon: &Rational, label: &str, t: &mut Tally) -> Result<(), CliError> {
    let dp = inst.derived();
    let oracle = agent_oracle(&dp).map_err(|e| CliError::solver("states", e))?;
    let greedy = greedy_solve_signed(&dp);
    t.check(greedy.utility == oracle.utility, || format!("{label}: agent greedy {} vs oracle {}", greedy.utility, oracle.utility));
    if dp.z.iter().all(|z| z.is_positive()) {
        let best = designer_oracle(inst).map_err(|e| CliError::solver("states", e))?;
        let got = fptas(inst, &default_delta(inst), epsilon)?.map(|o| o.design.profit).unwrap_or_default();
        let floor = (Rational::one() - epsilon) * &best.profit;
        t.check(got >= floor, || format!("{label}: approximation {got} below (1 - {epsilon}) * {}", best.profit));
    }
    if !platforms.is_empty() {
        let pruned = prune_redundant(platforms).map_err(|e| CliError::solver("platforms", e))?;
        let greedy = multi_greedy_solve(&pruned.curves, &dp.a, &dp.b);
        let oracle = multi_oracle(platforms, &dp.a, &dp.b).map_err(|e| CliError::solver("platforms", e))?;
        t.check(greedy.utility == oracle.utility, || {
            format!("{label}: multi-platform greedy {} vs oracle {}", greedy.utility, oracle.utility)
        });
    }
    Ok(())
}

fn verify_multi(mi: &MultiAgentInstance, label: &str, t: &mut Tally) -> Result<(), CliError> {
    let dp = multi_agent_solve(mi).map_err(|e| CliError::solver("agents", e))?;
    let (_, brute) = multi_agent_brute_force(mi).map_err(|e| CliError::solver("agents", e))?;
    t.check(dp.profit == brute, || format!("{label}: multi-agent {} vs brute force {brute}", dp.profit));
    Ok(())
}

fn verify_competitive(ci: &CompetitiveInstance, label: &str, t: &mut Tally) -> Result<(), CliError> {
    let dp = competitive_solve(ci).map_err(|e| CliError::solver("agents", e))?;
    let (_, brute) = competitive_brute_force(ci).map_err(|e| CliError::solver("agents", e))?;
    t.check(dp.profit == brute, || format!("{label}: competitive {} vs brute force {brute}", dp.profit));
    Ok(())
}

fn verify_report(t: Tally) -> (ResultDocument, usize) {
    let mut r = ResultDocument::new("verify");
    r.value("checked", &Rational::from_integer(t.checked as i64))
        .value("mismatches", &Rational::from_integer(t.mismatches.len() as i64));
    let count = t.mismatches.len();
    r.trace = json!({ "mismatches": t.mismatches });
    (r, count)
}

fn verify_file(loaded: &Loaded, epsilon: &Rational) -> Result<(ResultDocument, usize), CliError> {
    let mut t = Tally::default();
    match &loaded.instance {
        Instance::Flower { instance, platforms } => verify_flower(instance, platforms, epsilon, "file", &mut t)?,
        Instance::MultiAgent(mi) => verify_multi(mi, "file", &mut t)?,
        Instance::Competitive(ci) => verify_competitive(ci, "file", &mut t)?,
        Instance::Game(g) => {
            let empty = vec![StateSet::new(); g.designers().len()];
            for d in 0..g.designers().len() {
                let view = g.view(d, &empty).map_err(|e| CliError::solver("designers", e))?;
                verify_competitive(&view, &format!("designer {}", d + 1), &mut t)?;
            }
        }
        Instance::GeneralChain(_) => return Err(wrong_kind("flower, multi-agent, competitive or game")),
    }
    Ok(verify_report(t))
}

fn verify_sweep(seeds: &std::ops::Range<u64>, epsilon: &Rational) -> Result<(ResultDocument, usize), CliError> {
    let ranges = RandomRanges::default();
    let half = Rational::new(1, 2);
    let mut t = Tally::default();
    let gen_err = |e| CliError::solver("--seeds", e);
    for seed in seeds.clone() {
        let n = 1 + (seed % 8) as usize;
        let label = format!("seed {seed}");
        let inst = instances::gen_random_flower(n, seed, &ranges, &half).map_err(gen_err)?;
        let (platforms, _, _) = instances::gen_random_platforms(n.min(5), 3, seed, &ranges);
        let platforms: Vec<Platform> = platforms.into_iter().filter(|p| p.state < n).collect();
        verify_flower(&inst, &platforms, epsilon, &label, &mut t)?;
        let signed = instances::gen_random_signed_flower(n, seed, &ranges).map_err(gen_err)?;
        verify_flower(&signed, &[], epsilon, &label, &mut t)?;
        let m = 1 + (seed % 5) as usize;
        verify_multi(&instances::gen_random_multi_agent(2, m, seed, &ranges, &half, &half).map_err(gen_err)?, &label, &mut t)?;
        let ci = instances::gen_random_competitive(2, m.min(4), 2, seed, &ranges, &half, &half).map_err(gen_err)?;
        verify_competitive(&ci, &label, &mut t)?;
    }
    Ok(verify_report(t))
}
