//! Acceptance criteria 1-8. Prints one PASS/FAIL line per criterion and
//! exits nonzero if any fails.

mod common;

use std::collections::BTreeMap;
use std::path::Path;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use milestone::bench::{log_slope, run_experiment, verify_goldens, ExperimentSpec, ResultRow};
use milestone::envs::grid::{self, GridMdp};
use milestone::envs::{bins, blocks, drawers, fixtures, DomainId, EpisodeStatus};
use milestone::introspector::{grid_introspector_plan, introspector_plan, IntrospectorConfig};
use milestone::mdp::{replay, Mdp, RelMdp};
use milestone::mutation::{literal_count_heuristic, MutabilityIndex, Mutation, Mutator};
use milestone::planners::{
    beam_k, greedy_exhaustive, mcts_k, mcts_puct_k, random_k, Budget, MctsConfig, PlannerKind, SearchStats,
};
use milestone::reward::TerminationValue;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

// Pinned tolerances.
const GOLDEN_TIME: Duration = Duration::from_secs(1);
const MUTATION_CASES: usize = 500;
const MUTATION_TIME: Duration = Duration::from_secs(30);
const GRID_SIZES: [usize; 5] = [5, 10, 20, 40, 80];
const GRID_EPISODES: usize = 100;
const GRID_TIME: Duration = Duration::from_secs(600);
const INTROSPECTOR_DOUBLING_MAX: f64 = 2.5;
const GREEDY_DOUBLING_MIN: f64 = 3.4;
const BEAM_MAX_D: usize = 20;
const BEAM_EPISODES: usize = 10;
const RELATIONAL_EPISODES: usize = 100;
// Greedy runs on the first instances of each cell only, under a tighter cap.
const GREEDY_EPISODES: usize = 25;
const GREEDY_NODE_CAP: u64 = 20_000;
const DETERMINISM_EPISODES: usize = 10;
const REPLAY_EPISODES: usize = 10_000;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        pass,
        detail: detail.into(),
    }
}

fn main() -> ExitCode {
    let dir = tempfile::tempdir().expect("temp dir");
    let mut ctx = Ctx {
        dir: dir.path(),
        csvs: Vec::new(),
    };
    let criteria: Vec<(&str, fn(&mut Ctx) -> Outcome)> = vec![
        ("bins worked example goldens", c1_goldens),
        ("blocks mutation and milestone goldens", c2_fig3),
        ("mutation soundness and completeness", c3_mutations),
        ("grid scaling", c4_grid),
        ("beam budget threshold", c5_beam),
        ("relational scaling", c6_relational),
        ("determinism", c7_determinism),
        ("plan validity", c8_replay),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.into_iter().enumerate() {
        let t = Instant::now();
        let o = f(&mut ctx);
        let tag = if o.pass { "PASS" } else { "FAIL" };
        println!("criterion {} {tag}: {name} ({:.1}s) {}", i + 1, t.elapsed().as_secs_f64(), o.detail);
        failed += usize::from(!o.pass);
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        println!("{failed} criteria failed");
        ExitCode::FAILURE
    }
}

struct Ctx<'a> {
    dir: &'a Path,
    // Specs and CSV paths of the scaling runs, replayed by the determinism check.
    csvs: Vec<(ExperimentSpec, std::path::PathBuf)>,
}

impl Ctx<'_> {
    fn run(&mut self, mut spec: ExperimentSpec, name: &str) -> Vec<ResultRow> {
        spec.out = self.dir.join(format!("{name}.csv"));
        let summary = run_experiment(&spec).expect("sweep runs");
        self.csvs.push((spec.clone(), spec.out.clone()));
        summary.rows
    }
}

fn c1_goldens(_: &mut Ctx) -> Outcome {
    let t = Instant::now();
    let r = verify_goldens();
    let took = t.elapsed();
    let failed: Vec<&str> = r.checks.iter().filter(|c| !c.pass).map(|c| c.name.as_str()).collect();
    let get = |n: &str| r.checks.iter().find(|c| c.name == n).map_or("?", |c| c.actual.as_str());
    outcome(
        failed.is_empty() && took < GOLDEN_TIME,
        format!(
            "states={} dead_ends={} plan={} milestones/mutation={} failed={failed:?} in {:.3}s",
            get("bins.reachable_states"),
            get("bins.dead_end_count"),
            get("bins.optimal_plan_length"),
            get("bins.milestones_per_mutation"),
            took.as_secs_f64()
        ),
    )
}

fn c2_fig3(_: &mut Ctx) -> Outcome {
    let d = blocks::shared();
    let s = fixtures::fig3a_state();
    let ms = Mutator::new(&MutabilityIndex::new(&d))
        .mutate_true(&s, &d.reward.maximal_condition())
        .unwrap();
    let want = Mutation::make_true(["a", "b", "c", "d"].map(|c| {
        milestone::fol::Atom::new(milestone::symbol::sym("OnTable"), [milestone::symbol::sym(c)])
    }));
    let single = ms == vec![want];
    let h = literal_count_heuristic(&s, &ms[0]);
    let r = introspector_plan(&d, &s, &IntrospectorConfig::new(32, Budget::default())).unwrap();
    let plan = &r.stats.plan;
    outcome(
        single && h == 1 && plan.len() == 2 && plan.status == TerminationValue::Success,
        format!("mutations={} heuristic={h} milestone_plan_length={}", ms.len(), plan.len()),
    )
}

fn c3_mutations(_: &mut Ctx) -> Outcome {
    let t = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let (mut unsound, mut incomplete, mut assignments) = (0, 0, 0);
    for _ in 0..MUTATION_CASES {
        let c = common::random_case(&mut rng);
        for want in [true, false] {
            let v = common::check(&c, want);
            unsound += v.unsound;
            incomplete += v.incomplete;
        }
        assignments += common::allowed_states(&c).len();
    }
    let took = t.elapsed();
    outcome(
        unsound == 0 && incomplete == 0 && took < MUTATION_TIME,
        format!(
            "cases={MUTATION_CASES} assignments={assignments} unsound={unsound} incomplete={incomplete} in {:.1}s",
            took.as_secs_f64()
        ),
    )
}

fn mean_by<K: Ord>(rows: &[ResultRow], key: impl Fn(&ResultRow) -> Option<K>) -> BTreeMap<K, f64> {
    let mut acc: BTreeMap<K, (f64, usize)> = BTreeMap::new();
    for r in rows {
        if let Some(k) = key(r) {
            let e = acc.entry(k).or_default();
            e.0 += r.nodes_expanded as f64;
            e.1 += 1;
        }
    }
    acc.into_iter().map(|(k, (s, n))| (k, s / n as f64)).collect()
}

fn doubling(means: &BTreeMap<usize, f64>) -> Vec<(usize, f64)> {
    means
        .iter()
        .filter_map(|(&d, &m)| means.get(&(2 * d)).map(|&m2| (d, m2 / m)))
        .collect()
}

fn c4_grid(ctx: &mut Ctx) -> Outcome {
    let t = Instant::now();
    let mut spec = ExperimentSpec::new(
        DomainId::Grid,
        GRID_SIZES.to_vec(),
        vec![PlannerKind::Introspector, PlannerKind::Greedy],
        "",
    );
    spec.episodes = GRID_EPISODES;
    spec.seed = 4;
    spec.oracle_cap = 0;
    let rows = ctx.run(spec, "grid");
    let took = t.elapsed();
    let optimal = rows
        .iter()
        .filter(|r| r.planner == "introspector")
        .all(|r| r.normalized_score == Some(1.0));
    let intro = doubling(&mean_by(&rows, |r| (r.planner == "introspector").then_some(r.size)));
    let greedy = doubling(&mean_by(&rows, |r| (r.planner == "greedy").then_some(r.size)));
    let budget = rows.iter().filter(|r| r.status == EpisodeStatus::Budget).count();
    let intro_ok = intro.iter().all(|&(_, x)| x <= INTROSPECTOR_DOUBLING_MAX);
    let greedy_ok = greedy.iter().filter(|&&(d, _)| d >= 10).all(|&(_, x)| x >= GREEDY_DOUBLING_MIN);
    let fmt = |v: &[(usize, f64)]| v.iter().map(|(d, x)| format!("{d}:{x:.2}")).collect::<Vec<_>>().join(",");
    outcome(
        optimal && intro_ok && greedy_ok && budget == 0 && took < GRID_TIME,
        format!(
            "introspector_optimal={optimal} introspector_doubling=[{}] greedy_doubling=[{}] budget_rows={budget}",
            fmt(&intro),
            fmt(&greedy)
        ),
    )
}

fn c5_beam(_: &mut Ctx) -> Outcome {
    let mut wide_ok = true;
    let mut narrow_fails = Vec::new();
    for d in 1..=BEAM_MAX_D {
        let mut narrow_worst = 1.0f64;
        for e in 0..BEAM_EPISODES {
            let mdp = GridMdp::for_distance(grid::gen_grid(d, e as u64), d);
            let h = mdp.horizon();
            let (opt, worst) = (grid::optimal_return(d, h), grid::worst_return(h));
            let score = |k: usize| {
                let plan = beam_k(&mdp, k, Budget::unlimited()).plan;
                milestone::envs::episode::normalized_score(plan.ret, opt, worst)
            };
            wide_ok &= score(2 * d * d) == 1.0;
            narrow_worst = narrow_worst.min(score(d));
        }
        if narrow_worst < 1.0 {
            narrow_fails.push(d);
        }
    }
    outcome(
        wide_ok && !narrow_fails.is_empty(),
        format!("beam[2d^2]_optimal_all={wide_ok} beam[d]_suboptimal_at={narrow_fails:?}"),
    )
}

fn c6_relational(ctx: &mut Ctx) -> Outcome {
    let cells: [(DomainId, Vec<usize>, usize); 3] = [
        (DomainId::Blocks, (4..=11).collect(), 6),
        (DomainId::Drawers(3), (1..=6).collect(), 6),
        (DomainId::Bins(2), (1..=6).collect(), 6),
    ];
    let mut pass = true;
    let mut notes = Vec::new();
    for (domain, sizes, compare_from) in cells {
        let mut spec = ExperimentSpec::new(domain, sizes.clone(), vec![PlannerKind::Introspector], "");
        spec.episodes = RELATIONAL_EPISODES;
        spec.seed = 6;
        spec.oracle_cap = 0;
        let name = domain.to_string().replace(':', "_");
        let intro = ctx.run(spec.clone(), &format!("{name}_introspector"));
        spec.planners = vec![PlannerKind::Greedy];
        spec.episodes = GREEDY_EPISODES;
        spec.node_cap = GREEDY_NODE_CAP;
        let greedy = ctx.run(spec, &format!("{name}_greedy"));

        let solved = intro.iter().filter(|r| r.status == EpisodeStatus::Success).count();
        let all_solved = solved == intro.len();
        // Greedy is exhaustive: whenever it finishes, it must find a solution.
        let greedy_finished = greedy.iter().filter(|r| r.status != EpisodeStatus::Budget).count();
        let greedy_ok = greedy
            .iter()
            .all(|r| r.status == EpisodeStatus::Success || r.status == EpisodeStatus::Budget);
        let shared = |r: &ResultRow| (r.episode < GREEDY_EPISODES).then_some(r.size);
        let im = mean_by(&intro, shared);
        let gm = mean_by(&greedy, |r| Some(r.size));
        let fewer = sizes.iter().filter(|&&n| n >= compare_from).all(|n| im[n] < gm[n]);
        let slope = |m: &BTreeMap<usize, f64>| log_slope(&m.iter().map(|(&n, &v)| (n as f64, v)).collect::<Vec<_>>());
        let (si, sg) = (slope(&mean_by(&intro, |r| Some(r.size))).unwrap(), slope(&gm).unwrap());
        let ok = all_solved && greedy_ok && fewer && si < sg;
        pass &= ok;
        notes.push(format!(
            "{domain}: introspector {solved}/{} greedy_finished {greedy_finished}/{} fewer_nodes={fewer} slope {si:.3}<{sg:.3}",
            intro.len(),
            greedy.len()
        ));
    }
    outcome(pass, notes.join("; "))
}

fn strip_timing(path: &Path, keep: impl Fn(&csv::StringRecord) -> bool) -> Vec<Vec<String>> {
    let mut rdr = csv::Reader::from_path(path).expect("csv readable");
    let headers = rdr.headers().unwrap().clone();
    let skip: Vec<usize> = headers
        .iter()
        .enumerate()
        .filter(|(_, h)| *h == "wall_time_ms" || *h == "fingerprint")
        .map(|(i, _)| i)
        .collect();
    rdr.records()
        .map(|r| r.unwrap())
        .filter(|r| keep(r))
        .map(|r| r.iter().enumerate().filter(|(i, _)| !skip.contains(i)).map(|(_, f)| f.to_string()).collect())
        .collect()
}

// Reruns the goldens and every scaling sweep with the first episodes of
// each cell, which share seeds with the first run. The rerun's spec differs
// in episode count, so the fingerprint column is compared separately.
fn c7_determinism(ctx: &mut Ctx) -> Outcome {
    let goldens_same = verify_goldens() == verify_goldens();
    let mut mismatched = Vec::new();
    for (spec, path) in ctx.csvs.clone() {
        let fp = spec.fingerprint();
        let recorded = csv::Reader::from_path(&path).unwrap().records().all(|r| r.unwrap()[12] == *fp);
        if !recorded || spec.clone().fingerprint() != fp {
            mismatched.push(format!("{} fingerprint", path.display()));
        }
        let mut again = spec.clone();
        again.episodes = spec.episodes.min(DETERMINISM_EPISODES);
        let out = ctx.dir.join(format!("again_{}", path.file_name().unwrap().to_string_lossy()));
        again.out = out.clone();
        run_experiment(&again).expect("rerun");
        let first = strip_timing(&path, |r| r[5].parse::<usize>().unwrap() < again.episodes);
        let second = strip_timing(&out, |_| true);
        if first != second {
            mismatched.push(path.file_name().unwrap().to_string_lossy().into_owned());
        }
    }
    outcome(
        goldens_same && mismatched.is_empty() && !ctx.csvs.is_empty(),
        format!("goldens_identical={goldens_same} sweeps={} mismatched={mismatched:?}", ctx.csvs.len()),
    )
}

fn planners(rng: &mut ChaCha8Rng) -> PlannerKind {
    match rng.gen_range(0..6) {
        0 => PlannerKind::Greedy,
        1 => PlannerKind::Random(rng.gen_range(1..=20)),
        2 => PlannerKind::Beam(rng.gen_range(1..=8)),
        3 => PlannerKind::Mcts(rng.gen_range(1..=30)),
        4 => PlannerKind::MctsU(rng.gen_range(1..=30)),
        _ => PlannerKind::Introspector,
    }
}

fn plan_with<M: Mdp>(mdp: &M, p: PlannerKind, seed: u64, budget: Budget) -> SearchStats<M::Action> {
    match p {
        PlannerKind::Greedy => greedy_exhaustive(mdp, budget),
        PlannerKind::Random(k) => random_k(mdp, k, seed, budget),
        PlannerKind::Beam(k) => beam_k(mdp, k, budget),
        PlannerKind::Mcts(k) => mcts_k(mdp, MctsConfig::new(k, seed), budget),
        PlannerKind::MctsU(k) => mcts_puct_k(mdp, MctsConfig::new(k, seed), budget),
        PlannerKind::Introspector => unreachable!(),
    }
}

// Replays the plan and compares status and exact return with what the
// planner reported.
fn agrees<M: Mdp>(mdp: &M, stats: &SearchStats<M::Action>, start: TerminationValue) -> Result<(), String> {
    let mut got = replay(mdp, &stats.plan.actions).map_err(|e| e.to_string())?;
    // A start state that is already terminal ends the episode with no action.
    if stats.plan.is_empty() && start.is_terminal() {
        got.status = start;
    }
    if got.ret != stats.plan.ret || got.status != stats.plan.status {
        return Err(format!(
            "reported {} {}, replayed {} {}",
            stats.plan.ret, stats.plan.status, got.ret, got.status
        ));
    }
    Ok(())
}

fn c8_replay(_: &mut Ctx) -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let budget = Budget::nodes(20_000);
    let mut failures = Vec::new();
    let mut per_domain: BTreeMap<&str, usize> = BTreeMap::new();
    for i in 0..REPLAY_EPISODES {
        let p = planners(&mut rng);
        let seed: u64 = rng.gen();
        let (dom, res) = match rng.gen_range(0..4) {
            0 => {
                let d = rng.gen_range(1..=6);
                let mdp = GridMdp::for_distance(grid::gen_grid(d, seed), d);
                let stats = match p {
                    PlannerKind::Introspector => grid_introspector_plan(&mdp, budget),
                    _ => plan_with(&mdp, p, seed, budget),
                };
                ("grid", agrees(&mdp, &stats, TerminationValue::Continue))
            }
            k => {
                let (name, d, s0) = match k {
                    1 => ("blocks", blocks::shared(), blocks::generate(rng.gen_range(1..=5), seed)),
                    2 => ("drawers", drawers::shared(), drawers::generate(rng.gen_range(1..=2), rng.gen_range(1..=3), seed)),
                    _ => ("bins", bins::shared(), bins::generate(rng.gen_range(1..=3), rng.gen_range(0..=4), seed)),
                };
                let h = milestone::envs::relational_horizon(s0.constants().len());
                let mdp = RelMdp::new(d, s0, h);
                let start = mdp.domain.initial_termination(&mdp.s0);
                let stats = match p {
                    PlannerKind::Introspector => {
                        introspector_plan(&mdp.domain, &mdp.s0, &IntrospectorConfig::new(h, budget)).unwrap().stats
                    }
                    _ => plan_with(&mdp, p, seed, budget),
                };
                (name, agrees(&mdp, &stats, start))
            }
        };
        *per_domain.entry(dom).or_default() += 1;
        if let Err(e) = res {
            failures.push(format!("#{i} {dom} {p}: {e}"));
        }
    }
    outcome(
        failures.is_empty(),
        format!("episodes={REPLAY_EPISODES} per_domain={per_domain:?} failures={}{}", failures.len(),
            failures.first().map_or(String::new(), |f| format!(" first: {f}"))),
    )
}
