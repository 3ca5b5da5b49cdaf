//! One-shot episodes: sample an instance, plan once, replay the plan.

use std::fmt;
use std::str::FromStr;
use std::time::Duration;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::introspector::{grid_introspector_plan, introspector_plan, IntrospectorConfig};
use crate::mdp::{replay, Mdp, Plan, RelMdp};
use crate::planners::{
    beam_k, bfs_oracle, greedy_exhaustive, mcts_k, mcts_puct_k, random_k, Budget, MctsConfig, PlannerKind,
    SearchStats,
};
use crate::reward::{Reward, TerminationValue};

use super::grid::{self, GridMdp};
use super::{bins, blocks, drawers, relational_horizon};

/// A benchmark family. Drawers and bins carry their container count; the
/// size parameter of an episode is the distance, block count or item count.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum DomainId {
    Grid,
    Blocks,
    Drawers(usize),
    Bins(usize),
}

impl FromStr for DomainId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::BadSpec(format!("unknown domain `{s}`"));
        let count = |n: &str| match n.parse::<usize>() {
            Ok(n) if n >= 1 => Ok(n),
            _ => Err(bad()),
        };
        match s.split_once(':') {
            None if s == "grid" => Ok(DomainId::Grid),
            None if s == "blocks" => Ok(DomainId::Blocks),
            Some(("drawers", n)) => Ok(DomainId::Drawers(count(n)?)),
            Some(("bins", n)) => Ok(DomainId::Bins(count(n)?)),
            _ => Err(bad()),
        }
    }
}

impl fmt::Display for DomainId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DomainId::Grid => f.write_str("grid"),
            DomainId::Blocks => f.write_str("blocks"),
            DomainId::Drawers(n) => write!(f, "drawers:{n}"),
            DomainId::Bins(n) => write!(f, "bins:{n}"),
        }
    }
}

impl Serialize for DomainId {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for DomainId {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        String::deserialize(d)?.parse().map_err(serde::de::Error::custom)
    }
}

impl DomainId {
    /// The initial state of a relational instance; `None` for the grid.
    pub fn relational_instance(self, size: usize, seed: u64) -> Option<(RelMdp, usize)> {
        let (domain, s0) = match self {
            DomainId::Grid => return None,
            DomainId::Blocks => (blocks::shared(), blocks::generate(size, seed)),
            DomainId::Drawers(n) => (drawers::shared(), drawers::generate(n, size, seed)),
            DomainId::Bins(n) => (bins::shared(), bins::generate(n, size, seed)),
        };
        let objects = s0.constants().len();
        let h = relational_horizon(objects);
        Some((RelMdp::new(domain, s0, h), objects))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum EpisodeStatus {
    Success,
    Failure,
    Continue,
    Budget,
}

impl fmt::Display for EpisodeStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            EpisodeStatus::Success => "SUCCESS",
            EpisodeStatus::Failure => "FAILURE",
            EpisodeStatus::Continue => "CONTINUE",
            EpisodeStatus::Budget => "BUDGET",
        })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct EpisodeResult {
    pub ret: Reward,
    /// `None` when no optimum is known for the instance.
    pub normalized_score: Option<f64>,
    pub plan_length: usize,
    pub status: EpisodeStatus,
    pub nodes_expanded: u64,
    pub wall_time: Duration,
    pub actions: Vec<String>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct EpisodeConfig {
    pub budget: Budget,
    /// Largest reachable state space the oracle may enumerate to normalize a
    /// relational score. Zero disables relational normalization.
    pub oracle_cap: usize,
}

impl Default for EpisodeConfig {
    fn default() -> Self {
        EpisodeConfig {
            budget: Budget::default(),
            oracle_cap: 20_000,
        }
    }
}

/// `(ret - worst) / (optimal - worst)` clamped to `[0, 1]`; 1 when the two
/// bounds coincide.
pub fn normalized_score(ret: Reward, optimal: Reward, worst: Reward) -> f64 {
    if optimal <= worst {
        return 1.0;
    }
    let r = (ret - worst) / (optimal - worst);
    (*r.numer() as f64 / *r.denom() as f64).clamp(0.0, 1.0)
}

// Separate streams for instance sampling and planner randomness.
fn planner_seed(seed: u64) -> u64 {
    seed.wrapping_mul(0x9E37_79B9_7F4A_7C15) ^ 0xD1B5_4A32_D192_ED03
}

fn search<M: Mdp>(mdp: &M, planner: PlannerKind, seed: u64, budget: Budget) -> SearchStats<M::Action> {
    let seed = planner_seed(seed);
    match planner {
        PlannerKind::Greedy => greedy_exhaustive(mdp, budget),
        PlannerKind::Random(k) => random_k(mdp, k, seed, budget),
        PlannerKind::Beam(k) => beam_k(mdp, k, budget),
        PlannerKind::Mcts(k) => mcts_k(mdp, MctsConfig::new(k, seed), budget),
        PlannerKind::MctsU(k) => mcts_puct_k(mdp, MctsConfig::new(k, seed), budget),
        PlannerKind::Introspector => unreachable!("dispatched per domain"),
    }
}

// A planner that stops early in a fixed-horizon problem still has to act
// until the horizon; it keeps taking the first applicable action.
fn pad<M: Mdp>(mdp: &M, mut actions: Vec<M::Action>) -> Result<Vec<M::Action>> {
    if !mdp.fixed_horizon() || actions.len() >= mdp.horizon() {
        return Ok(actions);
    }
    let mut s = mdp.initial();
    for a in &actions {
        s = mdp.step(&s, a)?.next;
    }
    while actions.len() < mdp.horizon() {
        let Some(t) = mdp.successors(&s).into_iter().next() else {
            break;
        };
        actions.push(t.action);
        s = t.next;
    }
    Ok(actions)
}

fn finish<M: Mdp>(mdp: &M, stats: SearchStats<M::Action>) -> Result<(Plan<M::Action>, SearchStats<M::Action>)> {
    let actions = pad(mdp, stats.plan.actions.clone())?;
    let plan = replay(mdp, &actions)?;
    if actions.len() == stats.plan.len() && (plan.ret != stats.plan.ret || plan.status != stats.plan.status) {
        return Err(Error::Replay {
            step: actions.len(),
            msg: format!(
                "planner reported return {} ({}), replay gives {} ({})",
                stats.plan.ret, stats.plan.status, plan.ret, plan.status
            ),
        });
    }
    Ok((plan, stats))
}

fn result<A: fmt::Display>(plan: Plan<A>, stats: &SearchStats<A>, normalized_score: Option<f64>) -> EpisodeResult {
    let status = if stats.budget_exhausted {
        EpisodeStatus::Budget
    } else {
        match plan.status {
            TerminationValue::Success => EpisodeStatus::Success,
            TerminationValue::Failure => EpisodeStatus::Failure,
            TerminationValue::Continue => EpisodeStatus::Continue,
        }
    };
    EpisodeResult {
        ret: plan.ret,
        normalized_score,
        plan_length: plan.len(),
        status,
        nodes_expanded: stats.nodes_expanded,
        wall_time: stats.wall_time,
        actions: plan.actions.iter().map(|a| a.to_string()).collect(),
    }
}

/// Samples the instance for `(domain, size, seed)`, plans once and replays
/// the plan. A replay failure is an error: it means the planner is wrong.
pub fn run_episode(
    domain: DomainId,
    size: usize,
    planner: PlannerKind,
    seed: u64,
    cfg: EpisodeConfig,
) -> Result<EpisodeResult> {
    if size == 0 {
        return Err(Error::BadSpec("size must be at least 1".to_string()));
    }
    match domain.relational_instance(size, seed) {
        None => {
            let mdp = GridMdp::for_distance(grid::gen_grid(size, seed), size);
            let stats = match planner {
                PlannerKind::Introspector => grid_introspector_plan(&mdp, cfg.budget),
                p => search(&mdp, p, seed, cfg.budget),
            };
            let (plan, stats) = finish(&mdp, stats)?;
            let h = mdp.horizon();
            let score = normalized_score(plan.ret, grid::optimal_return(size, h), grid::worst_return(h));
            Ok(result(plan, &stats, Some(score)))
        }
        Some((mdp, _)) => {
            if mdp.domain.initial_termination(&mdp.s0) == TerminationValue::Success {
                return Ok(EpisodeResult {
                    ret: Reward::from_integer(0),
                    normalized_score: cfg.oracle_cap.gt(&0).then_some(1.0),
                    plan_length: 0,
                    status: EpisodeStatus::Success,
                    nodes_expanded: 0,
                    wall_time: Duration::ZERO,
                    actions: Vec::new(),
                });
            }
            let stats = match planner {
                PlannerKind::Introspector => {
                    let icfg = IntrospectorConfig::new(mdp.horizon, cfg.budget);
                    introspector_plan(&mdp.domain, &mdp.s0, &icfg)?.stats
                }
                p => search(&mdp, p, seed, cfg.budget),
            };
            let (plan, stats) = finish(&mdp, stats)?;
            let score = relational_optimum(&mdp, cfg.oracle_cap).map(|(opt, worst)| normalized_score(plan.ret, opt, worst));
            Ok(result(plan, &stats, score))
        }
    }
}

/// Oracle optimum and a worst-case bound (every step paying the smallest
/// reward, or nothing if rewards are non-negative).
pub fn relational_optimum(mdp: &RelMdp, cap: usize) -> Option<(Reward, Reward)> {
    if cap == 0 {
        return None;
    }
    let g = bfs_oracle(mdp, cap).ok()?;
    let opt = g.optimal_success_plan?.ret;
    let worst = mdp.domain.reward.min_value().min(Reward::from_integer(0)) * Reward::from_integer(mdp.horizon as i64);
    Some((opt, worst))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn domain_ids_round_trip() {
        for s in ["grid", "blocks", "drawers:3", "bins:2"] {
            assert_eq!(s.parse::<DomainId>().unwrap().to_string(), s);
        }
        for s in ["maze", "bins", "drawers:0", "grid:2"] {
            assert!(s.parse::<DomainId>().is_err(), "{s}");
        }
    }

    #[test]
    fn score_endpoints() {
        let r = Reward::from_integer;
        assert_eq!(normalized_score(r(-18), r(-8), r(-18)), 0.0);
        assert_eq!(normalized_score(r(-8), r(-8), r(-18)), 1.0);
        assert_eq!(normalized_score(r(-13), r(-8), r(-18)), 0.5);
        assert_eq!(normalized_score(r(0), r(0), r(0)), 1.0);
    }

    #[test]
    fn grid_introspector_is_optimal() {
        for seed in 0..5 {
            let r = run_episode(DomainId::Grid, 10, PlannerKind::Introspector, seed, EpisodeConfig::default()).unwrap();
            assert_eq!(r.normalized_score, Some(1.0));
            assert_eq!(r.plan_length, 18);
        }
    }

    #[test]
    fn random_one_is_not_optimal_somewhere() {
        let worse = (0..20).any(|seed| {
            let r = run_episode(DomainId::Grid, 6, PlannerKind::Random(1), seed, EpisodeConfig::default()).unwrap();
            r.normalized_score.unwrap() < 1.0
        });
        assert!(worse);
    }

    #[test]
    fn relational_scores_against_oracle() {
        for seed in 0..5 {
            let r = run_episode(DomainId::Bins(2), 2, PlannerKind::Greedy, seed, EpisodeConfig::default()).unwrap();
            assert_eq!(r.status, EpisodeStatus::Success);
            assert_eq!(r.normalized_score, Some(1.0));
            let r = run_episode(DomainId::Blocks, 4, PlannerKind::Introspector, seed, EpisodeConfig::default()).unwrap();
            assert_eq!(r.status, EpisodeStatus::Success);
        }
    }

    #[test]
    fn solved_start_short_circuits() {
        for p in [PlannerKind::Greedy, PlannerKind::Random(3), PlannerKind::Introspector] {
            let r = run_episode(DomainId::Blocks, 1, p, 0, EpisodeConfig::default()).unwrap();
            assert_eq!((r.status, r.plan_length, r.normalized_score), (EpisodeStatus::Success, 0, Some(1.0)));
        }
    }

    #[test]
    fn budget_status() {
        let cfg = EpisodeConfig {
            budget: Budget::nodes(5),
            oracle_cap: 0,
        };
        let r = run_episode(DomainId::Blocks, 6, PlannerKind::Greedy, 1, cfg).unwrap();
        assert_eq!(r.status, EpisodeStatus::Budget);
        assert_eq!(r.normalized_score, None);
    }
}
