use std::collections::{BinaryHeap, HashMap};

use crate::domain::DomainDef;
use crate::error::Result;
use crate::fol::GroundAction;
use crate::mdp::Plan;
use crate::mutation::{MutabilityIndex, Mutator, DEFAULT_MUTATION_CAP};
use crate::planners::{Budget, Meter, SearchStats};
use crate::reward::{Reward, TerminationValue};
use crate::state::RelState;

use super::inner::inner_goal_search;

#[derive(Clone, Debug)]
pub struct IntrospectorConfig {
    pub horizon: usize,
    pub budget: Budget,
    pub mutation_cap: usize,
    /// Record a line per outer pop and per inner search.
    pub trace: bool,
}

impl IntrospectorConfig {
    pub fn new(horizon: usize, budget: Budget) -> Self {
        IntrospectorConfig {
            horizon,
            budget,
            mutation_cap: DEFAULT_MUTATION_CAP,
            trace: false,
        }
    }
}

#[derive(Clone, Debug)]
pub struct IntrospectorResult {
    pub stats: SearchStats<GroundAction>,
    /// Candidates discarded because their inner search ended in FAILURE.
    pub failed_candidates: usize,
    pub trace: Vec<String>,
}

// Max-heap order: higher score, then more moves left, then the action
// sequence and state as deterministic tie-breakers.
#[derive(PartialEq, Eq, PartialOrd, Ord)]
struct Candidate {
    score: Reward,
    moves: usize,
    actions: Vec<GroundAction>,
    state: RelState,
}

/// Plans by repeatedly reaching maximal-reward transitions. Errors only if a
/// mutation set exceeds the cap.
pub fn introspector_plan(domain: &DomainDef, s0: &RelState, cfg: &IntrospectorConfig) -> Result<IntrospectorResult> {
    let mut meter = Meter::new(cfg.budget);
    let mut trace = Vec::new();
    let mut failed = 0;
    let finish = |meter: Meter, plan, failed, trace| IntrospectorResult {
        stats: meter.finish(plan),
        failed_candidates: failed,
        trace,
    };

    if domain.initial_termination(s0) == TerminationValue::Success {
        let plan = Plan {
            status: TerminationValue::Success,
            ..Plan::empty()
        };
        return Ok(finish(meter, plan, failed, trace));
    }

    let cond = domain.reward.maximal_condition();
    let index = MutabilityIndex::new(domain);
    let mutator = Mutator::new(&index).with_cap(cfg.mutation_cap);

    let mut heap = BinaryHeap::from([Candidate {
        score: Reward::from_integer(0),
        moves: cfg.horizon,
        actions: Vec::new(),
        state: s0.clone(),
    }]);
    let mut visited: HashMap<RelState, Reward> = HashMap::from([(s0.clone(), Reward::from_integer(0))]);
    // Fallback when no SUCCESS is found: highest score, then longest.
    let mut best = (Reward::from_integer(0), Vec::new());

    'outer: while let Some(p) = heap.pop() {
        if !meter.expand() {
            break;
        }
        if cfg.trace {
            trace.push(format!(
                "pop score={} moves={} depth={} state={:?}",
                p.score,
                p.moves,
                p.actions.len(),
                p.state
            ));
        }
        if (p.score, p.actions.len()) > (best.0, best.1.len()) {
            best = (p.score, p.actions.clone());
        }
        if p.moves == 0 {
            continue;
        }
        for m in mutator.mutate_true(&p.state, &cond)? {
            let r = inner_goal_search(domain, &p.state, p.moves, &m, &mut meter);
            if cfg.trace {
                trace.push(format!(
                    "  mutation {m} found={} len={} reward={} status={}",
                    r.found,
                    r.actions.len(),
                    r.reward,
                    r.status
                ));
            }
            if meter.exhausted() {
                break 'outer;
            }
            if !r.found {
                continue;
            }
            let score = p.score + r.reward;
            let mut actions = p.actions.clone();
            actions.extend(r.actions.iter().cloned());
            match r.status {
                TerminationValue::Success => {
                    let plan = Plan {
                        actions,
                        ret: score,
                        status: TerminationValue::Success,
                    };
                    return Ok(finish(meter, plan, failed, trace));
                }
                TerminationValue::Failure => failed += 1,
                TerminationValue::Continue => {
                    if visited.get(&r.state).is_some_and(|&v| v >= score) {
                        continue;
                    }
                    visited.insert(r.state.clone(), score);
                    heap.push(Candidate {
                        score,
                        moves: p.moves - r.actions.len(),
                        actions,
                        state: r.state,
                    });
                }
            }
        }
    }

    let plan = Plan {
        actions: best.1,
        ret: best.0,
        status: TerminationValue::Continue,
    };
    Ok(finish(meter, plan, failed, trace))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::envs::{bins, blocks, fixtures};
    use crate::mdp::{replay, RelMdp};
    use crate::planners::bfs_oracle;
    use std::sync::Arc;

    #[test]
    fn bins_fixture_trajectory() {
        let d = bins::shared();
        let s0 = fixtures::bins_2x2_state();
        let r = introspector_plan(&d, &s0, &IntrospectorConfig::new(32, Budget::unlimited())).unwrap();
        let names: Vec<String> = r.stats.plan.actions.iter().map(|a| a.to_string()).collect();
        assert_eq!(names, ["Pick(i2, d2)", "CloseBin(d2)", "Pick(i1, d1)", "CloseBin(d1)"]);
        assert_eq!(r.stats.plan.status, TerminationValue::Success);
        assert_eq!(r.stats.plan.ret, Reward::from_integer(2));

        // Visited states, as 1-based ids of the breadth-first enumeration.
        let mdp = RelMdp::new(Arc::clone(&d), s0, 32);
        let g = bfs_oracle(&mdp, 1000).unwrap();
        let mut s = g.states[0].clone();
        let mut ids = vec![1];
        for a in &r.stats.plan.actions {
            s = d.apply(&s, a).unwrap();
            ids.push(g.states.iter().position(|x| *x == s).unwrap() + 1);
        }
        assert_eq!(ids, [1, 5, 12, 18, 24]);
        assert_eq!(replay(&mdp, &r.stats.plan.actions).unwrap(), r.stats.plan);
    }

    #[test]
    fn solved_start_gives_empty_success() {
        let d = blocks::domain();
        let s0 = blocks::from_stacks(&[vec![crate::symbol::sym("a")], vec![crate::symbol::sym("b")]]);
        let r = introspector_plan(&d, &s0, &IntrospectorConfig::new(16, Budget::unlimited())).unwrap();
        assert!(r.stats.plan.is_empty());
        assert_eq!(r.stats.plan.status, TerminationValue::Success);
    }

    #[test]
    fn blocks_plans_replay() {
        let d = blocks::shared();
        for seed in 0..10 {
            let s0 = blocks::generate(6, seed);
            let r = introspector_plan(&d, &s0, &IntrospectorConfig::new(48, Budget::unlimited())).unwrap();
            let mdp = RelMdp::new(Arc::clone(&d), s0, 48);
            assert_eq!(replay(&mdp, &r.stats.plan.actions).unwrap(), r.stats.plan);
            assert_eq!(r.stats.plan.status, TerminationValue::Success);
        }
    }

    #[test]
    fn trace_and_budget() {
        let d = bins::domain();
        let s0 = fixtures::bins_2x2_state();
        let mut cfg = IntrospectorConfig::new(32, Budget::unlimited());
        cfg.trace = true;
        let r = introspector_plan(&d, &s0, &cfg).unwrap();
        assert!(r.trace[0].starts_with("pop score=0 moves=32"));
        let cfg = IntrospectorConfig::new(32, Budget::nodes(2));
        let r = introspector_plan(&d, &s0, &cfg).unwrap();
        assert!(r.stats.budget_exhausted);
        assert_ne!(r.stats.plan.status, TerminationValue::Success);
    }
}
