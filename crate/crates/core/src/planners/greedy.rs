use std::cmp::Reverse;
use std::collections::hash_map::Entry;
use std::collections::{BinaryHeap, HashMap};

use super::{Arena, BestPlan, Budget, Meter, SearchStats};
use crate::mdp::Mdp;
use crate::reward::{Reward, TerminationValue};

/// Exhaustive best-first search over paths, ordered by return, then steps
/// remaining, then insertion order. Stops at the first SUCCESS transition.
///
/// When every episode runs to the horizon, paths are deduplicated on
/// `(state, depth)`; otherwise a path is dropped when an earlier one reached
/// the same state with at least its return and at least its remaining steps.
pub fn greedy_exhaustive<M: Mdp>(mdp: &M, budget: Budget) -> SearchStats<M::Action> {
    let horizon = mdp.horizon();
    let fixed = mdp.fixed_horizon();
    let mut meter = Meter::new(budget);
    let mut arena = Arena::new(mdp.initial());

    let mut best = BestPlan::new();
    if !fixed || horizon == 0 {
        best.offer(&arena, 0, TerminationValue::Continue);
    }

    let mut by_depth: HashMap<(M::State, usize), Reward> = HashMap::new();
    let mut pareto: HashMap<M::State, Vec<(Reward, usize)>> = HashMap::new();
    let mut frontier = BinaryHeap::new();
    let mut seq = 0u64;
    if horizon > 0 {
        frontier.push((Reward::from_integer(0), horizon, Reverse(seq), 0usize));
    }

    'search: while let Some((ret, remaining, _, idx)) = frontier.pop() {
        let state = arena.get(idx).state.clone();
        if fixed && by_depth.get(&(state.clone(), horizon - remaining)).is_some_and(|r| *r > ret) {
            continue;
        }
        if !meter.expand() {
            break;
        }
        for t in mdp.successors(&state) {
            let child_ret = ret + t.reward;
            let child_left = remaining - 1;
            match t.status {
                TerminationValue::Success => {
                    let c = arena.push(idx, t.action, t.next, child_ret);
                    best.offer(&arena, c, TerminationValue::Success);
                    break 'search;
                }
                TerminationValue::Failure => {
                    if !fixed {
                        let c = arena.push(idx, t.action, t.next, child_ret);
                        best.offer(&arena, c, TerminationValue::Failure);
                    }
                    continue;
                }
                TerminationValue::Continue => {}
            }
            let improves = if fixed {
                match by_depth.entry((t.next.clone(), horizon - child_left)) {
                    Entry::Occupied(mut e) if *e.get() < child_ret => {
                        e.insert(child_ret);
                        true
                    }
                    Entry::Occupied(_) => false,
                    Entry::Vacant(e) => {
                        e.insert(child_ret);
                        true
                    }
                }
            } else {
                let entries = pareto.entry(t.next.clone()).or_default();
                if entries.iter().any(|&(r, left)| r >= child_ret && left >= child_left) {
                    false
                } else {
                    entries.retain(|&(r, left)| !(child_ret >= r && child_left >= left));
                    entries.push((child_ret, child_left));
                    true
                }
            };
            if !improves {
                continue;
            }
            let c = arena.push(idx, t.action, t.next, child_ret);
            if !fixed || child_left == 0 {
                best.offer(&arena, c, TerminationValue::Continue);
            }
            if child_left > 0 {
                seq += 1;
                frontier.push((child_ret, child_left, Reverse(seq), c));
            }
        }
    }

    let plan = best.into_plan(&arena);
    meter.finish(plan)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::envs::grid::{self, GridMdp, GridState};
    use crate::envs::{bins, blocks, fixtures};
    use crate::mdp::{replay, RelMdp};
    use crate::planners::bfs_oracle;
    use std::sync::Arc;

    #[test]
    fn grid_optimal_small() {
        for d in 1..=8 {
            for (x, y) in [(d, 0), (0, -d), (d / 2, d - d / 2), (-(d - 1), 1)] {
                let mdp = GridMdp::for_distance(GridState { x, y }, d as usize);
                let stats = greedy_exhaustive(&mdp, Budget::unlimited());
                assert_eq!(stats.plan.len(), mdp.horizon());
                assert_eq!(stats.plan.ret, grid::optimal_return(d as usize, mdp.horizon()));
                assert_eq!(replay(&mdp, &stats.plan.actions).unwrap(), stats.plan);
            }
        }
    }

    #[test]
    fn bins_fixture_four_steps() {
        let mdp = RelMdp::new(Arc::new(bins::domain()), fixtures::bins_2x2_state(), 32);
        let stats = greedy_exhaustive(&mdp, Budget::unlimited());
        assert_eq!(stats.plan.status, TerminationValue::Success);
        assert_eq!(stats.plan.len(), 4);
        assert_eq!(replay(&mdp, &stats.plan.actions).unwrap(), stats.plan);
    }

    #[test]
    fn matches_oracle_on_small_blocks() {
        for n in 2..=4 {
            for seed in 0..10 {
                let mdp = RelMdp::new(Arc::new(blocks::domain()), blocks::generate(n, seed), 8 * n);
                let g = greedy_exhaustive(&mdp, Budget::unlimited());
                let o = bfs_oracle(&mdp, 100_000).unwrap();
                let best = o.optimal_success_plan.as_ref().unwrap();
                assert_eq!(g.plan.status, TerminationValue::Success);
                assert_eq!(g.plan.ret, best.ret);
                assert_eq!(g.plan.len(), best.len());
            }
        }
    }

    #[test]
    fn budget_exhaustion_reported() {
        let mdp = GridMdp::for_distance(GridState { x: 10, y: 10 }, 20);
        let stats = greedy_exhaustive(&mdp, Budget::nodes(50));
        assert!(stats.budget_exhausted);
        assert_eq!(stats.nodes_expanded, 50);
    }
}
