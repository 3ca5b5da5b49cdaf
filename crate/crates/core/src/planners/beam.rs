use std::collections::HashSet;

use super::{Arena, BestPlan, Budget, Meter, SearchStats};
use crate::mdp::Mdp;
use crate::reward::TerminationValue;

/// Level-synchronous beam search of width `k`.
///
/// Children are ranked by return (stable, so ties keep beam order and then
/// action order); only the first child reaching a given state survives.
pub fn beam_k<M: Mdp>(mdp: &M, k: usize, budget: Budget) -> SearchStats<M::Action> {
    let horizon = mdp.horizon();
    let fixed = mdp.fixed_horizon();
    let mut meter = Meter::new(budget);
    let mut arena = Arena::new(mdp.initial());
    let mut best = BestPlan::new();
    if !fixed || horizon == 0 {
        best.offer(&arena, 0, TerminationValue::Continue);
    }

    let mut beam = vec![0usize];
    'levels: for depth in 0..horizon {
        let mut children = Vec::new();
        for &idx in &beam {
            if !meter.expand() {
                break 'levels;
            }
            let (state, ret) = {
                let n = arena.get(idx);
                (n.state.clone(), n.ret)
            };
            for t in mdp.successors(&state) {
                let c = arena.push(idx, t.action, t.next, ret + t.reward);
                match t.status {
                    TerminationValue::Success => {
                        best.offer(&arena, c, TerminationValue::Success);
                        break 'levels;
                    }
                    TerminationValue::Failure => {
                        if !fixed {
                            best.offer(&arena, c, TerminationValue::Failure);
                        }
                    }
                    TerminationValue::Continue => {
                        if !fixed || depth + 1 == horizon {
                            best.offer(&arena, c, TerminationValue::Continue);
                        }
                        children.push(c);
                    }
                }
            }
        }
        children.sort_by(|a, b| arena.get(*b).ret.cmp(&arena.get(*a).ret));
        let mut seen = HashSet::new();
        beam = children
            .into_iter()
            .filter(|c| seen.insert(arena.get(*c).state.clone()))
            .take(k)
            .collect();
        if beam.is_empty() {
            break;
        }
    }

    let plan = best.into_plan(&arena);
    meter.finish(plan)
}
