use std::cmp::Reverse;
use std::collections::{BinaryHeap, HashMap};

use crate::envs::grid::{GridAction, GridMdp, GridState};
use crate::mdp::{replay, Mdp, Plan};
use crate::planners::{Budget, Meter, SearchStats};

/// The grid has one milestone, the origin. A* with the Manhattan distance
/// reaches it; the rest of the horizon oscillates into and out of it.
pub fn grid_introspector_plan(mdp: &GridMdp, budget: Budget) -> SearchStats<GridAction> {
    let mut meter = Meter::new(budget);
    let start = mdp.initial();
    let goal = GridState::ORIGIN;

    // Ties on f prefer the deeper node, then insertion order.
    let mut open = BinaryHeap::from([Reverse((start.manhattan(), Reverse(0u64), 0usize, start))]);
    let mut parent: HashMap<GridState, (GridState, GridAction)> = HashMap::new();
    let mut g: HashMap<GridState, u64> = HashMap::from([(start, 0)]);
    let mut seq = 0;
    let mut reached = start == goal;
    while let Some(Reverse((_, Reverse(gs), _, s))) = open.pop() {
        if s == goal {
            reached = true;
            break;
        }
        if g.get(&s).is_some_and(|&best| best < gs) {
            continue;
        }
        if !meter.expand() {
            break;
        }
        for a in GridAction::ALL {
            let t = GridMdp::transition(s, a);
            let ng = gs + 1;
            if g.get(&t.next).is_none_or(|&old| ng < old) {
                g.insert(t.next, ng);
                parent.insert(t.next, (s, a));
                seq += 1;
                open.push(Reverse((ng + t.next.manhattan(), Reverse(ng), seq, t.next)));
            }
        }
    }

    let mut actions = Vec::new();
    if reached {
        let mut cur = goal;
        while cur != start {
            let (p, a) = parent[&cur];
            actions.push(a);
            cur = p;
        }
        actions.reverse();
    }
    actions.truncate(mdp.horizon());
    if reached && !actions.is_empty() || start == goal {
        let first = actions.first().copied().unwrap_or(GridAction::Up);
        let mut step = first;
        while actions.len() < mdp.horizon() {
            actions.push(step);
            step = if step == first { first.inverse() } else { first };
        }
    }
    let plan = replay(mdp, &actions).unwrap_or_else(|_| Plan::empty());
    meter.finish(plan)
}
