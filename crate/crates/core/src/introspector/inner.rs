use std::cmp::Reverse;
use std::collections::{BinaryHeap, HashSet};

use crate::domain::DomainDef;
use crate::fol::GroundAction;
use crate::mutation::{literal_count_heuristic, Mutation};
use crate::planners::Meter;
use crate::reward::{EvalOver, Reward, TerminationValue};
use crate::state::RelState;

/// Outcome of one inner search.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InnerResult {
    pub actions: Vec<GroundAction>,
    pub state: RelState,
    pub reward: Reward,
    pub status: TerminationValue,
    /// False when no satisfying transition was found within the limits.
    pub found: bool,
}

impl InnerResult {
    fn nothing(s: &RelState) -> Self {
        InnerResult {
            actions: Vec::new(),
            state: s.clone(),
            reward: Reward::from_integer(0),
            status: TerminationValue::Continue,
            found: false,
        }
    }
}

struct Node {
    parent: usize,
    action: Option<GroundAction>,
    state: RelState,
    reward: Reward,
}

/// Greedy best-first search from `s` for a transition satisfying `m`, using
/// [`literal_count_heuristic`]. Literal constraints are checked on the
/// state the reward model reads. Terminal transitions that do not satisfy
/// `m` are pruned. At most `depth_limit` actions.
pub fn inner_goal_search(
    domain: &DomainDef,
    s: &RelState,
    depth_limit: usize,
    m: &Mutation,
    meter: &mut Meter,
) -> InnerResult {
    if *m == Mutation::ImmutablyValid {
        return InnerResult {
            found: true,
            ..InnerResult::nothing(s)
        };
    }
    let over = domain.reward.eval_over();
    let mut nodes = vec![Node {
        parent: usize::MAX,
        action: None,
        state: s.clone(),
        reward: Reward::from_integer(0),
    }];
    let mut seen: HashSet<RelState> = HashSet::from([s.clone()]);
    let mut open = BinaryHeap::from([Reverse((literal_count_heuristic(s, m), 0usize, 0usize))]);

    while let Some(Reverse((_, depth, idx))) = open.pop() {
        if depth >= depth_limit {
            continue;
        }
        if !meter.expand() {
            break;
        }
        let state = nodes[idx].state.clone();
        for (a, next) in domain.successors(&state) {
            let reward = nodes[idx].reward + domain.reward(&state, &a, &next);
            let status = domain.terminate(&state, &a, &next);
            let checked = match over {
                EvalOver::Prior => &state,
                EvalOver::Next => &next,
            };
            if m.is_satisfied(checked, Some(&a)) {
                let mut actions = vec![a];
                let mut cur = idx;
                while let Some(pa) = &nodes[cur].action {
                    actions.push(pa.clone());
                    cur = nodes[cur].parent;
                }
                actions.reverse();
                return InnerResult {
                    actions,
                    state: next,
                    reward,
                    status,
                    found: true,
                };
            }
            if status.is_terminal() || !seen.insert(next.clone()) {
                continue;
            }
            let h = literal_count_heuristic(&next, m);
            nodes.push(Node {
                parent: idx,
                action: Some(a),
                state: next,
                reward,
            });
            open.push(Reverse((h, depth + 1, nodes.len() - 1)));
        }
    }
    InnerResult::nothing(s)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::envs::{bins, blocks, fixtures};
    use crate::mutation::{MutabilityIndex, Mutator};
    use crate::planners::Budget;

    #[test]
    fn fig3a_reaches_all_on_table() {
        let d = blocks::domain();
        let idx = MutabilityIndex::new(&d);
        let s = fixtures::fig3a_state();
        let ms = Mutator::new(&idx).mutate_true(&s, &d.reward.maximal_condition()).unwrap();
        let mut meter = Meter::new(Budget::unlimited());
        let r = inner_goal_search(&d, &s, 16, &ms[0], &mut meter);
        assert!(r.found);
        let names: Vec<String> = r.actions.iter().map(|a| a.to_string()).collect();
        assert_eq!(names, ["Unstack(a, d)", "Place(a)"]);
        assert_eq!(r.status, TerminationValue::Success);
        assert_eq!(r.reward, Reward::from_integer(1));
    }

    #[test]
    fn bins_milestone_empties_then_closes() {
        let d = bins::domain();
        let idx = MutabilityIndex::new(&d);
        let s = fixtures::bins_2x2_state();
        let ms = Mutator::new(&idx).mutate_true(&s, &d.reward.maximal_condition()).unwrap();
        for m in &ms {
            let mut meter = Meter::new(Budget::unlimited());
            let r = inner_goal_search(&d, &s, 16, m, &mut meter);
            assert!(r.found);
            assert_eq!(r.actions.len(), 2);
            assert_eq!(r.actions.last(), m.required_action());
            assert_eq!(r.reward, Reward::from_integer(1));
            assert_eq!(r.status, TerminationValue::Continue);
        }
    }

    #[test]
    fn depth_limit_and_iv() {
        let d = blocks::domain();
        let idx = MutabilityIndex::new(&d);
        let s = fixtures::fig3a_state();
        let ms = Mutator::new(&idx).mutate_true(&s, &d.reward.maximal_condition()).unwrap();
        let mut meter = Meter::new(Budget::unlimited());
        let r = inner_goal_search(&d, &s, 1, &ms[0], &mut meter);
        assert!(!r.found);
        assert!(r.actions.is_empty());
        let r = inner_goal_search(&d, &s, 1, &Mutation::ImmutablyValid, &mut meter);
        assert!(r.found && r.actions.is_empty());
        assert_eq!((r.reward, r.status), (Reward::from_integer(0), TerminationValue::Continue));
    }
}
