//! Exhaustive breadth-first reachability analysis.

use std::collections::{HashMap, VecDeque};

use crate::error::{Error, Result};
use crate::mdp::{Mdp, Plan};
use crate::reward::{Reward, TerminationValue};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Edge<A> {
    pub from: usize,
    pub action: A,
    pub to: usize,
    pub reward: Reward,
    pub status: TerminationValue,
}

/// The reachable state graph. State 0 is the root; indices follow BFS
/// discovery order with successors visited in canonical action order.
#[derive(Clone, Debug)]
pub struct ReachabilityGraph<S, A> {
    pub states: Vec<S>,
    pub transitions: Vec<Edge<A>>,
    /// Indices into `transitions` whose reward equals the largest single-step reward.
    pub milestone_transitions: Vec<usize>,
    /// States entered by a SUCCESS transition.
    pub goal_states: Vec<usize>,
    /// States from which no goal state can be reached.
    pub dead_ends: Vec<usize>,
    /// A shortest action sequence ending in a SUCCESS transition.
    pub optimal_success_plan: Option<Plan<A>>,
}

impl<S, A> ReachabilityGraph<S, A> {
    /// Renders state and edge lists as plain text, using 1-based state ids.
    pub fn dump(&self) -> String
    where
        A: std::fmt::Display,
    {
        use std::fmt::Write as _;
        let mut out = format!(
            "states {}\ntransitions {}\nmilestone_transitions {}\ndead_ends {}\n",
            self.states.len(),
            self.transitions.len(),
            self.milestone_transitions.len(),
            self.dead_ends.len()
        );
        for e in &self.transitions {
            let _ = writeln!(
                out,
                "{} -> {} {} reward={} {}",
                e.from + 1,
                e.to + 1,
                e.action,
                e.reward,
                e.status
            );
        }
        let dead: Vec<String> = self.dead_ends.iter().map(|d| (d + 1).to_string()).collect();
        let _ = writeln!(out, "dead {}", dead.join(" "));
        if let Some(p) = &self.optimal_success_plan {
            let acts: Vec<String> = p.actions.iter().map(|a| a.to_string()).collect();
            let _ = writeln!(out, "optimal {} return={} {}", p.len(), p.ret, acts.join(" "));
        }
        out
    }
}

/// Enumerates every state reachable within the horizon-free dynamics.
/// States entered through a terminal transition are not expanded.
pub fn bfs_oracle<M: Mdp>(mdp: &M, state_cap: usize) -> Result<ReachabilityGraph<M::State, M::Action>> {
    let mut states = vec![mdp.initial()];
    let mut index: HashMap<M::State, usize> = HashMap::from([(mdp.initial(), 0)]);
    let mut expandable = vec![true];
    let mut expanded = vec![false];
    let mut transitions = Vec::new();
    let mut queue = VecDeque::from([0usize]);

    while let Some(i) = queue.pop_front() {
        if expanded[i] || !expandable[i] {
            continue;
        }
        expanded[i] = true;
        for t in mdp.successors(&states[i]) {
            let j = match index.get(&t.next) {
                Some(&j) => j,
                None => {
                    if states.len() >= state_cap {
                        return Err(Error::StateCapExceeded(state_cap));
                    }
                    let j = states.len();
                    index.insert(t.next.clone(), j);
                    states.push(t.next.clone());
                    expandable.push(false);
                    expanded.push(false);
                    j
                }
            };
            if t.status == TerminationValue::Continue && !expandable[j] {
                expandable[j] = true;
                queue.push_back(j);
            }
            transitions.push(Edge {
                from: i,
                action: t.action,
                to: j,
                reward: t.reward,
                status: t.status,
            });
        }
    }

    let r_max = mdp.max_reward();
    let milestone_transitions = (0..transitions.len())
        .filter(|&k| transitions[k].reward == r_max)
        .collect();

    let mut goal_states: Vec<usize> = transitions
        .iter()
        .filter(|e| e.status == TerminationValue::Success)
        .map(|e| e.to)
        .collect();
    goal_states.sort_unstable();
    goal_states.dedup();

    // Backward reachability: a state is alive if it has a SUCCESS edge or a
    // CONTINUE edge into an alive state.
    let n = states.len();
    let mut preds: Vec<Vec<usize>> = vec![Vec::new(); n];
    let mut alive = vec![false; n];
    let mut work = Vec::new();
    for e in &transitions {
        match e.status {
            TerminationValue::Success => {
                if !alive[e.from] {
                    alive[e.from] = true;
                    work.push(e.from);
                }
            }
            TerminationValue::Continue => preds[e.to].push(e.from),
            TerminationValue::Failure => {}
        }
    }
    while let Some(j) = work.pop() {
        for &p in &preds[j] {
            if !alive[p] {
                alive[p] = true;
                work.push(p);
            }
        }
    }
    let dead_ends = (0..n)
        .filter(|&i| !alive[i] && goal_states.binary_search(&i).is_err())
        .collect();

    let optimal_success_plan = shortest_success(&transitions, n, mdp);

    Ok(ReachabilityGraph {
        states,
        transitions,
        milestone_transitions,
        goal_states,
        dead_ends,
        optimal_success_plan,
    })
}

fn shortest_success<M: Mdp>(edges: &[Edge<M::Action>], n: usize, mdp: &M) -> Option<Plan<M::Action>> {
    let mut out: Vec<Vec<usize>> = vec![Vec::new(); n];
    for (k, e) in edges.iter().enumerate() {
        out[e.from].push(k);
    }
    // Breadth-first over CONTINUE edges, in edge order.
    let mut via: Vec<Option<usize>> = vec![None; n];
    let mut seen = vec![false; n];
    seen[0] = true;
    let mut queue = VecDeque::from([0usize]);
    let mut depth = vec![0usize; n];
    while let Some(i) = queue.pop_front() {
        if depth[i] >= mdp.horizon() {
            continue;
        }
        for &k in &out[i] {
            let e = &edges[k];
            if e.status == TerminationValue::Success {
                let mut ks = vec![k];
                let mut cur = i;
                while let Some(pk) = via[cur] {
                    ks.push(pk);
                    cur = edges[pk].from;
                }
                ks.reverse();
                return Some(Plan {
                    ret: ks.iter().map(|&k| edges[k].reward).sum(),
                    actions: ks.iter().map(|&k| edges[k].action.clone()).collect(),
                    status: TerminationValue::Success,
                });
            }
            if e.status == TerminationValue::Continue && !seen[e.to] {
                seen[e.to] = true;
                via[e.to] = Some(k);
                depth[e.to] = depth[i] + 1;
                queue.push_back(e.to);
            }
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::envs::{bins, blocks, fixtures};
    use crate::mdp::{replay, RelMdp};
    use std::sync::Arc;

    fn bins_graph() -> (RelMdp, ReachabilityGraph<crate::state::RelState, crate::fol::GroundAction>) {
        let mdp = RelMdp::new(Arc::new(bins::domain()), fixtures::bins_2x2_state(), 32);
        let g = bfs_oracle(&mdp, 1000).unwrap();
        (mdp, g)
    }

    #[test]
    fn bins_fixture_counts() {
        let (mdp, g) = bins_graph();
        assert_eq!(g.states.len(), 36);
        let dead: Vec<usize> = g.dead_ends.iter().map(|d| d + 1).collect();
        assert_eq!(
            dead,
            [2, 3, 6, 7, 8, 14, 15, 21, 23, 26, 28, 30, 31, 32, 33, 34, 35, 36]
        );
        assert_eq!(g.goal_states, [23]);
        let plan = g.optimal_success_plan.as_ref().unwrap();
        assert_eq!(plan.len(), 4);
        assert_eq!(replay(&mdp, &plan.actions).unwrap(), *plan);
        assert_eq!(g.milestone_transitions.len(), 16);
    }

    #[test]
    fn state_cap_overflow() {
        let mdp = RelMdp::new(Arc::new(bins::domain()), fixtures::bins_2x2_state(), 32);
        assert!(matches!(bfs_oracle(&mdp, 10), Err(Error::StateCapExceeded(10))));
    }

    #[test]
    fn fig3a_shortest_plan() {
        let mdp = RelMdp::new(Arc::new(blocks::domain()), fixtures::fig3a_state(), 32);
        let g = bfs_oracle(&mdp, 10_000).unwrap();
        let plan = g.optimal_success_plan.unwrap();
        let names: Vec<String> = plan.actions.iter().map(|a| a.to_string()).collect();
        assert_eq!(names, ["Unstack(a, d)", "Place(a)"]);
    }
}
