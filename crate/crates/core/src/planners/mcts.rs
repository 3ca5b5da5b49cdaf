use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{Budget, Meter, SearchStats};
use crate::mdp::{Mdp, Plan, Transition};
use crate::reward::{Reward, TerminationValue};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MctsConfig {
    pub iterations: usize,
    /// UCB1 exploration constant.
    pub c: f64,
    /// pUCT exploration constant.
    pub c_puct: f64,
    pub seed: u64,
}

impl MctsConfig {
    pub fn new(iterations: usize, seed: u64) -> Self {
        MctsConfig {
            iterations,
            c: std::f64::consts::SQRT_2,
            c_puct: 1.25,
            seed,
        }
    }
}

#[derive(Clone, Copy, PartialEq)]
enum Rule {
    Ucb1,
    Puct,
}

struct Node<S, A> {
    state: S,
    action: Option<A>,
    parent: usize,
    depth: usize,
    // Return accumulated from the root up to this node.
    path_ret: Reward,
    status: TerminationValue,
    children: Vec<usize>,
    untried: Option<Vec<Transition<S, A>>>,
    visits: u64,
    value_sum: f64,
}

/// Monte Carlo tree search with the UCB1 tree policy.
pub fn mcts_k<M: Mdp>(mdp: &M, cfg: MctsConfig, budget: Budget) -> SearchStats<M::Action> {
    search(mdp, cfg, Rule::Ucb1, budget)
}

/// Monte Carlo tree search with the pUCT tree policy and a uniform prior.
pub fn mcts_puct_k<M: Mdp>(mdp: &M, cfg: MctsConfig, budget: Budget) -> SearchStats<M::Action> {
    search(mdp, cfg, Rule::Puct, budget)
}

fn to_f64(r: Reward) -> f64 {
    *r.numer() as f64 / *r.denom() as f64
}

fn search<M: Mdp>(mdp: &M, cfg: MctsConfig, rule: Rule, budget: Budget) -> SearchStats<M::Action> {
    let horizon = mdp.horizon();
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut meter = Meter::new(budget);
    let mut tree: Vec<Node<M::State, M::Action>> = vec![Node {
        state: mdp.initial(),
        action: None,
        parent: usize::MAX,
        depth: 0,
        path_ret: Reward::from_integer(0),
        status: TerminationValue::Continue,
        children: Vec::new(),
        untried: None,
        visits: 0,
        value_sum: 0.0,
    }];

    'iterations: for _ in 0..cfg.iterations {
        // Selection.
        let mut cur = 0;
        loop {
            let n = &tree[cur];
            if n.status.is_terminal() || n.depth >= horizon {
                break;
            }
            if n.untried.is_none() {
                if !meter.expand() {
                    break 'iterations;
                }
                let succ = mdp.successors(&tree[cur].state);
                if rule == Rule::Puct {
                    // pUCT scores every child from the start, so all are added at once.
                    for t in succ {
                        let c = add_child(&mut tree, cur, t);
                        tree[cur].children.push(c);
                    }
                    tree[cur].untried = Some(Vec::new());
                } else {
                    let mut succ = succ;
                    succ.reverse();
                    tree[cur].untried = Some(succ);
                }
            }
            if let Some(t) = tree[cur].untried.as_mut().and_then(Vec::pop) {
                let c = add_child(&mut tree, cur, t);
                tree[cur].children.push(c);
                cur = c;
                break;
            }
            if tree[cur].children.is_empty() {
                break;
            }
            cur = select(&tree, cur, rule, cfg);
            if tree[cur].visits == 0 {
                break;
            }
        }

        // Rollout.
        let leaf = &tree[cur];
        let mut value = leaf.path_ret;
        if !leaf.status.is_terminal() {
            let mut s = leaf.state.clone();
            for _ in leaf.depth..horizon {
                if !meter.expand() {
                    break;
                }
                let mut succ = mdp.successors(&s);
                if succ.is_empty() {
                    break;
                }
                let t = succ.swap_remove(rng.gen_range(0..succ.len()));
                value += t.reward;
                s = t.next;
                if t.status.is_terminal() {
                    break;
                }
            }
        }

        // Backup.
        let v = to_f64(value);
        let mut i = cur;
        while i != usize::MAX {
            tree[i].visits += 1;
            tree[i].value_sum += v;
            i = tree[i].parent;
        }
        if meter.exhausted() {
            break;
        }
    }

    let plan = emit(mdp, &tree, &mut rng, &mut meter);
    meter.finish(plan)
}

fn add_child<S: Clone, A>(tree: &mut Vec<Node<S, A>>, parent: usize, t: Transition<S, A>) -> usize {
    let p = &tree[parent];
    let node = Node {
        depth: p.depth + 1,
        path_ret: p.path_ret + t.reward,
        state: t.next,
        action: Some(t.action),
        parent,
        status: t.status,
        children: Vec::new(),
        untried: None,
        visits: 0,
        value_sum: 0.0,
    };
    tree.push(node);
    tree.len() - 1
}

fn select<S, A>(tree: &[Node<S, A>], cur: usize, rule: Rule, cfg: MctsConfig) -> usize {
    let n = &tree[cur];
    let parent_visits = n.visits.max(1) as f64;
    let prior = 1.0 / n.children.len() as f64;
    let mut best = n.children[0];
    let mut best_score = f64::NEG_INFINITY;
    for &c in &n.children {
        let child = &tree[c];
        let q = if child.visits == 0 {
            0.0
        } else {
            child.value_sum / child.visits as f64
        };
        let score = match rule {
            Rule::Ucb1 => {
                if child.visits == 0 {
                    f64::INFINITY
                } else {
                    q + cfg.c * (parent_visits.ln() / child.visits as f64).sqrt()
                }
            }
            Rule::Puct => {
                q + cfg.c_puct * prior * parent_visits.sqrt() / (1.0 + child.visits as f64)
            }
        };
        if score > best_score {
            best_score = score;
            best = c;
        }
    }
    best
}

// Follows the most-visited child from the root, then finishes the plan with
// uniformly random actions.
fn emit<M: Mdp>(
    mdp: &M,
    tree: &[Node<M::State, M::Action>],
    rng: &mut ChaCha8Rng,
    meter: &mut Meter,
) -> Plan<M::Action> {
    let mut plan = Plan::empty();
    let mut cur = 0;
    loop {
        let n = &tree[cur];
        let Some(&next) = n
            .children
            .iter()
            .filter(|&&c| tree[c].visits > 0)
            .max_by(|&&a, &&b| tree[a].visits.cmp(&tree[b].visits).then(b.cmp(&a)))
        else {
            break;
        };
        let c = &tree[next];
        plan.actions.push(c.action.clone().unwrap());
        plan.ret = c.path_ret;
        plan.status = c.status;
        cur = next;
        if c.status.is_terminal() {
            return plan;
        }
    }
    let mut s = tree[cur].state.clone();
    while plan.actions.len() < mdp.horizon() && !plan.status.is_terminal() {
        if !meter.expand() {
            break;
        }
        let mut succ = mdp.successors(&s);
        if succ.is_empty() {
            break;
        }
        let t = succ.swap_remove(rng.gen_range(0..succ.len()));
        plan.actions.push(t.action);
        plan.ret += t.reward;
        plan.status = t.status;
        s = t.next;
    }
    plan
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::envs::bins;
    use crate::envs::fixtures;
    use crate::envs::grid::{GridMdp, GridState};
    use crate::mdp::{replay, RelMdp};
    use std::sync::Arc;

    #[test]
    fn seeded_runs_repeat() {
        let mdp = GridMdp::for_distance(GridState { x: 2, y: 3 }, 5);
        for f in [mcts_k::<GridMdp>, mcts_puct_k::<GridMdp>] {
            let a = f(&mdp, MctsConfig::new(200, 3), Budget::unlimited());
            let b = f(&mdp, MctsConfig::new(200, 3), Budget::unlimited());
            assert_eq!(a.plan, b.plan);
            assert_eq!(a.nodes_expanded, b.nodes_expanded);
            assert_eq!(a.plan.len(), mdp.horizon());
            assert_eq!(replay(&mdp, &a.plan.actions).unwrap(), a.plan);
        }
    }

    #[test]
    fn solves_small_bins() {
        let mdp = RelMdp::new(Arc::new(bins::domain()), fixtures::bins_2x2_state(), 32);
        let stats = mcts_k(&mdp, MctsConfig::new(2000, 1), Budget::unlimited());
        assert_eq!(replay(&mdp, &stats.plan.actions).unwrap(), stats.plan);
    }
}
