use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{Budget, Meter, SearchStats};
use crate::mdp::{Mdp, Plan};
use crate::reward::TerminationValue;

/// The best of `k` uniformly random rollouts: SUCCESS first, then return.
/// Ties keep the earliest rollout.
pub fn random_k<M: Mdp>(mdp: &M, k: usize, seed: u64, budget: Budget) -> SearchStats<M::Action> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut meter = Meter::new(budget);
    let mut best: Option<Plan<M::Action>> = None;
    for _ in 0..k {
        let mut s = mdp.initial();
        let mut plan = Plan::empty();
        for _ in 0..mdp.horizon() {
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
            if t.status.is_terminal() {
                break;
            }
        }
        let better = best.as_ref().is_none_or(|b| {
            (plan.status == TerminationValue::Success, plan.ret)
                > (b.status == TerminationValue::Success, b.ret)
        });
        if better {
            best = Some(plan);
        }
        if meter.exhausted() {
            break;
        }
    }
    meter.finish(best.unwrap_or_else(Plan::empty))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::reward::Reward;
    use crate::envs::grid::{GridMdp, GridState};
    use crate::mdp::replay;

    #[test]
    fn zero_horizon_gives_empty_plan() {
        let mdp = GridMdp::new(GridState { x: 0, y: 1 }, 0);
        let stats = random_k(&mdp, 1, 7, Budget::unlimited());
        assert!(stats.plan.is_empty());
        assert_eq!(stats.plan.ret, Reward::from_integer(0));
    }

    #[test]
    fn seeded_runs_repeat() {
        let mdp = GridMdp::for_distance(GridState { x: 3, y: -4 }, 7);
        let a = random_k(&mdp, 20, 11, Budget::unlimited());
        let b = random_k(&mdp, 20, 11, Budget::unlimited());
        assert_eq!(a.plan, b.plan);
        assert_eq!(a.nodes_expanded, b.nodes_expanded);
        assert_eq!(replay(&mdp, &a.plan.actions).unwrap(), a.plan);
    }
}
