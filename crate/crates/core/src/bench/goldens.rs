use std::sync::Arc;

use serde::Serialize;

use crate::envs::grid::{GridMdp, GridState};
use crate::envs::{bins, blocks, fixtures};
use crate::introspector::{grid_introspector_plan, inner_goal_search, introspector_plan, IntrospectorConfig};
use crate::mdp::RelMdp;
use crate::mutation::{dump_mutations, literal_count_heuristic, MutabilityIndex, Mutator};
use crate::planners::{bfs_oracle, Budget, Meter};
use crate::state::RelState;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct GoldenCheck {
    pub name: String,
    pub expected: String,
    pub actual: String,
    pub pass: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct GoldenReport {
    pub checks: Vec<GoldenCheck>,
}

impl GoldenReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    fn check(&mut self, name: &str, expected: impl ToString, actual: impl ToString) {
        let (expected, actual) = (expected.to_string(), actual.to_string());
        self.checks.push(GoldenCheck {
            name: name.to_string(),
            pass: expected == actual,
            expected,
            actual,
        });
    }
}

fn ids(xs: impl IntoIterator<Item = usize>) -> String {
    xs.into_iter().map(|x| x.to_string()).collect::<Vec<_>>().join(" ")
}

/// Checks against the checked-in fixtures.
pub fn verify_goldens() -> GoldenReport {
    verify_goldens_with(&fixtures::bins_2x2_state(), &fixtures::fig3a_state())
}

/// The worked bins example and the blocks example, run on the given states.
pub fn verify_goldens_with(bins_s0: &RelState, fig3a: &RelState) -> GoldenReport {
    let mut r = GoldenReport { checks: Vec::new() };

    let bins_d = bins::shared();
    let mdp = RelMdp::new(Arc::clone(&bins_d), bins_s0.clone(), 32);
    match bfs_oracle(&mdp, 100_000) {
        Ok(g) => {
            r.check("bins.reachable_states", 36, g.states.len());
            r.check("bins.dead_end_count", 18, g.dead_ends.len());
            r.check(
                "bins.dead_ends",
                "2 3 6 7 8 14 15 21 23 26 28 30 31 32 33 34 35 36",
                ids(g.dead_ends.iter().map(|d| d + 1)),
            );
            r.check("bins.goal_states", "24", ids(g.goal_states.iter().map(|d| d + 1)));
            r.check(
                "bins.optimal_plan_length",
                4,
                g.optimal_success_plan.as_ref().map_or(0, |p| p.len()),
            );
            r.check("bins.milestone_transitions", 16, g.milestone_transitions.len());

            let idx = MutabilityIndex::new(&bins_d);
            let cond = bins_d.reward.maximal_condition();
            let ms = Mutator::new(&idx).mutate_true(bins_s0, &cond).unwrap_or_default();
            r.check("bins.initial_mutation_count", 2, ms.len());
            r.check(
                "bins.initial_mutations",
                "-InBin(i1, d1) -InBin(i2, d1) @CloseBin(d1)\n-InBin(i1, d2) -InBin(i2, d2) @CloseBin(d2)\n",
                dump_mutations(&ms),
            );
            // Milestone transitions realizing each initial mutation.
            let per: Vec<usize> = ms
                .iter()
                .map(|m| {
                    g.milestone_transitions
                        .iter()
                        .filter(|&&k| {
                            let e = &g.transitions[k];
                            m.is_satisfied(&g.states[e.from], Some(&e.action))
                        })
                        .count()
                })
                .collect();
            r.check("bins.milestones_per_mutation", "8 8", ids(per));

            let cfg = IntrospectorConfig::new(32, Budget::default());
            let traj = introspector_plan(&bins_d, bins_s0, &cfg).map(|res| {
                let mut s = bins_s0.clone();
                let mut out = vec![1];
                for a in &res.stats.plan.actions {
                    s = bins_d.apply(&s, a).expect("introspector plans are applicable");
                    out.push(g.states.iter().position(|x| *x == s).map_or(0, |i| i + 1));
                }
                ids(out)
            });
            r.check("bins.introspector_trajectory", "1 5 12 18 24", traj.unwrap_or_default());
        }
        Err(e) => r.check("bins.reachable_states", 36, e),
    }

    let blocks_d = blocks::shared();
    let idx = MutabilityIndex::new(&blocks_d);
    let ms = Mutator::new(&idx)
        .mutate_true(fig3a, &blocks_d.reward.maximal_condition())
        .unwrap_or_default();
    r.check(
        "fig3a.mutations",
        "+OnTable(a) +OnTable(b) +OnTable(c) +OnTable(d)\n",
        dump_mutations(&ms),
    );
    r.check("fig3a.heuristic", 1, ms.first().map_or(usize::MAX, |m| literal_count_heuristic(fig3a, m)));
    let reach = ms.first().map_or(0, |m| {
        let res = inner_goal_search(&blocks_d, fig3a, 32, m, &mut Meter::new(Budget::default()));
        if res.found {
            res.actions.len()
        } else {
            0
        }
    });
    r.check("fig3a.milestone_plan_length", 2, reach);

    let grid = GridMdp::new(GridState { x: 3, y: 4 }, 12);
    let plan = grid_introspector_plan(&grid, Budget::default()).plan;
    let mut s = GridState { x: 3, y: 4 };
    let first_arrival = plan.actions.iter().position(|&a| {
        s = GridMdp::transition(s, a).next;
        s == GridState::ORIGIN
    });
    r.check("grid.first_arrival_step", 7, first_arrival.map_or(0, |i| i + 1));
    r.check("grid.optimal_return", -6, plan.ret);
    r
}
