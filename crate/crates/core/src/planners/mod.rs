//! Reward-maximizing baseline planners and the exhaustive oracle.

mod beam;
mod greedy;
mod mcts;
pub mod oracle;
mod random;

use std::fmt;
use std::str::FromStr;
use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::mdp::Plan;
use crate::reward::{Reward, TerminationValue};

pub use beam::beam_k;
pub use greedy::greedy_exhaustive;
pub use mcts::{mcts_k, mcts_puct_k, MctsConfig};
pub use oracle::{bfs_oracle, ReachabilityGraph};
pub use random::random_k;

/// Hard limits on one planning call.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Budget {
    pub node_cap: u64,
    pub time_cap: Option<Duration>,
}

impl Default for Budget {
    fn default() -> Self {
        Budget {
            node_cap: 5_000_000,
            time_cap: Some(Duration::from_secs(60)),
        }
    }
}

impl Budget {
    pub fn unlimited() -> Self {
        Budget {
            node_cap: u64::MAX,
            time_cap: None,
        }
    }

    pub fn nodes(node_cap: u64) -> Self {
        Budget {
            node_cap,
            time_cap: None,
        }
    }
}

/// Counts expansions against a [`Budget`].
#[derive(Debug)]
pub struct Meter {
    pub nodes: u64,
    started: Instant,
    cap: u64,
    deadline: Option<Instant>,
    exhausted: bool,
}

impl Meter {
    pub fn new(budget: Budget) -> Self {
        let started = Instant::now();
        Meter {
            nodes: 0,
            started,
            cap: budget.node_cap,
            deadline: budget.time_cap.map(|d| started + d),
            exhausted: false,
        }
    }

    /// Records one expansion. Returns false once the budget is spent.
    pub fn expand(&mut self) -> bool {
        if self.exhausted || self.nodes >= self.cap {
            self.exhausted = true;
            return false;
        }
        if let Some(d) = self.deadline {
            // The clock is only read every 256 expansions.
            if self.nodes % 256 == 0 && Instant::now() >= d {
                self.exhausted = true;
                return false;
            }
        }
        self.nodes += 1;
        true
    }

    pub fn exhausted(&self) -> bool {
        self.exhausted
    }

    pub fn finish<A>(self, plan: Plan<A>) -> SearchStats<A> {
        SearchStats {
            nodes_expanded: self.nodes,
            wall_time: self.started.elapsed(),
            plan,
            budget_exhausted: self.exhausted,
        }
    }
}

/// Orders finished plans: SUCCESS first, then higher return, then shorter.
pub(crate) fn plan_rank(
    status: TerminationValue,
    ret: Reward,
    len: usize,
) -> (bool, Reward, std::cmp::Reverse<usize>) {
    (status == TerminationValue::Success, ret, std::cmp::Reverse(len))
}

/// The best finished plan seen so far; the earliest wins ties.
pub(crate) struct BestPlan {
    found: Option<(usize, TerminationValue)>,
    rank: Option<(bool, Reward, std::cmp::Reverse<usize>)>,
}

impl BestPlan {
    pub fn new() -> Self {
        BestPlan {
            found: None,
            rank: None,
        }
    }

    pub fn offer<S, A>(&mut self, arena: &Arena<S, A>, idx: usize, status: TerminationValue) {
        let n = arena.get(idx);
        let rank = plan_rank(status, n.ret, n.depth);
        if self.rank.as_ref().is_none_or(|b| rank > *b) {
            self.rank = Some(rank);
            self.found = Some((idx, status));
        }
    }

    pub fn into_plan<S, A: Clone>(self, arena: &Arena<S, A>) -> Plan<A> {
        match self.found {
            Some((idx, status)) => arena.plan(idx, status),
            None => Plan::empty(),
        }
    }
}

/// Search-tree storage with parent links, shared by the tree planners.
pub(crate) struct Arena<S, A> {
    nodes: Vec<ArenaNode<S, A>>,
}

pub(crate) struct ArenaNode<S, A> {
    pub parent: usize,
    pub action: Option<A>,
    pub state: S,
    pub ret: Reward,
    pub depth: usize,
}

impl<S, A> Arena<S, A> {
    pub fn get(&self, idx: usize) -> &ArenaNode<S, A> {
        &self.nodes[idx]
    }
}

impl<S, A: Clone> Arena<S, A> {
    pub fn new(root: S) -> Self {
        Arena {
            nodes: vec![ArenaNode {
                parent: usize::MAX,
                action: None,
                state: root,
                ret: Reward::from_integer(0),
                depth: 0,
            }],
        }
    }

    pub fn push(&mut self, parent: usize, action: A, state: S, ret: Reward) -> usize {
        let depth = self.nodes[parent].depth + 1;
        self.nodes.push(ArenaNode {
            parent,
            action: Some(action),
            state,
            ret,
            depth,
        });
        self.nodes.len() - 1
    }

    pub fn actions(&self, mut idx: usize) -> Vec<A> {
        let mut out = Vec::with_capacity(self.nodes[idx].depth);
        while let Some(a) = &self.nodes[idx].action {
            out.push(a.clone());
            idx = self.nodes[idx].parent;
        }
        out.reverse();
        out
    }

    pub fn plan(&self, idx: usize, status: TerminationValue) -> Plan<A> {
        Plan {
            actions: self.actions(idx),
            ret: self.nodes[idx].ret,
            status,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SearchStats<A> {
    pub nodes_expanded: u64,
    pub wall_time: Duration,
    pub plan: Plan<A>,
    pub budget_exhausted: bool,
}

/// A planner and its budget, as written on the command line.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum PlannerKind {
    Greedy,
    Random(usize),
    Beam(usize),
    Mcts(usize),
    MctsU(usize),
    Introspector,
}

impl FromStr for PlannerKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::BadSpec(format!("unknown planner `{s}`"));
        let (name, k) = match s.split_once(':') {
            Some((n, k)) => {
                let k: usize = k.parse().map_err(|_| bad())?;
                if k == 0 {
                    return Err(Error::BadSpec(format!("planner budget must be positive in `{s}`")));
                }
                (n, Some(k))
            }
            None => (s, None),
        };
        match (name, k) {
            ("greedy", None) => Ok(PlannerKind::Greedy),
            ("introspector", None) => Ok(PlannerKind::Introspector),
            ("random", Some(k)) => Ok(PlannerKind::Random(k)),
            ("beam", Some(k)) => Ok(PlannerKind::Beam(k)),
            ("mcts", Some(k)) => Ok(PlannerKind::Mcts(k)),
            ("mcts-u", Some(k)) => Ok(PlannerKind::MctsU(k)),
            _ => Err(bad()),
        }
    }
}

impl fmt::Display for PlannerKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PlannerKind::Greedy => f.write_str("greedy"),
            PlannerKind::Introspector => f.write_str("introspector"),
            PlannerKind::Random(k) => write!(f, "random:{k}"),
            PlannerKind::Beam(k) => write!(f, "beam:{k}"),
            PlannerKind::Mcts(k) => write!(f, "mcts:{k}"),
            PlannerKind::MctsU(k) => write!(f, "mcts-u:{k}"),
        }
    }
}

impl Serialize for PlannerKind {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for PlannerKind {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}
