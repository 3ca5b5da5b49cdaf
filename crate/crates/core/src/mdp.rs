//! A deterministic MDP interface shared by the grid and relational domains.

use std::fmt::{Debug, Display};
use std::hash::Hash;
use std::sync::Arc;

use crate::domain::DomainDef;
use crate::error::{Error, Result};
use crate::fol::GroundAction;
use crate::reward::{Reward, TerminationValue};
use crate::state::RelState;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Transition<S, A> {
    pub action: A,
    pub next: S,
    pub reward: Reward,
    pub status: TerminationValue,
}

pub trait Mdp {
    type State: Clone + Eq + Hash + Ord + Debug + Send + Sync;
    type Action: Clone + Eq + Hash + Ord + Debug + Display + Send + Sync;

    fn initial(&self) -> Self::State;

    fn horizon(&self) -> usize;

    /// Every transition out of `s`, in a fixed order.
    fn successors(&self, s: &Self::State) -> Vec<Transition<Self::State, Self::Action>>;

    /// One transition, failing if `a` is not applicable in `s`.
    fn step(&self, s: &Self::State, a: &Self::Action) -> Result<Transition<Self::State, Self::Action>>;

    /// True when every episode runs for exactly `horizon()` steps, so only
    /// full-length plans are complete.
    fn fixed_horizon(&self) -> bool {
        false
    }

    /// Largest single-step reward.
    fn max_reward(&self) -> Reward;
}

/// An action sequence together with what replaying it yields.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Plan<A> {
    pub actions: Vec<A>,
    pub ret: Reward,
    pub status: TerminationValue,
}

impl<A> Plan<A> {
    pub fn empty() -> Self {
        Plan {
            actions: Vec::new(),
            ret: Reward::from_integer(0),
            status: TerminationValue::Continue,
        }
    }

    pub fn len(&self) -> usize {
        self.actions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.actions.is_empty()
    }
}

/// Replays `actions` from the initial state. Fails on an inapplicable action,
/// on actions after a terminal transition, or past the horizon.
pub fn replay<M: Mdp>(mdp: &M, actions: &[M::Action]) -> Result<Plan<M::Action>> {
    if actions.len() > mdp.horizon() {
        return Err(Error::Replay {
            step: mdp.horizon(),
            msg: format!("plan has {} actions, horizon is {}", actions.len(), mdp.horizon()),
        });
    }
    let mut s = mdp.initial();
    let mut ret = Reward::from_integer(0);
    let mut status = TerminationValue::Continue;
    for (i, a) in actions.iter().enumerate() {
        if status.is_terminal() {
            return Err(Error::Replay {
                step: i,
                msg: format!("action {a} after the episode ended with {status}"),
            });
        }
        let t = mdp.step(&s, a).map_err(|e| Error::Replay {
            step: i,
            msg: e.to_string(),
        })?;
        ret += t.reward;
        status = t.status;
        s = t.next;
    }
    Ok(Plan {
        actions: actions.to_vec(),
        ret,
        status,
    })
}

/// A relational domain with a fixed initial state and step cap.
#[derive(Clone, Debug)]
pub struct RelMdp {
    pub domain: Arc<DomainDef>,
    pub s0: RelState,
    pub horizon: usize,
}

impl RelMdp {
    pub fn new(domain: Arc<DomainDef>, s0: RelState, horizon: usize) -> Self {
        RelMdp {
            domain,
            s0,
            horizon,
        }
    }
}

impl Mdp for RelMdp {
    type State = RelState;
    type Action = GroundAction;

    fn initial(&self) -> RelState {
        self.s0.clone()
    }

    fn horizon(&self) -> usize {
        self.horizon
    }

    fn successors(&self, s: &RelState) -> Vec<Transition<RelState, GroundAction>> {
        self.domain
            .successors(s)
            .into_iter()
            .map(|(a, next)| Transition {
                reward: self.domain.reward(s, &a, &next),
                status: self.domain.terminate(s, &a, &next),
                action: a,
                next,
            })
            .collect()
    }

    fn step(&self, s: &RelState, a: &GroundAction) -> Result<Transition<RelState, GroundAction>> {
        let next = self.domain.apply(s, a)?;
        Ok(Transition {
            reward: self.domain.reward(s, a, &next),
            status: self.domain.terminate(s, a, &next),
            action: a.clone(),
            next,
        })
    }

    fn max_reward(&self) -> Reward {
        self.domain.reward.max_value()
    }
}
