//! First-order decision lists for reward and termination.

use std::fmt;

use num_rational::Rational64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fol::{evaluate, Formula, GroundAction};
use crate::state::RelState;

pub type Reward = Rational64;

/// Which state of a transition `(s, a, s')` binds the guards' literals.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum EvalOver {
    Prior,
    Next,
}

/// Ordered `(guard, value)` clauses; the first true guard decides the value.
#[derive(Clone, Debug, PartialEq)]
pub struct DecisionList {
    clauses: Vec<(Formula, Reward)>,
    eval_over: EvalOver,
}

impl DecisionList {
    /// The final guard must be `true`, which makes the list total.
    pub fn new(clauses: Vec<(Formula, Reward)>, eval_over: EvalOver) -> Result<Self> {
        match clauses.last() {
            Some((Formula::True, _)) => {}
            Some(_) => {
                return Err(Error::InvalidDomain(
                    "decision list must end with an unconditional clause".to_string(),
                ))
            }
            None => return Err(Error::InvalidDomain("empty decision list".to_string())),
        }
        for (guard, _) in &clauses {
            guard.validate(&[])?;
        }
        Ok(DecisionList { clauses, eval_over })
    }

    pub fn clauses(&self) -> &[(Formula, Reward)] {
        &self.clauses
    }

    pub fn eval_over(&self) -> EvalOver {
        self.eval_over
    }

    pub fn max_value(&self) -> Reward {
        self.clauses.iter().map(|(_, v)| *v).max().unwrap()
    }

    pub fn min_value(&self) -> Reward {
        self.clauses.iter().map(|(_, v)| *v).min().unwrap()
    }

    /// Value of the first clause whose guard holds for the transition.
    pub fn evaluate(&self, prior: &RelState, action: &GroundAction, next: &RelState) -> Result<Reward> {
        let state = match self.eval_over {
            EvalOver::Prior => prior,
            EvalOver::Next => next,
        };
        for (guard, value) in &self.clauses {
            if evaluate(guard, state, Some(action))? {
                return Ok(*value);
            }
        }
        unreachable!("decision list ends with a true guard")
    }

    /// The formula whose satisfaction forces the list to output its maximum.
    ///
    /// With `i` the first clause attaining the maximum, this is
    /// `¬f_1 ∧ … ∧ ¬f_{i-1} ∧ f_i`, or `f_1` itself when `i` is the first clause.
    pub fn maximal_condition(&self) -> Formula {
        let best = self.max_value();
        let i = self.clauses.iter().position(|(_, v)| *v == best).unwrap();
        if i == 0 {
            return self.clauses[0].0.clone();
        }
        let mut parts: Vec<Formula> = self.clauses[..i]
            .iter()
            .map(|(f, _)| Formula::not(f.clone()))
            .collect();
        parts.push(self.clauses[i].0.clone());
        Formula::And(parts)
    }
}

pub fn evaluate_reward(
    reward: &DecisionList,
    prior: &RelState,
    action: &GroundAction,
    next: &RelState,
) -> Result<Reward> {
    reward.evaluate(prior, action, next)
}

pub fn evaluate_termination(
    termination: &DecisionList,
    prior: &RelState,
    action: &GroundAction,
    next: &RelState,
) -> Result<TerminationValue> {
    TerminationValue::try_from(termination.evaluate(prior, action, next)?)
}

pub fn extract_maximal_reward_condition(reward: &DecisionList) -> Formula {
    reward.maximal_condition()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum TerminationValue {
    Failure,
    Continue,
    Success,
}

impl TerminationValue {
    pub fn as_i8(self) -> i8 {
        match self {
            TerminationValue::Failure => -1,
            TerminationValue::Continue => 0,
            TerminationValue::Success => 1,
        }
    }

    pub fn is_terminal(self) -> bool {
        self != TerminationValue::Continue
    }
}

impl TryFrom<Reward> for TerminationValue {
    type Error = Error;

    fn try_from(v: Reward) -> Result<Self> {
        if v == Reward::from_integer(-1) {
            Ok(TerminationValue::Failure)
        } else if v == Reward::from_integer(0) {
            Ok(TerminationValue::Continue)
        } else if v == Reward::from_integer(1) {
            Ok(TerminationValue::Success)
        } else {
            Err(Error::InvalidDomain(format!(
                "termination value {v} is not one of -1, 0, 1"
            )))
        }
    }
}

impl fmt::Display for TerminationValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            TerminationValue::Failure => "FAILURE",
            TerminationValue::Continue => "CONTINUE",
            TerminationValue::Success => "SUCCESS",
        })
    }
}
