//! Milestone enumeration by introspecting first-order reward models, with a
//! bilevel planner and the baselines it is compared against.

pub mod bench;
pub mod domain;
pub mod envs;
pub mod error;
pub mod fol;
pub mod introspector;
pub mod mdp;
pub mod mutation;
pub mod planners;
pub mod reward;
pub mod state;
pub mod symbol;

pub use error::{Error, Result};
