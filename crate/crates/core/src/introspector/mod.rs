//! The bilevel planner: an outer best-first search over milestones, each
//! reached by an inner greedy search toward one mutation.

mod bilevel;
mod grid;
mod inner;

pub use bilevel::{introspector_plan, IntrospectorConfig, IntrospectorResult};
pub use grid::grid_introspector_plan;
pub use inner::{inner_goal_search, InnerResult};
