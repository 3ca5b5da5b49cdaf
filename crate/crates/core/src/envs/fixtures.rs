//! Small hand-written states used by tests and golden checks.

use crate::fol::syntax::parse_state;
use crate::state::RelState;

/// Four blocks with `a` stacked on `d`.
pub fn fig3a_state() -> RelState {
    parse_state(include_str!("../../fixtures/fig3a.state")).expect("fixture parses")
}

/// Two open bins holding one item each.
pub fn bins_2x2_state() -> RelState {
    parse_state(include_str!("../../fixtures/bins_2x2.state")).expect("fixture parses")
}
