//! The infinite empty grid with a single rewarding cell at the origin.

use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::mdp::{Mdp, Transition};
use crate::reward::{Reward, TerminationValue};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct GridState {
    pub x: i64,
    pub y: i64,
}

impl GridState {
    pub const ORIGIN: GridState = GridState { x: 0, y: 0 };

    pub fn manhattan(self) -> u64 {
        self.x.unsigned_abs() + self.y.unsigned_abs()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum GridAction {
    Up,
    Down,
    Left,
    Right,
}

impl GridAction {
    pub const ALL: [GridAction; 4] = [GridAction::Up, GridAction::Down, GridAction::Left, GridAction::Right];

    pub fn delta(self) -> (i64, i64) {
        match self {
            GridAction::Up => (0, 1),
            GridAction::Down => (0, -1),
            GridAction::Left => (-1, 0),
            GridAction::Right => (1, 0),
        }
    }

    pub fn inverse(self) -> GridAction {
        match self {
            GridAction::Up => GridAction::Down,
            GridAction::Down => GridAction::Up,
            GridAction::Left => GridAction::Right,
            GridAction::Right => GridAction::Left,
        }
    }
}

impl fmt::Display for GridAction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            GridAction::Up => "UP",
            GridAction::Down => "DOWN",
            GridAction::Left => "LEFT",
            GridAction::Right => "RIGHT",
        })
    }
}

/// `s' = s + a`; reward +1 on entering the origin and -1 otherwise. Episodes
/// always last exactly `horizon` steps.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct GridMdp {
    pub start: GridState,
    pub horizon: usize,
}

impl GridMdp {
    pub fn new(start: GridState, horizon: usize) -> Self {
        GridMdp { start, horizon }
    }

    /// Uses the horizon `2(d - 1)`.
    pub fn for_distance(start: GridState, d: usize) -> Self {
        GridMdp::new(start, horizon_for(d))
    }

    pub fn transition(s: GridState, a: GridAction) -> Transition<GridState, GridAction> {
        let (dx, dy) = a.delta();
        let next = GridState {
            x: s.x + dx,
            y: s.y + dy,
        };
        Transition {
            action: a,
            next,
            reward: Reward::from_integer(if next == GridState::ORIGIN { 1 } else { -1 }),
            status: TerminationValue::Continue,
        }
    }
}

impl Mdp for GridMdp {
    type State = GridState;
    type Action = GridAction;

    fn initial(&self) -> GridState {
        self.start
    }

    fn horizon(&self) -> usize {
        self.horizon
    }

    fn successors(&self, s: &GridState) -> Vec<Transition<GridState, GridAction>> {
        GridAction::ALL.iter().map(|&a| GridMdp::transition(*s, a)).collect()
    }

    fn step(&self, s: &GridState, a: &GridAction) -> Result<Transition<GridState, GridAction>> {
        Ok(GridMdp::transition(*s, *a))
    }

    fn fixed_horizon(&self) -> bool {
        true
    }

    fn max_reward(&self) -> Reward {
        Reward::from_integer(1)
    }
}

pub fn horizon_for(d: usize) -> usize {
    2 * d.saturating_sub(1)
}

/// Best achievable return from distance `d` in exactly `h` steps: reach the
/// origin after `d` steps, then re-enter it every second step.
pub fn optimal_return(d: usize, h: usize) -> Reward {
    let arrivals = if d == 0 {
        h / 2
    } else if h >= d {
        1 + (h - d) / 2
    } else {
        0
    };
    Reward::from_integer(2 * arrivals as i64 - h as i64)
}

/// Every step penalized.
pub fn worst_return(h: usize) -> Reward {
    Reward::from_integer(-(h as i64))
}

/// A uniform sample from the cells at L1 distance `d` from the origin.
pub fn gen_grid(d: usize, seed: u64) -> GridState {
    assert!(d >= 1, "grid distance must be positive");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let k = rng.gen_range(0..4 * d);
    let (q, i) = ((k / d) as i64, (k % d) as i64);
    let d = d as i64;
    match q {
        0 => GridState { x: d - i, y: i },
        1 => GridState { x: -i, y: d - i },
        2 => GridState { x: -(d - i), y: -i },
        _ => GridState { x: i, y: -(d - i) },
    }
}
