//! Compact featurization used as the Q-table key.
//!
//! An observation holds three danger flags (left, ahead, right of the head,
//! relative to the heading), the bearing of each object in the snake's own
//! frame, and the absolute heading. Everything behind the head's immediate
//! neighbourhood is aliased away, so two states that differ only in the far
//! part of the body observe identically.
//!
//! Key encoding (11 bits, see [`Observation::key`]):
//!
//! | bits  | field        |
//! |-------|--------------|
//! | 0     | danger_left  |
//! | 1     | danger_ahead |
//! | 2     | danger_right |
//! | 3..6  | seed bearing |
//! | 6..9  | drug bearing |
//! | 9..11 | facing (Up=0, Right=1, Down=2, Left=3) |

use serde::{Deserialize, Serialize};

use super::{Cell, Direction, GameState};

/// Number of distinct observation keys.
pub const OBSERVATION_KEYS: usize = 1 << 11;

/// Octant of an object relative to the head, in the snake's frame.
///
/// Determined by the signs of the forward and rightward components of the
/// head-to-object offset.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Bearing {
    Ahead,
    AheadRight,
    Right,
    BehindRight,
    Behind,
    BehindLeft,
    Left,
    AheadLeft,
}

impl Bearing {
    pub const ALL: [Bearing; 8] = [
        Bearing::Ahead,
        Bearing::AheadRight,
        Bearing::Right,
        Bearing::BehindRight,
        Bearing::Behind,
        Bearing::BehindLeft,
        Bearing::Left,
        Bearing::AheadLeft,
    ];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn from_index(i: usize) -> Option<Self> {
        Self::ALL.get(i).copied()
    }

    /// Bearing of `target` seen from `head` while moving along `facing`.
    pub fn of(head: Cell, facing: Direction, target: Cell) -> Self {
        let (dx, dy) = (target.x - head.x, target.y - head.y);
        let (fx, fy) = facing.delta();
        let (rx, ry) = facing.turn_right().delta();
        let forward = (dx * fx + dy * fy).signum();
        let right = (dx * rx + dy * ry).signum();
        match (forward, right) {
            (1, 0) => Bearing::Ahead,
            (1, 1) => Bearing::AheadRight,
            (0, 1) => Bearing::Right,
            (-1, 1) => Bearing::BehindRight,
            (-1, 0) => Bearing::Behind,
            (-1, -1) => Bearing::BehindLeft,
            (0, -1) => Bearing::Left,
            (1, -1) => Bearing::AheadLeft,
            // Objects never share the head's cell; treat it as straight ahead.
            _ => Bearing::Ahead,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Observation {
    pub danger_left: bool,
    pub danger_ahead: bool,
    pub danger_right: bool,
    pub seed: Bearing,
    pub drug: Bearing,
    pub facing: Direction,
}

impl Observation {
    pub fn key(&self) -> u16 {
        (self.danger_left as u16)
            | (self.danger_ahead as u16) << 1
            | (self.danger_right as u16) << 2
            | (self.seed.index() as u16) << 3
            | (self.drug.index() as u16) << 6
            | (self.facing.index() as u16) << 9
    }

    pub fn from_key(key: u16) -> Option<Self> {
        if key as usize >= OBSERVATION_KEYS {
            return None;
        }
        let k = key as usize;
        Some(Self {
            danger_left: k & 1 != 0,
            danger_ahead: k & 2 != 0,
            danger_right: k & 4 != 0,
            seed: Bearing::from_index((k >> 3) & 7)?,
            drug: Bearing::from_index((k >> 6) & 7)?,
            facing: Direction::from_index((k >> 9) & 3)?,
        })
    }
}

pub fn observe(state: &GameState) -> Observation {
    let head = state.head();
    let facing = state.facing();
    Observation {
        danger_left: state.is_deadly(head.offset(facing.turn_left())),
        danger_ahead: state.is_deadly(head.offset(facing)),
        danger_right: state.is_deadly(head.offset(facing.turn_right())),
        seed: Bearing::of(head, facing, state.seed_pos()),
        drug: Bearing::of(head, facing, state.drug_pos()),
        facing,
    }
}
