//! Snake with two edibles: a healthy seed and a drug.
//!
//! Eating the seed pays `r_c` and grows the snake by one cell. Eating the
//! drug pays `k * r_c` and grows it by `u` cells. Growth is queued in a
//! pending counter and realized by freezing the tail, one cell per step.
//! Running into a wall or into the body ends the game with zero reward, as
//! does going `max_steps_since_food` steps without eating anything.
//!
//! A [`GameState`] owns its random generator, so a state plus an action
//! sequence fully determines the trajectory.

mod geometry;
mod observe;
mod render;

use std::collections::VecDeque;

use rand::Rng as _;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::{rng_from_seed, Rng};

pub use geometry::{Cell, Direction, RelativeAction};
pub use observe::{observe, Bearing, Observation, OBSERVATION_KEYS};
pub use render::{render_ascii, GLYPH_BODY, GLYPH_DRUG, GLYPH_EMPTY, GLYPH_HEAD, GLYPH_SEED};

/// Reward function parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RewardParams {
    /// Reward for a healthy seed.
    pub r_c: f64,
    /// Drug reward multiplier; a drug pays `k * r_c`.
    pub k: f64,
    /// Cells of growth per drug.
    pub u: u32,
}

impl RewardParams {
    pub fn new(r_c: f64, k: f64, u: u32) -> Self {
        Self { r_c, k, u }
    }

    pub fn seed_reward(&self) -> f64 {
        self.r_c
    }

    pub fn drug_reward(&self) -> f64 {
        self.k * self.r_c
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.r_c.is_finite() && self.r_c > 0.0) {
            return Err(Error::Config(format!("r_c must be finite and > 0, got {}", self.r_c)));
        }
        if !(self.k.is_finite() && self.k >= 0.0) {
            return Err(Error::Config(format!("k must be finite and >= 0, got {}", self.k)));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GameConfig {
    /// Grid side length.
    pub n: usize,
    /// Initial snake length `L0`.
    pub initial_length: usize,
    pub reward: RewardParams,
    /// Steps without eating before the game ends as starved.
    pub max_steps_since_food: u32,
    pub rng_seed: u64,
}

impl GameConfig {
    /// Config with the default starvation cap of `2 n^2` steps.
    pub fn new(n: usize, initial_length: usize, reward: RewardParams, rng_seed: u64) -> Self {
        Self {
            n,
            initial_length,
            reward,
            max_steps_since_food: default_starvation_cap(n),
            rng_seed,
        }
    }

    pub fn with_seed(&self, rng_seed: u64) -> Self {
        Self {
            rng_seed,
            ..self.clone()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n < 4 {
            return Err(Error::Config(format!("grid side n must be >= 4, got {}", self.n)));
        }
        if self.n > 256 {
            return Err(Error::Config(format!("grid side n must be <= 256, got {}", self.n)));
        }
        if self.initial_length < 1 || self.initial_length > self.n {
            return Err(Error::Config(format!(
                "initial length L0 must satisfy 1 <= L0 <= n = {}, got {}",
                self.n, self.initial_length
            )));
        }
        if self.max_steps_since_food < 1 {
            return Err(Error::Config("max_steps_since_food must be >= 1".into()));
        }
        self.reward.validate()
    }
}

pub fn default_starvation_cap(n: usize) -> u32 {
    (2 * n * n) as u32
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum StepEvent {
    Moved,
    AteSeed,
    AteDrug,
    HitWall,
    HitSelf,
    Starved,
    /// An object was eaten but no free cell is left to respawn it.
    BoardFull,
}

impl StepEvent {
    pub fn is_terminal(self) -> bool {
        matches!(
            self,
            StepEvent::HitWall | StepEvent::HitSelf | StepEvent::Starved | StepEvent::BoardFull
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StepOutcome {
    pub reward: f64,
    pub terminal: bool,
    pub event: StepEvent,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GameState {
    config: GameConfig,
    /// Head first.
    body: VecDeque<Cell>,
    occupied: Vec<bool>,
    facing: Direction,
    seed_pos: Cell,
    drug_pos: Cell,
    pending_growth: u32,
    steps_since_food: u32,
    steps: u64,
    cumulative_score: f64,
    seeds_eaten: u32,
    drugs_eaten: u32,
    terminal: bool,
    rng: Rng,
}

impl GameState {
    /// Fresh game: snake of length `L0` laid out horizontally in row `n / 2`,
    /// centered, facing right; seed then drug spawned on free cells.
    pub fn new(config: GameConfig) -> Result<Self> {
        config.validate()?;
        let n = config.n as i32;
        let len = config.initial_length as i32;
        let row = n / 2;
        let tail_x = (n - len) / 2;
        let body: Vec<Cell> = (0..len).rev().map(|i| Cell::new(tail_x + i, row)).collect();
        let mut state = Self::blank(config, body, Direction::Right);
        state.seed_pos = state.spawn(None).expect("L0 <= n leaves free cells");
        state.drug_pos = state.spawn(Some(state.seed_pos)).expect("L0 <= n leaves free cells");
        Ok(state)
    }

    /// Builds a state from an explicit layout, for scenario setup and replays.
    ///
    /// The body must be in bounds, distinct and 4-connected (head first), and
    /// the two objects must sit on distinct free cells.
    pub fn from_parts(
        config: GameConfig,
        body: Vec<Cell>,
        facing: Direction,
        seed_pos: Cell,
        drug_pos: Cell,
    ) -> Result<Self> {
        config.validate()?;
        let n = config.n;
        if body.is_empty() {
            return Err(Error::Config("body must have at least one cell".into()));
        }
        let mut seen = vec![false; n * n];
        for (i, &c) in body.iter().enumerate() {
            if !c.in_bounds(n) {
                return Err(Error::Config(format!("body cell {c:?} out of bounds")));
            }
            if std::mem::replace(&mut seen[c.index(n)], true) {
                return Err(Error::Config(format!("body cell {c:?} repeated")));
            }
            if i > 0 && !body[i - 1].is_adjacent(c) {
                return Err(Error::Config(format!("body not contiguous at {c:?}")));
            }
        }
        for obj in [seed_pos, drug_pos] {
            if !obj.in_bounds(n) || seen[obj.index(n)] {
                return Err(Error::Config(format!("object at {obj:?} is not on a free cell")));
            }
        }
        if seed_pos == drug_pos {
            return Err(Error::Config("seed and drug share a cell".into()));
        }
        let mut state = Self::blank(config, body, facing);
        state.seed_pos = seed_pos;
        state.drug_pos = drug_pos;
        Ok(state)
    }

    fn blank(config: GameConfig, body: Vec<Cell>, facing: Direction) -> Self {
        let n = config.n;
        let mut occupied = vec![false; n * n];
        for c in &body {
            occupied[c.index(n)] = true;
        }
        let rng = rng_from_seed(config.rng_seed);
        Self {
            config,
            body: body.into(),
            occupied,
            facing,
            seed_pos: Cell::new(0, 0),
            drug_pos: Cell::new(0, 0),
            pending_growth: 0,
            steps_since_food: 0,
            steps: 0,
            cumulative_score: 0.0,
            seeds_eaten: 0,
            drugs_eaten: 0,
            terminal: false,
            rng,
        }
    }

    /// Uniform draw over cells not covered by the body or by `other`.
    fn spawn(&mut self, other: Option<Cell>) -> Option<Cell> {
        let n = self.config.n;
        let other_idx = other.map(|c| c.index(n));
        let free = self
            .occupied
            .iter()
            .enumerate()
            .filter(|&(i, &occ)| !occ && Some(i) != other_idx)
            .count();
        if free == 0 {
            return None;
        }
        let mut pick = self.rng.gen_range(0..free);
        for (i, &occ) in self.occupied.iter().enumerate() {
            if occ || Some(i) == other_idx {
                continue;
            }
            if pick == 0 {
                return Some(Cell::from_index(i, n));
            }
            pick -= 1;
        }
        unreachable!("free cell count and scan disagree")
    }

    /// Whether moving the head onto `cell` this step would end the game.
    ///
    /// The tail cell is safe when no growth is pending, since it moves away
    /// in the same step.
    pub fn is_deadly(&self, cell: Cell) -> bool {
        if !cell.in_bounds(self.config.n) {
            return true;
        }
        if !self.occupied[cell.index(self.config.n)] {
            return false;
        }
        !(self.pending_growth == 0 && self.body.len() > 1 && Some(&cell) == self.body.back())
    }

    /// Advances the game by one step.
    pub fn step(&mut self, action: RelativeAction) -> Result<StepOutcome> {
        if self.terminal {
            return Err(Error::Usage("step called on a terminal game state".into()));
        }
        let n = self.config.n;
        self.steps += 1;
        self.facing = self.facing.apply(action);
        let target = self.head().offset(self.facing);

        if self.is_deadly(target) {
            let event = if target.in_bounds(n) {
                StepEvent::HitSelf
            } else {
                StepEvent::HitWall
            };
            return Ok(self.finish(0.0, event));
        }

        let (reward, mut event) = if target == self.seed_pos {
            self.seeds_eaten += 1;
            self.pending_growth += 1;
            (self.config.reward.seed_reward(), StepEvent::AteSeed)
        } else if target == self.drug_pos {
            self.drugs_eaten += 1;
            self.pending_growth += self.config.reward.u;
            (self.config.reward.drug_reward(), StepEvent::AteDrug)
        } else {
            (0.0, StepEvent::Moved)
        };
        self.cumulative_score += reward;

        if self.pending_growth > 0 {
            self.pending_growth -= 1;
        } else {
            let tail = self.body.pop_back().expect("body is never empty");
            self.occupied[tail.index(n)] = false;
        }
        self.body.push_front(target);
        self.occupied[target.index(n)] = true;

        match event {
            StepEvent::AteSeed => {
                self.steps_since_food = 0;
                match self.spawn(Some(self.drug_pos)) {
                    Some(c) => self.seed_pos = c,
                    None => event = StepEvent::BoardFull,
                }
            }
            StepEvent::AteDrug => {
                self.steps_since_food = 0;
                match self.spawn(Some(self.seed_pos)) {
                    Some(c) => self.drug_pos = c,
                    None => event = StepEvent::BoardFull,
                }
            }
            _ => {
                self.steps_since_food += 1;
                if self.steps_since_food >= self.config.max_steps_since_food {
                    event = StepEvent::Starved;
                }
            }
        }
        Ok(self.finish(reward, event))
    }

    fn finish(&mut self, reward: f64, event: StepEvent) -> StepOutcome {
        let terminal = event.is_terminal();
        self.terminal = terminal;
        StepOutcome {
            reward,
            terminal,
            event,
        }
    }

    pub fn config(&self) -> &GameConfig {
        &self.config
    }

    pub fn n(&self) -> usize {
        self.config.n
    }

    pub fn head(&self) -> Cell {
        self.body[0]
    }

    pub fn body(&self) -> impl ExactSizeIterator<Item = Cell> + '_ {
        self.body.iter().copied()
    }

    pub fn len(&self) -> usize {
        self.body.len()
    }

    pub fn is_empty(&self) -> bool {
        self.body.is_empty()
    }

    pub fn is_occupied(&self, cell: Cell) -> bool {
        cell.in_bounds(self.config.n) && self.occupied[cell.index(self.config.n)]
    }

    pub fn facing(&self) -> Direction {
        self.facing
    }

    pub fn seed_pos(&self) -> Cell {
        self.seed_pos
    }

    pub fn drug_pos(&self) -> Cell {
        self.drug_pos
    }

    pub fn pending_growth(&self) -> u32 {
        self.pending_growth
    }

    pub fn steps_since_food(&self) -> u32 {
        self.steps_since_food
    }

    pub fn steps(&self) -> u64 {
        self.steps
    }

    pub fn cumulative_score(&self) -> f64 {
        self.cumulative_score
    }

    pub fn seeds_eaten(&self) -> u32 {
        self.seeds_eaten
    }

    pub fn drugs_eaten(&self) -> u32 {
        self.drugs_eaten
    }

    pub fn is_terminal(&self) -> bool {
        self.terminal
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(n: usize, l0: usize, k: f64, u: u32, seed: u64) -> GameConfig {
        GameConfig::new(n, l0, RewardParams::new(20.0, k, u), seed)
    }

    fn scenario(k: f64, u: u32, body: &[(i32, i32)], facing: Direction, seed: (i32, i32), drug: (i32, i32)) -> GameState {
        let body = body.iter().map(|&(x, y)| Cell::new(x, y)).collect();
        GameState::from_parts(
            cfg(8, 4, k, u, 1),
            body,
            facing,
            Cell::new(seed.0, seed.1),
            Cell::new(drug.0, drug.1),
        )
        .unwrap()
    }

    #[test]
    fn new_game_layout() {
        let s = GameState::new(cfg(8, 4, 0.0, 0, 42)).unwrap();
        let body: Vec<Cell> = s.body().collect();
        assert_eq!(body, vec![Cell::new(5, 4), Cell::new(4, 4), Cell::new(3, 4), Cell::new(2, 4)]);
        assert_eq!(s.facing(), Direction::Right);
        assert_ne!(s.seed_pos(), s.drug_pos());
        assert!(!s.is_occupied(s.seed_pos()));
        assert!(!s.is_occupied(s.drug_pos()));
        assert_eq!((s.seeds_eaten(), s.drugs_eaten(), s.steps(), s.pending_growth()), (0, 0, 0, 0));
    }

    #[test]
    fn full_row_snake_leaves_twelve_cells() {
        for seed in 0..20 {
            let s = GameState::new(cfg(4, 4, 0.0, 0, seed)).unwrap();
            assert!(s.body().all(|c| c.y == 2));
            let free = (0..16).filter(|&i| !s.is_occupied(Cell::from_index(i, 4))).count();
            assert_eq!(free, 12);
            assert!(s.seed_pos().y != 2 && s.drug_pos().y != 2);
        }
    }

    #[test]
    fn new_game_is_deterministic() {
        let a = GameState::new(cfg(8, 4, 1.5, 4, 99)).unwrap();
        let b = GameState::new(cfg(8, 4, 1.5, 4, 99)).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn rejects_bad_configs() {
        assert!(matches!(GameState::new(cfg(3, 2, 0.0, 0, 0)), Err(Error::Config(_))));
        assert!(matches!(GameState::new(cfg(8, 9, 0.0, 0, 0)), Err(Error::Config(_))));
        assert!(matches!(GameState::new(cfg(8, 0, 0.0, 0, 0)), Err(Error::Config(_))));
        let mut c = cfg(8, 4, 0.0, 0, 0);
        c.max_steps_since_food = 0;
        assert!(GameState::new(c).is_err());
        assert!(GameState::new(cfg(8, 4, -1.0, 0, 0)).is_err());
    }

    #[test]
    fn eating_seed_pays_r_c_and_grows() {
        let mut s = scenario(0.0, 0, &[(3, 3), (2, 3), (1, 3)], Direction::Right, (4, 3), (0, 0));
        let out = s.step(RelativeAction::Straight).unwrap();
        assert_eq!(out, StepOutcome { reward: 20.0, terminal: false, event: StepEvent::AteSeed });
        assert_eq!(s.len(), 4);
        assert_eq!(s.head(), Cell::new(4, 3));
        assert_ne!(s.seed_pos(), Cell::new(4, 3));
        assert!(!s.is_occupied(s.seed_pos()));
        assert_eq!(s.steps_since_food(), 0);
    }

    #[test]
    fn drug_pays_k_r_c_and_queues_growth() {
        let mut s = scenario(1.5, 4, &[(3, 3), (2, 3), (1, 3)], Direction::Right, (0, 0), (4, 3));
        let out = s.step(RelativeAction::Straight).unwrap();
        assert_eq!(out.reward, 30.0);
        assert_eq!(out.event, StepEvent::AteDrug);
        // One of the four growth cells is realized on the eating step.
        assert_eq!(s.pending_growth(), 3);
        assert_eq!(s.len(), 4);
        for _ in 0..3 {
            s.step(RelativeAction::Right).unwrap();
            s.step(RelativeAction::Left).unwrap();
            if s.pending_growth() == 0 {
                break;
            }
        }
        assert_eq!(s.len() as u32 + s.pending_growth(), 3 + 4);

        let mut s = scenario(6.0, 8, &[(3, 3), (2, 3), (1, 3)], Direction::Right, (0, 0), (4, 3));
        assert_eq!(s.step(RelativeAction::Straight).unwrap().reward, 120.0);
    }

    #[test]
    fn wall_is_terminal_with_zero_reward() {
        let mut s = scenario(0.0, 0, &[(7, 3), (6, 3), (5, 3)], Direction::Right, (0, 0), (1, 1));
        let out = s.step(RelativeAction::Straight).unwrap();
        assert_eq!(out, StepOutcome { reward: 0.0, terminal: true, event: StepEvent::HitWall });
        assert!(matches!(s.step(RelativeAction::Left), Err(Error::Usage(_))));
    }

    #[test]
    fn self_collision() {
        // U-shaped body; turning right from (2,2) facing up runs into (3,2).
        let mut s = scenario(
            0.0,
            0,
            &[(2, 2), (2, 3), (3, 3), (3, 2), (3, 1)],
            Direction::Up,
            (0, 0),
            (7, 7),
        );
        let out = s.step(RelativeAction::Right).unwrap();
        assert_eq!(out.event, StepEvent::HitSelf);
        assert!(out.terminal);
    }

    #[test]
    fn chasing_the_tail_is_legal_without_growth() {
        // 2x2 loop: head (1,1) facing up; tail at (2,1) vacates this step.
        let mut s = scenario(0.0, 0, &[(1, 1), (1, 2), (2, 2), (2, 1)], Direction::Left, (5, 5), (6, 6));
        let out = s.step(RelativeAction::Right).unwrap(); // now facing up -> (1,0): plain move
        assert_eq!(out.event, StepEvent::Moved);
        let mut s = scenario(0.0, 0, &[(1, 1), (1, 2), (2, 2), (2, 1)], Direction::Down, (5, 5), (6, 6));
        // Facing down at (1,1): left turn -> facing right -> (2,1) == tail.
        let out = s.step(RelativeAction::Left).unwrap();
        assert_eq!(out.event, StepEvent::Moved);
        assert_eq!(s.head(), Cell::new(2, 1));
    }

    #[test]
    fn starvation_cap() {
        let mut c = cfg(8, 1, 0.0, 0, 3);
        c.max_steps_since_food = 3;
        let mut s = GameState::from_parts(c, vec![Cell::new(0, 0)], Direction::Right, Cell::new(7, 7), Cell::new(7, 6))
            .unwrap();
        assert_eq!(s.step(RelativeAction::Straight).unwrap().event, StepEvent::Moved);
        assert_eq!(s.step(RelativeAction::Straight).unwrap().event, StepEvent::Moved);
        let out = s.step(RelativeAction::Straight).unwrap();
        assert_eq!(out.event, StepEvent::Starved);
        assert!(out.terminal);
        assert_eq!(out.reward, 0.0);
    }

    #[test]
    fn baseline_drug_respawns_with_no_reward_or_growth() {
        let mut s = scenario(0.0, 0, &[(3, 3), (2, 3), (1, 3)], Direction::Right, (0, 0), (4, 3));
        let out = s.step(RelativeAction::Straight).unwrap();
        assert_eq!(out.reward, 0.0);
        assert_eq!(out.event, StepEvent::AteDrug);
        assert_eq!(s.len(), 3);
        assert_eq!(s.drugs_eaten(), 1);
        assert_ne!(s.drug_pos(), Cell::new(4, 3));
        assert!(!s.is_occupied(s.drug_pos()));
    }

    #[test]
    fn board_full_ends_the_game() {
        // 4x4 board, snake covers 14 cells; eating the seed leaves no room for a new one.
        let mut body = Vec::new();
        for y in 0..4 {
            let row: Vec<i32> = if y % 2 == 0 { (0..4).collect() } else { (0..4).rev().collect() };
            for x in row {
                body.push(Cell::new(x, y));
            }
        }
        body.reverse(); // head at (0,3)
        let seed = body[0];
        let drug = body[1];
        let body: Vec<Cell> = body[2..].to_vec();
        // Growth keeps the tail, so the drug's old cell is the only one left.
        let c = cfg(4, 4, 1.0, 1, 0);
        let mut s = GameState::from_parts(c, body, Direction::Left, seed, drug).unwrap();
        let out = s.step(RelativeAction::Straight).unwrap();
        assert_eq!(out.event, StepEvent::BoardFull);
        assert!(out.terminal);
    }
}
