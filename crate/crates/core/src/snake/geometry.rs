use serde::{Deserialize, Serialize};

/// A grid cell; `x` grows to the right, `y` grows downward.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Cell {
    pub x: i32,
    pub y: i32,
}

impl Cell {
    pub const fn new(x: i32, y: i32) -> Self {
        Self { x, y }
    }

    pub fn offset(self, dir: Direction) -> Self {
        let (dx, dy) = dir.delta();
        Self::new(self.x + dx, self.y + dy)
    }

    pub fn in_bounds(self, n: usize) -> bool {
        let n = n as i32;
        self.x >= 0 && self.x < n && self.y >= 0 && self.y < n
    }

    /// Row-major index; only meaningful for in-bounds cells.
    pub fn index(self, n: usize) -> usize {
        self.y as usize * n + self.x as usize
    }

    pub fn from_index(index: usize, n: usize) -> Self {
        Self::new((index % n) as i32, (index / n) as i32)
    }

    pub fn is_adjacent(self, other: Cell) -> bool {
        (self.x - other.x).abs() + (self.y - other.y).abs() == 1
    }
}

/// Absolute heading of the snake.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Direction {
    Up,
    Right,
    Down,
    Left,
}

impl Direction {
    pub const ALL: [Direction; 4] = [Direction::Up, Direction::Right, Direction::Down, Direction::Left];

    pub fn delta(self) -> (i32, i32) {
        match self {
            Direction::Up => (0, -1),
            Direction::Right => (1, 0),
            Direction::Down => (0, 1),
            Direction::Left => (-1, 0),
        }
    }

    pub fn turn_left(self) -> Self {
        match self {
            Direction::Up => Direction::Left,
            Direction::Left => Direction::Down,
            Direction::Down => Direction::Right,
            Direction::Right => Direction::Up,
        }
    }

    pub fn turn_right(self) -> Self {
        match self {
            Direction::Up => Direction::Right,
            Direction::Right => Direction::Down,
            Direction::Down => Direction::Left,
            Direction::Left => Direction::Up,
        }
    }

    pub fn apply(self, action: RelativeAction) -> Self {
        match action {
            RelativeAction::Left => self.turn_left(),
            RelativeAction::Straight => self,
            RelativeAction::Right => self.turn_right(),
        }
    }

    pub fn index(self) -> usize {
        match self {
            Direction::Up => 0,
            Direction::Right => 1,
            Direction::Down => 2,
            Direction::Left => 3,
        }
    }

    pub fn from_index(i: usize) -> Option<Self> {
        Self::ALL.get(i).copied()
    }
}

/// Steering command relative to the current heading.
///
/// There is no "reverse" action, so the head can never turn back into the neck.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum RelativeAction {
    Left,
    Straight,
    Right,
}

impl RelativeAction {
    pub const COUNT: usize = 3;
    pub const ALL: [RelativeAction; 3] = [RelativeAction::Left, RelativeAction::Straight, RelativeAction::Right];

    pub fn index(self) -> usize {
        match self {
            RelativeAction::Left => 0,
            RelativeAction::Straight => 1,
            RelativeAction::Right => 2,
        }
    }

    pub fn from_index(i: usize) -> Option<Self> {
        Self::ALL.get(i).copied()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn turns_are_inverse() {
        for d in Direction::ALL {
            assert_eq!(d.turn_left().turn_right(), d);
            assert_eq!(d.turn_left().turn_left().turn_left().turn_left(), d);
            assert_eq!(Direction::from_index(d.index()), Some(d));
        }
    }

    #[test]
    fn index_round_trip() {
        for i in 0..25 {
            let c = Cell::from_index(i, 5);
            assert!(c.in_bounds(5));
            assert_eq!(c.index(5), i);
        }
        assert!(!Cell::new(-1, 0).in_bounds(5));
        assert!(!Cell::new(0, 5).in_bounds(5));
    }
}
