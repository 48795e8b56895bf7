//! Discrete grid world: maps, cost maps, partial observations, and the
//! simultaneous-move transition dynamics with the three reward columns
//! (path finding, formation, meta).

mod cost;
mod dynamics;
mod generate;
mod io;
mod observe;
mod scenario;
mod world;

pub use cost::{compute_cost_map, CostMap, COST_INF};
pub use dynamics::{detect_conflicts, step, ConflictReport, RewardVector, StepInfo, StepResult,
                   KEEP_FORMATION_EPS};
pub use generate::generate_map;
pub use io::{parse_map, parse_scenario, write_map, write_scenario, ScenarioFile};
pub use observe::{observe, Observation, PriorActions, FOV};
pub use scenario::{episode_limit, Scenario, Sim};
pub use world::WorldState;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Grid cell coordinate; `x` is the column, `y` the row, origin top-left.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Cell {
    pub x: i32,
    pub y: i32,
}

impl Cell {
    pub fn new(x: i32, y: i32) -> Self {
        Cell { x, y }
    }

    pub fn offset(self, dx: i32, dy: i32) -> Self {
        Cell::new(self.x + dx, self.y + dy)
    }

    pub fn as_point(self) -> [f64; 2] {
        [self.x as f64, self.y as f64]
    }
}

impl std::fmt::Display for Cell {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{},{}", self.x, self.y)
    }
}

/// The five primitive moves. `Up` decreases `y` (toward the top row).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Action {
    Up,
    Down,
    Left,
    Right,
    Stay,
}

pub const ACTIONS: [Action; 5] = [
    Action::Up,
    Action::Down,
    Action::Left,
    Action::Right,
    Action::Stay,
];

impl Action {
    pub fn delta(self) -> (i32, i32) {
        match self {
            Action::Up => (0, -1),
            Action::Down => (0, 1),
            Action::Left => (-1, 0),
            Action::Right => (1, 0),
            Action::Stay => (0, 0),
        }
    }

    pub fn index(self) -> usize {
        match self {
            Action::Up => 0,
            Action::Down => 1,
            Action::Left => 2,
            Action::Right => 3,
            Action::Stay => 4,
        }
    }

    pub fn from_index(i: usize) -> Action {
        ACTIONS[i]
    }

    pub fn apply(self, c: Cell) -> Cell {
        let (dx, dy) = self.delta();
        c.offset(dx, dy)
    }
}

impl std::fmt::Display for Action {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            Action::Up => "U",
            Action::Down => "D",
            Action::Left => "L",
            Action::Right => "R",
            Action::Stay => "S",
        };
        f.write_str(s)
    }
}

/// Small bitmask over action indices (also reused for the 2-action meta
/// policy, where only bits 0 and 1 are meaningful).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ActionSet(pub u8);

impl ActionSet {
    pub fn empty() -> Self {
        ActionSet(0)
    }

    pub fn all() -> Self {
        ActionSet(0b11111)
    }

    pub fn first_n(n: usize) -> Self {
        ActionSet(((1u16 << n) - 1) as u8)
    }

    pub fn insert(&mut self, a: Action) {
        self.0 |= 1 << a.index();
    }

    pub fn insert_index(&mut self, i: usize) {
        self.0 |= 1 << i;
    }

    pub fn contains(&self, a: Action) -> bool {
        self.contains_index(a.index())
    }

    pub fn contains_index(&self, i: usize) -> bool {
        self.0 & (1 << i) != 0
    }

    pub fn len(&self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_empty(&self) -> bool {
        self.0 == 0
    }

    pub fn iter(&self) -> impl Iterator<Item = Action> + '_ {
        let mask = self.0;
        ACTIONS
            .iter()
            .copied()
            .filter(move |a| mask & (1 << a.index()) != 0)
    }

    pub fn indices(&self) -> impl Iterator<Item = usize> + '_ {
        let mask = self.0;
        (0..8).filter(move |i| mask & (1 << i) != 0)
    }
}

/// Inclusive axis-aligned rectangle of cells.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Rect {
    pub x0: i32,
    pub y0: i32,
    pub x1: i32,
    pub y1: i32,
}

impl Rect {
    pub fn new(x0: i32, y0: i32, x1: i32, y1: i32) -> Self {
        Rect { x0, y0, x1, y1 }
    }

    pub fn contains(&self, c: Cell) -> bool {
        c.x >= self.x0 && c.x <= self.x1 && c.y >= self.y0 && c.y <= self.y1
    }

    pub fn center(&self) -> Cell {
        Cell::new((self.x0 + self.x1) / 2, (self.y0 + self.y1) / 2)
    }

    pub fn cells(&self) -> impl Iterator<Item = Cell> + '_ {
        let (x0, x1, y0, y1) = (self.x0, self.x1, self.y0, self.y1);
        (y0..=y1).flat_map(move |y| (x0..=x1).map(move |x| Cell::new(x, y)))
    }

    pub fn area(&self) -> usize {
        ((self.x1 - self.x0 + 1) * (self.y1 - self.y0 + 1)).max(0) as usize
    }
}

#[derive(Debug, Error)]
pub enum GridError {
    #[error("map generation failed after {attempts} attempts (size {size}, density {density})")]
    GenerationFailed {
        size: usize,
        density: f64,
        attempts: usize,
    },
    #[error("goal cell {0} is an obstacle or out of bounds")]
    InvalidGoal(Cell),
    #[error("cannot place {agents} agents: {reason}")]
    PlacementFailed { agents: usize, reason: String },
    #[error("map parse error: {0}")]
    Parse(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Static obstacle grid plus start/goal placement regions.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridMap {
    pub width: usize,
    pub height: usize,
    /// Row-major; `true` = obstacle.
    cells: Vec<bool>,
    pub start_region: Rect,
    pub goal_region: Rect,
}

impl GridMap {
    /// Empty map with the default corner regions for its size.
    pub fn empty(width: usize, height: usize) -> Self {
        let side = Self::region_side(width.max(height)) as i32;
        let (w, h) = (width as i32, height as i32);
        GridMap {
            width,
            height,
            cells: vec![false; width * height],
            start_region: Rect::new(0, 0, side - 1, side - 1),
            goal_region: Rect::new(w - side, h - side, w - 1, h - 1),
        }
    }

    /// 5x5 corner regions up to size 32, 10x10 beyond.
    pub fn region_side(size: usize) -> usize {
        if size <= 32 {
            5
        } else {
            10
        }
    }

    pub fn in_bounds(&self, c: Cell) -> bool {
        c.x >= 0 && c.y >= 0 && (c.x as usize) < self.width && (c.y as usize) < self.height
    }

    /// Out-of-bounds cells read as obstacles.
    pub fn is_obstacle(&self, c: Cell) -> bool {
        if !self.in_bounds(c) {
            return true;
        }
        self.cells[c.y as usize * self.width + c.x as usize]
    }

    pub fn is_free(&self, c: Cell) -> bool {
        self.in_bounds(c) && !self.is_obstacle(c)
    }

    pub fn set_obstacle(&mut self, c: Cell, obstacle: bool) {
        assert!(self.in_bounds(c), "cell {c} out of bounds");
        self.cells[c.y as usize * self.width + c.x as usize] = obstacle;
    }

    pub fn obstacle_count(&self) -> usize {
        self.cells.iter().filter(|&&b| b).count()
    }

    pub fn index(&self, c: Cell) -> u32 {
        (c.y as usize * self.width + c.x as usize) as u32
    }

    pub fn cell_at(&self, idx: u32) -> Cell {
        Cell::new(
            (idx as usize % self.width) as i32,
            (idx as usize / self.width) as i32,
        )
    }

    pub fn size(&self) -> usize {
        self.width.max(self.height)
    }

    /// Length of the longest maximal straight (horizontal or vertical) run of
    /// obstacle cells. Generated maps keep this at or below half the field of
    /// view so a formation is never fully severed visually.
    pub fn max_wall_run(&self) -> usize {
        let mut best = 0;
        for y in 0..self.height as i32 {
            let mut run = 0;
            for x in 0..self.width as i32 {
                if self.is_obstacle(Cell::new(x, y)) {
                    run += 1;
                    best = best.max(run);
                } else {
                    run = 0;
                }
            }
        }
        for x in 0..self.width as i32 {
            let mut run = 0;
            for y in 0..self.height as i32 {
                if self.is_obstacle(Cell::new(x, y)) {
                    run += 1;
                    best = best.max(run);
                } else {
                    run = 0;
                }
            }
        }
        best
    }

    /// The set of moves from `pos` that stay on the map and off obstacles.
    /// `Stay` is always valid; other agents do not block here, conflicts are
    /// resolved by the transition dynamics.
    pub fn valid_moves(&self, pos: Cell) -> ActionSet {
        let mut set = ActionSet::empty();
        for a in ACTIONS {
            if a == Action::Stay || self.is_free(a.apply(pos)) {
                set.insert(a);
            }
        }
        set
    }
}

/// Valid actions for a live agent: subset of the five actions excluding moves
/// off-map or into obstacles; `Stay` is always included.
pub fn valid_actions(world: &WorldState, map: &GridMap, agent: usize) -> ActionSet {
    map.valid_moves(world.positions[agent])
}
