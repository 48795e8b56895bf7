use serde::{Deserialize, Serialize};

use super::Cell;

/// The episode's mutable truth: where everyone is, where they must go, and
/// how far along the episode is.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WorldState {
    pub positions: Vec<Cell>,
    pub goals: Vec<Cell>,
    pub t: usize,
    /// Per-agent "currently standing on its goal" flag.
    pub done_flags: Vec<bool>,
}

impl WorldState {
    pub fn new(positions: Vec<Cell>, goals: Vec<Cell>) -> Self {
        assert_eq!(positions.len(), goals.len());
        let done_flags = positions
            .iter()
            .zip(&goals)
            .map(|(p, g)| p == g)
            .collect();
        WorldState {
            positions,
            goals,
            t: 0,
            done_flags,
        }
    }

    pub fn agent_count(&self) -> usize {
        self.positions.len()
    }

    pub fn all_on_goals(&self) -> bool {
        self.done_flags.iter().all(|&d| d)
    }

    pub(crate) fn refresh_done_flags(&mut self) {
        for i in 0..self.positions.len() {
            self.done_flags[i] = self.positions[i] == self.goals[i];
        }
    }
}
