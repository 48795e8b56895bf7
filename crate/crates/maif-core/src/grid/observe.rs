use crate::formation::FormationSpec;

use super::{Action, Cell, CostMap, GridMap, WorldState, COST_INF};

/// Side length of the square field of view.
pub const FOV: usize = 9;

/// Ordered list of (agent id, action) pairs already decided this timestep.
pub type PriorActions = Vec<(usize, Action)>;

/// One agent's partial view: four FOV x FOV channels cropped around the
/// agent, plus the actions of teammates that already decided this step.
///
/// Channel encodings (all in [0, 1]):
/// - `obstacle`: 1 for obstacle cells; cells outside the map read as 1.
/// - `position`: `(id + 1) / (k + 1)` where an agent stands, 0 elsewhere.
/// - `cost`: shortest-path distance to this agent's goal, with unreachable
///   and off-map cells at the ceiling `2 * size`, then divided by `2 * size`.
/// - `formation`: 1 on the cells teammates should occupy if the desired
///   shape were anchored on this agent's own slot.
#[derive(Debug, Clone, PartialEq)]
pub struct Observation {
    pub obstacle: Vec<f64>,
    pub position: Vec<f64>,
    pub cost: Vec<f64>,
    pub formation: Vec<f64>,
    pub prior_actions: PriorActions,
}

impl Observation {
    pub fn channel_len() -> usize {
        FOV * FOV
    }

    /// Index of the observing agent's own cell inside a channel.
    pub fn center_index() -> usize {
        (FOV / 2) * FOV + FOV / 2
    }

    /// Channel index of the cell one `action` step from the center.
    pub fn offset_index(action: Action) -> usize {
        let (dx, dy) = action.delta();
        let half = (FOV / 2) as i32;
        ((half + dy) * FOV as i32 + half + dx) as usize
    }

    /// Normalized cost at the center and at each action's target cell, in
    /// action-index order. This is all an agent needs for action clipping.
    pub fn cost_at_center(&self) -> f64 {
        self.cost[Self::center_index()]
    }

    pub fn cost_after(&self, action: Action) -> f64 {
        self.cost[Self::offset_index(action)]
    }
}

/// Builds agent `agent_id`'s observation of the current world.
pub fn observe(
    world: &WorldState,
    map: &GridMap,
    cost_maps: &[CostMap],
    formation: &FormationSpec,
    agent_id: usize,
    prior_actions: PriorActions,
) -> Observation {
    let k = world.agent_count();
    assert!(agent_id < k, "agent {agent_id} not live in world");
    let center = world.positions[agent_id];
    let half = (FOV / 2) as i32;
    let n = FOV * FOV;

    let mut obstacle = vec![0.0; n];
    let mut position = vec![0.0; n];
    let mut cost = vec![0.0; n];
    let mut formation_ch = vec![0.0; n];

    let cost_ceiling = (2 * map.size()) as f64;
    let cm = &cost_maps[agent_id];

    let mut occupied = std::collections::HashMap::new();
    for (id, &p) in world.positions.iter().enumerate() {
        occupied.insert(p, id);
    }

    for dy in -half..=half {
        for dx in -half..=half {
            let cell = center.offset(dx, dy);
            let idx = ((dy + half) * FOV as i32 + dx + half) as usize;
            if map.is_obstacle(cell) {
                obstacle[idx] = 1.0;
            }
            let d = cm.cost(cell);
            cost[idx] = if d == COST_INF {
                1.0
            } else {
                (d as f64).min(cost_ceiling) / cost_ceiling
            };
            if let Some(&id) = occupied.get(&cell) {
                position[idx] = (id + 1) as f64 / (k + 1) as f64;
            }
        }
    }

    // Desired cells relative to the observing agent's own slot: teammate j
    // belongs at p_self + (d_j - d_self).
    let own = formation.offsets[agent_id];
    for &(ox, oy) in &formation.offsets {
        let (dx, dy) = (ox - own.0, oy - own.1);
        if dx.abs() <= half && dy.abs() <= half {
            let idx = ((dy + half) * FOV as i32 + dx + half) as usize;
            formation_ch[idx] = 1.0;
        }
    }

    Observation {
        obstacle,
        position,
        cost,
        formation: formation_ch,
        prior_actions,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::compute_cost_map;

    fn setup(positions: Vec<Cell>, goals: Vec<Cell>, map: &GridMap) -> (WorldState, Vec<CostMap>) {
        let world = WorldState::new(positions, goals);
        let cms = world
            .goals
            .iter()
            .map(|&g| compute_cost_map(map, g).unwrap())
            .collect();
        (world, cms)
    }

    #[test]
    fn corner_agent_sees_outside_as_obstacle() {
        let map = GridMap::empty(10, 10);
        let (world, cms) = setup(vec![Cell::new(0, 0)], vec![Cell::new(9, 9)], &map);
        let obs = observe(&world, &map, &cms, &FormationSpec::line(1), 0, vec![]);
        // 4 rows above and 4 columns left of the corner are off the map:
        // 81 - 25 in-map cells = 56 padded obstacle cells.
        let padded = obs.obstacle.iter().filter(|&&v| v == 1.0).count();
        assert_eq!(padded, 56);
    }

    #[test]
    fn lone_agent_marks_only_itself() {
        let map = GridMap::empty(10, 10);
        let (world, cms) = setup(vec![Cell::new(5, 5)], vec![Cell::new(9, 9)], &map);
        let obs = observe(&world, &map, &cms, &FormationSpec::line(1), 0, vec![]);
        let nonzero: Vec<usize> = (0..81).filter(|&i| obs.position[i] != 0.0).collect();
        assert_eq!(nonzero, vec![Observation::center_index()]);
        assert_eq!(obs.position[Observation::center_index()], 1.0 / 2.0);
    }

    #[test]
    fn teammates_appear_at_relative_offsets() {
        let map = GridMap::empty(10, 10);
        let (world, cms) = setup(
            vec![Cell::new(4, 4), Cell::new(7, 4)],
            vec![Cell::new(8, 8), Cell::new(9, 8)],
            &map,
        );
        let spec = FormationSpec::line(2);
        let obs0 = observe(&world, &map, &cms, &spec, 0, vec![]);
        // Agent 1 sits 3 cells to the right of agent 0.
        let idx = (4 * FOV as i32 + 4 + 3) as usize;
        assert_eq!(obs0.position[idx], 2.0 / 3.0);
        let obs1 = observe(&world, &map, &cms, &spec, 1, vec![]);
        let idx_back = (4 * FOV as i32 + 4 - 3) as usize;
        assert_eq!(obs1.position[idx_back], 1.0 / 3.0);
    }

    #[test]
    fn cost_channel_normalized_and_centered() {
        let map = GridMap::empty(10, 10);
        let (world, cms) = setup(vec![Cell::new(5, 5)], vec![Cell::new(5, 6)], &map);
        let obs = observe(&world, &map, &cms, &FormationSpec::line(1), 0, vec![]);
        assert_eq!(obs.cost_at_center(), 1.0 / 20.0);
        assert_eq!(obs.cost_after(Action::Down), 0.0);
        assert_eq!(obs.cost_after(Action::Up), 2.0 / 20.0);
    }

    #[test]
    fn formation_channel_anchored_on_own_slot() {
        let map = GridMap::empty(10, 10);
        let (world, cms) = setup(
            vec![Cell::new(4, 4), Cell::new(6, 6)],
            vec![Cell::new(8, 8), Cell::new(9, 8)],
            &map,
        );
        let spec = FormationSpec::line(2);
        let obs = observe(&world, &map, &cms, &spec, 0, vec![]);
        assert_eq!(obs.formation[Observation::center_index()], 1.0);
        assert_eq!(obs.formation[Observation::offset_index(Action::Right)], 1.0);
        assert_eq!(obs.formation.iter().filter(|&&v| v == 1.0).count(), 2);
    }

    #[test]
    fn prior_actions_pass_through() {
        let map = GridMap::empty(10, 10);
        let (world, cms) = setup(
            vec![Cell::new(4, 4), Cell::new(6, 6)],
            vec![Cell::new(8, 8), Cell::new(9, 8)],
            &map,
        );
        let prior = vec![(0, Action::Up)];
        let obs = observe(
            &world,
            &map,
            &cms,
            &FormationSpec::line(2),
            1,
            prior.clone(),
        );
        assert_eq!(obs.prior_actions, prior);
    }
}
