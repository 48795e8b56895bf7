use crate::formation::{formation_loss, FormationSpec, Positions};

use super::{
    compute_cost_map, observe, step, Action, ActionSet, Cell, CostMap, GridError, GridMap,
    Observation, PriorActions, Rect, StepResult, WorldState,
};

/// Episodes run for three times the map side length.
pub fn episode_limit(size: usize) -> usize {
    3 * size
}

/// A concrete problem instance: map, team size, desired shape, and the
/// start/goal cells derived by anchoring the shape at the region centers.
#[derive(Debug, Clone)]
pub struct Scenario {
    pub map: GridMap,
    pub formation: FormationSpec,
    pub starts: Vec<Cell>,
    pub goals: Vec<Cell>,
}

impl Scenario {
    /// Places the formation at the center of the start region and the center
    /// of the goal region. Fails if any derived cell is blocked, out of
    /// bounds, or duplicated.
    pub fn anchored(map: GridMap, formation: FormationSpec) -> Result<Self, GridError> {
        let starts = place_formation(&map, &formation, map.start_region)?;
        let goals = place_formation(&map, &formation, map.goal_region)?;
        Ok(Scenario {
            map,
            formation,
            starts,
            goals,
        })
    }

    /// Same map and formation with explicit start/goal cells.
    pub fn with_positions(
        map: GridMap,
        formation: FormationSpec,
        starts: Vec<Cell>,
        goals: Vec<Cell>,
    ) -> Result<Self, GridError> {
        let k = formation.len();
        if starts.len() != k || goals.len() != k {
            return Err(GridError::PlacementFailed {
                agents: k,
                reason: "start/goal count differs from formation size".into(),
            });
        }
        for &c in starts.iter().chain(goals.iter()) {
            if !map.is_free(c) {
                return Err(GridError::PlacementFailed {
                    agents: k,
                    reason: format!("cell {c} is blocked or out of bounds"),
                });
            }
        }
        for (i, &a) in starts.iter().enumerate() {
            for &b in &starts[i + 1..] {
                if a == b {
                    return Err(GridError::PlacementFailed {
                        agents: k,
                        reason: format!("duplicate start cell {a}"),
                    });
                }
            }
        }
        Ok(Scenario {
            map,
            formation,
            starts,
            goals,
        })
    }

    pub fn agent_count(&self) -> usize {
        self.formation.len()
    }

    pub fn episode_limit(&self) -> usize {
        episode_limit(self.map.size())
    }
}

/// Formation cells translated so the shape centroid lands on the region
/// center.
pub fn place_formation(
    map: &GridMap,
    formation: &FormationSpec,
    region: Rect,
) -> Result<Vec<Cell>, GridError> {
    let k = formation.len();
    if k == 0 {
        return Err(GridError::PlacementFailed {
            agents: 0,
            reason: "empty formation".into(),
        });
    }
    let centered = formation.centered();
    let center = region.center();
    let cells: Vec<Cell> = centered
        .iter()
        .map(|p| {
            Cell::new(
                center.x + p[0].round() as i32,
                center.y + p[1].round() as i32,
            )
        })
        .collect();
    for &c in &cells {
        if !map.is_free(c) {
            return Err(GridError::PlacementFailed {
                agents: k,
                reason: format!("formation cell {c} is blocked or out of bounds"),
            });
        }
    }
    for (i, &a) in cells.iter().enumerate() {
        for &b in &cells[i + 1..] {
            if a == b {
                return Err(GridError::PlacementFailed {
                    agents: k,
                    reason: format!("formation collapses onto cell {a}"),
                });
            }
        }
    }
    Ok(cells)
}

/// One running episode: world state plus everything `step` needs, with the
/// per-episode keep-formation bookkeeping.
#[derive(Debug, Clone)]
pub struct Sim {
    pub map: GridMap,
    pub cost_maps: Vec<CostMap>,
    pub formation: FormationSpec,
    pub w_f: f64,
    pub world: WorldState,
    pub limit: usize,
    keep_awarded: bool,
    done: bool,
}

impl Sim {
    pub fn new(scenario: &Scenario, w_f: f64) -> Result<Self, GridError> {
        Self::with_starts(scenario, scenario.starts.clone(), w_f)
    }

    /// Starts the episode from explicit positions (training spawns).
    pub fn with_starts(scenario: &Scenario, starts: Vec<Cell>, w_f: f64) -> Result<Self, GridError> {
        let cost_maps = scenario
            .goals
            .iter()
            .map(|&g| compute_cost_map(&scenario.map, g))
            .collect::<Result<Vec<_>, _>>()?;
        let world = WorldState::new(starts, scenario.goals.clone());
        Ok(Sim {
            limit: scenario.episode_limit(),
            map: scenario.map.clone(),
            cost_maps,
            formation: scenario.formation.clone(),
            w_f,
            world,
            keep_awarded: false,
            done: false,
        })
    }

    pub fn agent_count(&self) -> usize {
        self.world.agent_count()
    }

    pub fn done(&self) -> bool {
        self.done
    }

    pub fn observe(&self, agent: usize, prior: PriorActions) -> Observation {
        observe(
            &self.world,
            &self.map,
            &self.cost_maps,
            &self.formation,
            agent,
            prior,
        )
    }

    pub fn valid_actions(&self, agent: usize) -> ActionSet {
        self.map.valid_moves(self.world.positions[agent])
    }

    /// Current formation loss against the desired shape (0 for one agent).
    pub fn formation_loss(&self) -> f64 {
        if self.agent_count() < 2 {
            return 0.0;
        }
        formation_loss(
            &Positions(self.world.positions.iter().map(|c| c.as_point()).collect()),
            &self.formation.positions(),
        )
    }

    pub fn step(&mut self, joint: &[Action]) -> StepResult {
        let result = step(
            &self.world,
            &self.map,
            &self.cost_maps,
            &self.formation,
            self.w_f,
            joint,
            self.limit,
            self.keep_awarded,
        );
        self.world = result.world.clone();
        if result.info.kept_formation {
            self.keep_awarded = true;
        }
        self.done = result.done;
        result
    }
}
