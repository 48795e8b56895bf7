use std::collections::VecDeque;

use serde::{Deserialize, Serialize};

use super::{Cell, GridError, GridMap, ACTIONS};

/// Sentinel distance for obstacle or unreachable cells.
pub const COST_INF: u32 = u32::MAX;

/// Exact 4-connected shortest-path distance from every cell to one goal,
/// precomputed once per (map, goal) pair.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CostMap {
    pub width: usize,
    pub height: usize,
    pub goal: Cell,
    dist: Vec<u32>,
}

impl CostMap {
    /// Distance in steps; `COST_INF` for obstacles, unreachable cells, and
    /// anything off the map.
    pub fn cost(&self, c: Cell) -> u32 {
        if c.x < 0 || c.y < 0 || c.x as usize >= self.width || c.y as usize >= self.height {
            return COST_INF;
        }
        self.dist[c.y as usize * self.width + c.x as usize]
    }
}

/// Breadth-first distances over free cells toward `goal`.
pub fn compute_cost_map(map: &GridMap, goal: Cell) -> Result<CostMap, GridError> {
    if !map.is_free(goal) {
        return Err(GridError::InvalidGoal(goal));
    }
    let mut dist = vec![COST_INF; map.width * map.height];
    let idx = |c: Cell| c.y as usize * map.width + c.x as usize;
    dist[idx(goal)] = 0;
    let mut queue = VecDeque::new();
    queue.push_back(goal);
    while let Some(c) = queue.pop_front() {
        let d = dist[idx(c)];
        for a in ACTIONS {
            let n = a.apply(c);
            if n == c || !map.is_free(n) {
                continue;
            }
            if dist[idx(n)] == COST_INF {
                dist[idx(n)] = d + 1;
                queue.push_back(n);
            }
        }
    }
    Ok(CostMap {
        width: map.width,
        height: map.height,
        goal,
        dist,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_map_distances_are_manhattan() {
        let map = GridMap::empty(5, 5);
        let cm = compute_cost_map(&map, Cell::new(0, 0)).unwrap();
        assert_eq!(cm.cost(Cell::new(4, 4)), 8);
        assert_eq!(cm.cost(Cell::new(0, 0)), 0);
        assert_eq!(cm.cost(Cell::new(3, 1)), 4);
    }

    #[test]
    fn obstacles_and_outside_are_infinite() {
        let mut map = GridMap::empty(4, 4);
        map.set_obstacle(Cell::new(1, 1), true);
        let cm = compute_cost_map(&map, Cell::new(0, 0)).unwrap();
        assert_eq!(cm.cost(Cell::new(1, 1)), COST_INF);
        assert_eq!(cm.cost(Cell::new(-1, 0)), COST_INF);
        assert_eq!(cm.cost(Cell::new(0, 4)), COST_INF);
    }

    #[test]
    fn goal_on_obstacle_is_an_error() {
        let mut map = GridMap::empty(4, 4);
        map.set_obstacle(Cell::new(2, 2), true);
        assert!(matches!(
            compute_cost_map(&map, Cell::new(2, 2)),
            Err(GridError::InvalidGoal(_))
        ));
    }

    #[test]
    fn neighbor_costs_differ_by_at_most_one() {
        let mut map = GridMap::empty(8, 8);
        for y in 0..4 {
            map.set_obstacle(Cell::new(3, y), true);
        }
        let cm = compute_cost_map(&map, Cell::new(7, 0)).unwrap();
        for y in 0..8 {
            for x in 0..8 {
                let c = Cell::new(x, y);
                if !map.is_free(c) || cm.cost(c) == COST_INF {
                    continue;
                }
                for a in ACTIONS {
                    let n = a.apply(c);
                    if n == c || !map.is_free(n) || cm.cost(n) == COST_INF {
                        continue;
                    }
                    let (a, b) = (cm.cost(c) as i64, cm.cost(n) as i64);
                    assert!((a - b).abs() <= 1, "cost jump between {c} and {n}");
                }
            }
        }
    }
}
