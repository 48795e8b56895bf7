use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::formation::{formation_loss, FormationSpec, Positions};

use super::{Action, Cell, CostMap, GridMap, WorldState};

/// Formation counts as "kept" when the loss falls below this; the bonus is
/// paid at most once per episode.
pub const KEEP_FORMATION_EPS: f64 = 1e-6;

/// Per-step reward, one column per policy.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RewardVector {
    pub path: f64,
    pub formation: f64,
    pub meta: f64,
}

/// Conflicts among simultaneous moves from `cur` to `next`.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ConflictReport {
    /// Pairs of agents targeting the same cell, with the contested cell.
    pub vertex: Vec<(usize, usize, Cell)>,
    /// Pairs of agents exchanging cells in one step.
    pub swap: Vec<(usize, usize)>,
}

impl ConflictReport {
    pub fn is_empty(&self) -> bool {
        self.vertex.is_empty() && self.swap.is_empty()
    }

    /// Every agent involved in any conflict.
    pub fn agents(&self) -> Vec<usize> {
        let mut out: Vec<usize> = self
            .vertex
            .iter()
            .flat_map(|&(a, b, _)| [a, b])
            .chain(self.swap.iter().flat_map(|&(a, b)| [a, b]))
            .collect();
        out.sort_unstable();
        out.dedup();
        out
    }
}

/// Detects vertex conflicts (two agents target the same cell) and swap
/// conflicts (two agents exchange adjacent cells) for one transition. This
/// single checker backs both the simulator and plan validation.
pub fn detect_conflicts(cur: &[Cell], next: &[Cell]) -> ConflictReport {
    assert_eq!(cur.len(), next.len());
    let mut report = ConflictReport::default();
    let mut by_target: HashMap<Cell, Vec<usize>> = HashMap::new();
    for (i, &c) in next.iter().enumerate() {
        by_target.entry(c).or_default().push(i);
    }
    let mut groups: Vec<(Cell, Vec<usize>)> = by_target
        .into_iter()
        .filter(|(_, v)| v.len() > 1)
        .collect();
    groups.sort_by_key(|(c, _)| (c.y, c.x));
    for (cell, agents) in groups {
        for w in 0..agents.len() {
            for v in w + 1..agents.len() {
                report.vertex.push((agents[w], agents[v], cell));
            }
        }
    }
    for i in 0..cur.len() {
        for j in i + 1..cur.len() {
            if cur[i] != cur[j] && next[i] == cur[j] && next[j] == cur[i] {
                report.swap.push((i, j));
            }
        }
    }
    report
}

/// What a single transition produced, beyond the new world state.
#[derive(Debug, Clone)]
pub struct StepInfo {
    /// Agents that were involved in a conflict and bounced back.
    pub collided: Vec<bool>,
    /// Agents whose position changed.
    pub moved: Vec<bool>,
    /// Agents whose cost-map value strictly decreased.
    pub toward_goal: Vec<bool>,
    /// Formation loss of the post-step configuration.
    pub formation_loss: f64,
    /// True when the keep-formation bonus was paid this step.
    pub kept_formation: bool,
    pub all_on_goals: bool,
}

#[derive(Debug, Clone)]
pub struct StepResult {
    pub world: WorldState,
    pub rewards: Vec<RewardVector>,
    pub done: bool,
    pub info: StepInfo,
}

/// Applies one simultaneous joint action.
///
/// Agents involved in vertex or swap conflicts do not move; the bounce
/// cascades until the configuration is consistent, and every bounced agent
/// takes the collision penalty in all three reward columns. Loss terms enter
/// as penalties: `-L_f` in the formation column and `-w_f * L_f` in the meta
/// column.
///
/// `keep_already_awarded` carries the once-per-episode state for the
/// keep-formation bonus; `episode_limit` bounds the episode in steps.
#[allow(clippy::too_many_arguments)]
pub fn step(
    world: &WorldState,
    map: &GridMap,
    cost_maps: &[CostMap],
    formation: &FormationSpec,
    w_f: f64,
    joint_action: &[Action],
    episode_limit: usize,
    keep_already_awarded: bool,
) -> StepResult {
    let k = world.agent_count();
    assert_eq!(joint_action.len(), k, "joint action must cover every agent");

    let cur = &world.positions;
    let mut next: Vec<Cell> = (0..k)
        .map(|i| {
            let target = joint_action[i].apply(cur[i]);
            if map.is_free(target) {
                target
            } else {
                cur[i]
            }
        })
        .collect();

    let mut collided = vec![false; k];
    loop {
        let report = detect_conflicts(cur, &next);
        if report.is_empty() {
            break;
        }
        for a in report.agents() {
            collided[a] = true;
            next[a] = cur[a];
        }
    }

    let moved: Vec<bool> = (0..k).map(|i| next[i] != cur[i]).collect();
    let toward_goal: Vec<bool> = (0..k)
        .map(|i| cost_maps[i].cost(next[i]) < cost_maps[i].cost(cur[i]))
        .collect();

    let loss = if k >= 2 {
        formation_loss(
            &Positions(next.iter().map(|c| c.as_point()).collect()),
            &formation.positions(),
        )
    } else {
        0.0
    };

    let all_on_goals = (0..k).all(|i| next[i] == world.goals[i]);
    let kept_formation = !keep_already_awarded && loss < KEEP_FORMATION_EPS;

    let rewards: Vec<RewardVector> = (0..k)
        .map(|i| {
            let mut r = RewardVector {
                path: 0.0,
                formation: 0.0,
                meta: 0.0,
            };
            if collided[i] {
                r.path += -50.0;
                r.formation += -50.0;
                r.meta += -50.0;
            }
            if toward_goal[i] {
                r.path += 1.0;
                r.meta += 1.0;
            }
            if !moved[i] {
                r.path += -0.25;
                r.formation += -0.25;
            }
            if all_on_goals {
                r.path += 100.0;
            }
            r.formation += -loss;
            r.meta += -w_f * loss;
            if kept_formation {
                r.formation += 100.0;
            }
            r
        })
        .collect();

    let mut new_world = world.clone();
    new_world.positions = next;
    new_world.t = world.t + 1;
    new_world.refresh_done_flags();

    let done = all_on_goals || new_world.t >= episode_limit;

    StepResult {
        world: new_world,
        rewards,
        done,
        info: StepInfo {
            collided,
            moved,
            toward_goal,
            formation_loss: loss,
            kept_formation,
            all_on_goals,
        },
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::compute_cost_map;

    fn fixture(positions: Vec<Cell>, goals: Vec<Cell>) -> (GridMap, WorldState, Vec<CostMap>) {
        let map = GridMap::empty(10, 10);
        let world = WorldState::new(positions, goals);
        let cms = world
            .goals
            .iter()
            .map(|&g| compute_cost_map(&map, g).unwrap())
            .collect();
        (map, world, cms)
    }

    #[test]
    fn all_stay_out_of_formation() {
        let (map, world, cms) = fixture(
            vec![Cell::new(2, 2), Cell::new(2, 5)],
            vec![Cell::new(8, 8), Cell::new(9, 8)],
        );
        let spec = FormationSpec::line(2);
        let expected_loss = formation_loss(
            &Positions(vec![[2.0, 2.0], [2.0, 5.0]]),
            &spec.positions(),
        );
        let res = step(
            &world,
            &map,
            &cms,
            &spec,
            1.0,
            &[Action::Stay, Action::Stay],
            30,
            false,
        );
        for r in &res.rewards {
            assert_eq!(r.path, -0.25);
            assert!((r.formation - (-0.25 - expected_loss)).abs() < 1e-12);
            assert!((r.meta - (-expected_loss)).abs() < 1e-12);
        }
    }

    #[test]
    fn swap_bounces_both_with_collision_penalty() {
        let (map, world, cms) = fixture(
            vec![Cell::new(2, 2), Cell::new(3, 2)],
            vec![Cell::new(8, 8), Cell::new(9, 8)],
        );
        let spec = FormationSpec::line(2);
        let res = step(
            &world,
            &map,
            &cms,
            &spec,
            1.0,
            &[Action::Right, Action::Left],
            30,
            true,
        );
        assert_eq!(res.world.positions, world.positions);
        for (i, r) in res.rewards.iter().enumerate() {
            assert!(res.info.collided[i]);
            // Collision plus no-movement in the path column.
            assert_eq!(r.path, -50.25);
            assert_eq!(r.meta, -50.0 - res.info.formation_loss);
        }
    }

    #[test]
    fn vertex_conflict_includes_stationary_agent() {
        let (map, world, cms) = fixture(
            vec![Cell::new(2, 2), Cell::new(3, 2)],
            vec![Cell::new(8, 8), Cell::new(9, 8)],
        );
        let res = step(
            &world,
            &map,
            &cms,
            &FormationSpec::line(2),
            0.0,
            &[Action::Right, Action::Stay],
            30,
            true,
        );
        assert_eq!(res.world.positions, world.positions);
        assert!(res.info.collided[0] && res.info.collided[1]);
    }

    #[test]
    fn following_a_vacating_agent_is_legal() {
        let (map, world, cms) = fixture(
            vec![Cell::new(2, 2), Cell::new(3, 2)],
            vec![Cell::new(8, 2), Cell::new(9, 2)],
        );
        let res = step(
            &world,
            &map,
            &cms,
            &FormationSpec::line(2),
            0.0,
            &[Action::Right, Action::Right],
            30,
            true,
        );
        assert_eq!(
            res.world.positions,
            vec![Cell::new(3, 2), Cell::new(4, 2)]
        );
        assert!(!res.info.collided[0] && !res.info.collided[1]);
    }

    #[test]
    fn bounce_cascades_into_followers() {
        // Agents 0 and 1 contest (5,5); agent 2 follows agent 1 and must
        // bounce as well once agent 1 stays put.
        let (map, world, cms) = fixture(
            vec![Cell::new(4, 5), Cell::new(5, 6), Cell::new(5, 7)],
            vec![Cell::new(9, 9), Cell::new(8, 9), Cell::new(7, 9)],
        );
        let res = step(
            &world,
            &map,
            &cms,
            &FormationSpec::line(3),
            0.0,
            &[Action::Right, Action::Up, Action::Up],
            30,
            true,
        );
        assert_eq!(res.world.positions, world.positions);
        assert_eq!(res.info.collided, vec![true, true, true]);
    }

    #[test]
    fn finishing_awards_everyone_in_the_path_column() {
        let (map, world, cms) = fixture(
            vec![Cell::new(8, 8), Cell::new(9, 7)],
            vec![Cell::new(8, 8), Cell::new(9, 8)],
        );
        let res = step(
            &world,
            &map,
            &cms,
            &FormationSpec::line(2),
            0.0,
            &[Action::Stay, Action::Down],
            30,
            true,
        );
        assert!(res.done && res.info.all_on_goals);
        // The mover gets +1 (toward goal) + 100 (finish).
        assert_eq!(res.rewards[1].path, 101.0);
        // The waiting agent gets finish minus the no-movement penalty.
        assert_eq!(res.rewards[0].path, 99.75);
    }

    #[test]
    fn keep_formation_paid_once() {
        let (map, world, cms) = fixture(
            vec![Cell::new(2, 2), Cell::new(3, 2)],
            vec![Cell::new(8, 8), Cell::new(9, 8)],
        );
        let spec = FormationSpec::line(2);
        let res = step(
            &world,
            &map,
            &cms,
            &spec,
            1.0,
            &[Action::Stay, Action::Stay],
            30,
            false,
        );
        assert!(res.info.kept_formation);
        assert_eq!(res.rewards[0].formation, -0.25 + 100.0);
        let res2 = step(
            &res.world,
            &map,
            &cms,
            &spec,
            1.0,
            &[Action::Stay, Action::Stay],
            30,
            true,
        );
        assert!(!res2.info.kept_formation);
        assert_eq!(res2.rewards[0].formation, -0.25);
    }

    #[test]
    fn episode_ends_at_limit() {
        let (map, mut world, cms) = fixture(
            vec![Cell::new(2, 2), Cell::new(3, 2)],
            vec![Cell::new(8, 8), Cell::new(9, 8)],
        );
        world.t = 29;
        let res = step(
            &world,
            &map,
            &cms,
            &FormationSpec::line(2),
            0.0,
            &[Action::Stay, Action::Stay],
            30,
            true,
        );
        assert!(res.done && !res.info.all_on_goals);
    }

    #[test]
    #[should_panic(expected = "joint action must cover every agent")]
    fn malformed_joint_action_panics() {
        let (map, world, cms) = fixture(
            vec![Cell::new(2, 2), Cell::new(3, 2)],
            vec![Cell::new(8, 8), Cell::new(9, 8)],
        );
        let _ = step(
            &world,
            &map,
            &cms,
            &FormationSpec::line(2),
            0.0,
            &[Action::Stay],
            30,
            true,
        );
    }
}
