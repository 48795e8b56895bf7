use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::{Cell, GridError, GridMap, FOV};

/// Longest allowed straight run of obstacle cells: half the field of view,
/// so an agent always sees past a wall end.
pub const MAX_WALL_RUN: usize = FOV / 2;

const MAX_ATTEMPTS: usize = 100;

/// Generates a square map with `round(density * size^2)` obstacles placed by
/// seeded rejection sampling. Start and goal regions are kept obstacle-free,
/// and no horizontal or vertical obstacle run exceeds [`MAX_WALL_RUN`].
/// Deterministic for a fixed `(size, density, seed)` triple.
pub fn generate_map(size: usize, density: f64, seed: u64) -> Result<GridMap, GridError> {
    assert!(size >= 10, "map size must be at least 10");
    assert!(
        (0.0..0.5).contains(&density),
        "obstacle density must lie in [0, 0.5)"
    );

    let target = (density * (size * size) as f64).round() as usize;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    for _ in 0..MAX_ATTEMPTS {
        let mut map = GridMap::empty(size, size);
        let mut candidates: Vec<Cell> = (0..size as i32)
            .flat_map(|y| (0..size as i32).map(move |x| Cell::new(x, y)))
            .filter(|&c| !map.start_region.contains(c) && !map.goal_region.contains(c))
            .collect();
        candidates.shuffle(&mut rng);

        let mut placed = 0;
        for c in candidates {
            if placed == target {
                break;
            }
            if run_after_insert(&map, c) <= MAX_WALL_RUN {
                map.set_obstacle(c, true);
                placed += 1;
            }
        }
        if placed == target {
            return Ok(map);
        }
    }

    Err(GridError::GenerationFailed {
        size,
        density,
        attempts: MAX_ATTEMPTS,
    })
}

/// Longest straight run through `c` if it became an obstacle.
fn run_after_insert(map: &GridMap, c: Cell) -> usize {
    let count = |dx: i32, dy: i32| {
        let mut n = 0;
        let mut cur = c.offset(dx, dy);
        while map.in_bounds(cur) && map.is_obstacle(cur) {
            n += 1;
            cur = cur.offset(dx, dy);
        }
        n
    };
    let horizontal = count(-1, 0) + 1 + count(1, 0);
    let vertical = count(0, -1) + 1 + count(0, 1);
    horizontal.max(vertical)
}
