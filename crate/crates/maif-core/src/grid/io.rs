//! Text formats for maps and scenarios.
//!
//! Map file: first line `width height`, then `height` rows of `width`
//! characters (`.` free, `#` obstacle), optionally followed by
//! `start x0 y0 x1 y1` and `goal x0 y0 x1 y1` region lines. Regions default
//! to the size-appropriate corners when омitted.
//!
//! Scenario file: `key value` lines for `map` (path to a map file),
//! `agents`, `formation` (flat list of x y offsets), and `seed`.

use std::path::{Path, PathBuf};

use crate::formation::FormationSpec;

use super::{Cell, GridError, GridMap, Rect};

pub fn write_map(map: &GridMap) -> String {
    let mut out = format!("{} {}\n", map.width, map.height);
    for y in 0..map.height as i32 {
        for x in 0..map.width as i32 {
            out.push(if map.is_obstacle(Cell::new(x, y)) {
                '#'
            } else {
                '.'
            });
        }
        out.push('\n');
    }
    let s = map.start_region;
    let g = map.goal_region;
    out.push_str(&format!("start {} {} {} {}\n", s.x0, s.y0, s.x1, s.y1));
    out.push_str(&format!("goal {} {} {} {}\n", g.x0, g.y0, g.x1, g.y1));
    out
}

pub fn parse_map(text: &str) -> Result<GridMap, GridError> {
    let mut lines = text.lines().filter(|l| !l.trim().is_empty());
    let header = lines
        .next()
        .ok_or_else(|| GridError::Parse("empty map file".into()))?;
    let mut parts = header.split_whitespace();
    let width: usize = parse_field(parts.next(), "width")?;
    let height: usize = parse_field(parts.next(), "height")?;

    let mut map = GridMap::empty(width, height);
    for y in 0..height {
        let row = lines
            .next()
            .ok_or_else(|| GridError::Parse(format!("missing map row {y}")))?;
        let row = row.trim_end();
        if row.chars().count() != width {
            return Err(GridError::Parse(format!(
                "row {y} has {} cells, expected {width}",
                row.chars().count()
            )));
        }
        for (x, ch) in row.chars().enumerate() {
            match ch {
                '.' => {}
                '#' => map.set_obstacle(Cell::new(x as i32, y as i32), true),
                other => {
                    return Err(GridError::Parse(format!(
                        "unexpected map character {other:?} at ({x},{y})"
                    )))
                }
            }
        }
    }

    for line in lines {
        let mut parts = line.split_whitespace();
        let kind = parts.next().unwrap_or_default();
        let rect = |mut p: std::str::SplitWhitespace<'_>| -> Result<Rect, GridError> {
            Ok(Rect::new(
                parse_field(p.next(), "x0")?,
                parse_field(p.next(), "y0")?,
                parse_field(p.next(), "x1")?,
                parse_field(p.next(), "y1")?,
            ))
        };
        match kind {
            "start" => map.start_region = rect(parts)?,
            "goal" => map.goal_region = rect(parts)?,
            other => return Err(GridError::Parse(format!("unknown trailer line {other:?}"))),
        }
    }
    Ok(map)
}

fn parse_field<T: std::str::FromStr>(field: Option<&str>, name: &str) -> Result<T, GridError> {
    field
        .ok_or_else(|| GridError::Parse(format!("missing {name}")))?
        .parse()
        .map_err(|_| GridError::Parse(format!("bad {name}")))
}

/// A scenario file: which map to load and how to populate it.
#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioFile {
    pub map_path: PathBuf,
    pub agents: usize,
    pub formation: FormationSpec,
    pub seed: u64,
}

pub fn write_scenario(sc: &ScenarioFile) -> String {
    let offsets: Vec<String> = sc
        .formation
        .offsets
        .iter()
        .map(|(x, y)| format!("{x} {y}"))
        .collect();
    format!(
        "map {}\nagents {}\nformation {}\nseed {}\n",
        sc.map_path.display(),
        sc.agents,
        offsets.join(" "),
        sc.seed
    )
}

pub fn parse_scenario(text: &str) -> Result<ScenarioFile, GridError> {
    let mut map_path = None;
    let mut agents = None;
    let mut formation = None;
    let mut seed = 0u64;
    for line in text.lines() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (key, rest) = line
            .split_once(char::is_whitespace)
            .ok_or_else(|| GridError::Parse(format!("bad scenario line {line:?}")))?;
        match key {
            "map" => map_path = Some(PathBuf::from(rest.trim())),
            "agents" => {
                agents = Some(
                    rest.trim()
                        .parse()
                        .map_err(|_| GridError::Parse("bad agent count".into()))?,
                )
            }
            "formation" => {
                let nums: Result<Vec<i32>, _> =
                    rest.split_whitespace().map(|t| t.parse()).collect();
                let nums = nums.map_err(|_| GridError::Parse("bad formation offsets".into()))?;
                if nums.len() % 2 != 0 || nums.is_empty() {
                    return Err(GridError::Parse(
                        "formation needs an even, nonzero number of coordinates".into(),
                    ));
                }
                formation = Some(FormationSpec::new(
                    nums.chunks(2).map(|c| (c[0], c[1])).collect(),
                ));
            }
            "seed" => {
                seed = rest
                    .trim()
                    .parse()
                    .map_err(|_| GridError::Parse("bad seed".into()))?
            }
            other => return Err(GridError::Parse(format!("unknown scenario key {other:?}"))),
        }
    }
    let map_path = map_path.ok_or_else(|| GridError::Parse("scenario missing map".into()))?;
    let formation = formation.ok_or_else(|| GridError::Parse("scenario missing formation".into()))?;
    let agents = agents.unwrap_or(formation.len());
    if agents != formation.len() {
        return Err(GridError::Parse(format!(
            "agent count {agents} does not match formation size {}",
            formation.len()
        )));
    }
    Ok(ScenarioFile {
        map_path,
        agents,
        formation,
        seed,
    })
}

impl ScenarioFile {
    /// Loads the referenced map, resolving a relative path against `base`.
    pub fn load_map(&self, base: &Path) -> Result<GridMap, GridError> {
        let path = if self.map_path.is_absolute() {
            self.map_path.clone()
        } else {
            base.join(&self.map_path)
        };
        let text = std::fs::read_to_string(path)?;
        parse_map(&text)
    }
}
