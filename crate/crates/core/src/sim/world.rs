//! Grid world: obstacles, shelves, named locations and robots.

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::SimError;
use crate::pddl::State;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Cell(pub i32, pub i32);

impl fmt::Display for Cell {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{},{}", self.0, self.1)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    pub width: i32,
    pub height: i32,
    #[serde(default)]
    pub blocked: BTreeSet<Cell>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Shelf {
    pub id: String,
    pub cell: Cell,
    pub capacity: f64,
    #[serde(default)]
    pub contents: BTreeMap<String, f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RobotSpec {
    pub id: String,
    pub cell: Cell,
    #[serde(default)]
    pub skills: BTreeMap<String, f64>,
    /// Distance travelled so far.
    #[serde(default)]
    pub travel: f64,
}

/// A skill demand read from a fluent, e.g. `carry` = `(value-of ?m)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScaledSkill {
    pub skill: String,
    pub function: String,
    /// Parameter index passed to `function`.
    pub arg: usize,
}

/// How an action schema translates into skill demands and a route.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ActionSkills {
    /// Parameter naming a place visited before the target (pick-up point).
    #[serde(default)]
    pub via: Option<usize>,
    /// Parameter naming the place where the subtask completes.
    pub target: usize,
    #[serde(default)]
    pub skills: BTreeMap<String, f64>,
    #[serde(default)]
    pub scaled: Vec<ScaledSkill>,
}

/// Fluent names that mirror shelf contents in the symbolic state.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Inventory {
    pub amount: String,
    pub free_space: String,
}

fn default_speed() -> f64 {
    1.0
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct World {
    pub grid: Grid,
    /// Cells per time unit.
    #[serde(default = "default_speed")]
    pub speed: f64,
    #[serde(default)]
    pub shelves: Vec<Shelf>,
    #[serde(default)]
    pub locations: BTreeMap<String, Cell>,
    pub robots: Vec<RobotSpec>,
    #[serde(default)]
    pub actions: BTreeMap<String, ActionSkills>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub inventory: Option<Inventory>,
}

const NEIGHBOURS: [(i32, i32); 4] = [(1, 0), (-1, 0), (0, 1), (0, -1)];

impl World {
    pub fn from_json(text: &str) -> Result<Self, SimError> {
        let world: World = serde_json::from_str(text).map_err(|e| SimError::InvalidWorld(e.to_string()))?;
        world.check()?;
        Ok(world)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("world serializes")
    }

    fn check(&self) -> Result<(), SimError> {
        let bad = |m: String| Err(SimError::InvalidWorld(m));
        if self.grid.width <= 0 || self.grid.height <= 0 {
            return bad("grid must have positive size".into());
        }
        if !(self.speed > 0.0 && self.speed.is_finite()) {
            return bad("speed must be positive".into());
        }
        let mut ids = BTreeSet::new();
        for r in &self.robots {
            if !ids.insert(r.id.as_str()) {
                return bad(format!("duplicate robot '{}'", r.id));
            }
            if !self.is_free(r.cell) {
                return bad(format!("robot '{}' starts on unusable cell {}", r.id, r.cell));
            }
            if r.skills.values().any(|v| !v.is_finite() || *v < 0.0) {
                return bad(format!("robot '{}' has a negative skill level", r.id));
            }
        }
        let mut places = BTreeSet::new();
        for s in &self.shelves {
            if !places.insert(s.id.as_str()) {
                return bad(format!("duplicate place '{}'", s.id));
            }
            if !self.is_free(s.cell) {
                return bad(format!("shelf '{}' on unusable cell {}", s.id, s.cell));
            }
            let held: f64 = s.contents.values().sum();
            if held > s.capacity + 1e-9 {
                return bad(format!("shelf '{}' holds {held} over capacity {}", s.id, s.capacity));
            }
        }
        for (name, cell) in &self.locations {
            if !places.insert(name.as_str()) {
                return bad(format!("duplicate place '{name}'"));
            }
            if !self.is_free(*cell) {
                return bad(format!("location '{name}' on unusable cell {cell}"));
            }
        }
        Ok(())
    }

    pub fn in_bounds(&self, c: Cell) -> bool {
        c.0 >= 0 && c.1 >= 0 && c.0 < self.grid.width && c.1 < self.grid.height
    }

    pub fn is_free(&self, c: Cell) -> bool {
        self.in_bounds(c) && !self.grid.blocked.contains(&c)
    }

    pub fn robot(&self, id: &str) -> Option<&RobotSpec> {
        self.robots.iter().find(|r| r.id == id)
    }

    pub fn robot_ids(&self) -> Vec<String> {
        self.robots.iter().map(|r| r.id.clone()).collect()
    }

    /// Cell of a shelf or named location.
    pub fn cell_of(&self, place: &str) -> Option<Cell> {
        self.shelves.iter().find(|s| s.id == place).map(|s| s.cell).or_else(|| self.locations.get(place).copied())
    }

    fn index(&self, c: Cell) -> usize {
        (c.1 * self.grid.width + c.0) as usize
    }

    /// BFS predecessor table rooted at `from`.
    fn bfs(&self, from: Cell) -> Vec<Option<(Cell, u32)>> {
        let mut seen: Vec<Option<(Cell, u32)>> = vec![None; (self.grid.width * self.grid.height) as usize];
        if !self.is_free(from) {
            return seen;
        }
        seen[self.index(from)] = Some((from, 0));
        let mut queue = VecDeque::from([from]);
        while let Some(c) = queue.pop_front() {
            let d = seen[self.index(c)].map(|(_, d)| d).unwrap_or(0);
            for (dx, dy) in NEIGHBOURS {
                let n = Cell(c.0 + dx, c.1 + dy);
                if self.is_free(n) && seen[self.index(n)].is_none() {
                    seen[self.index(n)] = Some((c, d + 1));
                    queue.push_back(n);
                }
            }
        }
        seen
    }

    /// Shortest 4-connected path length, or infinity if unreachable.
    pub fn distance(&self, from: Cell, to: Cell) -> f64 {
        if from == to && self.is_free(to) {
            return 0.0;
        }
        match self.is_free(to).then(|| self.bfs(from)[self.index(to)]).flatten() {
            Some((_, d)) => d as f64,
            None => f64::INFINITY,
        }
    }

    /// Cells from `from` to `to` inclusive; `None` if unreachable.
    pub fn shortest_path(&self, from: Cell, to: Cell) -> Option<Vec<Cell>> {
        if !self.is_free(to) {
            return None;
        }
        let table = self.bfs(from);
        table[self.index(to)]?;
        let mut path = vec![to];
        let mut c = to;
        while c != from {
            c = table[self.index(c)]?.0;
            path.push(c);
        }
        path.reverse();
        Some(path)
    }

    pub fn travel_cost(&self, robot: &str, target: Cell) -> Result<f64, SimError> {
        let r = self.robot(robot).ok_or_else(|| SimError::UnknownRobot(robot.to_string()))?;
        if !self.is_free(target) {
            return Err(SimError::UnknownCell(target.to_string()));
        }
        Ok(self.distance(r.cell, target))
    }

    /// Moves every robot to a distinct random free cell that is not a shelf
    /// or named location. Deterministic for a given seed.
    pub fn randomize_robots(&mut self, seed: u64) {
        let reserved: BTreeSet<Cell> = self.shelves.iter().map(|s| s.cell).chain(self.locations.values().copied()).collect();
        let mut cells: Vec<Cell> = (0..self.grid.height)
            .flat_map(|y| (0..self.grid.width).map(move |x| Cell(x, y)))
            .filter(|c| self.is_free(*c) && !reserved.contains(c))
            .collect();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        cells.shuffle(&mut rng);
        for (r, c) in self.robots.iter_mut().zip(cells) {
            r.cell = c;
        }
    }

    /// Copies `amount(shelf, product)` values from the symbolic state into
    /// the shelf contents.
    pub fn sync_from_state(&mut self, state: &State) {
        let Some(inv) = &self.inventory else { return };
        for shelf in &mut self.shelves {
            for (f, v) in &state.fluents {
                if f.name == inv.amount && f.args.len() == 2 && f.args[0] == shelf.id {
                    shelf.contents.insert(f.args[1].clone(), *v);
                }
            }
        }
    }

    /// Disagreements between shelf contents and the symbolic state.
    pub fn inventory_mismatches(&self, state: &State) -> Vec<String> {
        let Some(inv) = &self.inventory else { return Vec::new() };
        let mut out = Vec::new();
        for shelf in &self.shelves {
            for (f, v) in &state.fluents {
                if f.name == inv.amount && f.args.len() == 2 && f.args[0] == shelf.id {
                    let held = shelf.contents.get(&f.args[1]).copied().unwrap_or(0.0);
                    if (held - v).abs() > 1e-9 {
                        out.push(format!("{} {}: world {held}, state {v}", shelf.id, f.args[1]));
                    }
                }
                if f.name == inv.free_space && f.args.len() == 1 && f.args[0] == shelf.id {
                    let free = shelf.capacity - shelf.contents.values().sum::<f64>();
                    if (free - v).abs() > 1e-9 {
                        out.push(format!("{} free space: world {free}, state {v}", shelf.id));
                    }
                }
            }
        }
        out
    }

    /// Plain-text facts about shelves and robots.
    pub fn describe(&self) -> String {
        let mut out = String::new();
        for s in &self.shelves {
            let items: Vec<String> = s.contents.iter().map(|(p, n)| format!("{n} {p}")).collect();
            let held: f64 = s.contents.values().sum();
            out.push_str(&format!(
                "{} at cell {} holds {} (capacity {}, free space {}).\n",
                s.id,
                s.cell,
                if items.is_empty() { "nothing".to_string() } else { items.join(", ") },
                s.capacity,
                s.capacity - held
            ));
        }
        for (name, cell) in &self.locations {
            out.push_str(&format!("{name} is at cell {cell}.\n"));
        }
        for r in &self.robots {
            let skills: Vec<String> = r.skills.iter().map(|(k, v)| format!("{k} {v}")).collect();
            out.push_str(&format!("{} at cell {} with skills {}.\n", r.id, r.cell, skills.join(", ")));
        }
        out
    }
}
