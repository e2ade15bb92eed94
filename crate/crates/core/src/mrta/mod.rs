//! Per-subtask coalition selection: minimize the largest member cost, then
//! the total cost, subject to skill coverage and user constraints.

mod solve;

use std::collections::BTreeMap;

use globset::{GlobBuilder, GlobMatcher};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use thiserror::Error;

pub use solve::{brute_force, solve, BRUTE_FORCE_LIMIT};

/// Tolerance for cost grouping and coverage checks.
pub const COST_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum MrtaError {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("unknown robot '{0}'")]
    UnknownRobot(String),
    #[error("invalid pattern '{pattern}': {message}")]
    InvalidPattern { pattern: String, message: String },
    #[error("team size limit must be at least 1")]
    InvalidTeamSize,
    #[error("robot '{robot}' is both required and excluded for '{subtask}'")]
    ConflictingFixings { robot: String, subtask: String },
    #[error("{n} robots exceed the brute-force limit of {BRUTE_FORCE_LIMIT}")]
    TooLarge { n: usize },
}

/// Skill levels, one row per skill and one column per robot.
#[derive(Debug, Clone, PartialEq)]
pub struct SkillMatrix {
    skills: Vec<String>,
    robots: Vec<String>,
    levels: Vec<Vec<f64>>,
}

impl SkillMatrix {
    pub fn new(skills: Vec<String>, robots: Vec<String>, levels: Vec<Vec<f64>>) -> Result<Self, MrtaError> {
        if levels.len() != skills.len() {
            return Err(MrtaError::DimensionMismatch(format!("{} skill rows for {} skills", levels.len(), skills.len())));
        }
        if let Some(row) = levels.iter().find(|r| r.len() != robots.len()) {
            return Err(MrtaError::DimensionMismatch(format!("row of {} levels for {} robots", row.len(), robots.len())));
        }
        if levels.iter().flatten().any(|v| !v.is_finite() || *v < 0.0) {
            return Err(MrtaError::InvalidInput("skill levels must be finite and non-negative".into()));
        }
        for (what, labels) in [("skill", &skills), ("robot", &robots)] {
            let mut seen = std::collections::HashSet::new();
            if let Some(dup) = labels.iter().find(|l| !seen.insert(l.as_str())) {
                return Err(MrtaError::InvalidInput(format!("duplicate {what} '{dup}'")));
            }
        }
        Ok(SkillMatrix { skills, robots, levels })
    }

    /// Builds the matrix from per-robot skill maps; the skill rows are the
    /// sorted union of all skill names.
    pub fn from_robots<'a>(robots: impl IntoIterator<Item = (&'a str, &'a BTreeMap<String, f64>)>) -> Result<Self, MrtaError> {
        let robots: Vec<(&str, &BTreeMap<String, f64>)> = robots.into_iter().collect();
        let mut skills: Vec<String> = robots.iter().flat_map(|(_, s)| s.keys().cloned()).collect();
        skills.sort();
        skills.dedup();
        let levels = skills
            .iter()
            .map(|u| robots.iter().map(|(_, s)| s.get(u).copied().unwrap_or(0.0)).collect())
            .collect();
        SkillMatrix::new(skills, robots.iter().map(|(id, _)| id.to_string()).collect(), levels)
    }

    pub fn skills(&self) -> &[String] {
        &self.skills
    }

    pub fn robots(&self) -> &[String] {
        &self.robots
    }

    pub fn level(&self, skill: usize, robot: usize) -> f64 {
        self.levels[skill][robot]
    }

    pub fn robot_index(&self, id: &str) -> Option<usize> {
        self.robots.iter().position(|r| r == id)
    }

    /// Requirement vector aligned with the rows. Skills no robot has get an
    /// extra all-zero row.
    pub(crate) fn aligned(&self, y: &Requirement) -> Result<(Vec<Vec<f64>>, Vec<f64>), MrtaError> {
        if let Some((k, v)) = y.iter().find(|(_, v)| !v.is_finite() || **v < 0.0) {
            return Err(MrtaError::InvalidInput(format!("requirement {k}={v} must be finite and non-negative")));
        }
        let mut rows = self.levels.clone();
        let mut need: Vec<f64> = self.skills.iter().map(|s| y.get(s).copied().unwrap_or(0.0)).collect();
        for (k, v) in y {
            if !self.skills.contains(k) {
                rows.push(vec![0.0; self.robots.len()]);
                need.push(*v);
            }
        }
        Ok((rows, need))
    }
}

/// Desired skill levels keyed by skill name; absent skills are not needed.
pub type Requirement = BTreeMap<String, f64>;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Constraint {
    /// The robot may not take part in subtasks matching `pattern`.
    Forbid { robot: String, pattern: String },
    /// The robot must take part in subtasks matching `pattern`.
    Require { robot: String, pattern: String },
    MaxTeamSize { k: usize },
    ForceValue { robot: String, value: u8 },
}

/// Validated constraints with compiled glob patterns. Patterns are matched
/// against the subtask label, e.g. `move-product shelf1 shelf2 product1 magnitude4`.
#[derive(Debug, Clone, Default)]
pub struct ConstraintSet {
    items: Vec<(Constraint, Option<GlobMatcher>)>,
}

impl ConstraintSet {
    pub fn new(constraints: Vec<Constraint>, robots: &[String]) -> Result<Self, MrtaError> {
        let mut items = Vec::with_capacity(constraints.len());
        for c in constraints {
            let robot = match &c {
                Constraint::Forbid { robot, .. } | Constraint::Require { robot, .. } | Constraint::ForceValue { robot, .. } => Some(robot),
                Constraint::MaxTeamSize { .. } => None,
            };
            if let Some(r) = robot {
                if !robots.contains(r) {
                    return Err(MrtaError::UnknownRobot(r.clone()));
                }
            }
            let matcher = match &c {
                Constraint::Forbid { pattern, .. } | Constraint::Require { pattern, .. } => Some(
                    GlobBuilder::new(&pattern.to_lowercase())
                        .literal_separator(false)
                        .build()
                        .map_err(|e| MrtaError::InvalidPattern { pattern: pattern.clone(), message: e.kind().to_string() })?
                        .compile_matcher(),
                ),
                Constraint::MaxTeamSize { k: 0 } => return Err(MrtaError::InvalidTeamSize),
                Constraint::ForceValue { value, .. } if *value > 1 => {
                    return Err(MrtaError::InvalidInput(format!("forced value must be 0 or 1, got {value}")))
                }
                _ => None,
            };
            items.push((c, matcher));
        }
        Ok(ConstraintSet { items })
    }

    pub fn empty() -> Self {
        ConstraintSet::default()
    }

    pub fn constraints(&self) -> impl Iterator<Item = &Constraint> {
        self.items.iter().map(|(c, _)| c)
    }

    /// Copy with additional constraints appended.
    pub fn with(&self, extra: Vec<Constraint>, robots: &[String]) -> Result<Self, MrtaError> {
        let mut out = self.clone();
        out.items.extend(ConstraintSet::new(extra, robots)?.items);
        Ok(out)
    }

    pub fn max_team_size(&self) -> Option<usize> {
        self.constraints()
            .filter_map(|c| match c {
                Constraint::MaxTeamSize { k } => Some(*k),
                _ => None,
            })
            .min()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Fixing {
    pub robot: String,
    pub value: bool,
}

/// Fixings the constraints impose on one subtask, in robot first-mention
/// order. Non-matching constraints contribute nothing.
pub fn apply_constraints(constraints: &ConstraintSet, subtask: &str) -> Result<Vec<Fixing>, MrtaError> {
    let label = subtask.to_lowercase();
    let mut out: Vec<Fixing> = Vec::new();
    for (c, matcher) in &constraints.items {
        let (robot, value) = match c {
            Constraint::Forbid { robot, .. } | Constraint::Require { robot, .. } => {
                if !matcher.as_ref().is_some_and(|m| m.is_match(&label)) {
                    continue;
                }
                (robot, matches!(c, Constraint::Require { .. }))
            }
            Constraint::ForceValue { robot, value } => (robot, *value == 1),
            Constraint::MaxTeamSize { .. } => continue,
        };
        match out.iter().find(|f| &f.robot == robot) {
            Some(f) if f.value != value => {
                return Err(MrtaError::ConflictingFixings { robot: robot.clone(), subtask: label });
            }
            Some(_) => {}
            None => out.push(Fixing { robot: robot.clone(), value }),
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Optimal,
    Infeasible,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Assignment {
    pub status: Status,
    pub robots: Vec<String>,
    pub x: Vec<bool>,
    pub max_cost: f64,
    pub sum_cost: f64,
}

impl Assignment {
    pub(crate) fn infeasible(robots: &[String]) -> Self {
        Assignment { status: Status::Infeasible, robots: robots.to_vec(), x: vec![false; robots.len()], max_cost: 0.0, sum_cost: 0.0 }
    }

    pub fn is_optimal(&self) -> bool {
        self.status == Status::Optimal
    }

    pub fn objective(&self) -> (f64, f64) {
        (self.max_cost, self.sum_cost)
    }

    /// Ids of the selected robots in column order.
    pub fn coalition(&self) -> Vec<&str> {
        self.robots.iter().zip(&self.x).filter(|(_, x)| **x).map(|(r, _)| r.as_str()).collect()
    }

    /// `{status, x: {id: 0|1}, max_cost, sum_cost}`; costs are null when
    /// infeasible.
    pub fn to_json(&self) -> Value {
        let x: serde_json::Map<String, Value> = self.robots.iter().zip(&self.x).map(|(r, v)| (r.clone(), json!(u8::from(*v)))).collect();
        let cost = |v: f64| if self.is_optimal() { json!(v) } else { Value::Null };
        json!({
            "status": self.status,
            "x": x,
            "max_cost": cost(self.max_cost),
            "sum_cost": cost(self.sum_cost),
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RobotEntry {
    pub id: String,
    #[serde(default)]
    pub skills: BTreeMap<String, f64>,
    pub cost: f64,
}

/// A self-contained allocation problem as read from an instance file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Instance {
    pub robots: Vec<RobotEntry>,
    #[serde(default)]
    pub requirement: Requirement,
    #[serde(default)]
    pub constraints: Vec<Constraint>,
    /// Label matched by Forbid/Require patterns; the empty string if absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub subtask: Option<String>,
}

impl Instance {
    pub fn from_json(text: &str) -> Result<Self, serde_json::Error> {
        serde_json::from_str(text)
    }

    pub fn matrix(&self) -> Result<SkillMatrix, MrtaError> {
        SkillMatrix::from_robots(self.robots.iter().map(|r| (r.id.as_str(), &r.skills)))
    }

    pub fn costs(&self) -> Vec<f64> {
        self.robots.iter().map(|r| r.cost).collect()
    }

    pub fn solve(&self) -> Result<Assignment, MrtaError> {
        let q = self.matrix()?;
        let set = ConstraintSet::new(self.constraints.clone(), q.robots())?;
        solve(&q, &self.requirement, &self.costs(), &set, self.subtask.as_deref().unwrap_or(""))
    }
}
