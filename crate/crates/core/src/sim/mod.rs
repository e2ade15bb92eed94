//! Grid world, subtask scheduling over the dependency graph, execution
//! replay and run metrics.

mod execute;
mod metrics;
mod schedule;
mod world;

use thiserror::Error;

use crate::depgraph::DependencyGraph;
use crate::mrta::{MrtaError, Requirement};
use crate::pddl::{apply, GroundAction, GroundAtom, State};

pub use execute::{execute, ExecutionTrace, Outcome, Segment};
pub use metrics::{metrics, MetricsReport};
pub use schedule::{load_schedule, schedule, sequential_baseline, Schedule, ScheduleConfig, ScheduledSubtask};
pub use world::{ActionSkills, Cell, Grid, Inventory, RobotSpec, ScaledSkill, Shelf, World};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SimError {
    #[error("invalid world: {0}")]
    InvalidWorld(String),
    #[error("unknown robot '{0}'")]
    UnknownRobot(String),
    #[error("unknown or blocked place '{0}'")]
    UnknownCell(String),
    #[error("no skill mapping for action '{0}'")]
    UnmappedAction(String),
    #[error("{action}: parameter {index} missing")]
    BadParameter { action: String, index: usize },
    #[error("{action}: value of {fluent} undefined")]
    MissingValue { action: String, fluent: String },
    #[error("subtask {node} {subtask} cannot be staffed; unmet: {}", fmt_unmet(.unmet))]
    InfeasibleSubtask { node: usize, subtask: String, unmet: Vec<(String, f64, f64)> },
    #[error("dependency graph has no ready subtask but {remaining} remain")]
    CyclicGraph { remaining: usize },
    #[error("plan step {0} is not applicable")]
    InvalidPlan(usize),
    #[error("schedule line {line}: {message}")]
    ScheduleFormat { line: usize, message: String },
    #[error("invalid schedule configuration: {0}")]
    InvalidConfig(String),
    #[error(transparent)]
    Allocation(#[from] MrtaError),
}

fn fmt_unmet(unmet: &[(String, f64, f64)]) -> String {
    if unmet.is_empty() {
        return "constraints exclude every coalition".into();
    }
    unmet.iter().map(|(s, need, have)| format!("{s} needs {need}, has {have}")).collect::<Vec<_>>().join("; ")
}

/// Skill demands of one subtask and where it takes place.
#[derive(Debug, Clone, PartialEq)]
pub struct SubtaskDemand {
    pub requirement: Requirement,
    pub via: Option<Cell>,
    pub target: Cell,
}

impl SubtaskDemand {
    /// Route length from `from` through the pick-up point to the target.
    pub fn route_length(&self, world: &World, from: Cell) -> f64 {
        match self.via {
            Some(v) => world.distance(from, v) + world.distance(v, self.target),
            None => world.distance(from, self.target),
        }
    }
}

/// Label used to match constraint patterns: the action name and arguments
/// separated by spaces.
pub fn subtask_label(action: &GroundAction) -> String {
    std::iter::once(action.name.as_str()).chain(action.args.iter().map(String::as_str)).collect::<Vec<_>>().join(" ")
}

/// Looks up the action's skill mapping. Scaled demands read their fluent
/// from `state`; zero demands are dropped.
pub fn subtask_requirement(action: &GroundAction, world: &World, state: &State) -> Result<SubtaskDemand, SimError> {
    let mapping = world.actions.get(&action.name).ok_or_else(|| SimError::UnmappedAction(action.name.clone()))?;
    let param = |i: usize| action.args.get(i).ok_or_else(|| SimError::BadParameter { action: action.to_string(), index: i });
    let place = |i: usize| -> Result<Cell, SimError> {
        let name = param(i)?;
        world.cell_of(name).ok_or_else(|| SimError::UnknownCell(name.clone()))
    };
    let target = place(mapping.target)?;
    let via = mapping.via.map(place).transpose()?;
    let mut requirement = mapping.skills.clone();
    for s in &mapping.scaled {
        let fluent = GroundAtom::new(s.function.clone(), vec![param(s.arg)?.clone()]);
        let v = state
            .value(&fluent)
            .ok_or_else(|| SimError::MissingValue { action: action.to_string(), fluent: fluent.to_string() })?;
        *requirement.entry(s.skill.clone()).or_insert(0.0) += v;
    }
    requirement.retain(|_, v| *v > 0.0);
    Ok(SubtaskDemand { requirement, via, target })
}

/// Symbolic state before each node, following plan order.
pub fn states_before(graph: &DependencyGraph, init: &State) -> Result<Vec<State>, SimError> {
    let mut out = Vec::with_capacity(graph.len());
    let mut s = init.clone();
    for (i, n) in graph.nodes().iter().enumerate() {
        let next = apply(&s, &n.action).map_err(|_| SimError::InvalidPlan(i))?;
        out.push(std::mem::replace(&mut s, next));
    }
    Ok(out)
}
