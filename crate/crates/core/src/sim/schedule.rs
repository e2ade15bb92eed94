//! Event-driven allocation of ready subtasks to idle robots.

use std::collections::BTreeSet;
use std::fmt;

use super::{states_before, subtask_label, subtask_requirement, Cell, SimError, SubtaskDemand, World};
use crate::depgraph::{ready_set, DependencyGraph};
use crate::mrta::{apply_constraints, solve, Constraint, ConstraintSet, Requirement, SkillMatrix};
use crate::pddl::{format_time, State};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScheduleConfig {
    /// Time a coalition spends at the target after the last member arrives.
    pub duration: f64,
}

impl Default for ScheduleConfig {
    fn default() -> Self {
        ScheduleConfig { duration: 1.0 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScheduledSubtask {
    pub node: usize,
    pub label: String,
    pub coalition: Vec<String>,
    pub start: f64,
    pub end: f64,
    pub via: Option<Cell>,
    pub target: Cell,
    pub requirement: Requirement,
}

/// Entries in allocation order.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Schedule {
    pub entries: Vec<ScheduledSubtask>,
}

impl Schedule {
    pub fn entry(&self, node: usize) -> Option<&ScheduledSubtask> {
        self.entries.iter().find(|e| e.node == node)
    }

    /// Completion time of the last subtask.
    pub fn makespan(&self) -> f64 {
        self.entries.iter().map(|e| e.end).fold(0.0, f64::max)
    }
}

impl fmt::Display for Schedule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for e in &self.entries {
            let ids = if e.coalition.is_empty() { "-".to_string() } else { e.coalition.join(",") };
            writeln!(f, "subtask {} coalition {ids} start {} end {}", e.node, format_time(e.start), format_time(e.end))?;
        }
        Ok(())
    }
}

/// Reads the text written by `Display`. Places and demands are recomputed
/// from the graph and world.
pub fn load_schedule(text: &str, graph: &DependencyGraph, world: &World, init: &State) -> Result<Schedule, SimError> {
    let states = states_before(graph, init)?;
    let mut out = Schedule::default();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let bad = |message: String| SimError::ScheduleFormat { line, message };
        let words: Vec<&str> = raw.split_whitespace().collect();
        if words.is_empty() {
            continue;
        }
        let [ "subtask", node, "coalition", ids, "start", start, "end", end] = words[..] else {
            return Err(bad(format!("expected 'subtask <id> coalition <ids> start <t> end <t>', found '{}'", raw.trim())));
        };
        let node: usize = node.parse().ok().filter(|n| *n < graph.len()).ok_or_else(|| bad(format!("unknown subtask '{node}'")))?;
        if out.entry(node).is_some() {
            return Err(bad(format!("subtask {node} listed twice")));
        }
        let time = |t: &str| t.parse::<f64>().ok().filter(|v| v.is_finite()).ok_or_else(|| bad(format!("bad time '{t}'")));
        let (start, end) = (time(start)?, time(end)?);
        if end < start {
            return Err(bad(format!("subtask {node} ends before it starts")));
        }
        let coalition: Vec<String> = if ids == "-" { Vec::new() } else { ids.split(',').map(str::to_string).collect() };
        if let Some(r) = coalition.iter().find(|r| world.robot(r).is_none()) {
            return Err(SimError::UnknownRobot(r.clone()));
        }
        let action = &graph.node(node).action;
        let demand = subtask_requirement(action, world, &states[node])?;
        out.entries.push(ScheduledSubtask {
            node,
            label: action.to_string(),
            coalition,
            start,
            end,
            via: demand.via,
            target: demand.target,
            requirement: demand.requirement,
        });
    }
    Ok(out)
}

struct RobotState {
    cell: Cell,
    free_at: f64,
    travel: f64,
}

const TIME_EPS: f64 = 1e-9;

/// Walks the graph in plan order. Each decision point takes the first ready
/// subtask and allocates it among idle robots with cost = distance already
/// travelled + route length; when no idle coalition fits, time advances to
/// the next completion.
pub fn schedule(
    graph: &DependencyGraph,
    world: &World,
    init: &State,
    constraints: &ConstraintSet,
    config: &ScheduleConfig,
) -> Result<Schedule, SimError> {
    if !(config.duration > 0.0 && config.duration.is_finite()) {
        return Err(SimError::InvalidConfig("duration must be positive".into()));
    }
    let states = states_before(graph, init)?;
    let ids = world.robot_ids();
    let q = SkillMatrix::from_robots(world.robots.iter().map(|r| (r.id.as_str(), &r.skills)))?;
    let mut robots: Vec<RobotState> = world.robots.iter().map(|r| RobotState { cell: r.cell, free_at: 0.0, travel: r.travel }).collect();

    let mut out = Schedule::default();
    let mut started = vec![false; graph.len()];
    let mut running: Vec<(usize, f64)> = Vec::new();
    let mut completed = BTreeSet::new();
    let mut now = 0.0;

    while out.entries.len() < graph.len() {
        let next = ready_set(graph, &completed).expect("completed set is closed").into_iter().find(|n| !started[*n]);
        let allocated = match next {
            Some(node) => {
                let action = &graph.node(node).action;
                let demand = subtask_requirement(action, world, &states[node])?;
                let label = subtask_label(action);
                match allocate(world, &q, &robots, &demand, constraints, &label, now)? {
                    Some(coalition) => {
                        let mut longest: f64 = 0.0;
                        for &i in &coalition {
                            let d = demand.route_length(world, robots[i].cell);
                            longest = longest.max(d);
                            robots[i].travel += d;
                            robots[i].cell = demand.target;
                        }
                        let end = now + longest / world.speed + config.duration;
                        for &i in &coalition {
                            robots[i].free_at = end;
                        }
                        started[node] = true;
                        running.push((node, end));
                        out.entries.push(ScheduledSubtask {
                            node,
                            label: action.to_string(),
                            coalition: coalition.iter().map(|&i| ids[i].clone()).collect(),
                            start: now,
                            end,
                            via: demand.via,
                            target: demand.target,
                            requirement: demand.requirement,
                        });
                        true
                    }
                    None if running.is_empty() => {
                        return Err(SimError::InfeasibleSubtask { node, subtask: action.to_string(), unmet: unmet(&q, &demand.requirement) });
                    }
                    None => false,
                }
            }
            None if running.is_empty() => return Err(SimError::CyclicGraph { remaining: graph.len() - out.entries.len() }),
            None => false,
        };
        if !allocated {
            now = running.iter().map(|(_, e)| *e).fold(f64::INFINITY, f64::min);
            running.retain(|(n, e)| {
                let done = *e <= now + TIME_EPS;
                if done {
                    completed.insert(*n);
                }
                !done
            });
        }
    }
    Ok(out)
}

/// Coalition of robot indices, or `None` if no idle coalition is feasible now.
fn allocate(
    world: &World,
    q: &SkillMatrix,
    robots: &[RobotState],
    demand: &SubtaskDemand,
    constraints: &ConstraintSet,
    label: &str,
    now: f64,
) -> Result<Option<Vec<usize>>, SimError> {
    let ids = q.robots();
    let mut costs = vec![0.0; ids.len()];
    let mut excluded = Vec::new();
    for (i, r) in robots.iter().enumerate() {
        let d = demand.route_length(world, r.cell);
        if r.free_at > now + TIME_EPS || !d.is_finite() {
            excluded.push(i);
        } else {
            costs[i] = r.travel + d;
        }
    }
    // A required robot that is busy or cannot reach the target blocks this
    // subtask for now rather than making the constraints contradictory.
    let fixings = apply_constraints(constraints, label)?;
    if fixings.iter().any(|f| f.value && excluded.iter().any(|&i| ids[i] == f.robot)) {
        return Ok(None);
    }
    let extra = excluded.iter().map(|&i| Constraint::ForceValue { robot: ids[i].clone(), value: 0 }).collect();
    let set = constraints.with(extra, ids)?;
    let a = solve(q, &demand.requirement, &costs, &set, label)?;
    Ok(a.is_optimal().then(|| a.x.iter().enumerate().filter(|(_, x)| **x).map(|(i, _)| i).collect()))
}

/// Skills the whole team cannot cover: `(skill, needed, available)`.
fn unmet(q: &SkillMatrix, y: &Requirement) -> Vec<(String, f64, f64)> {
    y.iter()
        .filter_map(|(skill, need)| {
            let have: f64 = match q.skills().iter().position(|s| s == skill) {
                Some(u) => (0..q.robots().len()).map(|i| q.level(u, i)).sum(),
                None => 0.0,
            };
            (have < need - 1e-9).then(|| (skill.clone(), *need, have))
        })
        .collect()
}

/// Travel if a single robot performed every subtask alone in plan order,
/// minimized over the team: `(robot, distance)`. Skill demands are ignored.
pub fn sequential_baseline(graph: &DependencyGraph, world: &World, init: &State) -> Result<Option<(String, f64)>, SimError> {
    let states = states_before(graph, init)?;
    let demands = graph
        .nodes()
        .iter()
        .zip(&states)
        .map(|(n, s)| subtask_requirement(&n.action, world, s))
        .collect::<Result<Vec<_>, _>>()?;
    let mut best: Option<(String, f64)> = None;
    for r in &world.robots {
        let mut cell = r.cell;
        let mut total = 0.0;
        for d in &demands {
            total += d.route_length(world, cell);
            cell = d.target;
        }
        if total.is_finite() && best.as_ref().is_none_or(|(_, b)| total < *b) {
            best = Some((r.id.clone(), total));
        }
    }
    Ok(best)
}
