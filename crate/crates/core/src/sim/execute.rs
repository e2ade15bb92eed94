//! Replays a schedule against the symbolic state and the grid.

use std::collections::BTreeMap;

use super::{Cell, Schedule, World};
use crate::depgraph::DependencyGraph;
use crate::pddl::{applicable, apply, State};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Outcome {
    Done,
    /// The action was inapplicable when its coalition finished.
    Failed,
    /// Not attempted because a predecessor did not complete.
    Skipped,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Segment {
    pub robot: String,
    pub node: usize,
    pub path: Vec<Cell>,
    pub length: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExecutionTrace {
    /// Indexed by node.
    pub outcomes: Vec<Outcome>,
    pub segments: Vec<Segment>,
    /// Distance travelled during this run, for every robot.
    pub travel: BTreeMap<String, f64>,
    /// Robots that appear in at least one coalition.
    pub participants: Vec<String>,
    /// `(node, end time, state after)` for every completed subtask.
    pub snapshots: Vec<(usize, f64, State)>,
    pub final_state: State,
    pub world: World,
}

impl ExecutionTrace {
    pub fn executed(&self) -> usize {
        self.outcomes.iter().filter(|o| **o == Outcome::Done).count()
    }

    pub fn total(&self) -> usize {
        self.outcomes.len()
    }
}

fn walk(world: &World, from: Cell, to: Cell) -> Vec<Cell> {
    world.shortest_path(from, to).unwrap_or_else(|| vec![from])
}

/// Subtasks are settled in order of end time. A subtask whose parent did not
/// complete is skipped and its robots stay put; later routes start from where
/// robots actually are.
pub fn execute(schedule: &Schedule, world: &World, graph: &DependencyGraph, init: &State) -> ExecutionTrace {
    let mut order: Vec<_> = schedule.entries.iter().collect();
    order.sort_by(|a, b| a.end.total_cmp(&b.end).then(a.node.cmp(&b.node)));

    let mut outcomes = vec![Outcome::Skipped; graph.len()];
    let mut settled = vec![false; graph.len()];
    let mut positions: BTreeMap<String, Cell> = world.robots.iter().map(|r| (r.id.clone(), r.cell)).collect();
    let mut travel: BTreeMap<String, f64> = world.robots.iter().map(|r| (r.id.clone(), 0.0)).collect();
    let mut participants: Vec<String> = Vec::new();
    let mut segments = Vec::new();
    let mut snapshots = Vec::new();
    let mut state = init.clone();
    let mut live = world.clone();

    for e in order {
        if e.node >= graph.len() {
            continue;
        }
        settled[e.node] = true;
        for r in &e.coalition {
            if !participants.contains(r) {
                participants.push(r.clone());
            }
        }
        let blocked = graph.parents(e.node).iter().any(|p| !settled[*p] || outcomes[*p] != Outcome::Done);
        if blocked {
            outcomes[e.node] = Outcome::Skipped;
            continue;
        }
        for r in &e.coalition {
            let Some(start) = positions.get(r).copied() else { continue };
            let mut path = match e.via {
                Some(v) => {
                    let mut p = walk(world, start, v);
                    p.extend(walk(world, v, e.target).into_iter().skip(1));
                    p
                }
                None => walk(world, start, e.target),
            };
            if path.last() != Some(&e.target) {
                path = vec![start];
            }
            let length = (path.len() - 1) as f64;
            *travel.get_mut(r).expect("known robot") += length;
            positions.insert(r.clone(), *path.last().expect("non-empty path"));
            segments.push(Segment { robot: r.clone(), node: e.node, path, length });
        }
        let action = &graph.node(e.node).action;
        match applicable(&state, action) {
            Ok(true) => {
                state = apply(&state, action).expect("applicable action applies");
                live.sync_from_state(&state);
                outcomes[e.node] = Outcome::Done;
                snapshots.push((e.node, e.end, state.clone()));
            }
            _ => outcomes[e.node] = Outcome::Failed,
        }
    }

    for r in &mut live.robots {
        r.cell = positions[&r.id];
        r.travel += travel[&r.id];
    }
    participants.sort_by_key(|r| world.robots.iter().position(|x| &x.id == r));
    ExecutionTrace { outcomes, segments, travel, participants, snapshots, final_state: state, world: live }
}
