//! Greedy best-first forward search over ground states.

mod ground;

use std::cmp::Reverse;
use std::collections::{BinaryHeap, HashSet};
use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::pddl::{compare, Condition, Domain, Plan, Problem, State};
use ground::{compile, residual_bucket, CState};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Heuristic {
    GoalCount,
    Blind,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TieBreak {
    Fifo,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SearchConfig {
    pub max_expansions: usize,
    pub heuristic: Heuristic,
    pub tie_break: TieBreak,
    /// Wall-clock limit in seconds.
    pub timeout: f64,
}

impl Default for SearchConfig {
    fn default() -> Self {
        SearchConfig {
            max_expansions: 1_000_000,
            heuristic: Heuristic::GoalCount,
            tie_break: TieBreak::Fifo,
            timeout: 60.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum PlanError {
    #[error("unsolvable: reachable state space exhausted after {expansions} expansions")]
    Unsolvable { expansions: usize },
    #[error("search timed out after {seconds}s ({expansions} expansions)")]
    Timeout { seconds: f64, expansions: usize },
    #[error("expansion budget of {budget} exceeded")]
    BudgetExceeded { budget: usize },
    #[error("invalid search configuration: {0}")]
    InvalidConfig(String),
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct SearchStats {
    pub expansions: usize,
    pub generated: usize,
    pub ground_actions: usize,
}

/// Goal-count heuristic on an explicit state: one per unsatisfied boolean
/// conjunct, and `max(1, ceil(|lhs - rhs| / scale))` per unsatisfied numeric
/// conjunct. Conjuncts that cannot be evaluated count 1.
pub fn heuristic_value(state: &State, goal: &[Condition<String>], scale: f64) -> u64 {
    goal.iter()
        .map(|c| match c {
            Condition::Pos(a) => u64::from(!state.holds(a)),
            Condition::Neg(a) => u64::from(state.holds(a)),
            Condition::Cmp(op, l, r) => match (state.eval(l), state.eval(r)) {
                (Ok(l), Ok(r)) if compare(*op, l, r) => 0,
                (Ok(l), Ok(r)) => residual_bucket((l - r).abs(), scale),
                _ => 1,
            },
        })
        .sum()
}

/// Residual scale used by [`plan`]: the largest constant increase/decrease
/// amount over all ground actions, or 1.
pub fn residual_scale(domain: &Domain, problem: &Problem) -> f64 {
    compile(domain, problem).scale
}

pub fn plan(domain: &Domain, problem: &Problem, config: &SearchConfig) -> Result<Plan, PlanError> {
    search(domain, problem, config).map(|(p, _)| p)
}

struct Node {
    state: CState,
    parent: usize,
    action: usize,
}

const NO_PARENT: usize = usize::MAX;

pub fn search(domain: &Domain, problem: &Problem, config: &SearchConfig) -> Result<(Plan, SearchStats), PlanError> {
    if config.max_expansions == 0 {
        return Err(PlanError::InvalidConfig("max_expansions must be positive".into()));
    }
    if !(config.timeout > 0.0) {
        return Err(PlanError::InvalidConfig("timeout must be positive".into()));
    }
    let started = Instant::now();
    let limit = Duration::from_secs_f64(config.timeout.min(1e9));
    let task = compile(domain, problem);
    let mut stats = SearchStats { ground_actions: task.actions.len(), ..Default::default() };
    if task.goal.statically_false {
        return Err(PlanError::Unsolvable { expansions: 0 });
    }
    let h = |s: &CState| match config.heuristic {
        Heuristic::GoalCount => task.goal.goal_count(s, task.scale),
        Heuristic::Blind => 0,
    };

    let mut nodes = vec![Node { state: task.init.clone(), parent: NO_PARENT, action: 0 }];
    if task.goal.satisfied(&task.init) {
        return Ok((Plan::default(), stats));
    }
    let mut seen: HashSet<CState> = HashSet::new();
    seen.insert(task.init.clone());
    // Min-heap on (h, insertion order): FIFO among equal heuristic values.
    let mut open = BinaryHeap::new();
    open.push(Reverse((h(&task.init), 0usize)));

    while let Some(Reverse((_, idx))) = open.pop() {
        if stats.expansions >= config.max_expansions {
            return Err(PlanError::BudgetExceeded { budget: config.max_expansions });
        }
        if stats.expansions.is_multiple_of(128) && started.elapsed() > limit {
            return Err(PlanError::Timeout { seconds: config.timeout, expansions: stats.expansions });
        }
        stats.expansions += 1;
        for (ai, action) in task.actions.iter().enumerate() {
            let parent_state = &nodes[idx].state;
            if !action.applicable(parent_state) {
                continue;
            }
            let Some(next) = action.apply(parent_state) else { continue };
            stats.generated += 1;
            if !seen.insert(next.clone()) {
                continue;
            }
            let goal_reached = task.goal.satisfied(&next);
            let hv = h(&next);
            nodes.push(Node { state: next, parent: idx, action: ai });
            let child = nodes.len() - 1;
            if goal_reached {
                return Ok((extract(&task, &nodes, child), stats));
            }
            open.push(Reverse((hv, child)));
        }
    }
    Err(PlanError::Unsolvable { expansions: stats.expansions })
}

fn extract(task: &ground::Task, nodes: &[Node], mut idx: usize) -> Plan {
    let mut actions = Vec::new();
    while nodes[idx].parent != NO_PARENT {
        actions.push(task.actions[nodes[idx].action].ground.clone());
        idx = nodes[idx].parent;
    }
    actions.reverse();
    Plan::sequential(actions)
}

#[cfg(test)]
mod tests;
