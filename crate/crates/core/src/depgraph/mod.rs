//! Subtask dependency graphs over sequential plans.

mod emit;

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::pddl::{validate_plan, Domain, GroundAction, Plan, Problem};

pub use emit::{load_text, to_dot, to_text};

/// Id of the virtual root node in edge lists and serialized graphs.
pub const ROOT: i64 = -1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GraphMode {
    /// One parent per node: the nearest earlier dependent action.
    Tree,
    /// Every earlier dependent action is a parent.
    Dag,
}

impl fmt::Display for GraphMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            GraphMode::Tree => "tree",
            GraphMode::Dag => "dag",
        })
    }
}

impl FromStr for GraphMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "tree" => Ok(GraphMode::Tree),
            "dag" => Ok(GraphMode::Dag),
            other => Err(format!("unknown graph mode '{other}' (expected tree or dag)")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GraphError {
    #[error("plan step {step} is not applicable: {message}")]
    InvalidPlan { step: usize, message: String },
    #[error("completed set is not dependency-closed: node {node} done before its parent {missing}")]
    NotClosed { node: usize, missing: usize },
    #[error("unknown node {0}")]
    UnknownNode(usize),
    #[error("line {line}: {message}")]
    Format { line: usize, message: String },
}

#[derive(Debug, Clone, PartialEq)]
pub struct GraphNode {
    pub time: f64,
    pub action: GroundAction,
}

/// Nodes are plan positions `0..n`; a node without parents hangs off the
/// virtual root.
#[derive(Debug, Clone, PartialEq)]
pub struct DependencyGraph {
    pub mode: GraphMode,
    nodes: Vec<GraphNode>,
    parents: Vec<Vec<usize>>,
}

/// True when `later` cannot be moved before or run alongside `earlier`.
pub fn depends(later: &GroundAction, earlier: &GroundAction) -> bool {
    let e_writes: BTreeSet<_> = earlier.written_atoms().collect();
    let l_writes: BTreeSet<_> = later.written_atoms().collect();
    // producer or clobber, in either direction
    if later.read_atoms().any(|a| e_writes.contains(a)) || earlier.read_atoms().any(|a| l_writes.contains(a)) {
        return true;
    }
    if !e_writes.is_disjoint(&l_writes) {
        return true;
    }
    let (ew, lw) = (earlier.written_fluents(), later.written_fluents());
    let (er, lr) = (earlier.read_fluents(), later.read_fluents());
    !ew.is_disjoint(&lw) || !ew.is_disjoint(&lr) || !lw.is_disjoint(&er)
}

/// Builds the graph for a plan whose steps are all applicable in sequence.
pub fn build_graph(plan: &Plan, domain: &Domain, problem: &Problem, mode: GraphMode) -> Result<DependencyGraph, GraphError> {
    let report = validate_plan(domain, problem, plan);
    if let Some(step) = report.first_failure {
        let message = report.steps[step].message.clone().unwrap_or_default();
        return Err(GraphError::InvalidPlan { step, message });
    }
    Ok(from_actions(plan, mode))
}

fn from_actions(plan: &Plan, mode: GraphMode) -> DependencyGraph {
    let actions: Vec<&GroundAction> = plan.actions().collect();
    let mut parents = Vec::with_capacity(actions.len());
    for (i, action) in actions.iter().enumerate() {
        let mut ps = Vec::new();
        for j in (0..i).rev() {
            if depends(action, actions[j]) {
                ps.push(j);
                if mode == GraphMode::Tree {
                    break;
                }
            }
        }
        ps.reverse();
        parents.push(ps);
    }
    DependencyGraph {
        mode,
        nodes: plan.steps.iter().map(|s| GraphNode { time: s.time, action: s.action.clone() }).collect(),
        parents,
    }
}

impl DependencyGraph {
    pub(crate) fn from_parts(mode: GraphMode, nodes: Vec<GraphNode>, parents: Vec<Vec<usize>>) -> Self {
        DependencyGraph { mode, nodes, parents }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn node(&self, i: usize) -> &GraphNode {
        &self.nodes[i]
    }

    pub fn nodes(&self) -> &[GraphNode] {
        &self.nodes
    }

    /// Parents in plan order; empty for children of the root.
    pub fn parents(&self, i: usize) -> &[usize] {
        &self.parents[i]
    }

    pub fn children(&self, i: usize) -> Vec<usize> {
        (i + 1..self.len()).filter(|&c| self.parents[c].contains(&i)).collect()
    }

    pub fn root_children(&self) -> Vec<usize> {
        (0..self.len()).filter(|&c| self.parents[c].is_empty()).collect()
    }

    /// `(parent, child)` pairs with [`ROOT`] for the virtual root, ordered
    /// by child then parent.
    pub fn edges(&self) -> Vec<(i64, usize)> {
        let mut out = Vec::new();
        for (c, ps) in self.parents.iter().enumerate() {
            if ps.is_empty() {
                out.push((ROOT, c));
            }
            out.extend(ps.iter().map(|&p| (p as i64, c)));
        }
        out
    }

    /// All transitive successors of `i`, ascending.
    pub fn descendants(&self, i: usize) -> BTreeSet<usize> {
        let mut out = BTreeSet::new();
        for c in i + 1..self.len() {
            if self.parents[c].iter().any(|p| *p == i || out.contains(p)) {
                out.insert(c);
            }
        }
        out
    }

    pub fn ancestors(&self, i: usize) -> BTreeSet<usize> {
        let mut out = BTreeSet::new();
        let mut stack = self.parents[i].clone();
        while let Some(p) = stack.pop() {
            if out.insert(p) {
                stack.extend(&self.parents[p]);
            }
        }
        out
    }

    /// Longest root-to-leaf path counted in actions.
    pub fn depth(&self) -> usize {
        let mut d = vec![0usize; self.len()];
        for i in 0..self.len() {
            d[i] = 1 + self.parents[i].iter().map(|&p| d[p]).max().unwrap_or(0);
        }
        d.into_iter().max().unwrap_or(0)
    }
}

/// Nodes not yet completed whose parents are all completed, in plan order.
pub fn ready_set(graph: &DependencyGraph, completed: &BTreeSet<usize>) -> Result<Vec<usize>, GraphError> {
    for &n in completed {
        if n >= graph.len() {
            return Err(GraphError::UnknownNode(n));
        }
        if let Some(&missing) = graph.parents(n).iter().find(|p| !completed.contains(p)) {
            return Err(GraphError::NotClosed { node: n, missing });
        }
    }
    Ok((0..graph.len())
        .filter(|n| !completed.contains(n) && graph.parents(*n).iter().all(|p| completed.contains(p)))
        .collect())
}
