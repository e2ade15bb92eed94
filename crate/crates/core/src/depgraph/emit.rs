//! Graphviz and line-oriented text serialization.

use std::fmt::Write;

use super::{DependencyGraph, GraphError, GraphMode, GraphNode, ROOT};
use crate::pddl::{format_time, parse_action, Domain, Problem};

pub fn to_dot(graph: &DependencyGraph) -> String {
    let mut out = String::from("digraph dependencies {\n  root [label=\"root\", shape=box];\n");
    for (i, n) in graph.nodes().iter().enumerate() {
        let _ = writeln!(out, "  n{i} [label=\"{i}: {}\"];", n.action);
    }
    for (p, c) in graph.edges() {
        let from = if p == ROOT { "root".to_string() } else { format!("n{p}") };
        let _ = writeln!(out, "  {from} -> n{c};");
    }
    out.push_str("}\n");
    out
}

/// `mode`, then one `node <id> <time> <action>` line per node and one
/// `edge <parent> <child>` line per edge (`-1` is the root).
pub fn to_text(graph: &DependencyGraph) -> String {
    let mut out = format!("mode {}\n", graph.mode);
    for (i, n) in graph.nodes().iter().enumerate() {
        let _ = writeln!(out, "node {i} {} {}", format_time(n.time), n.action);
    }
    for (p, c) in graph.edges() {
        let _ = writeln!(out, "edge {p} {c}");
    }
    out
}

fn bad(line: usize, message: impl Into<String>) -> GraphError {
    GraphError::Format { line, message: message.into() }
}

pub fn load_text(text: &str, domain: &Domain, problem: &Problem) -> Result<DependencyGraph, GraphError> {
    let mut mode = GraphMode::Dag;
    let mut nodes: Vec<GraphNode> = Vec::new();
    let mut incoming: Vec<Vec<i64>> = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let content = raw.split(';').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let (kind, rest) = content.split_once(char::is_whitespace).unwrap_or((content, ""));
        let rest = rest.trim();
        match kind {
            "mode" => {
                if !nodes.is_empty() {
                    return Err(bad(line, "mode must precede nodes"));
                }
                mode = rest.parse().map_err(|e: String| bad(line, e))?;
            }
            "node" => {
                let mut parts = rest.splitn(3, char::is_whitespace);
                let id: usize = parts.next().and_then(|s| s.parse().ok()).ok_or_else(|| bad(line, "bad node id"))?;
                if id != nodes.len() {
                    return Err(bad(line, format!("expected node {}, found {id}", nodes.len())));
                }
                let time: f64 = parts
                    .next()
                    .and_then(|s| s.parse().ok())
                    .filter(|t: &f64| t.is_finite())
                    .ok_or_else(|| bad(line, "bad timestamp"))?;
                let call = parts.next().unwrap_or("").trim();
                let col = raw.find(call).map(|c| c + 1).unwrap_or(1);
                let action = parse_action(call, domain, problem, line, col).map_err(|e| bad(line, e.to_string()))?;
                nodes.push(GraphNode { time, action });
                incoming.push(Vec::new());
            }
            "edge" => {
                let nums: Vec<i64> = rest.split_whitespace().map(|s| s.parse().map_err(|_| bad(line, "bad edge"))).collect::<Result<_, _>>()?;
                let [p, c] = nums[..] else {
                    return Err(bad(line, "edge needs a parent and a child"));
                };
                if c < 0 || c as usize >= nodes.len() {
                    return Err(bad(line, format!("edge to unknown node {c}")));
                }
                if p != ROOT && (p < 0 || p >= c) {
                    return Err(bad(line, format!("edge {p} -> {c} does not point forward in plan order")));
                }
                if incoming[c as usize].contains(&p) {
                    return Err(bad(line, format!("duplicate edge {p} -> {c}")));
                }
                incoming[c as usize].push(p);
            }
            other => return Err(bad(line, format!("unknown record '{other}'"))),
        }
    }
    let mut parents = Vec::with_capacity(nodes.len());
    for (c, mut ps) in incoming.into_iter().enumerate() {
        let no_line = 0;
        if ps.is_empty() {
            return Err(bad(no_line, format!("node {c} has no incoming edge")));
        }
        if ps.contains(&ROOT) {
            if ps.len() > 1 {
                return Err(bad(no_line, format!("node {c} hangs off the root and another parent")));
            }
            parents.push(Vec::new());
            continue;
        }
        if mode == GraphMode::Tree && ps.len() > 1 {
            return Err(bad(no_line, format!("tree node {c} has {} parents", ps.len())));
        }
        ps.sort_unstable();
        parents.push(ps.into_iter().map(|p| p as usize).collect());
    }
    Ok(DependencyGraph::from_parts(mode, nodes, parents))
}
