//! Timestamped plan files: `<t>: (<action> <args...>)` per line.

use std::fmt;

use super::ast::{Domain, Problem};
use super::error::PddlError;
use super::parser::split_call;
use super::sexpr::{read_one, Pos};
use super::state::GroundAction;

#[derive(Debug, Clone, PartialEq)]
pub struct PlanStep {
    pub time: f64,
    pub action: GroundAction,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Plan {
    pub steps: Vec<PlanStep>,
}

impl Plan {
    /// Builds a plan with timestamps 0.0, 1.0, 2.0, ... in step order.
    pub fn sequential(actions: Vec<GroundAction>) -> Self {
        Plan {
            steps: actions
                .into_iter()
                .enumerate()
                .map(|(i, action)| PlanStep { time: i as f64, action })
                .collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    pub fn actions(&self) -> impl Iterator<Item = &GroundAction> {
        self.steps.iter().map(|s| &s.action)
    }
}

/// Formats a timestamp the way plan files write it (`0.0`, `2.5`, ...).
pub fn format_time(t: f64) -> String {
    format!("{t:?}")
}

impl fmt::Display for Plan {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for step in &self.steps {
            writeln!(f, "{}: {}", format_time(step.time), step.action)?;
        }
        Ok(())
    }
}

/// Grounds `name args` against the domain schemas and the problem's objects.
pub fn ground_action(domain: &Domain, problem: &Problem, name: &str, args: &[(String, Pos)], line: usize) -> Result<GroundAction, PddlError> {
    let schema = domain
        .action(name)
        .ok_or_else(|| PddlError::UnknownAction { line, name: name.to_string() })?;
    if schema.params.len() != args.len() {
        return Err(PddlError::ArityMismatch {
            line,
            action: name.to_string(),
            expected: schema.params.len(),
            found: args.len(),
        });
    }
    for ((arg, pos), param) in args.iter().zip(&schema.params) {
        let ty = problem
            .object_type(arg)
            .ok_or_else(|| PddlError::semantic(*pos, format!("undeclared object '{arg}'")))?;
        if !domain.is_subtype(ty, &param.ty) {
            return Err(PddlError::semantic(
                *pos,
                format!("object '{arg}' of type '{ty}' does not fit parameter '?{}' - {}", param.name, param.ty),
            ));
        }
    }
    let names: Vec<String> = args.iter().map(|(a, _)| a.clone()).collect();
    Ok(GroundAction::instantiate(schema, &names))
}

/// Reads a plan file. Blank lines and `;` comments are skipped; an optional
/// trailing `[duration]` is accepted and ignored.
pub fn parse_plan(text: &str, domain: &Domain, problem: &Problem) -> Result<Plan, PddlError> {
    let mut steps: Vec<PlanStep> = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let content = raw.split(';').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let col_of = |s: &str| raw.find(s).map(|c| c + 1).unwrap_or(1);
        let (stamp, rest) = content.split_once(':').ok_or_else(|| {
            PddlError::syntax(Pos::new(line, 1), "plan step without timestamp", &["<time>: (<action> ...)"])
        })?;
        let time: f64 = stamp
            .trim()
            .parse()
            .ok()
            .filter(|t: &f64| t.is_finite())
            .ok_or_else(|| PddlError::syntax(Pos::new(line, 1), format!("bad timestamp '{}'", stamp.trim()), &["number"]))?;
        let mut call = rest.trim();
        if let Some(open) = call.rfind('[') {
            if call.ends_with(']') && call[..open].trim_end().ends_with(')') {
                call = call[..open].trim_end();
            }
        }
        let action = parse_action(call, domain, problem, line, col_of(call))?;
        if let Some(prev) = steps.last() {
            if time < prev.time {
                return Err(PddlError::syntax(
                    Pos::new(line, 1),
                    format!("timestamp {time} precedes previous step at {}", prev.time),
                    &["non-decreasing timestamp"],
                ));
            }
        }
        steps.push(PlanStep { time, action });
    }
    Ok(Plan { steps })
}

/// Parses one `(name args...)` call found at `line`, starting at column `col`.
pub fn parse_action(text: &str, domain: &Domain, problem: &Problem, line: usize, col: usize) -> Result<GroundAction, PddlError> {
    let expr = read_one(text).map_err(|e| shift(e, line, col))?;
    let (name, args) = split_call(&expr).map_err(|e| shift(e, line, col))?;
    let args: Vec<(String, Pos)> = args.into_iter().map(|(a, p)| (a, Pos::new(line, p.col + col - 1))).collect();
    ground_action(domain, problem, &name, &args, line)
}

fn shift(err: PddlError, line: usize, offset: usize) -> PddlError {
    let fix = |p: Pos| Pos::new(line, p.col + offset - 1);
    match err {
        PddlError::Syntax { pos, message, expected } => PddlError::Syntax { pos: fix(pos), message, expected },
        PddlError::Semantic { pos, message } => PddlError::Semantic { pos: fix(pos), message },
        other => other,
    }
}
