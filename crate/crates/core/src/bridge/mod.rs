//! Natural-language command to PDDL problem: generation, syntax check,
//! plan check and the bounded repair loop.

mod http;
mod mock;

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::pddl::{parse_problem, validate_plan, Domain, PddlError, Plan, Pos, Problem};
use crate::planner::{plan, PlanError, SearchConfig};

pub use http::{HttpGenerator, HttpSettings, Templates};
pub use mock::MockGenerator;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GeneratorError {
    #[error("generator unavailable: {0}")]
    Unavailable(String),
    #[error("generator returned nothing for '{0}'")]
    EmptyResponse(String),
}

#[derive(Debug, Clone, PartialEq)]
pub struct GeneratorRequest {
    pub command: String,
    /// Facts about the environment in plain text.
    pub context: String,
    /// PDDL domain text.
    pub domain: String,
    /// Diagnostics of earlier rounds, oldest first.
    pub feedback: Vec<Diagnostics>,
}

impl GeneratorRequest {
    pub fn new(command: impl Into<String>, context: impl Into<String>, domain: impl Into<String>) -> Self {
        GeneratorRequest { command: command.into(), context: context.into(), domain: domain.into(), feedback: Vec::new() }
    }

    /// One-based index of the round this request belongs to.
    pub fn round(&self) -> usize {
        self.feedback.len() + 1
    }
}

/// Produces candidate problem text; no validity guarantee.
pub trait Generator {
    fn generate(&mut self, request: &GeneratorRequest) -> Result<String, GeneratorError>;
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DiagnosticKind {
    Syntax,
    Semantic,
    PlanFailure,
    GoalMiss,
}

impl fmt::Display for DiagnosticKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            DiagnosticKind::Syntax => "syntax",
            DiagnosticKind::Semantic => "semantic",
            DiagnosticKind::PlanFailure => "plan-failure",
            DiagnosticKind::GoalMiss => "goal-miss",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Diagnostic {
    pub kind: DiagnosticKind,
    pub pos: Option<Pos>,
    pub message: String,
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.pos {
            Some(p) => write!(f, "{} {p} {}", self.kind, self.message),
            None => write!(f, "{} - {}", self.kind, self.message),
        }
    }
}

/// Empty iff the checks passed.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Diagnostics {
    pub items: Vec<Diagnostic>,
}

impl Diagnostics {
    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }

    fn single(kind: DiagnosticKind, pos: Option<Pos>, message: impl Into<String>) -> Self {
        Diagnostics { items: vec![Diagnostic { kind, pos, message: message.into() }] }
    }
}

impl fmt::Display for Diagnostics {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for d in &self.items {
            writeln!(f, "{d}")?;
        }
        Ok(())
    }
}

impl From<&PddlError> for Diagnostics {
    fn from(e: &PddlError) -> Self {
        let kind = if e.is_syntactic() { DiagnosticKind::Syntax } else { DiagnosticKind::Semantic };
        let text = e.to_string();
        let message = text.strip_prefix(&format!("{}: ", e.position())).unwrap_or(&text);
        Diagnostics::single(kind, Some(e.position()), message)
    }
}

/// Parses `text`, returning the problem or the parser's diagnostics.
pub fn parse_checked(text: &str, domain: &Domain) -> Result<Problem, Diagnostics> {
    parse_problem(text, domain).map_err(|e| Diagnostics::from(&e))
}

pub fn debug_check(text: &str, domain: &Domain) -> Diagnostics {
    parse_checked(text, domain).err().unwrap_or_default()
}

/// Runs the planner and re-validates its plan. Search failures, including
/// timeouts, are diagnostics rather than errors.
pub fn verify(problem: &Problem, domain: &Domain, config: &SearchConfig) -> (Diagnostics, Option<Plan>) {
    match plan(domain, problem, config) {
        Ok(p) => {
            let report = validate_plan(domain, problem, &p);
            if report.is_valid() {
                (Diagnostics::default(), Some(p))
            } else {
                let msg = match report.first_failure {
                    Some(i) => format!("plan step {i} is not applicable"),
                    None => format!("plan leaves {:.0}% of the goal unmet", (1.0 - report.goal_fraction) * 100.0),
                };
                (Diagnostics::single(DiagnosticKind::GoalMiss, None, msg), None)
            }
        }
        Err(e @ PlanError::Unsolvable { .. }) => (Diagnostics::single(DiagnosticKind::PlanFailure, None, format!("goal cannot be reached: {e}")), None),
        Err(e) => (Diagnostics::single(DiagnosticKind::PlanFailure, None, e.to_string()), None),
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LoopConfig {
    /// Maximum number of generator calls.
    pub rounds: usize,
    pub search: SearchConfig,
}

impl Default for LoopConfig {
    fn default() -> Self {
        LoopConfig { rounds: 4, search: SearchConfig::default() }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RoundRecord {
    pub round: usize,
    pub text: String,
    pub diagnostics: Diagnostics,
}

/// Every failed round, in order.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct FailureReport {
    pub rounds: Vec<RoundRecord>,
}

impl fmt::Display for FailureReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for r in &self.rounds {
            for d in &r.diagnostics.items {
                writeln!(f, "round {} {d}", r.round)?;
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Solved {
    /// Round that produced the accepted problem (one-based).
    pub round: usize,
    pub text: String,
    pub problem: Problem,
    pub plan: Plan,
    pub history: Vec<RoundRecord>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum LoopOutcome {
    Solved(Box<Solved>),
    Failed(FailureReport),
}

/// Generate, check and verify until a round passes or `config.rounds`
/// generator calls have been made. Each round's request carries the
/// diagnostics of all earlier rounds.
pub fn refine_loop(
    request: &GeneratorRequest,
    generator: &mut dyn Generator,
    domain: &Domain,
    config: &LoopConfig,
) -> Result<LoopOutcome, GeneratorError> {
    let mut req = request.clone();
    let mut history = Vec::new();
    for round in 1..=config.rounds {
        let text = generator.generate(&req)?;
        let diagnostics = match parse_checked(&text, domain) {
            Err(d) => d,
            Ok(problem) => match verify(&problem, domain, &config.search) {
                (d, Some(plan)) if d.is_empty() => {
                    return Ok(LoopOutcome::Solved(Box::new(Solved { round, text, problem, plan, history })));
                }
                (d, _) => d,
            },
        };
        req.feedback.push(diagnostics.clone());
        history.push(RoundRecord { round, text, diagnostics });
    }
    Ok(LoopOutcome::Failed(FailureReport { rounds: history }))
}
