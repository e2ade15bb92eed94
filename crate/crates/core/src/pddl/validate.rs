use super::ast::{Domain, Problem};
use super::plan::Plan;
use super::state::{applicable, apply, State};

#[derive(Debug, Clone, PartialEq)]
pub struct StepVerdict {
    pub index: usize,
    pub applicable: bool,
    pub message: Option<String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ValidationReport {
    /// Verdicts for the steps that were evaluated; execution stops at the
    /// first failing step.
    pub steps: Vec<StepVerdict>,
    /// Zero-based index of the first inapplicable step.
    pub first_failure: Option<usize>,
    pub final_state: State,
    pub goal_satisfied: bool,
    /// Fraction of goal conjuncts satisfied by `final_state` (1.0 for an
    /// empty goal).
    pub goal_fraction: f64,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.first_failure.is_none() && self.goal_satisfied
    }
}

/// Simulates `plan` from the problem's initial state.
pub fn validate_plan(_domain: &Domain, problem: &Problem, plan: &Plan) -> ValidationReport {
    let mut state = State::initial(problem);
    let mut steps = Vec::with_capacity(plan.len());
    let mut first_failure = None;
    for (index, step) in plan.steps.iter().enumerate() {
        let outcome = applicable(&state, &step.action).and_then(|ok| if ok { apply(&state, &step.action).map(Some) } else { Ok(None) });
        match outcome {
            Ok(Some(next)) => {
                state = next;
                steps.push(StepVerdict { index, applicable: true, message: None });
            }
            Ok(None) => {
                steps.push(StepVerdict { index, applicable: false, message: Some(format!("precondition of {} not satisfied", step.action)) });
                first_failure = Some(index);
                break;
            }
            Err(e) => {
                steps.push(StepVerdict { index, applicable: false, message: Some(e.to_string()) });
                first_failure = Some(index);
                break;
            }
        }
    }
    let satisfied = state.satisfied_count(&problem.goal);
    let goal_fraction = if problem.goal.is_empty() { 1.0 } else { satisfied as f64 / problem.goal.len() as f64 };
    ValidationReport {
        steps,
        first_failure,
        goal_satisfied: satisfied == problem.goal.len(),
        goal_fraction,
        final_state: state,
    }
}
