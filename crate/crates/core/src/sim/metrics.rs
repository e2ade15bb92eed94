//! Run-level success, goal recall, execution, redundancy and travel figures.

use std::fmt;

use super::ExecutionTrace;
use crate::pddl::{Condition, State};

#[derive(Debug, Clone, PartialEq)]
pub struct MetricsReport {
    /// Success: every goal conjunct holds at the end.
    pub sr: bool,
    /// Fraction of goal conjuncts satisfied in the final state.
    pub gcr: f64,
    /// Fraction of subtasks executed.
    pub exe: f64,
    /// Ground-truth transitions over executed transitions, capped at 1.
    pub ru: f64,
    pub tc_max: f64,
    /// Mean travel over robots that took part in at least one subtask.
    pub tc_avg: f64,
    pub diagnostics: Vec<String>,
}

impl fmt::Display for MetricsReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "sr={}", u8::from(self.sr))?;
        writeln!(f, "gcr={}", self.gcr)?;
        writeln!(f, "exe={}", self.exe)?;
        writeln!(f, "ru={}", self.ru)?;
        writeln!(f, "tc_max={}", self.tc_max)?;
        writeln!(f, "tc_avg={}", self.tc_avg)?;
        for d in &self.diagnostics {
            writeln!(f, "diagnostic={d}")?;
        }
        Ok(())
    }
}

fn goal_fraction(state: &State, goal: &[Condition<String>]) -> f64 {
    if goal.is_empty() {
        1.0
    } else {
        state.satisfied_count(goal) as f64 / goal.len() as f64
    }
}

pub fn metrics(trace: &ExecutionTrace, goal: &[Condition<String>], ground_truth: usize) -> MetricsReport {
    let mut diagnostics = Vec::new();
    if goal.is_empty() {
        diagnostics.push("empty goal: goal recall undefined, reported as 1".to_string());
    }
    let gcr = goal_fraction(&trace.final_state, goal);
    let executed = trace.executed();
    let exe = if trace.total() == 0 { 1.0 } else { executed as f64 / trace.total() as f64 };
    let ru = match executed {
        0 if ground_truth == 0 => 1.0,
        0 => 0.0,
        n => (ground_truth as f64 / n as f64).min(1.0),
    };
    let tc_max = trace.travel.values().copied().fold(0.0, f64::max);
    let tc_avg = if trace.participants.is_empty() {
        0.0
    } else {
        trace.participants.iter().map(|r| trace.travel[r]).sum::<f64>() / trace.participants.len() as f64
    };
    MetricsReport { sr: (gcr - 1.0).abs() < 1e-12, gcr, exe, ru, tc_max, tc_avg, diagnostics }
}
