use thiserror::Error;

use super::sexpr::Pos;

/// Errors produced while reading domain, problem and plan text.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum PddlError {
    #[error("{pos}: syntax error: {message} (expected {})", expected.join(" | "))]
    Syntax { pos: Pos, message: String, expected: Vec<String> },

    #[error("{pos}: unknown requirement '{name}'")]
    UnknownRequirement { pos: Pos, name: String },

    #[error("{pos}: unsupported construct '{construct}'")]
    Unsupported { pos: Pos, construct: String },

    #[error("{pos}: {message}")]
    Semantic { pos: Pos, message: String },

    #[error("line {line}: unknown action '{name}'")]
    UnknownAction { line: usize, name: String },

    #[error("line {line}: action '{action}' expects {expected} arguments, found {found}")]
    ArityMismatch { line: usize, action: String, expected: usize, found: usize },
}

impl PddlError {
    pub fn syntax(pos: Pos, message: impl Into<String>, expected: &[&str]) -> Self {
        PddlError::Syntax {
            pos,
            message: message.into(),
            expected: expected.iter().map(|s| s.to_string()).collect(),
        }
    }

    pub fn semantic(pos: Pos, message: impl Into<String>) -> Self {
        PddlError::Semantic { pos, message: message.into() }
    }

    /// Source position, when the error carries one.
    pub fn position(&self) -> Pos {
        match self {
            PddlError::Syntax { pos, .. }
            | PddlError::UnknownRequirement { pos, .. }
            | PddlError::Unsupported { pos, .. }
            | PddlError::Semantic { pos, .. } => *pos,
            PddlError::UnknownAction { line, .. } | PddlError::ArityMismatch { line, .. } => {
                Pos::new(*line, 1)
            }
        }
    }

    /// True for errors caused by malformed text rather than meaning.
    pub fn is_syntactic(&self) -> bool {
        matches!(self, PddlError::Syntax { .. })
    }
}

/// Errors raised while evaluating a ground action against a state.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum StateError {
    #[error("fluent {0} has no value")]
    MissingFluent(String),

    #[error("action {0} is not applicable")]
    NotApplicable(String),

    #[error("arithmetic error: {0}")]
    Arithmetic(String),
}
