//! PDDL subset: typing, STRIPS predicates, numeric fluents, negative
//! preconditions and conjunctive goals.

mod ast;
mod error;
mod parser;
mod plan;
pub mod sexpr;
mod state;
mod validate;

pub use ast::*;
pub use error::{PddlError, StateError};
pub use parser::{parse_domain, parse_problem};
pub use plan::{format_time, ground_action, parse_action, parse_plan, Plan, PlanStep};
pub use sexpr::Pos;
pub use state::{applicable, apply, compare, GroundAction, State, NUMERIC_TOLERANCE};
pub use validate::{validate_plan, StepVerdict, ValidationReport};

#[cfg(test)]
mod tests;
