//! Multi-robot coordination from natural-language commands.
//!
//! A command is translated into a team-level PDDL problem ([`bridge`]),
//! solved by a forward-search planner ([`planner`]), turned into a subtask
//! dependency graph ([`depgraph`]) and executed by robot coalitions chosen
//! with a lexicographic min-max / min-sum allocation ([`mrta`], [`sim`]).

pub mod pddl;
pub mod planner;
pub mod depgraph;
pub mod mrta;
pub mod sim;
pub mod bridge;
pub mod config;
pub mod pipeline;

#[cfg(test)]
pub(crate) mod testutil {
    use std::path::PathBuf;

    pub fn fixture_path(rel: &str) -> PathBuf {
        PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures").join(rel)
    }

    pub fn fixture(rel: &str) -> String {
        std::fs::read_to_string(fixture_path(rel)).unwrap_or_else(|e| panic!("{rel}: {e}"))
    }
}
