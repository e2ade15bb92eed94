//! Run configuration read from TOML, with environment overrides.
//!
//! ```toml
//! [generator]
//! kind = "mock"              # or "http"
//! mock_file = "mock/warehouse.json"
//! endpoint = "https://api.example.com/v1"
//! model = "gpt-4o"
//! api_key_env = "OPENAI_API_KEY"
//!
//! [loop]
//! rounds = 4
//!
//! [planner]
//! max_expansions = 200000
//! timeout = 10.0
//!
//! [schedule]
//! mode = "dag"
//! duration = 1.0
//! ```
//!
//! `TEAMPLAN_GENERATOR`, `TEAMPLAN_MOCK_FILE`, `TEAMPLAN_ENDPOINT`,
//! `TEAMPLAN_MODEL` and `TEAMPLAN_API_KEY_ENV` override the file.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::bridge::{Generator, GeneratorError, HttpGenerator, HttpSettings, LoopConfig, MockGenerator, Templates};
use crate::depgraph::GraphMode;
use crate::planner::SearchConfig;
use crate::sim::ScheduleConfig;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("{path}: {message}")]
    Read { path: String, message: String },
    #[error("invalid configuration: {0}")]
    Invalid(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GeneratorKind {
    Mock,
    Http,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct GeneratorSection {
    pub kind: GeneratorKind,
    pub mock_file: Option<PathBuf>,
    /// Directory with prompt templates; the bundled ones are used if unset.
    pub template_dir: Option<PathBuf>,
    #[serde(flatten)]
    pub http: HttpSettings,
}

impl Default for GeneratorSection {
    fn default() -> Self {
        GeneratorSection { kind: GeneratorKind::Mock, mock_file: None, template_dir: None, http: HttpSettings::default() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct LoopSection {
    pub rounds: usize,
}

impl Default for LoopSection {
    fn default() -> Self {
        LoopSection { rounds: 4 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ScheduleSection {
    pub mode: GraphMode,
    pub duration: f64,
}

impl Default for ScheduleSection {
    fn default() -> Self {
        ScheduleSection { mode: GraphMode::Dag, duration: 1.0 }
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(default)]
pub struct Config {
    pub generator: GeneratorSection,
    #[serde(rename = "loop")]
    pub refine: LoopSection,
    pub planner: SearchConfig,
    pub schedule: ScheduleSection,
}

impl Config {
    /// Reads `path`, resolves relative paths against its directory and
    /// applies environment overrides.
    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|e| ConfigError::Read { path: path.display().to_string(), message: e.to_string() })?;
        let base = path.parent().unwrap_or(Path::new("."));
        Config::parse(&text, base, |k| std::env::var(k).ok())
    }

    pub fn parse(text: &str, base: &Path, env: impl Fn(&str) -> Option<String>) -> Result<Self, ConfigError> {
        let mut c: Config = toml::from_str(text).map_err(|e| ConfigError::Invalid(e.message().to_string()))?;
        if let Some(kind) = env("TEAMPLAN_GENERATOR") {
            c.generator.kind = match kind.as_str() {
                "mock" => GeneratorKind::Mock,
                "http" => GeneratorKind::Http,
                other => return Err(ConfigError::Invalid(format!("TEAMPLAN_GENERATOR={other}"))),
            };
        }
        if let Some(v) = env("TEAMPLAN_MOCK_FILE") {
            c.generator.mock_file = Some(PathBuf::from(v));
        }
        if let Some(v) = env("TEAMPLAN_ENDPOINT") {
            c.generator.http.endpoint = v;
        }
        if let Some(v) = env("TEAMPLAN_MODEL") {
            c.generator.http.model = v;
        }
        if let Some(v) = env("TEAMPLAN_API_KEY_ENV") {
            c.generator.http.api_key_env = Some(v);
        }
        for p in [&mut c.generator.mock_file, &mut c.generator.template_dir].into_iter().flatten() {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        }
        c.check()?;
        Ok(c)
    }

    fn check(&self) -> Result<(), ConfigError> {
        if self.refine.rounds == 0 {
            return Err(ConfigError::Invalid("loop.rounds must be at least 1".into()));
        }
        if self.planner.max_expansions == 0 || !(self.planner.timeout > 0.0) {
            return Err(ConfigError::Invalid("planner budget and timeout must be positive".into()));
        }
        if !(self.schedule.duration > 0.0) {
            return Err(ConfigError::Invalid("schedule.duration must be positive".into()));
        }
        Ok(())
    }

    pub fn loop_config(&self) -> LoopConfig {
        LoopConfig { rounds: self.refine.rounds, search: self.planner.clone() }
    }

    pub fn schedule_config(&self) -> ScheduleConfig {
        ScheduleConfig { duration: self.schedule.duration }
    }

    pub fn build_generator(&self) -> Result<Box<dyn Generator>, GeneratorError> {
        match self.generator.kind {
            GeneratorKind::Mock => {
                let path = self
                    .generator
                    .mock_file
                    .as_ref()
                    .ok_or_else(|| GeneratorError::Unavailable("mock generator needs generator.mock_file".into()))?;
                Ok(Box::new(MockGenerator::from_file(path)?))
            }
            GeneratorKind::Http => {
                let templates = match &self.generator.template_dir {
                    Some(dir) => Templates::from_dir(dir).map_err(|e| GeneratorError::Unavailable(format!("{}: {e}", dir.display())))?,
                    None => Templates::default(),
                };
                Ok(Box::new(HttpGenerator::new(self.generator.http.clone(), templates)?))
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::testutil::fixture_path;

    fn no_env(_: &str) -> Option<String> {
        None
    }

    #[test]
    fn defaults_fill_missing_sections() {
        let c = Config::parse("", Path::new("."), no_env).unwrap();
        assert_eq!(c, Config::default());
        assert_eq!(c.refine.rounds, 4);
        assert_eq!(c.schedule.mode, GraphMode::Dag);
    }

    #[test]
    fn bundled_configs_load() {
        let c = Config::load(&fixture_path("config/mock.toml")).unwrap();
        assert_eq!(c.generator.kind, GeneratorKind::Mock);
        let mock = c.generator.mock_file.clone().unwrap();
        assert!(mock.is_file(), "{}", mock.display());
        assert!(c.build_generator().is_ok());
        let c = Config::load(&fixture_path("config/http.toml")).unwrap();
        assert_eq!(c.generator.kind, GeneratorKind::Http);
        assert_eq!(c.generator.http.api_key_env.as_deref(), Some("OPENAI_API_KEY"));
    }

    #[test]
    fn environment_wins() {
        let env = |k: &str| match k {
            "TEAMPLAN_GENERATOR" => Some("http".to_string()),
            "TEAMPLAN_MODEL" => Some("local-model".to_string()),
            "TEAMPLAN_MOCK_FILE" => Some("other.json".to_string()),
            _ => None,
        };
        let c = Config::parse("[generator]\nkind = \"mock\"\nmodel = \"gpt-4o\"\n", Path::new("/etc/tp"), env).unwrap();
        assert_eq!(c.generator.kind, GeneratorKind::Http);
        assert_eq!(c.generator.http.model, "local-model");
        assert_eq!(c.generator.mock_file, Some(PathBuf::from("/etc/tp/other.json")));
        assert!(Config::parse("", Path::new("."), |k| (k == "TEAMPLAN_GENERATOR").then(|| "llm".to_string())).is_err());
    }

    #[test]
    fn rejects_bad_values() {
        for text in ["[loop]\nrounds = 0", "[planner]\ntimeout = 0.0", "[schedule]\nduration = -1.0", "[schedule]\nmode = \"forest\"", "[generator]\nkind = \"x\""] {
            assert!(matches!(Config::parse(text, Path::new("."), no_env), Err(ConfigError::Invalid(_))), "{text}");
        }
        assert!(matches!(Config::load(Path::new("/nonexistent/teamplan.toml")), Err(ConfigError::Read { .. })));
    }

    #[test]
    fn mock_needs_a_table() {
        let c = Config::default();
        assert!(matches!(c.build_generator(), Err(GeneratorError::Unavailable(_))));
    }
}
