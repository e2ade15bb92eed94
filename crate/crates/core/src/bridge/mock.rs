//! Table-driven generator: command text and round number select canned
//! problem text.

use std::path::Path;

use serde::Deserialize;

use super::{Generator, GeneratorError, GeneratorRequest};

#[derive(Debug, Deserialize)]
#[serde(untagged)]
enum RoundSpec {
    File { file: String },
    Text { text: String },
}

#[derive(Debug, Deserialize)]
struct EntrySpec {
    pattern: String,
    rounds: Vec<RoundSpec>,
}

#[derive(Debug, Deserialize)]
struct TableSpec {
    entries: Vec<EntrySpec>,
}

/// Answers with the text for round `k` of the entry whose pattern equals the
/// command (case and whitespace insensitive). Rounds past the last entry
/// repeat the last one.
#[derive(Debug, Clone, Default)]
pub struct MockGenerator {
    entries: Vec<(String, Vec<String>)>,
    calls: usize,
}

fn normalize(s: &str) -> String {
    s.split_whitespace().collect::<Vec<_>>().join(" ").to_lowercase()
}

impl MockGenerator {
    pub fn new(entries: Vec<(String, Vec<String>)>) -> Self {
        MockGenerator { entries: entries.into_iter().map(|(p, r)| (normalize(&p), r)).collect(), calls: 0 }
    }

    /// Loads a fixture table; `file` rounds resolve relative to the table.
    pub fn from_file(path: &Path) -> Result<Self, GeneratorError> {
        let fail = |e: String| GeneratorError::Unavailable(format!("{}: {e}", path.display()));
        let text = std::fs::read_to_string(path).map_err(|e| fail(e.to_string()))?;
        let spec: TableSpec = serde_json::from_str(&text).map_err(|e| fail(e.to_string()))?;
        let base = path.parent().unwrap_or(Path::new("."));
        let mut entries = Vec::new();
        for e in spec.entries {
            let mut rounds = Vec::new();
            for r in e.rounds {
                rounds.push(match r {
                    RoundSpec::Text { text } => text,
                    RoundSpec::File { file } => {
                        let p = base.join(&file);
                        std::fs::read_to_string(&p).map_err(|err| fail(format!("{}: {err}", p.display())))?
                    }
                });
            }
            entries.push((e.pattern, rounds));
        }
        Ok(MockGenerator::new(entries))
    }

    /// Generator calls made so far.
    pub fn calls(&self) -> usize {
        self.calls
    }
}

impl Generator for MockGenerator {
    fn generate(&mut self, request: &GeneratorRequest) -> Result<String, GeneratorError> {
        self.calls += 1;
        let key = normalize(&request.command);
        let rounds = self
            .entries
            .iter()
            .find(|(p, _)| *p == key)
            .map(|(_, r)| r)
            .filter(|r| !r.is_empty())
            .ok_or_else(|| GeneratorError::EmptyResponse(request.command.clone()))?;
        let k = request.round().min(rounds.len());
        Ok(rounds[k - 1].clone())
    }
}
