//! Chat-completion client for hosted or local language models.

use std::path::Path;
use std::thread::sleep;
use std::time::Duration;

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use super::{Generator, GeneratorError, GeneratorRequest};

/// Prompt templates. `{{domain}}`, `{{context}}`, `{{command}}`,
/// `{{feedback}}` and `{{diagnostics}}` are substituted.
#[derive(Debug, Clone, PartialEq)]
pub struct Templates {
    pub system: String,
    pub user: String,
    pub feedback: String,
}

impl Default for Templates {
    fn default() -> Self {
        Templates {
            system: include_str!("../../templates/v1/system.txt").to_string(),
            user: include_str!("../../templates/v1/user.txt").to_string(),
            feedback: include_str!("../../templates/v1/feedback.txt").to_string(),
        }
    }
}

impl Templates {
    /// Reads `system.txt`, `user.txt` and `feedback.txt` from `dir`.
    pub fn from_dir(dir: &Path) -> std::io::Result<Self> {
        let read = |name: &str| std::fs::read_to_string(dir.join(name));
        Ok(Templates { system: read("system.txt")?, user: read("user.txt")?, feedback: read("feedback.txt")? })
    }

    /// System and user message text for `request`.
    pub fn render(&self, request: &GeneratorRequest) -> (String, String) {
        let feedback = if request.feedback.is_empty() {
            String::new()
        } else {
            let mut lines = String::new();
            for (i, d) in request.feedback.iter().enumerate() {
                for item in &d.items {
                    lines.push_str(&format!("round {} {item}\n", i + 1));
                }
            }
            self.feedback.replace("{{diagnostics}}", lines.trim_end())
        };
        let system = self.system.replace("{{domain}}", request.domain.trim()).replace("{{context}}", request.context.trim());
        let user = self.user.replace("{{command}}", request.command.trim()).replace("{{feedback}}", &feedback);
        (system, user)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct HttpSettings {
    /// Base URL; requests go to `<endpoint>/chat/completions`.
    pub endpoint: String,
    pub model: String,
    /// Environment variable holding the bearer token, if any.
    pub api_key_env: Option<String>,
    pub temperature: f64,
    pub timeout_secs: f64,
    /// Extra attempts after a transport error, 429 or 5xx reply.
    pub retries: u32,
}

impl Default for HttpSettings {
    fn default() -> Self {
        HttpSettings {
            endpoint: "http://localhost:8000/v1".into(),
            model: "gpt-4o".into(),
            api_key_env: None,
            temperature: 0.0,
            timeout_secs: 60.0,
            retries: 2,
        }
    }
}

pub struct HttpGenerator {
    settings: HttpSettings,
    templates: Templates,
    client: reqwest::blocking::Client,
}

impl HttpGenerator {
    pub fn new(settings: HttpSettings, templates: Templates) -> Result<Self, GeneratorError> {
        let client = reqwest::blocking::Client::builder()
            .timeout(Duration::from_secs_f64(settings.timeout_secs.max(0.001)))
            .build()
            .map_err(|e| GeneratorError::Unavailable(e.to_string()))?;
        Ok(HttpGenerator { settings, templates, client })
    }

    fn body(&self, request: &GeneratorRequest) -> Value {
        let (system, user) = self.templates.render(request);
        json!({
            "model": self.settings.model,
            "temperature": self.settings.temperature,
            "messages": [
                {"role": "system", "content": system},
                {"role": "user", "content": user},
            ],
        })
    }

    fn post_once(&self, body: &Value) -> Result<Value, (bool, String)> {
        let url = format!("{}/chat/completions", self.settings.endpoint.trim_end_matches('/'));
        let mut req = self.client.post(url).json(body);
        if let Some(var) = &self.settings.api_key_env {
            if let Ok(key) = std::env::var(var) {
                req = req.bearer_auth(key);
            }
        }
        let resp = req.send().map_err(|e| (true, e.to_string()))?;
        let status = resp.status();
        if !status.is_success() {
            let retry = status.is_server_error() || status.as_u16() == 429;
            return Err((retry, format!("HTTP {status}")));
        }
        resp.json::<Value>().map_err(|e| (false, format!("bad response body: {e}")))
    }
}

/// Problem text from a reply: the first fenced block if present, else the
/// whole reply.
pub(crate) fn extract_problem(content: &str) -> String {
    if let Some(start) = content.find("```") {
        let after = &content[start + 3..];
        let body = after.split_once('\n').map(|(_, rest)| rest).unwrap_or("");
        if let Some(end) = body.find("```") {
            return body[..end].trim().to_string();
        }
    }
    content.trim().to_string()
}

impl Generator for HttpGenerator {
    fn generate(&mut self, request: &GeneratorRequest) -> Result<String, GeneratorError> {
        let body = self.body(request);
        let mut attempt = 0;
        let reply = loop {
            match self.post_once(&body) {
                Ok(v) => break v,
                Err((true, _)) if attempt < self.settings.retries => {
                    attempt += 1;
                    sleep(Duration::from_millis(100 * u64::from(attempt)));
                }
                Err((_, msg)) => return Err(GeneratorError::Unavailable(msg)),
            }
        };
        let content = reply["choices"][0]["message"]["content"].as_str().unwrap_or("");
        let text = extract_problem(content);
        if text.is_empty() {
            return Err(GeneratorError::EmptyResponse(request.command.clone()));
        }
        Ok(text)
    }
}
