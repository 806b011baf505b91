use std::path::Path;
use std::time::Duration;

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use super::parse::{decode_object, function_call};
use super::{
    parse_action, render_request, Decision, FunctionSchema, Policy, PolicyContext, PolicyError,
};
use crate::engine::{Action, DecisionState};
use crate::registry::SkillTree;

pub const API_KEY_ENV: &str = "LLM_API_KEY";
pub const ENDPOINT_ENV: &str = "LLM_ENDPOINT";
pub const MODEL_ENV: &str = "LLM_MODEL";

fn default_key_env() -> String {
    API_KEY_ENV.to_string()
}

fn default_timeout() -> u64 {
    120
}

fn default_retries() -> u32 {
    1
}

/// Chat-completions endpoint settings. The key itself is read from the
/// environment variable named by `api_key_env` at request time.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RemoteLlmConfig {
    pub endpoint: String,
    pub model: String,
    #[serde(default = "default_key_env")]
    pub api_key_env: String,
    #[serde(default = "default_timeout")]
    pub timeout_secs: u64,
    /// Extra attempts after a transport or parse failure.
    #[serde(default = "default_retries")]
    pub retries: u32,
    #[serde(default)]
    pub temperature: f64,
}

impl RemoteLlmConfig {
    pub fn new(endpoint: impl Into<String>, model: impl Into<String>) -> Self {
        Self {
            endpoint: endpoint.into(),
            model: model.into(),
            api_key_env: default_key_env(),
            timeout_secs: default_timeout(),
            retries: default_retries(),
            temperature: 0.0,
        }
    }

    pub fn load(path: &Path) -> Result<Self, PolicyError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| PolicyError::Config(format!("{}: {e}", path.display())))?;
        let mut config: Self = serde_json::from_str(&text)
            .map_err(|e| PolicyError::Config(format!("{}: {e}", path.display())))?;
        if config.endpoint.is_empty() {
            config.endpoint = std::env::var(ENDPOINT_ENV).unwrap_or_default();
        }
        config.check()?;
        Ok(config)
    }

    /// `LLM_ENDPOINT` and `LLM_MODEL`.
    pub fn from_env() -> Result<Self, PolicyError> {
        let endpoint = std::env::var(ENDPOINT_ENV).unwrap_or_default();
        let model = std::env::var(MODEL_ENV).unwrap_or_default();
        let config = Self::new(endpoint, model);
        config.check()?;
        Ok(config)
    }

    fn check(&self) -> Result<(), PolicyError> {
        if self.endpoint.is_empty() {
            return Err(PolicyError::Config(format!(
                "remote policy needs an endpoint (config or {ENDPOINT_ENV})"
            )));
        }
        if self.model.is_empty() {
            return Err(PolicyError::Config("remote policy needs a model id".into()));
        }
        Ok(())
    }
}

pub struct RemoteLlmPolicy {
    config: RemoteLlmConfig,
    client: reqwest::blocking::Client,
}

impl std::fmt::Debug for RemoteLlmPolicy {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("RemoteLlmPolicy")
            .field("config", &self.config)
            .finish_non_exhaustive()
    }
}

impl RemoteLlmPolicy {
    pub fn new(config: RemoteLlmConfig) -> Result<Self, PolicyError> {
        let client = reqwest::blocking::Client::builder()
            .timeout(Duration::from_secs(config.timeout_secs))
            .build()
            .map_err(|e| PolicyError::Transport(e.to_string()))?;
        Ok(Self { config, client })
    }

    fn post(&self, body: &Value) -> Result<Value, PolicyError> {
        let mut req = self.client.post(&self.config.endpoint).json(body);
        if let Ok(key) = std::env::var(&self.config.api_key_env) {
            req = req.bearer_auth(key);
        }
        let resp = req
            .send()
            .map_err(|e| PolicyError::Transport(e.to_string()))?;
        let status = resp.status();
        if !status.is_success() {
            let text = resp.text().unwrap_or_default();
            return Err(PolicyError::Transport(format!("HTTP {status}: {text}")));
        }
        resp.json()
            .map_err(|e| PolicyError::Transport(e.to_string()))
    }
}

/// Reads the first tool call of the first choice, falling back to the
/// message text.
pub(crate) fn action_from_response(response: &Value) -> Result<Action, PolicyError> {
    let message = &response["choices"][0]["message"];
    if let Some(call) = message["tool_calls"].get(0) {
        let function = &call["function"];
        let name = function["name"]
            .as_str()
            .ok_or_else(|| PolicyError::Transport("tool call without a name".into()))?;
        let args = decode_object(name, &function["arguments"])?;
        return Ok(function_call(name, &args)?);
    }
    match message["content"].as_str() {
        Some(text) => Ok(parse_action(text)?),
        None => Err(PolicyError::Transport("response has no message".into())),
    }
}

/// Flat and Rag models see bare tool names; the engine wants `kit.name`.
fn qualify(action: Action, tree: &SkillTree) -> Action {
    match action {
        Action::Call { tool_id, args } if !tool_id.contains('.') => {
            let id = tree
                .tool(&tool_id)
                .map(|t| t.tool_id.clone())
                .unwrap_or(tool_id);
            Action::Call { tool_id: id, args }
        }
        other => other,
    }
}

impl Policy for RemoteLlmPolicy {
    fn decide(
        &mut self,
        state: &DecisionState,
        ctx: &PolicyContext<'_>,
    ) -> Result<Decision, PolicyError> {
        let request = render_request(state, ctx.tree, ctx.prompts)?;
        let tools: Vec<Value> = request
            .tools
            .iter()
            .map(FunctionSchema::to_tool_json)
            .collect();
        let body = json!({
            "model": self.config.model,
            "messages": request.messages,
            "tools": tools,
            "temperature": self.config.temperature,
        });
        let mut last_err = None;
        for attempt in 0..=self.config.retries {
            let outcome = self
                .post(&body)
                .and_then(|resp| Ok((action_from_response(&resp)?, resp)));
            match outcome {
                Ok((action, resp)) => {
                    return Ok(Decision {
                        action: qualify(action, ctx.tree),
                        prompt_tokens: resp["usage"]["prompt_tokens"].as_u64(),
                    })
                }
                Err(e) => {
                    log::warn!("remote policy attempt {} failed: {e}", attempt + 1);
                    last_err = Some(e);
                }
            }
        }
        Err(last_err.expect("at least one attempt"))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bundled;
    use crate::engine::{run_episode, EpisodeSetup, Paradigm};
    use crate::metrics::tokens::TokenSource;
    use std::io::{BufRead, BufReader, Read, Write};
    use std::net::TcpListener;

    /// Serves `bodies` in order, one per connection, and returns the
    /// endpoint URL.
    fn serve(bodies: Vec<String>) -> String {
        let listener = TcpListener::bind("127.0.0.1:0").unwrap();
        let addr = listener.local_addr().unwrap();
        std::thread::spawn(move || {
            for body in bodies {
                let (mut stream, _) = listener.accept().unwrap();
                let mut reader = BufReader::new(stream.try_clone().unwrap());
                let mut len = 0usize;
                loop {
                    let mut line = String::new();
                    reader.read_line(&mut line).unwrap();
                    if line == "\r\n" || line.is_empty() {
                        break;
                    }
                    let lower = line.to_ascii_lowercase();
                    if let Some(v) = lower.strip_prefix("content-length:") {
                        len = v.trim().parse().unwrap();
                    }
                }
                let mut buf = vec![0; len];
                reader.read_exact(&mut buf).unwrap();
                let resp = format!(
                    "HTTP/1.1 200 OK\r\ncontent-type: application/json\r\ncontent-length: {}\r\nconnection: close\r\n\r\n{}",
                    body.len(),
                    body
                );
                stream.write_all(resp.as_bytes()).unwrap();
            }
        });
        format!("http://{addr}/v1/chat/completions")
    }

    fn tool_call(name: &str, args: Value) -> String {
        json!({
            "choices": [{"message": {"role": "assistant", "content": null, "tool_calls": [
                {"id": "x", "type": "function", "function": {"name": name, "arguments": args.to_string()}}
            ]}}],
            "usage": {"prompt_tokens": 1234}
        })
        .to_string()
    }

    #[test]
    fn parses_tool_calls_and_content() {
        let resp: Value =
            serde_json::from_str(&tool_call("skill", json!({"kit": "index"}))).unwrap();
        assert_eq!(action_from_response(&resp).unwrap(), Action::skill("index"));
        let resp = json!({"choices": [{"message": {"content": "<Answer>C<Answer>"}}]});
        assert_eq!(action_from_response(&resp).unwrap(), Action::answer("C"));
    }

    #[test]
    fn episode_against_local_server() {
        let bodies = vec![
            "not json at all".to_string(),
            tool_call("get_filelist", json!({"path": "question33/"})),
            json!({"choices": [{"message": {"content": "done <Answer>D</Answer>"}}], "usage": {"prompt_tokens": 99}})
                .to_string(),
        ];
        let endpoint = serve(bodies);
        let tree = bundled::reference_tree();
        let fixture = bundled::fixture_a1();
        let mut policy = RemoteLlmPolicy::new(RemoteLlmConfig::new(endpoint, "m")).unwrap();
        let mut setup = EpisodeSetup::new(Paradigm::Flat);
        setup.token_source = TokenSource::Provider;
        let rec = run_episode(&fixture, &tree, &setup, &mut policy).unwrap();
        assert_eq!(rec.answer.as_deref(), Some("D"));
        assert_eq!(rec.calls[0].tool, "get_filelist");
        assert_eq!(rec.turns[0].input_tokens, 1234);
        assert_eq!(rec.turns[1].input_tokens, 99);
    }

    #[test]
    fn config_requires_endpoint_and_model() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("c.json");
        std::fs::write(&path, r#"{"endpoint":"http://x","model":""}"#).unwrap();
        assert!(matches!(
            RemoteLlmConfig::load(&path),
            Err(PolicyError::Config(_))
        ));
    }
}
