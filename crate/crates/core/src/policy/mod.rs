//! Decision makers: map a rendered decision state to the next [`Action`].
//!
//! - [`OraclePolicy`] replays a fixture's ground-truth calls, expanded into
//!   whatever the paradigm requires (skill and doc before the first call of
//!   a tool under `Active`, doc only under `TwoLayers`, nothing extra under
//!   the passive paradigms).
//! - [`ScriptedPolicy`] replays a fixed action list.
//! - [`RemoteLlmPolicy`] talks to a chat-completions endpoint.

mod oracle;
mod parse;
mod prompts;
mod remote;
mod scripted;

use std::path::Path;
use std::str::FromStr;

use thiserror::Error;

pub use oracle::{expand_ground_truth, OraclePolicy};
pub use parse::{parse_action, ParseError};
pub use prompts::{
    meta_tool_schemas, render_messages, render_request, tool_schema, ChatRequest, FunctionCall,
    FunctionSchema, Message, PromptSet, Role, ToolCall, ACTIVE_SYSTEM_PROMPT,
    BASELINE_SYSTEM_PROMPT, KIT_TABLE_PLACEHOLDER, TWO_LAYERS_SYSTEM_PROMPT,
};
pub use remote::{RemoteLlmConfig, RemoteLlmPolicy};
pub use scripted::{Script, ScriptedPolicy};

use crate::engine::{Action, DecisionState};
use crate::environment::QuestionFixture;
use crate::registry::SkillTree;

#[derive(Debug, Error)]
pub enum PolicyError {
    #[error("oracle: {0}")]
    Oracle(String),
    #[error("scripted policy has no action left for turn {0}")]
    ScriptExhausted(usize),
    #[error("scripted policy needs at least one action")]
    EmptyScript,
    #[error("unparseable model output: {0}")]
    Parse(#[from] ParseError),
    #[error("remote model request failed: {0}")]
    Transport(String),
    #[error("policy configuration: {0}")]
    Config(String),
    #[error("system prompt template lacks the {{kit_table}} placeholder")]
    MissingPlaceholder,
}

/// Read-only inputs available to a policy at every decision.
#[derive(Debug, Clone, Copy)]
pub struct PolicyContext<'a> {
    pub tree: &'a SkillTree,
    pub fixture: &'a QuestionFixture,
    pub prompts: &'a PromptSet,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Decision {
    pub action: Action,
    /// Prompt tokens as reported by a model provider, if any.
    pub prompt_tokens: Option<u64>,
}

impl From<Action> for Decision {
    fn from(action: Action) -> Self {
        Self {
            action,
            prompt_tokens: None,
        }
    }
}

pub trait Policy: Send {
    fn decide(
        &mut self,
        state: &DecisionState,
        ctx: &PolicyContext<'_>,
    ) -> Result<Decision, PolicyError>;
}

/// Policy selection as given on the command line or in a plan file.
#[derive(Debug, Clone, PartialEq)]
pub enum PolicySpec {
    Oracle,
    Scripted(Script),
    Remote(RemoteLlmConfig),
}

impl PolicySpec {
    /// `oracle`, `scripted:<file>` or `remote:<config file>`.
    pub fn parse(spec: &str) -> Result<Self, PolicyError> {
        if spec == "oracle" {
            return Ok(PolicySpec::Oracle);
        }
        if let Some(path) = spec.strip_prefix("scripted:") {
            return Ok(PolicySpec::Scripted(Script::load(Path::new(path))?));
        }
        if let Some(path) = spec.strip_prefix("remote:") {
            return Ok(PolicySpec::Remote(RemoteLlmConfig::load(Path::new(path))?));
        }
        if spec == "remote" {
            return Ok(PolicySpec::Remote(RemoteLlmConfig::from_env()?));
        }
        Err(PolicyError::Config(format!(
            "unknown policy `{spec}` (expected oracle|scripted:<file>|remote:<config>)"
        )))
    }

    /// Fresh policy instance for one episode.
    pub fn instantiate(&self, question_id: &str) -> Result<Box<dyn Policy>, PolicyError> {
        Ok(match self {
            PolicySpec::Oracle => Box::new(OraclePolicy::new()),
            PolicySpec::Scripted(script) => Box::new(ScriptedPolicy::new(
                script.actions_for(question_id).to_vec(),
            )?),
            PolicySpec::Remote(config) => Box::new(RemoteLlmPolicy::new(config.clone())?),
        })
    }
}

impl FromStr for PolicySpec {
    type Err = PolicyError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Self::parse(s)
    }
}
