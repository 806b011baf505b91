use serde::{Deserialize, Serialize};
use serde_json::json;

use super::{init_state, Action, EngineError, ObservationKind, Paradigm, DEFAULT_MAX_TURNS};
use crate::environment::{Args, MockEnvironment, QuestionFixture};
use crate::metrics::tokens::{count_tokens, TokenSource};
use crate::policy::{render_request, Policy, PolicyContext, PromptSet};
use crate::registry::{unqualified, SkillTree};

/// Everything an episode needs besides the fixture, tree and policy.
#[derive(Debug, Clone)]
pub struct EpisodeSetup {
    pub paradigm: Paradigm,
    /// Retrieved tool names (forced includes already appended); Rag only.
    pub retrieved: Option<Vec<String>>,
    pub max_turns: usize,
    pub token_source: TokenSource,
    pub prompts: PromptSet,
}

impl EpisodeSetup {
    pub fn new(paradigm: Paradigm) -> Self {
        Self {
            paradigm,
            retrieved: None,
            max_turns: DEFAULT_MAX_TURNS,
            token_source: TokenSource::Builtin,
            prompts: PromptSet::default(),
        }
    }

    pub fn with_retrieved(mut self, retrieved: Vec<String>) -> Self {
        self.retrieved = Some(retrieved);
        self
    }

    pub fn with_max_turns(mut self, max_turns: usize) -> Self {
        self.max_turns = max_turns.max(1);
        self
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TurnRecord {
    pub action: Action,
    pub observation_kind: ObservationKind,
    pub observation_len: usize,
    pub input_tokens: u64,
}

/// One executed tool call; `tool` is the unqualified name and filelist
/// requests are logged as `get_filelist`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CallRecord {
    pub tool: String,
    pub args: Args,
}

/// One episode, persisted as a single JSONL line.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrajectoryRecord {
    pub question_id: String,
    pub paradigm: String,
    pub turns: Vec<TurnRecord>,
    pub calls: Vec<CallRecord>,
    pub answer: Option<String>,
    pub terminated: bool,
    pub turn_count: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub failure: Option<String>,
}

impl TrajectoryRecord {
    pub fn turn_tokens(&self) -> impl Iterator<Item = u64> + '_ {
        self.turns.iter().map(|t| t.input_tokens)
    }

    pub fn count_actions(&self, kind: &str) -> usize {
        self.turns
            .iter()
            .filter(|t| t.action.kind() == kind)
            .count()
    }
}

/// Runs one episode to an answer or to `max_turns` policy invocations.
///
/// Actions the engine refuses are recorded as error observations and the
/// episode continues. A policy error ends the episode; the partial
/// trajectory is kept and `failure` is set.
pub fn run_episode(
    fixture: &QuestionFixture,
    tree: &SkillTree,
    setup: &EpisodeSetup,
    policy: &mut dyn Policy,
) -> Result<TrajectoryRecord, EngineError> {
    let mut state = init_state(
        fixture.prompt_text(),
        tree,
        setup.paradigm.clone(),
        setup.retrieved.as_deref(),
    )?;
    let mut env = MockEnvironment::new(fixture);
    let ctx = PolicyContext {
        tree,
        fixture,
        prompts: &setup.prompts,
    };
    let mut turns = Vec::new();
    let mut calls = Vec::new();
    let mut failure = None;

    while !state.terminated() && turns.len() < setup.max_turns {
        let estimated = match render_request(&state, tree, &setup.prompts) {
            Ok(request) => count_tokens(&request.prompt_text()) as u64,
            Err(e) => {
                failure = Some(e.to_string());
                break;
            }
        };
        let decision = match policy.decide(&state, &ctx) {
            Ok(d) => d,
            Err(e) => {
                log::warn!("{}: policy failed: {e}", fixture.question_id);
                failure = Some(e.to_string());
                break;
            }
        };
        let input_tokens = match setup.token_source {
            TokenSource::Builtin => estimated,
            TokenSource::Provider => decision.prompt_tokens.unwrap_or(estimated),
        };
        let action = decision.action;
        let observation = match state.step_with(action.clone(), &mut env, tree) {
            Ok(obs) => {
                match &action {
                    Action::Call { tool_id, args } => calls.push(CallRecord {
                        tool: unqualified(tool_id).to_string(),
                        args: args.clone(),
                    }),
                    Action::FileList { path } => calls.push(CallRecord {
                        tool: "get_filelist".to_string(),
                        args: filelist_args(path),
                    }),
                    _ => {}
                }
                obs
            }
            Err(e) => {
                log::debug!("{}: rejected {}: {e}", fixture.question_id, action.kind());
                state.record_rejection(action.clone(), &e)
            }
        };
        turns.push(TurnRecord {
            action,
            observation_kind: observation.kind,
            observation_len: observation.payload.len(),
            input_tokens,
        });
    }

    Ok(TrajectoryRecord {
        question_id: fixture.question_id.clone(),
        paradigm: setup.paradigm.label().to_string(),
        turn_count: turns.len(),
        turns,
        calls,
        answer: state.final_answer().map(str::to_string),
        terminated: state.terminated(),
        failure,
    })
}

pub(crate) fn filelist_args(path: &str) -> Args {
    let mut args = Args::new();
    args.insert("path".to_string(), json!(path));
    args
}
