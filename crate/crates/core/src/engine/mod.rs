//! Sequential decision engine.
//!
//! A [`DecisionState`] holds the query, the callable tool set, the
//! interaction history and the paradigm whose rules govern it. The paradigm
//! fixes the initial context and which actions are legal:
//!
//! | paradigm    | initial context              | callable set            | explore actions |
//! |-------------|------------------------------|-------------------------|-----------------|
//! | `Active`    | kit table                    | starts empty, grows     | skill, doc      |
//! | `TwoLayers` | every catalog, grouped       | starts empty, grows     | doc             |
//! | `Flat`      | every tool document          | all tools, fixed        | none            |
//! | `Rag`       | documents of retrieved tools | retrieved tools, fixed  | none            |
//!
//! A tool becomes callable only once its document has been disclosed, so the
//! callable set is exactly the set of tools whose documents appear in the
//! initial context or in a `doc` observation.

mod episode;

pub use episode::{run_episode, CallRecord, EpisodeSetup, TrajectoryRecord, TurnRecord};

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::environment::{Args, Environment};
use crate::registry::{parse_tool_id, RegistryError, SkillTree};

pub const DEFAULT_MAX_TURNS: usize = 32;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Paradigm {
    Active,
    Flat,
    Rag {
        k: usize,
        forced: Vec<String>,
    },
    #[serde(rename = "2layers")]
    TwoLayers,
}

impl Paradigm {
    pub fn label(&self) -> &'static str {
        match self {
            Paradigm::Active => "active",
            Paradigm::Flat => "flat",
            Paradigm::Rag { .. } => "rag",
            Paradigm::TwoLayers => "2layers",
        }
    }

    pub fn allows_skill(&self) -> bool {
        matches!(self, Paradigm::Active)
    }

    pub fn allows_doc(&self) -> bool {
        matches!(self, Paradigm::Active | Paradigm::TwoLayers)
    }

    /// Flat and Rag: the callable set is decided outside the agent.
    pub fn is_passive(&self) -> bool {
        matches!(self, Paradigm::Flat | Paradigm::Rag { .. })
    }
}

impl fmt::Display for Paradigm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum Action {
    #[serde(rename = "skill")]
    ExploreSkill {
        kit: String,
    },
    #[serde(rename = "doc")]
    ExploreDoc {
        tool_id: String,
    },
    Call {
        tool_id: String,
        #[serde(default)]
        args: Args,
    },
    Answer {
        text: String,
    },
    #[serde(rename = "filelist")]
    FileList {
        path: String,
    },
}

impl Action {
    pub fn skill(kit: impl Into<String>) -> Self {
        Action::ExploreSkill { kit: kit.into() }
    }

    pub fn doc(tool_id: impl Into<String>) -> Self {
        Action::ExploreDoc {
            tool_id: tool_id.into(),
        }
    }

    pub fn call(tool_id: impl Into<String>, args: Args) -> Self {
        Action::Call {
            tool_id: tool_id.into(),
            args,
        }
    }

    pub fn answer(text: impl Into<String>) -> Self {
        Action::Answer { text: text.into() }
    }

    pub fn filelist(path: impl Into<String>) -> Self {
        Action::FileList { path: path.into() }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            Action::ExploreSkill { .. } => "skill",
            Action::ExploreDoc { .. } => "doc",
            Action::Call { .. } => "call",
            Action::Answer { .. } => "answer",
            Action::FileList { .. } => "filelist",
        }
    }

    pub fn is_explore(&self) -> bool {
        matches!(
            self,
            Action::ExploreSkill { .. } | Action::ExploreDoc { .. }
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ObservationKind {
    InfoSummary,
    InfoCatalog,
    InfoDoc,
    Exec,
    Error,
    Final,
}

impl ObservationKind {
    pub fn is_info(self) -> bool {
        matches!(
            self,
            ObservationKind::InfoSummary | ObservationKind::InfoCatalog | ObservationKind::InfoDoc
        )
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Observation {
    pub kind: ObservationKind,
    pub payload: String,
}

impl Observation {
    pub fn new(kind: ObservationKind, payload: impl Into<String>) -> Self {
        Self {
            kind,
            payload: payload.into(),
        }
    }

    pub fn exec(payload: impl Into<String>) -> Self {
        Self::new(ObservationKind::Exec, payload)
    }

    /// Error observations always carry a message.
    pub fn error(payload: impl Into<String>) -> Self {
        let payload = payload.into();
        let payload = if payload.trim().is_empty() {
            "unknown error".to_string()
        } else {
            payload
        };
        Self::new(ObservationKind::Error, payload)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Turn {
    pub action: Action,
    pub observation: Observation,
}

#[derive(Debug, Error)]
pub enum EngineError {
    #[error("tool not callable: `{0}` has not been disclosed")]
    NotCallable(String),
    #[error("action not in paradigm action space: `{action}` under {paradigm}")]
    NotInActionSpace {
        action: &'static str,
        paradigm: &'static str,
    },
    #[error("unknown parameter `{param}` for tool `{tool}`")]
    UnknownParameter { tool: String, param: String },
    #[error(transparent)]
    Registry(#[from] RegistryError),
    #[error("episode terminated")]
    Terminated,
    #[error("the rag paradigm needs a retrieval result")]
    MissingRetrieval,
}

/// Decision state: query, callable set, history, step counter and paradigm.
#[derive(Debug, Clone, PartialEq)]
pub struct DecisionState {
    query: String,
    paradigm: Paradigm,
    initial_context: String,
    callable: BTreeSet<String>,
    trajectory: Vec<Turn>,
    step: usize,
    terminated: bool,
    final_answer: Option<String>,
    explored_kits: BTreeSet<String>,
    warnings: Vec<String>,
}

/// Builds the initial state for `paradigm`. `retrieved` (tool names) is
/// required for Rag and ignored otherwise.
pub fn init_state(
    query: impl Into<String>,
    tree: &SkillTree,
    paradigm: Paradigm,
    retrieved: Option<&[String]>,
) -> Result<DecisionState, EngineError> {
    let (initial_context, callable) = match &paradigm {
        Paradigm::Active => (tree.render_kit_table(), BTreeSet::new()),
        Paradigm::TwoLayers => (tree.render_all_catalogs(), BTreeSet::new()),
        Paradigm::Flat => {
            let docs: Vec<String> = tree
                .tools()
                .map(crate::registry::render_tool_document)
                .collect();
            (
                docs.join("\n"),
                tree.tool_names().map(str::to_string).collect(),
            )
        }
        Paradigm::Rag { forced, .. } => {
            let retrieved = retrieved.ok_or(EngineError::MissingRetrieval)?;
            let mut docs = Vec::with_capacity(retrieved.len());
            let mut callable = BTreeSet::new();
            for name in retrieved.iter().chain(forced) {
                let tool = tree
                    .tool(name)
                    .ok_or_else(|| RegistryError::UnknownTool(name.clone()))?;
                if callable.insert(tool.name.clone()) {
                    docs.push(crate::registry::render_tool_document(tool));
                }
            }
            (docs.join("\n"), callable)
        }
    };
    Ok(DecisionState {
        query: query.into(),
        paradigm,
        initial_context,
        callable,
        trajectory: Vec::new(),
        step: 1,
        terminated: false,
        final_answer: None,
        explored_kits: BTreeSet::new(),
        warnings: Vec::new(),
    })
}

impl DecisionState {
    pub fn query(&self) -> &str {
        &self.query
    }

    pub fn paradigm(&self) -> &Paradigm {
        &self.paradigm
    }

    /// `o_0`.
    pub fn initial_context(&self) -> &str {
        &self.initial_context
    }

    pub fn initial_observation(&self) -> Observation {
        let kind = match self.paradigm {
            Paradigm::Active => ObservationKind::InfoSummary,
            Paradigm::TwoLayers => ObservationKind::InfoCatalog,
            Paradigm::Flat | Paradigm::Rag { .. } => ObservationKind::InfoDoc,
        };
        Observation::new(kind, self.initial_context.clone())
    }

    /// Callable tool names, `V_k`.
    pub fn callable(&self) -> &BTreeSet<String> {
        &self.callable
    }

    pub fn is_callable(&self, name: &str) -> bool {
        self.callable.contains(name)
    }

    pub fn trajectory(&self) -> &[Turn] {
        &self.trajectory
    }

    /// `k`, starting at 1.
    pub fn step(&self) -> usize {
        self.step
    }

    pub fn terminated(&self) -> bool {
        self.terminated
    }

    pub fn final_answer(&self) -> Option<&str> {
        self.final_answer.as_deref()
    }

    pub fn explored_kits(&self) -> &BTreeSet<String> {
        &self.explored_kits
    }

    pub fn warnings(&self) -> &[String] {
        &self.warnings
    }

    /// Applies one action. On error the state is left untouched.
    pub fn step_with(
        &mut self,
        action: Action,
        env: &mut dyn Environment,
        tree: &SkillTree,
    ) -> Result<Observation, EngineError> {
        if self.terminated {
            return Err(EngineError::Terminated);
        }
        let observation = match &action {
            Action::ExploreSkill { kit } => {
                self.require(self.paradigm.allows_skill(), &action)?;
                let catalog = tree.render_catalog(kit)?;
                self.explored_kits.insert(kit.clone());
                Observation::new(ObservationKind::InfoCatalog, catalog)
            }
            Action::ExploreDoc { tool_id } => {
                self.require(self.paradigm.allows_doc(), &action)?;
                let tool = tree.tool_by_id(tool_id)?;
                let doc = crate::registry::render_tool_document(tool);
                if self.paradigm == Paradigm::Active && !self.explored_kits.contains(&tool.kit) {
                    let msg = format!("doc `{tool_id}` requested before skill `{}`", tool.kit);
                    log::warn!("{msg}");
                    self.warnings.push(msg);
                }
                self.callable.insert(tool.name.clone());
                Observation::new(ObservationKind::InfoDoc, doc)
            }
            Action::Call { tool_id, args } => {
                let (_, name) = parse_tool_id(tool_id)?;
                let tool = tree.tool_by_id(tool_id)?;
                if !self.callable.contains(name) {
                    return Err(EngineError::NotCallable(tool_id.clone()));
                }
                if let Some(param) = args.keys().find(|k| !tool.has_param(k)) {
                    return Err(EngineError::UnknownParameter {
                        tool: tool_id.clone(),
                        param: param.clone(),
                    });
                }
                env.execute(&tool.name, args)
            }
            Action::FileList { path } => env.filelist(path),
            Action::Answer { text } => {
                self.terminated = true;
                self.final_answer = Some(text.clone());
                Observation::new(ObservationKind::Final, text.clone())
            }
        };
        self.push(action, observation.clone());
        Ok(observation)
    }

    /// Records an action the engine refused, with the refusal as an error
    /// observation, so the policy sees it on the next turn.
    pub fn record_rejection(&mut self, action: Action, error: &EngineError) -> Observation {
        let observation = Observation::error(error.to_string());
        self.push(action, observation.clone());
        observation
    }

    fn push(&mut self, action: Action, observation: Observation) {
        self.trajectory.push(Turn {
            action,
            observation,
        });
        self.step += 1;
    }

    fn require(&self, allowed: bool, action: &Action) -> Result<(), EngineError> {
        if allowed {
            Ok(())
        } else {
            Err(EngineError::NotInActionSpace {
                action: action.kind(),
                paradigm: self.paradigm.label(),
            })
        }
    }
}

/// Free-function form of [`DecisionState::step_with`].
pub fn step(
    state: &mut DecisionState,
    action: Action,
    env: &mut dyn Environment,
    tree: &SkillTree,
) -> Result<Observation, EngineError> {
    state.step_with(action, env, tree)
}
