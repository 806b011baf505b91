use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use super::PolicyError;
use crate::engine::{Action, DecisionState, ObservationKind, Paradigm};
use crate::registry::{unqualified, SkillTree, ToolSpec};

pub const KIT_TABLE_PLACEHOLDER: &str = "{kit_table}";

pub const ACTIVE_SYSTEM_PROMPT: &str = "You are an Earth-observation analysis assistant.
1. Solve the multiple-choice question by calling tools on the data files it refers to.
2. Give exactly one choice at the end, written as <Answer>Your choice<Answer>
3. Tools are reached through four meta-tools: skill, doc, call, filelist. Always go skill -> doc -> call: open a kit with skill to see its catalog, read a tool's doc, then call it. A tool whose doc you have not read cannot be called. On an error, reread the doc and fix the arguments; retry at most once before switching tool. doc and call take tool_id as 'kit.tool_name', e.g. 'statistics.mean'. call takes tool_args as a JSON string, e.g. tool_args='{\"values\": [1.0, 2.0]}'. filelist lists files under a data path.
Kits:
{kit_table}";

pub const TWO_LAYERS_SYSTEM_PROMPT: &str = "You are an Earth-observation analysis assistant.
1. Solve the multiple-choice question by calling tools on the data files it refers to.
2. Give exactly one choice at the end, written as <Answer>Your choice<Answer>
3. Tools are reached through three meta-tools: doc, call, filelist. Always go doc -> call: read a tool's doc, then call it. A tool whose doc you have not read cannot be called. On an error, reread the doc and fix the arguments; retry at most once before switching tool. doc and call take tool_id as 'kit.tool_name'. call takes tool_args as a JSON string. filelist lists files under a data path.
Tool catalogs:
{kit_table}";

pub const BASELINE_SYSTEM_PROMPT: &str = "You are an Earth-observation analysis assistant.
1. Solve the multiple-choice question by calling the available tools on the data files it refers to.
2. Give exactly one choice at the end, written as <Answer>Your choice<Answer>";

/// System prompt templates, one per paradigm family.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PromptSet {
    pub active: String,
    pub two_layers: String,
    pub baseline: String,
}

impl Default for PromptSet {
    fn default() -> Self {
        Self {
            active: ACTIVE_SYSTEM_PROMPT.to_string(),
            two_layers: TWO_LAYERS_SYSTEM_PROMPT.to_string(),
            baseline: BASELINE_SYSTEM_PROMPT.to_string(),
        }
    }
}

impl PromptSet {
    pub fn for_paradigm(&self, paradigm: &Paradigm) -> &str {
        match paradigm {
            Paradigm::Active => &self.active,
            Paradigm::TwoLayers => &self.two_layers,
            Paradigm::Flat | Paradigm::Rag { .. } => &self.baseline,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Role {
    System,
    User,
    Assistant,
    Tool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FunctionCall {
    pub name: String,
    /// JSON-encoded argument object.
    pub arguments: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ToolCall {
    pub id: String,
    #[serde(rename = "type")]
    pub kind: String,
    pub function: FunctionCall,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Message {
    pub role: Role,
    pub content: String,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub tool_calls: Vec<ToolCall>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tool_call_id: Option<String>,
}

impl Message {
    fn text(role: Role, content: impl Into<String>) -> Self {
        Self {
            role,
            content: content.into(),
            tool_calls: Vec::new(),
            tool_call_id: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FunctionSchema {
    pub name: String,
    pub description: String,
    pub parameters: Value,
}

impl FunctionSchema {
    /// Wire form inside a chat-completions `tools` array.
    pub fn to_tool_json(&self) -> Value {
        json!({"type": "function", "function": self})
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChatRequest {
    pub messages: Vec<Message>,
    pub tools: Vec<FunctionSchema>,
}

impl ChatRequest {
    /// Everything the model reads on this turn, flattened for token counting.
    pub fn prompt_text(&self) -> String {
        let mut out = String::new();
        for m in &self.messages {
            out.push_str(&m.content);
            out.push('\n');
            for c in &m.tool_calls {
                out.push_str(&c.function.name);
                out.push_str(&c.function.arguments);
                out.push('\n');
            }
        }
        if !self.tools.is_empty() {
            let tools: Vec<Value> = self
                .tools
                .iter()
                .map(FunctionSchema::to_tool_json)
                .collect();
            out.push_str(&Value::Array(tools).to_string());
        }
        out
    }
}

fn param_type(ty: &str) -> Value {
    match ty {
        "str" => json!({"type": "string"}),
        "float" => json!({"type": "number"}),
        "int" => json!({"type": "integer"}),
        "bool" => json!({"type": "boolean"}),
        "list[str]" => json!({"type": "array", "items": {"type": "string"}}),
        "list[float]" => json!({"type": "array", "items": {"type": "number"}}),
        "list[int]" => json!({"type": "array", "items": {"type": "integer"}}),
        _ => json!({}),
    }
}

/// Function schema for one concrete tool, as registered under Flat and Rag.
pub fn tool_schema(tool: &ToolSpec) -> FunctionSchema {
    let mut properties = serde_json::Map::new();
    let mut required = Vec::new();
    for p in &tool.params {
        properties.insert(p.name.clone(), param_type(&p.ty));
        if p.required {
            required.push(Value::String(p.name.clone()));
        }
    }
    FunctionSchema {
        name: tool.name.clone(),
        description: tool.document.clone(),
        parameters: json!({"type": "object", "properties": properties, "required": required}),
    }
}

fn string_params(description: &str, names: &[&str]) -> Value {
    let mut properties = serde_json::Map::new();
    for n in names {
        properties.insert(
            n.to_string(),
            json!({"type": "string", "description": description}),
        );
    }
    json!({"type": "object", "properties": properties, "required": names})
}

/// Meta-tool schemas for the exploring paradigms; empty for Flat and Rag.
pub fn meta_tool_schemas(paradigm: &Paradigm) -> Vec<FunctionSchema> {
    let mut out = Vec::new();
    if paradigm.allows_skill() {
        out.push(FunctionSchema {
            name: "skill".into(),
            description: "Open a kit and list its tools with one-line briefs.".into(),
            parameters: string_params("kit id", &["kit"]),
        });
    }
    if paradigm.allows_doc() {
        out.push(FunctionSchema {
            name: "doc".into(),
            description: "Read the full documentation of one tool and make it callable.".into(),
            parameters: string_params("'kit.tool_name'", &["tool_id"]),
        });
        out.push(FunctionSchema {
            name: "call".into(),
            description: "Call a tool whose documentation has been read.".into(),
            parameters: json!({
                "type": "object",
                "properties": {
                    "tool_id": {"type": "string", "description": "'kit.tool_name'"},
                    "tool_args": {"type": "string", "description": "JSON object of arguments"}
                },
                "required": ["tool_id", "tool_args"]
            }),
        });
        out.push(filelist_schema());
    }
    out
}

fn filelist_schema() -> FunctionSchema {
    FunctionSchema {
        name: "filelist".into(),
        description: "List data files under a path.".into(),
        parameters: string_params("directory path", &["path"]),
    }
}

fn substitute(template: &str, table: &str) -> Result<String, PolicyError> {
    if !template.contains(KIT_TABLE_PLACEHOLDER) {
        return Err(PolicyError::MissingPlaceholder);
    }
    Ok(template.replace(KIT_TABLE_PLACEHOLDER, table))
}

fn assistant_call(paradigm: &Paradigm, action: &Action) -> Option<FunctionCall> {
    let passive = paradigm.is_passive();
    let (name, arguments) = match action {
        Action::ExploreSkill { kit } => ("skill".to_string(), json!({"kit": kit})),
        Action::ExploreDoc { tool_id } => ("doc".to_string(), json!({"tool_id": tool_id})),
        Action::Call { tool_id, args } if passive => {
            (unqualified(tool_id).to_string(), json!(args))
        }
        Action::Call { tool_id, args } => {
            let encoded = serde_json::to_string(args).expect("args serialize");
            (
                "call".to_string(),
                json!({"tool_id": tool_id, "tool_args": encoded}),
            )
        }
        Action::FileList { path } if passive => ("get_filelist".to_string(), json!({"path": path})),
        Action::FileList { path } => ("filelist".to_string(), json!({"path": path})),
        Action::Answer { .. } => return None,
    };
    Some(FunctionCall {
        name,
        arguments: arguments.to_string(),
    })
}

/// Chat transcript for `state`: system prompt, query, then one assistant
/// message and one observation message per turn.
pub fn render_messages(state: &DecisionState, template: &str) -> Result<Vec<Message>, PolicyError> {
    let paradigm = state.paradigm();
    let system = match paradigm {
        Paradigm::Active | Paradigm::TwoLayers => substitute(template, state.initial_context())?,
        Paradigm::Flat | Paradigm::Rag { .. } => template.to_string(),
    };
    let mut messages = Vec::with_capacity(2 + 2 * state.trajectory().len());
    messages.push(Message::text(Role::System, system));
    messages.push(Message::text(Role::User, state.query()));
    for (i, turn) in state.trajectory().iter().enumerate() {
        let obs = &turn.observation;
        let content = if obs.kind == ObservationKind::Error {
            format!("ERROR: {}", obs.payload)
        } else {
            obs.payload.clone()
        };
        match assistant_call(paradigm, &turn.action) {
            Some(function) => {
                let id = format!("call_{}", i + 1);
                messages.push(Message {
                    role: Role::Assistant,
                    content: String::new(),
                    tool_calls: vec![ToolCall {
                        id: id.clone(),
                        kind: "function".into(),
                        function,
                    }],
                    tool_call_id: None,
                });
                messages.push(Message {
                    role: Role::Tool,
                    content,
                    tool_calls: Vec::new(),
                    tool_call_id: Some(id),
                });
            }
            None => {
                let Action::Answer { text } = &turn.action else {
                    unreachable!()
                };
                messages.push(Message::text(
                    Role::Assistant,
                    format!("<Answer>{text}<Answer>"),
                ));
                messages.push(Message::text(Role::User, content));
            }
        }
    }
    Ok(messages)
}

/// Messages plus the function schemas offered on this turn. Under Flat and
/// Rag every callable tool is offered with its full document.
pub fn render_request(
    state: &DecisionState,
    tree: &SkillTree,
    prompts: &PromptSet,
) -> Result<ChatRequest, PolicyError> {
    let paradigm = state.paradigm();
    let messages = render_messages(state, prompts.for_paradigm(paradigm))?;
    let tools = if paradigm.is_passive() {
        let mut tools: Vec<FunctionSchema> = tree
            .tools()
            .filter(|t| state.is_callable(&t.name))
            .map(tool_schema)
            .collect();
        if !state.is_callable("get_filelist") {
            let mut fl = filelist_schema();
            fl.name = "get_filelist".into();
            tools.push(fl);
        }
        tools
    } else {
        meta_tool_schemas(paradigm)
    };
    Ok(ChatRequest { messages, tools })
}
