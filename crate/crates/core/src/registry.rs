//! Hierarchical skill tree: kits, tool briefs and tool documents.
//!
//! The tree is an orthogonal partition of the tool library into kits. Each
//! kit carries a short summary (the skill layer), each tool a one-line brief
//! (the catalog layer) and a full execution document (the documentation
//! layer). Everything is loaded from a JSON manifest and validated once; the
//! resulting [`SkillTree`] is immutable.
//!
//! Manifest order is the only ordering used anywhere in rendering, so the
//! prompts built from a tree are byte-stable across runs.

use std::collections::HashSet;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use indexmap::IndexMap;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::metrics::tokens::count_tokens;

#[derive(Debug, Error)]
pub enum RegistryError {
    #[error("failed to read manifest {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("malformed manifest: {0}")]
    Parse(#[from] serde_json::Error),
    #[error("validation error: {0}")]
    Invalid(#[from] ValidationError),
    #[error("unknown kit `{0}`")]
    UnknownKit(String),
    #[error("unknown tool `{0}`")]
    UnknownTool(String),
    #[error("malformed tool id `{0}`: expected 'kit.tool_name'")]
    MalformedToolId(String),
}

/// First violated tree invariant.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ValidationError {
    #[error("manifest has no kits")]
    NoKits,
    #[error("duplicate kit `{0}`")]
    DuplicateKit(String),
    #[error("invalid kit id `{0}`")]
    InvalidKitId(String),
    #[error("empty member list in kit `{0}`")]
    EmptyMemberList(String),
    #[error("empty summary for kit `{0}`")]
    EmptySummary(String),
    #[error("duplicate tool `{0}`")]
    DuplicateTool(String),
    #[error("invalid tool name `{0}`")]
    InvalidToolName(String),
    #[error("empty brief for tool `{0}`")]
    EmptyBrief(String),
    #[error("empty document for tool `{0}`")]
    EmptyDocument(String),
    #[error("document of tool `{0}` is shorter than its brief")]
    DocumentShorterThanBrief(String),
    #[error("member lists do not partition the tool set")]
    PartitionMismatch,
    #[error("duplicate parameter `{param}` on tool `{tool}`")]
    DuplicateParam { tool: String, param: String },
}

// ---------------------------------------------------------------------------
// Manifest (wire format)
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub kits: Vec<KitEntry>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KitEntry {
    pub kit: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub summary: Option<String>,
    pub applicable_tasks: String,
    pub typical_usage: String,
    pub tools: Vec<ToolEntry>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ToolEntry {
    pub name: String,
    pub brief: String,
    pub document: String,
    #[serde(default)]
    pub params: Vec<ParamSpec>,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ParamSpec {
    pub name: String,
    #[serde(rename = "type")]
    pub ty: String,
    pub required: bool,
}

// ---------------------------------------------------------------------------
// Domain types
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ToolSpec {
    /// `kit.name`, re-qualified whenever the tool moves to another kit.
    pub tool_id: String,
    pub name: String,
    pub kit: String,
    pub brief: String,
    pub document: String,
    pub params: Vec<ParamSpec>,
}

impl ToolSpec {
    pub fn has_param(&self, name: &str) -> bool {
        self.params.iter().any(|p| p.name == name)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SkillNode {
    pub kit_id: String,
    pub summary: String,
    pub applicable_tasks: String,
    pub typical_usage: String,
    pub member_tool_ids: Vec<String>,
}

/// Validated, immutable skill tree.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SkillTree {
    nodes: Vec<SkillNode>,
    tools: IndexMap<String, ToolSpec>,
}

/// Splits a qualified `kit.name` id. Kit part is `[a-z0-9_]+`, name part
/// `[a-zA-Z0-9_]+`.
pub fn parse_tool_id(tool_id: &str) -> Result<(&str, &str), RegistryError> {
    let malformed = || RegistryError::MalformedToolId(tool_id.to_string());
    let (kit, name) = tool_id.split_once('.').ok_or_else(malformed)?;
    if !is_kit_id(kit) || !is_tool_name(name) {
        return Err(malformed());
    }
    Ok((kit, name))
}

/// Strips a kit prefix if present (`statistics.mean` -> `mean`).
pub fn unqualified(tool: &str) -> &str {
    tool.rsplit_once('.').map_or(tool, |(_, name)| name)
}

fn is_kit_id(s: &str) -> bool {
    !s.is_empty()
        && s.bytes()
            .all(|b| b.is_ascii_lowercase() || b.is_ascii_digit() || b == b'_')
}

fn is_tool_name(s: &str) -> bool {
    !s.is_empty() && s.bytes().all(|b| b.is_ascii_alphanumeric() || b == b'_')
}

pub fn load_manifest(path: impl AsRef<Path>) -> Result<SkillTree, RegistryError> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|source| RegistryError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    SkillTree::from_json(&text)
}

impl SkillTree {
    pub fn from_json(text: &str) -> Result<Self, RegistryError> {
        let manifest: Manifest = serde_json::from_str(text)?;
        Ok(Self::from_manifest(manifest)?)
    }

    pub fn from_manifest(manifest: Manifest) -> Result<Self, ValidationError> {
        if manifest.kits.is_empty() {
            return Err(ValidationError::NoKits);
        }
        let mut nodes = Vec::with_capacity(manifest.kits.len());
        let mut tools = IndexMap::new();
        let mut kit_ids = HashSet::new();
        for entry in manifest.kits {
            if !is_kit_id(&entry.kit) {
                return Err(ValidationError::InvalidKitId(entry.kit));
            }
            if !kit_ids.insert(entry.kit.clone()) {
                return Err(ValidationError::DuplicateKit(entry.kit));
            }
            if entry.tools.is_empty() {
                return Err(ValidationError::EmptyMemberList(entry.kit));
            }
            let summary = entry
                .summary
                .clone()
                .unwrap_or_else(|| entry.applicable_tasks.clone());
            if summary.trim().is_empty() {
                return Err(ValidationError::EmptySummary(entry.kit));
            }
            let mut members = Vec::with_capacity(entry.tools.len());
            for tool in entry.tools {
                validate_tool(&tool)?;
                if tools.contains_key(&tool.name) {
                    return Err(ValidationError::DuplicateTool(tool.name));
                }
                let tool_id = format!("{}.{}", entry.kit, tool.name);
                members.push(tool_id.clone());
                tools.insert(
                    tool.name.clone(),
                    ToolSpec {
                        tool_id,
                        name: tool.name,
                        kit: entry.kit.clone(),
                        brief: tool.brief,
                        document: tool.document,
                        params: tool.params,
                    },
                );
            }
            nodes.push(SkillNode {
                kit_id: entry.kit,
                summary,
                applicable_tasks: entry.applicable_tasks,
                typical_usage: entry.typical_usage,
                member_tool_ids: members,
            });
        }
        Ok(Self { nodes, tools })
    }

    pub fn to_manifest(&self) -> Manifest {
        let kits = self
            .nodes
            .iter()
            .map(|node| KitEntry {
                kit: node.kit_id.clone(),
                summary: (node.summary != node.applicable_tasks).then(|| node.summary.clone()),
                applicable_tasks: node.applicable_tasks.clone(),
                typical_usage: node.typical_usage.clone(),
                tools: self
                    .members(node)
                    .map(|t| ToolEntry {
                        name: t.name.clone(),
                        brief: t.brief.clone(),
                        document: t.document.clone(),
                        params: t.params.clone(),
                    })
                    .collect(),
            })
            .collect();
        Manifest { kits }
    }

    pub fn nodes(&self) -> &[SkillNode] {
        &self.nodes
    }

    pub fn node(&self, kit_id: &str) -> Result<&SkillNode, RegistryError> {
        self.nodes
            .iter()
            .find(|n| n.kit_id == kit_id)
            .ok_or_else(|| RegistryError::UnknownKit(kit_id.to_string()))
    }

    /// Tools in manifest order.
    pub fn tools(&self) -> impl Iterator<Item = &ToolSpec> {
        self.tools.values()
    }

    pub fn tool_names(&self) -> impl Iterator<Item = &str> {
        self.tools.keys().map(String::as_str)
    }

    pub fn tool_count(&self) -> usize {
        self.tools.len()
    }

    pub fn kit_count(&self) -> usize {
        self.nodes.len()
    }

    /// Lookup by unqualified name.
    pub fn tool(&self, name: &str) -> Option<&ToolSpec> {
        self.tools.get(name)
    }

    /// Position of the tool in manifest order.
    pub fn tool_index(&self, name: &str) -> Option<usize> {
        self.tools.get_index_of(name)
    }

    /// Lookup by qualified `kit.name` id; the kit must be the owning kit.
    pub fn tool_by_id(&self, tool_id: &str) -> Result<&ToolSpec, RegistryError> {
        let (kit, name) = parse_tool_id(tool_id)?;
        match self.tools.get(name) {
            Some(tool) if tool.kit == kit => Ok(tool),
            _ => Err(RegistryError::UnknownTool(tool_id.to_string())),
        }
    }

    pub fn members<'a>(&'a self, node: &'a SkillNode) -> impl Iterator<Item = &'a ToolSpec> + 'a {
        node.member_tool_ids
            .iter()
            .map(move |id| &self.tools[unqualified(id)])
    }

    pub fn node_sizes(&self) -> Vec<usize> {
        self.nodes.iter().map(|n| n.member_tool_ids.len()).collect()
    }

    /// Skill summary layer as a JSON block of kit, applicable tasks and
    /// typical usage per node.
    pub fn render_kit_table(&self) -> String {
        #[derive(Serialize)]
        struct Row<'a> {
            kit: &'a str,
            applicable_tasks: &'a str,
            typical_usage: &'a str,
        }
        let rows: Vec<Row<'_>> = self
            .nodes
            .iter()
            .map(|n| Row {
                kit: &n.kit_id,
                applicable_tasks: &n.applicable_tasks,
                typical_usage: &n.typical_usage,
            })
            .collect();
        serde_json::to_string_pretty(&rows).expect("kit table serializes")
    }

    /// Catalog layer for one kit: one `name -- brief` line per member tool.
    pub fn render_catalog(&self, kit_id: &str) -> Result<String, RegistryError> {
        let node = self.node(kit_id)?;
        let mut out = format!(
            "Kit `{}` ({} tools):\n",
            node.kit_id,
            node.member_tool_ids.len()
        );
        for tool in self.members(node) {
            let _ = writeln!(out, "- {} -- {}", tool.name, tool.brief);
        }
        Ok(out)
    }

    /// All catalogs grouped by kit, in manifest order.
    pub fn render_all_catalogs(&self) -> String {
        self.nodes
            .iter()
            .map(|n| self.render_catalog(&n.kit_id).expect("own kit"))
            .collect::<Vec<_>>()
            .join("\n")
    }

    /// Documentation layer for one tool, addressed as `kit.name`.
    pub fn render_document(&self, tool_id: &str) -> Result<String, RegistryError> {
        let tool = self.tool_by_id(tool_id)?;
        Ok(render_tool_document(tool))
    }

    /// Same tree with tools dealt into the existing nodes by a seeded
    /// shuffle. Node count, node sizes and kit summaries are kept; only
    /// membership changes.
    pub fn random_regroup(&self, seed: u64) -> SkillTree {
        let mut names: Vec<&str> = self.tool_names().collect();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        names.shuffle(&mut rng);

        let mut remaining = names.into_iter();
        let mut nodes = Vec::with_capacity(self.nodes.len());
        let mut tools = IndexMap::with_capacity(self.tools.len());
        for node in &self.nodes {
            let mut members = Vec::with_capacity(node.member_tool_ids.len());
            for name in remaining.by_ref().take(node.member_tool_ids.len()) {
                let mut tool = self.tools[name].clone();
                tool.kit = node.kit_id.clone();
                tool.tool_id = format!("{}.{}", node.kit_id, tool.name);
                members.push(tool.tool_id.clone());
                tools.insert(tool.name.clone(), tool);
            }
            nodes.push(SkillNode {
                member_tool_ids: members,
                ..node.clone()
            });
        }
        SkillTree { nodes, tools }
    }

    /// Sub-tree keeping only the tools accepted by `keep`; kits left empty
    /// are dropped. Tools stay under their original kit.
    pub fn retain(
        &self,
        mut keep: impl FnMut(&ToolSpec) -> bool,
    ) -> Result<SkillTree, ValidationError> {
        let mut manifest = self.to_manifest();
        for kit in &mut manifest.kits {
            kit.tools.retain(|t| keep(&self.tools[&t.name]));
        }
        manifest.kits.retain(|k| !k.tools.is_empty());
        SkillTree::from_manifest(manifest)
    }

    /// Appends the kits of `other` after this tree's kits.
    pub fn merge(&self, other: &SkillTree) -> Result<SkillTree, ValidationError> {
        let mut manifest = self.to_manifest();
        manifest.kits.extend(other.to_manifest().kits);
        SkillTree::from_manifest(manifest)
    }

    /// Re-checks every invariant by rebuilding the tree from its own
    /// manifest; any orphan, duplicate or mis-qualified member shows up as a
    /// difference.
    pub fn validate(&self) -> Result<(), ValidationError> {
        let rebuilt = SkillTree::from_manifest(self.to_manifest())?;
        if rebuilt != *self {
            return Err(ValidationError::PartitionMismatch);
        }
        Ok(())
    }
}

fn validate_tool(tool: &ToolEntry) -> Result<(), ValidationError> {
    if !is_tool_name(&tool.name) {
        return Err(ValidationError::InvalidToolName(tool.name.clone()));
    }
    if tool.brief.trim().is_empty() {
        return Err(ValidationError::EmptyBrief(tool.name.clone()));
    }
    if tool.document.trim().is_empty() {
        return Err(ValidationError::EmptyDocument(tool.name.clone()));
    }
    if count_tokens(&tool.document) < count_tokens(&tool.brief) {
        return Err(ValidationError::DocumentShorterThanBrief(tool.name.clone()));
    }
    let mut names = HashSet::new();
    for p in &tool.params {
        if !names.insert(p.name.as_str()) {
            return Err(ValidationError::DuplicateParam {
                tool: tool.name.clone(),
                param: p.name.clone(),
            });
        }
    }
    Ok(())
}

pub(crate) fn render_tool_document(tool: &ToolSpec) -> String {
    let signature = tool
        .params
        .iter()
        .map(|p| {
            let opt = if p.required { "" } else { "?" };
            format!("{}{}: {}", p.name, opt, p.ty)
        })
        .collect::<Vec<_>>()
        .join(", ");
    format!(
        "Tool `{}`\n{}\nSignature: {}({})\n",
        tool.tool_id, tool.document, tool.name, signature
    )
}
