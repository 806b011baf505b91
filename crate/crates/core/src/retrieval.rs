//! Tool retrieval for the RAG baseline: embed every tool once, then rank
//! tools by cosine similarity to the query.

use std::str::FromStr;

use serde::{Deserialize, Serialize};
use serde_json::json;
use thiserror::Error;

use crate::registry::{SkillTree, ToolSpec};

pub const EMBED_ENDPOINT_ENV: &str = "EMBED_ENDPOINT";
pub const EMBED_KEY_ENV: &str = "EMBED_API_KEY";
pub const DEFAULT_DIM: usize = 256;

#[derive(Debug, Error)]
pub enum RetrievalError {
    #[error("builtin embedding dimension must be at least 16, got {0}")]
    DimensionTooSmall(usize),
    #[error("forced tool `{0}` is not in the index")]
    UnknownForced(String),
    #[error("embedding service: {0}")]
    Remote(String),
    #[error("embedding spec `{0}` (expected builtin[:dim]|remote[:url])")]
    BadSpec(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum EmbeddingProvider {
    /// Lowercase word tokens hashed into `dim` buckets.
    Builtin { dim: usize },
    /// POST `{"input": [..]}`, answer `{"embeddings": [[..]]}`.
    Remote { endpoint: String },
}

impl Default for EmbeddingProvider {
    fn default() -> Self {
        EmbeddingProvider::Builtin { dim: DEFAULT_DIM }
    }
}

impl FromStr for EmbeddingProvider {
    type Err = RetrievalError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || RetrievalError::BadSpec(s.to_string());
        match s.split_once(':') {
            None if s == "builtin" => Ok(Self::default()),
            None if s == "remote" => {
                let endpoint = std::env::var(EMBED_ENDPOINT_ENV).map_err(|_| {
                    RetrievalError::Remote(format!("{EMBED_ENDPOINT_ENV} is not set"))
                })?;
                Ok(Self::Remote { endpoint })
            }
            Some(("builtin", dim)) => {
                let dim = dim.parse().map_err(|_| bad())?;
                if dim < 16 {
                    return Err(RetrievalError::DimensionTooSmall(dim));
                }
                Ok(Self::Builtin { dim })
            }
            Some(("remote", url)) => Ok(Self::Remote {
                endpoint: url.to_string(),
            }),
            _ => Err(bad()),
        }
    }
}

impl EmbeddingProvider {
    pub fn embed(&self, texts: &[String]) -> Result<Vec<Vec<f64>>, RetrievalError> {
        match self {
            EmbeddingProvider::Builtin { dim } => {
                if *dim < 16 {
                    return Err(RetrievalError::DimensionTooSmall(*dim));
                }
                Ok(texts.iter().map(|t| hash_embed(t, *dim)).collect())
            }
            EmbeddingProvider::Remote { endpoint } => remote_embed(endpoint, texts),
        }
    }
}

fn fnv1a(bytes: &[u8]) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for b in bytes {
        h ^= u64::from(*b);
        h = h.wrapping_mul(0x0100_0000_01b3);
    }
    h
}

fn normalize(mut v: Vec<f64>) -> Vec<f64> {
    let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    if norm > 0.0 {
        v.iter_mut().for_each(|x| *x /= norm);
    }
    v
}

/// Bag of lowercase alphanumeric words, hashed into `dim` buckets, unit length.
pub fn hash_embed(text: &str, dim: usize) -> Vec<f64> {
    let mut v = vec![0.0; dim];
    let lower = text.to_lowercase();
    for word in lower
        .split(|c: char| !c.is_alphanumeric())
        .filter(|w| !w.is_empty())
    {
        v[(fnv1a(word.as_bytes()) % dim as u64) as usize] += 1.0;
    }
    normalize(v)
}

fn remote_embed(endpoint: &str, texts: &[String]) -> Result<Vec<Vec<f64>>, RetrievalError> {
    #[derive(Deserialize)]
    struct Reply {
        embeddings: Vec<Vec<f64>>,
    }
    let err = |e: &dyn std::fmt::Display| RetrievalError::Remote(e.to_string());
    let client = reqwest::blocking::Client::new();
    let mut req = client.post(endpoint).json(&json!({ "input": texts }));
    if let Ok(key) = std::env::var(EMBED_KEY_ENV) {
        req = req.bearer_auth(key);
    }
    let resp = req.send().map_err(|e| err(&e))?;
    if !resp.status().is_success() {
        return Err(RetrievalError::Remote(format!("HTTP {}", resp.status())));
    }
    let reply: Reply = resp.json().map_err(|e| err(&e))?;
    if reply.embeddings.len() != texts.len() {
        return Err(RetrievalError::Remote(format!(
            "expected {} embeddings, got {}",
            texts.len(),
            reply.embeddings.len()
        )));
    }
    Ok(reply.embeddings.into_iter().map(normalize).collect())
}

/// Which tool text gets embedded.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum IndexText {
    #[default]
    BriefAndDocument,
    Brief,
    Document,
}

impl IndexText {
    pub fn of(self, tool: &ToolSpec) -> String {
        match self {
            IndexText::BriefAndDocument => format!("{}\n{}", tool.brief, tool.document),
            IndexText::Brief => tool.brief.clone(),
            IndexText::Document => tool.document.clone(),
        }
    }
}

/// One unit vector per tool, in manifest order. Immutable once built.
#[derive(Debug, Clone, PartialEq)]
pub struct ToolIndex {
    provider: EmbeddingProvider,
    names: Vec<String>,
    vectors: Vec<Vec<f64>>,
}

pub fn build_index(
    tree: &SkillTree,
    provider: EmbeddingProvider,
) -> Result<ToolIndex, RetrievalError> {
    build_index_with(tree, provider, IndexText::default())
}

pub fn build_index_with(
    tree: &SkillTree,
    provider: EmbeddingProvider,
    text: IndexText,
) -> Result<ToolIndex, RetrievalError> {
    let texts: Vec<String> = tree.tools().map(|t| text.of(t)).collect();
    let vectors = provider.embed(&texts)?;
    Ok(ToolIndex {
        provider,
        names: tree.tool_names().map(str::to_string).collect(),
        vectors,
    })
}

impl ToolIndex {
    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn vectors(&self) -> &[Vec<f64>] {
        &self.vectors
    }

    /// Every tool with its cosine similarity to `query`, best first, ties
    /// in manifest order.
    pub fn rank(&self, query: &str) -> Result<Vec<(&str, f64)>, RetrievalError> {
        let q = self
            .provider
            .embed(&[query.to_string()])?
            .pop()
            .expect("one vector per text");
        let mut scored: Vec<(&str, f64)> = self
            .names
            .iter()
            .zip(&self.vectors)
            .map(|(n, v)| (n.as_str(), v.iter().zip(&q).map(|(a, b)| a * b).sum()))
            .collect();
        scored.sort_by(|a, b| b.1.total_cmp(&a.1));
        Ok(scored)
    }
}

/// Top `k` tools for `query` among the tools not in `forced`, followed by
/// the forced tools. The context size is therefore fixed at
/// `min(k, |T| - |forced|) + |forced|` whatever the query.
pub fn retrieve(
    index: &ToolIndex,
    query: &str,
    k: usize,
    forced: &[String],
) -> Result<Vec<String>, RetrievalError> {
    if let Some(f) = forced.iter().find(|f| !index.names.contains(f)) {
        return Err(RetrievalError::UnknownForced(f.clone()));
    }
    let mut out: Vec<String> = index
        .rank(query)?
        .into_iter()
        .filter(|(n, _)| !forced.iter().any(|f| f == n))
        .take(k)
        .map(|(n, _)| n.to_string())
        .collect();
    for f in forced {
        if !out.contains(f) {
            out.push(f.clone());
        }
    }
    Ok(out)
}
