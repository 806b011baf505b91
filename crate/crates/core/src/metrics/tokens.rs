//! Prompt-token accounting.
//!
//! The builtin counter is a byte-length estimate (`ceil(bytes / 4)`): fully
//! deterministic and good enough to compare context load between paradigms.
//! Runs against a real model can prefer the provider-reported prompt token
//! count instead, see [`TokenSource`].

use std::str::FromStr;

use serde::{Deserialize, Serialize};

/// Pluggable tokenizer.
pub trait TokenCounter: Send + Sync {
    fn count(&self, text: &str) -> usize;
}

/// `ceil(bytes / 4)`.
#[derive(Debug, Clone, Copy, Default)]
pub struct ByteEstimate;

impl TokenCounter for ByteEstimate {
    fn count(&self, text: &str) -> usize {
        text.len().div_ceil(4)
    }
}

/// Builtin token count.
pub fn count_tokens(text: &str) -> usize {
    ByteEstimate.count(text)
}

/// Where per-turn input token counts come from.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TokenSource {
    #[default]
    Builtin,
    /// Provider-reported prompt tokens when the policy supplies them; falls
    /// back to the builtin estimate otherwise.
    Provider,
}

impl FromStr for TokenSource {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "builtin" => Ok(Self::Builtin),
            "provider" => Ok(Self::Provider),
            other => Err(format!(
                "unknown tokenizer `{other}` (expected builtin|provider)"
            )),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn byte_estimate() {
        assert_eq!(count_tokens("abcd efgh"), 3);
        assert_eq!(count_tokens(""), 0);
        assert_eq!(count_tokens("abcd"), 1);
        assert_eq!(count_tokens("abcde"), 2);
    }

    #[test]
    fn flat_context_outweighs_kit_table() {
        let tree = crate::bundled::reference_tree();
        let flat: String = tree
            .tools()
            .map(crate::registry::render_tool_document)
            .collect();
        assert!(count_tokens(&flat) > count_tokens(&tree.render_kit_table()));
    }
}
