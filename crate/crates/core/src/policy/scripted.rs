use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{Decision, Policy, PolicyContext, PolicyError};
use crate::engine::{Action, DecisionState};

/// Script file contents: one action list for every question, or one list
/// per question id.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Script {
    Shared(Vec<Action>),
    PerQuestion(BTreeMap<String, Vec<Action>>),
}

impl Script {
    pub fn from_json(text: &str) -> Result<Self, PolicyError> {
        let script: Script =
            serde_json::from_str(text).map_err(|e| PolicyError::Config(format!("script: {e}")))?;
        let empty = match &script {
            Script::Shared(actions) => actions.is_empty(),
            Script::PerQuestion(map) => map.is_empty() || map.values().any(Vec::is_empty),
        };
        if empty {
            return Err(PolicyError::EmptyScript);
        }
        Ok(script)
    }

    pub fn load(path: &Path) -> Result<Self, PolicyError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| PolicyError::Config(format!("{}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    /// Actions for `question_id`; empty if a per-question script lacks it.
    pub fn actions_for(&self, question_id: &str) -> &[Action] {
        match self {
            Script::Shared(actions) => actions,
            Script::PerQuestion(map) => map.get(question_id).map(Vec::as_slice).unwrap_or(&[]),
        }
    }
}

/// Replays a fixed action list; the cursor is the number of turns taken.
#[derive(Debug, Clone)]
pub struct ScriptedPolicy {
    actions: Vec<Action>,
}

impl ScriptedPolicy {
    pub fn new(actions: Vec<Action>) -> Result<Self, PolicyError> {
        if actions.is_empty() {
            return Err(PolicyError::EmptyScript);
        }
        Ok(Self { actions })
    }
}

impl Policy for ScriptedPolicy {
    fn decide(
        &mut self,
        state: &DecisionState,
        _ctx: &PolicyContext<'_>,
    ) -> Result<Decision, PolicyError> {
        let k = state.trajectory().len();
        self.actions
            .get(k)
            .cloned()
            .map(Decision::from)
            .ok_or(PolicyError::ScriptExhausted(k + 1))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_scripts_are_rejected() {
        assert!(matches!(
            ScriptedPolicy::new(vec![]),
            Err(PolicyError::EmptyScript)
        ));
        assert!(matches!(
            Script::from_json("[]"),
            Err(PolicyError::EmptyScript)
        ));
        assert!(matches!(
            Script::from_json(r#"{"q1": []}"#),
            Err(PolicyError::EmptyScript)
        ));
    }

    #[test]
    fn both_shapes() {
        let shared = Script::from_json(r#"[{"type":"answer","text":"A"}]"#).unwrap();
        assert_eq!(shared.actions_for("anything"), [Action::answer("A")]);
        let per = Script::from_json(r#"{"q1":[{"type":"skill","kit":"index"}]}"#).unwrap();
        assert_eq!(per.actions_for("q1"), [Action::skill("index")]);
        assert!(per.actions_for("q2").is_empty());
    }
}
