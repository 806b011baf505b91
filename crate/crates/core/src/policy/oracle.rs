use std::collections::BTreeSet;

use serde_json::Value;

use super::{Decision, Policy, PolicyContext, PolicyError};
use crate::engine::{Action, DecisionState, Paradigm};
use crate::environment::QuestionFixture;
use crate::registry::SkillTree;

/// Expands a fixture's ground-truth calls into the paradigm's action
/// grammar. `callable` is the callable set at the start of the episode.
pub fn expand_ground_truth(
    fixture: &QuestionFixture,
    tree: &SkillTree,
    paradigm: &Paradigm,
    callable: &BTreeSet<String>,
) -> Result<Vec<Action>, PolicyError> {
    let mut visible = callable.clone();
    let mut opened = BTreeSet::new();
    let mut plan = Vec::new();
    for step in &fixture.gt_trajectory {
        if step.tool == "get_filelist" {
            let path = match step.args.get("path") {
                Some(Value::String(p)) => p.clone(),
                _ => ".".to_string(),
            };
            plan.push(Action::filelist(path));
            continue;
        }
        let tool = tree.tool(&step.tool).ok_or_else(|| {
            PolicyError::Oracle(format!(
                "ground-truth tool `{}` is not in the tree",
                step.tool
            ))
        })?;
        if paradigm.allows_skill() && opened.insert(tool.kit.clone()) {
            plan.push(Action::skill(tool.kit.clone()));
        }
        if paradigm.allows_doc() && !visible.contains(&tool.name) {
            plan.push(Action::doc(tool.tool_id.clone()));
            visible.insert(tool.name.clone());
        }
        plan.push(Action::call(tool.tool_id.clone(), step.args.clone()));
    }
    plan.push(Action::answer(fixture.gt_answer.clone()));
    Ok(plan)
}

/// Replays the expanded ground truth, one action per turn.
#[derive(Debug, Default)]
pub struct OraclePolicy {
    plan: Option<Vec<Action>>,
}

impl OraclePolicy {
    pub fn new() -> Self {
        Self::default()
    }
}

impl Policy for OraclePolicy {
    fn decide(
        &mut self,
        state: &DecisionState,
        ctx: &PolicyContext<'_>,
    ) -> Result<Decision, PolicyError> {
        if self.plan.is_none() {
            self.plan = Some(expand_ground_truth(
                ctx.fixture,
                ctx.tree,
                state.paradigm(),
                state.callable(),
            )?);
        }
        let plan = self.plan.as_ref().expect("plan built");
        let k = state.trajectory().len();
        plan.get(k)
            .cloned()
            .map(Decision::from)
            .ok_or_else(|| PolicyError::Oracle(format!("plan has no action for turn {}", k + 1)))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bundled;
    use crate::environment::{Args, GtStep};
    use serde_json::json;

    fn fixture_with(steps: &[&str]) -> QuestionFixture {
        let mut f = bundled::fixture_a1();
        f.gt_trajectory = steps
            .iter()
            .map(|t| {
                let mut args = Args::new();
                if *t == "get_filelist" {
                    args.insert("path".into(), json!("q/"));
                }
                GtStep {
                    tool: t.to_string(),
                    args,
                }
            })
            .collect();
        f
    }

    #[test]
    fn distinct_kits() {
        let tree = bundled::reference_tree();
        let f = fixture_with(&["get_filelist", "ATI", "mean"]);
        let plan = expand_ground_truth(&f, &tree, &Paradigm::Active, &BTreeSet::new()).unwrap();
        let kinds: Vec<&str> = plan.iter().map(Action::kind).collect();
        assert_eq!(
            kinds,
            ["filelist", "skill", "doc", "call", "skill", "doc", "call", "answer"]
        );
    }

    #[test]
    fn repeated_tool_needs_one_doc() {
        let tree = bundled::reference_tree();
        let f = fixture_with(&["ATI", "ATI"]);
        let plan = expand_ground_truth(&f, &tree, &Paradigm::Active, &BTreeSet::new()).unwrap();
        let kinds: Vec<&str> = plan.iter().map(Action::kind).collect();
        assert_eq!(kinds, ["skill", "doc", "call", "call", "answer"]);
    }

    #[test]
    fn passive_paradigms_only_call() {
        let tree = bundled::reference_tree();
        let f = bundled::fixture_f1();
        let all: BTreeSet<String> = tree.tool_names().map(str::to_string).collect();
        let plan = expand_ground_truth(&f, &tree, &Paradigm::Flat, &all).unwrap();
        assert!(plan.iter().all(|a| !a.is_explore()));
        assert_eq!(plan.len(), 13);
        let two = expand_ground_truth(&f, &tree, &Paradigm::TwoLayers, &BTreeSet::new()).unwrap();
        assert_eq!(two.iter().filter(|a| a.kind() == "doc").count(), 2);
        assert_eq!(two.iter().filter(|a| a.kind() == "skill").count(), 0);
    }

    #[test]
    fn unknown_gt_tool() {
        let tree = bundled::reference_tree();
        let f = fixture_with(&["nope"]);
        assert!(expand_ground_truth(&f, &tree, &Paradigm::Active, &BTreeSet::new()).is_err());
    }
}
