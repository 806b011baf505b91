//! Deterministic mock tool executor.
//!
//! A [`QuestionFixture`] carries everything one question needs: the query,
//! answer choices, the ground-truth call sequence and a list of scripted
//! [`ToolBehavior`]s. [`MockEnvironment`] answers tool calls from those
//! scripts and keeps a per-episode [`VirtualFs`] so paths produced by one
//! call can be listed and consumed by later ones.

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};
use std::path::Path;

use indexmap::IndexMap;
use serde::{Deserialize, Serialize};
use serde_json::Value;
use thiserror::Error;

use crate::engine::Observation;

/// Tool arguments. `BTreeMap` keeps keys sorted, which is the canonical form
/// used for matching, logging and scoring.
pub type Args = BTreeMap<String, Value>;

pub const DEFAULT_DATA_ROOT: &str = "/benchmark/data/";

/// Deterministic serialization of an argument map.
pub fn canonical_args(args: &Args) -> String {
    serde_json::to_string(args).expect("argument maps serialize")
}

/// Structural equality where numbers compare by value (`305` == `305.0`).
pub fn values_equal(a: &Value, b: &Value) -> bool {
    match (a, b) {
        (Value::Number(x), Value::Number(y)) => x.as_f64() == y.as_f64(),
        (Value::Array(x), Value::Array(y)) => {
            x.len() == y.len() && x.iter().zip(y).all(|(a, b)| values_equal(a, b))
        }
        (Value::Object(x), Value::Object(y)) => {
            x.len() == y.len()
                && x.iter()
                    .all(|(k, v)| y.get(k).is_some_and(|w| values_equal(v, w)))
        }
        _ => a == b,
    }
}

pub fn args_equal(a: &Args, b: &Args) -> bool {
    a.len() == b.len()
        && a.iter()
            .all(|(k, v)| b.get(k).is_some_and(|w| values_equal(v, w)))
}

#[derive(Debug, Error)]
pub enum FixtureError {
    #[error("failed to read fixture {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("malformed fixture: {0}")]
    Parse(#[from] serde_json::Error),
    #[error("fixture `{question}`: {reason}")]
    Invalid { question: String, reason: String },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GtStep {
    pub tool: String,
    #[serde(default)]
    pub args: Args,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Matcher {
    /// Matches only these canonical arguments.
    Exact(Args),
    /// Every listed key must be present and match; string values may use `*`
    /// wildcards, a bare `"*"` matches any value. Unlisted keys are ignored.
    Pattern(Args),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ToolBehavior {
    pub tool: String,
    pub matcher: Matcher,
    /// Placeholders: `{output}` (first output path), `{outputs}` (all, comma
    /// separated), `{n}` (per-tool call counter).
    pub response_template: String,
    /// Path templates registered in the virtual filesystem on success; `{n}`
    /// is replaced by the per-tool call counter.
    #[serde(default)]
    pub output_files: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error_response: Option<String>,
}

impl ToolBehavior {
    fn matches(&self, args: &Args) -> bool {
        match &self.matcher {
            Matcher::Exact(expected) => args_equal(expected, args),
            Matcher::Pattern(pattern) => pattern
                .iter()
                .all(|(k, p)| args.get(k).is_some_and(|v| pattern_matches(p, v))),
        }
    }
}

fn pattern_matches(pattern: &Value, value: &Value) -> bool {
    match (pattern, value) {
        (Value::String(p), _) if p == "*" => true,
        (Value::String(p), Value::String(v)) if p.contains('*') => glob(p, v),
        _ => values_equal(pattern, value),
    }
}

/// `*`-only glob match.
fn glob(pattern: &str, text: &str) -> bool {
    let mut parts = pattern.split('*');
    let first = parts.next().unwrap_or_default();
    let Some(mut rest) = text.strip_prefix(first) else {
        return false;
    };
    let mut parts: Vec<&str> = parts.collect();
    let last = parts.pop();
    for part in parts {
        match rest.find(part) {
            Some(i) => rest = &rest[i + part.len()..],
            None => return false,
        }
    }
    match last {
        Some(suffix) => rest.ends_with(suffix),
        None => rest.is_empty(),
    }
}

/// One task scenario.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuestionFixture {
    pub question_id: String,
    pub query: String,
    #[serde(default)]
    pub choices: IndexMap<String, String>,
    pub gt_answer: String,
    #[serde(default)]
    pub gt_trajectory: Vec<GtStep>,
    #[serde(default)]
    pub initial_files: Vec<String>,
    #[serde(default)]
    pub behaviors: Vec<ToolBehavior>,
    #[serde(default = "default_root", skip_serializing_if = "is_default_root")]
    pub data_root: String,
}

fn default_root() -> String {
    DEFAULT_DATA_ROOT.to_string()
}

fn is_default_root(root: &str) -> bool {
    root == DEFAULT_DATA_ROOT
}

impl QuestionFixture {
    pub fn from_json(text: &str) -> Result<Self, FixtureError> {
        let fixture: QuestionFixture = serde_json::from_str(text)?;
        fixture.validate()?;
        Ok(fixture)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self, FixtureError> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|source| FixtureError::Io {
            path: path.display().to_string(),
            source,
        })?;
        Self::from_json(&text)
    }

    pub fn validate(&self) -> Result<(), FixtureError> {
        let invalid = |reason: String| FixtureError::Invalid {
            question: self.question_id.clone(),
            reason,
        };
        if !self.data_root.starts_with('/') {
            return Err(invalid(format!(
                "data root `{}` is not absolute",
                self.data_root
            )));
        }
        if let Some(p) = self.initial_files.iter().find(|p| !p.starts_with('/')) {
            return Err(invalid(format!("initial file `{p}` is not absolute")));
        }
        let mut exact = HashSet::new();
        for b in &self.behaviors {
            if b.response_template.is_empty() {
                return Err(invalid(format!("empty response template for `{}`", b.tool)));
            }
            if let Matcher::Exact(args) = &b.matcher {
                if !exact.insert((b.tool.as_str(), canonical_args(args))) {
                    return Err(invalid(format!(
                        "duplicate exact matcher for `{}` {}",
                        b.tool,
                        canonical_args(args)
                    )));
                }
            }
        }
        Ok(())
    }

    /// Query followed by one `X. text` line per choice.
    pub fn prompt_text(&self) -> String {
        let mut text = self.query.clone();
        if !self.choices.is_empty() {
            text.push_str("\n\nChoices:");
            for (key, choice) in &self.choices {
                text.push_str(&format!("\n{key}. {choice}"));
            }
        }
        text
    }
}

/// Loads a fixture file, a JSON array of fixtures, or every `*.json` file of
/// a directory (sorted by file name).
pub fn load_fixtures(path: impl AsRef<Path>) -> Result<Vec<QuestionFixture>, FixtureError> {
    let path = path.as_ref();
    let io_err = |source| FixtureError::Io {
        path: path.display().to_string(),
        source,
    };
    if path.is_dir() {
        let mut files: Vec<_> = std::fs::read_dir(path)
            .map_err(io_err)?
            .filter_map(|e| e.ok().map(|e| e.path()))
            .filter(|p| p.extension().is_some_and(|e| e == "json"))
            .collect();
        files.sort();
        return files.iter().map(QuestionFixture::load).collect();
    }
    let text = std::fs::read_to_string(path).map_err(io_err)?;
    if text.trim_start().starts_with('[') {
        let fixtures: Vec<QuestionFixture> = serde_json::from_str(&text)?;
        for f in &fixtures {
            f.validate()?;
        }
        Ok(fixtures)
    } else {
        Ok(vec![QuestionFixture::from_json(&text)?])
    }
}

/// Registry of file paths visible to one episode.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct VirtualFs {
    root: String,
    paths: BTreeSet<String>,
}

impl VirtualFs {
    pub fn new(root: impl Into<String>) -> Self {
        let mut root = root.into();
        if !root.ends_with('/') {
            root.push('/');
        }
        Self {
            root,
            paths: BTreeSet::new(),
        }
    }

    pub fn with_files<I, S>(root: impl Into<String>, files: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let mut fs = Self::new(root);
        for f in files {
            fs.register(f);
        }
        fs
    }

    pub fn register(&mut self, path: impl Into<String>) {
        self.paths.insert(path.into());
    }

    pub fn contains(&self, path: &str) -> bool {
        self.paths.contains(path)
    }

    pub fn len(&self) -> usize {
        self.paths.len()
    }

    pub fn is_empty(&self) -> bool {
        self.paths.is_empty()
    }

    /// Absolute prefix for a listing request. Relative prefixes resolve
    /// against the data root; `.` and the empty string mean the root itself.
    pub fn resolve(&self, prefix: &str) -> String {
        let prefix = prefix.trim();
        if prefix.starts_with('/') {
            return prefix.to_string();
        }
        let rel = prefix.trim_start_matches("./");
        if rel.is_empty() || rel == "." {
            return self.root.clone();
        }
        let rooted = format!("/{rel}");
        if rooted.starts_with(&self.root) {
            rooted
        } else {
            format!("{}{}", self.root, rel)
        }
    }

    /// Registered paths under `prefix`, lexicographically sorted.
    pub fn list(&self, prefix: &str) -> Vec<&str> {
        let abs = self.resolve(prefix);
        self.paths
            .range(abs.clone()..)
            .take_while(|p| p.starts_with(&abs))
            .map(String::as_str)
            .collect()
    }
}

/// Source of execution observations.
pub trait Environment {
    fn execute(&mut self, tool: &str, args: &Args) -> Observation;
    fn filelist(&mut self, prefix: &str) -> Observation;
}

/// Scripted environment for one episode of one fixture.
#[derive(Debug, Clone)]
pub struct MockEnvironment<'a> {
    fixture: &'a QuestionFixture,
    fs: VirtualFs,
    counters: HashMap<String, u32>,
}

impl<'a> MockEnvironment<'a> {
    pub fn new(fixture: &'a QuestionFixture) -> Self {
        Self {
            fixture,
            fs: VirtualFs::with_files(
                fixture.data_root.clone(),
                fixture.initial_files.iter().cloned(),
            ),
            counters: HashMap::new(),
        }
    }

    pub fn fs(&self) -> &VirtualFs {
        &self.fs
    }
}

impl Environment for MockEnvironment<'_> {
    fn execute(&mut self, tool: &str, args: &Args) -> Observation {
        let candidates = self.fixture.behaviors.iter().filter(|b| b.tool == tool);
        let behavior = candidates
            .clone()
            .find(|b| matches!(b.matcher, Matcher::Exact(_)) && b.matches(args))
            .or_else(|| {
                candidates
                    .clone()
                    .find(|b| matches!(b.matcher, Matcher::Pattern(_)) && b.matches(args))
            });
        let Some(behavior) = behavior else {
            return Observation::error(format!(
                "no scripted behavior for `{tool}` with args {}",
                canonical_args(args)
            ));
        };
        if let Some(err) = &behavior.error_response {
            return Observation::error(err.clone());
        }
        let counter = self.counters.entry(tool.to_string()).or_insert(0);
        *counter += 1;
        let n = counter.to_string();
        let outputs: Vec<String> = behavior
            .output_files
            .iter()
            .map(|t| t.replace("{n}", &n))
            .collect();
        for path in &outputs {
            self.fs.register(path.clone());
        }
        let payload = behavior
            .response_template
            .replace("{outputs}", &outputs.join(", "))
            .replace("{output}", outputs.first().map_or("", String::as_str))
            .replace("{n}", &n);
        Observation::exec(payload)
    }

    fn filelist(&mut self, prefix: &str) -> Observation {
        let listing = self.fs.list(prefix);
        Observation::exec(serde_json::to_string(&listing).expect("path list serializes"))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bundled;
    use crate::engine::ObservationKind;
    use serde_json::json;

    fn args(v: Value) -> Args {
        serde_json::from_value(v).unwrap()
    }

    #[test]
    fn glob_matching() {
        assert!(glob("*", "anything"));
        assert!(glob("/a/*_Day.tif", "/a/2023_Day.tif"));
        assert!(!glob("/a/*_Day.tif", "/a/2023_Night.tif"));
        assert!(glob("a*b*c", "a-b-c"));
        assert!(!glob("a*b*c", "a-c-b"));
        assert!(glob("exact", "exact"));
        assert!(!glob("exact", "exactly"));
    }

    #[test]
    fn ati_outputs_are_counter_suffixed_and_registered() {
        let fixture = bundled::fixture_f1();
        let mut env = MockEnvironment::new(&fixture);
        let step = &fixture.gt_trajectory[1];
        let first = env.execute("ATI", &step.args);
        assert_eq!(first.kind, ObservationKind::Exec);
        assert_eq!(
            first.payload,
            "Result saved at /benchmark/out/question42/ati_result_1.tif"
        );
        assert!(env
            .fs()
            .contains("/benchmark/out/question42/ati_result_1.tif"));
        let second = env.execute("ATI", &fixture.gt_trajectory[2].args);
        assert!(second.payload.ends_with("ati_result_2.tif"));
    }

    #[test]
    fn threshold_ratio_after_ati_batch() {
        let fixture = bundled::fixture_f1();
        let mut env = MockEnvironment::new(&fixture);
        for step in &fixture.gt_trajectory[1..11] {
            env.execute(&step.tool, &step.args);
        }
        let ratio = env.execute("calculate_threshold_ratio", &fixture.gt_trajectory[11].args);
        assert_eq!(ratio, Observation::exec("70.92%"));
        // integer threshold matches the float one
        let mut alt = fixture.gt_trajectory[11].args.clone();
        alt.insert("threshold".into(), json!(1));
        assert_eq!(
            env.execute("calculate_threshold_ratio", &alt).payload,
            "70.92%"
        );
    }

    #[test]
    fn split_window_wrong_filename_fails() {
        let fixture = bundled::fixture_a1();
        let mut env = MockEnvironment::new(&fixture);
        let obs = env.execute(
            "split_window",
            &args(json!({"bt31_path": "b31.tif", "bt32_path": "b32.tif"})),
        );
        assert_eq!(obs.kind, ObservationKind::Error);
        assert!(obs.payload.contains("wrong filename"));
        assert!(!env
            .fs()
            .contains("/benchmark/out/question33/lst_result.tif"));
    }

    #[test]
    fn unscripted_call_is_error_observation() {
        let fixture = bundled::fixture_a1();
        let mut env = MockEnvironment::new(&fixture);
        let obs = env.execute("NDVI_nonexistent", &Args::new());
        assert_eq!(obs.kind, ObservationKind::Error);
        assert!(obs.payload.starts_with("no scripted behavior"));
    }

    #[test]
    fn filelist_sorted_and_resolved() {
        let mut fs = VirtualFs::with_files(
            "/benchmark/data",
            [
                "/benchmark/data/q1/c.tif",
                "/benchmark/data/q1/a.tif",
                "/benchmark/data/q1/b.tif",
                "/benchmark/data/q2/x.tif",
            ],
        );
        assert_eq!(
            fs.list("q1/"),
            vec![
                "/benchmark/data/q1/a.tif",
                "/benchmark/data/q1/b.tif",
                "/benchmark/data/q1/c.tif"
            ]
        );
        assert_eq!(fs.list("benchmark/data/q1/").len(), 3);
        assert_eq!(fs.list("/benchmark/data/q2").len(), 1);
        assert_eq!(fs.list(".").len(), 4);
        assert!(fs.list("q9/").is_empty());
        fs.register("/benchmark/data/q1/0.tif");
        assert_eq!(fs.list("q1/")[0], "/benchmark/data/q1/0.tif");
    }

    #[test]
    fn filelist_sees_new_outputs() {
        let fixture = bundled::fixture_a1();
        let mut env = MockEnvironment::new(&fixture);
        let before = env.filelist("/benchmark/out/");
        assert_eq!(before, Observation::exec("[]"));
        env.execute("split_window", &fixture.gt_trajectory[1].args);
        let after = env.filelist("/benchmark/out/");
        assert_eq!(
            after.payload,
            r#"["/benchmark/out/question33/lst_result.tif"]"#
        );
    }

    #[test]
    fn duplicate_exact_matchers_rejected() {
        let mut fixture = bundled::fixture_a1();
        let dup = fixture.behaviors[0].clone();
        fixture.behaviors.push(dup);
        assert!(fixture.validate().is_err());
    }

    #[test]
    fn execution_is_deterministic() {
        let fixture = bundled::fixture_f2();
        let run = || {
            let mut env = MockEnvironment::new(&fixture);
            fixture
                .gt_trajectory
                .iter()
                .skip(1)
                .map(|s| env.execute(&s.tool, &s.args))
                .collect::<Vec<_>>()
        };
        assert_eq!(run(), run());
    }

    #[test]
    fn saved_paths_are_registered() {
        for fixture in bundled::fixtures() {
            let mut env = MockEnvironment::new(&fixture);
            for step in fixture
                .gt_trajectory
                .iter()
                .filter(|s| s.tool != "get_filelist")
            {
                let obs = env.execute(&step.tool, &step.args);
                assert_eq!(obs.kind, ObservationKind::Exec, "{}", step.tool);
                if let Some(rest) = obs.payload.strip_prefix("Result saved at ") {
                    let paths = rest.split(" (").next().unwrap();
                    for p in paths.split(", ") {
                        assert!(env.fs().contains(p), "{p}");
                    }
                }
            }
        }
    }
}
