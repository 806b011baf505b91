//! Experimental conditions and batch runs: same-domain distractor sweeps,
//! cross-domain library growth, ablation variants, and the run matrix that
//! writes one report per (tree, paradigm) cell.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::engine::{
    run_episode, EngineError, EpisodeSetup, Paradigm, TrajectoryRecord, DEFAULT_MAX_TURNS,
};
use crate::environment::QuestionFixture;
use crate::metrics::{aggregate, RunReport, ScoringOptions, TokenSource};
use crate::policy::{PolicyError, PolicySpec, PromptSet};
use crate::registry::{load_manifest, RegistryError, SkillTree, ValidationError};
use crate::retrieval::{build_index, retrieve, EmbeddingProvider, RetrievalError};

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error(transparent)]
    Registry(#[from] RegistryError),
    #[error("invalid tree: {0}")]
    Validation(#[from] ValidationError),
    #[error(transparent)]
    Engine(#[from] EngineError),
    #[error(transparent)]
    Policy(#[from] PolicyError),
    #[error(transparent)]
    Retrieval(#[from] RetrievalError),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("plan: {0}")]
    Plan(String),
    #[error("configuration: {0}")]
    Config(String),
    #[error("asked for {requested} distractors but only {available} are available")]
    NotEnoughDistractors { requested: usize, available: usize },
    #[error("kept tool `{0}` is not in the base tree")]
    UnknownKeep(String),
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> HarnessError + '_ {
    move |source| HarnessError::Io {
        path: path.to_path_buf(),
        source,
    }
}

/// Union of all ground-truth tool names.
pub fn extract_gt_minimal(fixtures: &[QuestionFixture]) -> BTreeSet<String> {
    fixtures
        .iter()
        .flat_map(|f| f.gt_trajectory.iter().map(|s| s.tool.clone()))
        .collect()
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Sampling {
    /// Distractors per kit in proportion to the kit's share of the pool.
    #[default]
    Stratified,
    Uniform,
}

/// Largest-remainder split of `total` over `sizes`; ties go to earlier kits.
fn apportion(sizes: &[usize], total: usize) -> Vec<usize> {
    let pool: usize = sizes.iter().sum();
    if pool == 0 {
        return vec![0; sizes.len()];
    }
    let mut quota: Vec<usize> = sizes.iter().map(|s| s * total / pool).collect();
    let mut left = total - quota.iter().sum::<usize>();
    let mut order: Vec<usize> = (0..sizes.len()).collect();
    // remainder of s*total/pool, compared exactly as s*total mod pool
    order.sort_by_key(|&i| std::cmp::Reverse((sizes[i] * total) % pool));
    for i in order {
        if left == 0 {
            break;
        }
        if quota[i] < sizes[i] {
            quota[i] += 1;
            left -= 1;
        }
    }
    quota
}

/// `keep` plus `extra` seeded distractors drawn without replacement from the
/// rest of `base`. Every tool stays in its original kit; empty kits go.
pub fn build_scaled_tree(
    base: &SkillTree,
    keep: &BTreeSet<String>,
    extra: usize,
    seed: u64,
    sampling: Sampling,
) -> Result<SkillTree, HarnessError> {
    if let Some(k) = keep.iter().find(|k| base.tool(k).is_none()) {
        return Err(HarnessError::UnknownKeep(k.clone()));
    }
    let mut by_kit: Vec<Vec<&str>> = Vec::new();
    for node in base.nodes() {
        by_kit.push(
            base.members(node)
                .filter(|t| !keep.contains(&t.name))
                .map(|t| t.name.as_str())
                .collect(),
        );
    }
    let available: usize = by_kit.iter().map(Vec::len).sum();
    if extra > available {
        return Err(HarnessError::NotEnoughDistractors {
            requested: extra,
            available,
        });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut chosen: BTreeSet<&str> = BTreeSet::new();
    match sampling {
        Sampling::Uniform => {
            let pool: Vec<&str> = by_kit.concat();
            chosen.extend(
                sample(&mut rng, pool.len(), extra)
                    .into_iter()
                    .map(|i| pool[i]),
            );
        }
        Sampling::Stratified => {
            let sizes: Vec<usize> = by_kit.iter().map(Vec::len).collect();
            for (kit, n) in by_kit.iter().zip(apportion(&sizes, extra)) {
                chosen.extend(sample(&mut rng, kit.len(), n).into_iter().map(|i| kit[i]));
            }
        }
    }
    Ok(base.retain(|t| keep.contains(&t.name) || chosen.contains(t.name.as_str()))?)
}

/// `[base, base + s1, base + s1 + s2, ...]`.
pub fn inject_cross_domain(
    base: &SkillTree,
    stages: &[SkillTree],
) -> Result<Vec<SkillTree>, HarnessError> {
    let mut out = vec![base.clone()];
    for stage in stages {
        let next = out.last().expect("non-empty").merge(stage)?;
        out.push(next);
    }
    Ok(out)
}

/// Copy of `tree` in which every document is exactly `bytes` long, built by
/// repeating or truncating the original text. Isolates library size from
/// document length in scaling runs.
pub fn with_uniform_documents(tree: &SkillTree, bytes: usize) -> Result<SkillTree, HarnessError> {
    let mut manifest = tree.to_manifest();
    for kit in &mut manifest.kits {
        for tool in &mut kit.tools {
            let src: Vec<char> = tool.document.chars().filter(char::is_ascii).collect();
            if src.is_empty() {
                return Err(HarnessError::Config(format!(
                    "`{}` has no ascii document text",
                    tool.name
                )));
            }
            tool.document = src.iter().cycle().take(bytes).collect();
        }
    }
    Ok(SkillTree::from_manifest(manifest)?)
}

/// Paradigm as named on the command line; `random:<seed>` is the Active
/// paradigm over a randomly regrouped tree.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ParadigmSpec {
    Active,
    Flat,
    Rag,
    TwoLayers,
    Random(u64),
}

impl FromStr for ParadigmSpec {
    type Err = HarnessError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Ok(match s {
            "active" => Self::Active,
            "flat" => Self::Flat,
            "rag" => Self::Rag,
            "2layers" => Self::TwoLayers,
            _ => match s.strip_prefix("random:").map(str::parse) {
                Some(Ok(seed)) => Self::Random(seed),
                _ => {
                    return Err(HarnessError::Config(format!(
                        "unknown paradigm `{s}` (expected active|flat|rag|2layers|random:<seed>)"
                    )))
                }
            },
        })
    }
}

impl fmt::Display for ParadigmSpec {
    /// File-name safe label.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Active => f.write_str("active"),
            Self::Flat => f.write_str("flat"),
            Self::Rag => f.write_str("rag"),
            Self::TwoLayers => f.write_str("2layers"),
            Self::Random(seed) => write!(f, "random-{seed}"),
        }
    }
}

/// Everything a batch needs besides the tree, fixtures and paradigm.
#[derive(Debug, Clone)]
pub struct BatchConfig {
    pub policy: PolicySpec,
    pub max_turns: usize,
    pub token_source: TokenSource,
    pub rag_k: usize,
    pub rag_force: Vec<String>,
    /// Required by the rag paradigm.
    pub embedding: Option<EmbeddingProvider>,
    pub jobs: usize,
    pub scoring: ScoringOptions,
    pub prompts: PromptSet,
}

impl Default for BatchConfig {
    fn default() -> Self {
        Self {
            policy: PolicySpec::Oracle,
            max_turns: DEFAULT_MAX_TURNS,
            token_source: TokenSource::Builtin,
            rag_k: 19,
            rag_force: vec!["get_filelist".to_string()],
            embedding: None,
            jobs: 1,
            scoring: ScoringOptions::default(),
            prompts: PromptSet::default(),
        }
    }
}

/// Runs every fixture once; records come back in fixture order whatever
/// the number of jobs.
pub fn run_batch(
    tree: &SkillTree,
    fixtures: &[QuestionFixture],
    spec: ParadigmSpec,
    cfg: &BatchConfig,
) -> Result<Vec<TrajectoryRecord>, HarnessError> {
    let regrouped;
    let tree = match spec {
        ParadigmSpec::Random(seed) => {
            regrouped = tree.random_regroup(seed);
            &regrouped
        }
        _ => tree,
    };
    let paradigm = match spec {
        ParadigmSpec::Active | ParadigmSpec::Random(_) => Paradigm::Active,
        ParadigmSpec::Flat => Paradigm::Flat,
        ParadigmSpec::TwoLayers => Paradigm::TwoLayers,
        ParadigmSpec::Rag => Paradigm::Rag {
            k: cfg.rag_k,
            forced: cfg.rag_force.clone(),
        },
    };
    let index = match (&paradigm, &cfg.embedding) {
        (Paradigm::Rag { .. }, Some(provider)) => Some(build_index(tree, provider.clone())?),
        (Paradigm::Rag { .. }, None) => {
            return Err(HarnessError::Config(
                "the rag paradigm needs an embedding provider".into(),
            ))
        }
        _ => None,
    };
    let run_one = |fixture: &QuestionFixture| -> Result<TrajectoryRecord, HarnessError> {
        let mut setup = EpisodeSetup::new(paradigm.clone()).with_max_turns(cfg.max_turns);
        setup.token_source = cfg.token_source;
        setup.prompts = cfg.prompts.clone();
        if let Some(index) = &index {
            let retrieved = retrieve(index, &fixture.query, cfg.rag_k, &cfg.rag_force)?;
            setup = setup.with_retrieved(retrieved);
        }
        let mut policy = cfg.policy.instantiate(&fixture.question_id)?;
        Ok(run_episode(fixture, tree, &setup, policy.as_mut())?)
    };
    if cfg.jobs <= 1 {
        return fixtures.iter().map(run_one).collect();
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.jobs)
        .build()
        .map_err(|e| HarnessError::Config(e.to_string()))?;
    pool.install(|| fixtures.par_iter().map(run_one).collect())
}

/// One scale step of a plan: a named tree.
#[derive(Debug, Clone)]
pub struct ScaleStep {
    pub label: String,
    pub tree: SkillTree,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Increment {
    Count(usize),
    /// `"all"`: every remaining tool.
    Rest(String),
}

fn default_paradigms() -> Vec<String> {
    vec!["flat".to_string(), "active".to_string()]
}

/// Plan file contents.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "snake_case")]
pub enum ScalingPlan {
    SameDomain {
        increments: Vec<Increment>,
        #[serde(default)]
        seed: u64,
        #[serde(default)]
        sampling: Sampling,
        #[serde(default = "default_paradigms")]
        paradigms: Vec<String>,
    },
    CrossDomain {
        /// Noise manifests, relative to the plan file.
        stages: Vec<PathBuf>,
        #[serde(default = "default_paradigms")]
        paradigms: Vec<String>,
    },
}

impl ScalingPlan {
    /// Reads a plan and resolves stage paths against the plan's directory.
    pub fn load(path: &Path) -> Result<Self, HarnessError> {
        let text = fs::read_to_string(path).map_err(io_err(path))?;
        let mut plan: Self =
            serde_json::from_str(&text).map_err(|e| HarnessError::Plan(e.to_string()))?;
        if let ScalingPlan::CrossDomain { stages, .. } = &mut plan {
            let dir = path.parent().unwrap_or(Path::new("."));
            for s in stages.iter_mut() {
                if s.is_relative() {
                    *s = dir.join(&*s);
                }
            }
        }
        plan.check()?;
        Ok(plan)
    }

    pub fn check(&self) -> Result<(), HarnessError> {
        let paradigms = match self {
            ScalingPlan::SameDomain {
                increments,
                paradigms,
                ..
            } => {
                if increments.is_empty() {
                    return Err(HarnessError::Plan("no increments".into()));
                }
                let mut last: Option<usize> = None;
                for (i, inc) in increments.iter().enumerate() {
                    match inc {
                        Increment::Count(n) => {
                            if last.is_some_and(|l| *n <= l) {
                                return Err(HarnessError::Plan(
                                    "increments must be strictly increasing".into(),
                                ));
                            }
                            last = Some(*n);
                        }
                        Increment::Rest(s) if s == "all" && i + 1 == increments.len() => {}
                        Increment::Rest(s) => {
                            return Err(HarnessError::Plan(format!(
                                "bad increment `{s}` (only a final \"all\" is allowed)"
                            )))
                        }
                    }
                }
                paradigms
            }
            ScalingPlan::CrossDomain { stages, paradigms } => {
                if stages.is_empty() {
                    return Err(HarnessError::Plan("no stages".into()));
                }
                paradigms
            }
        };
        self.paradigm_specs_of(paradigms).map(|_| ())
    }

    fn paradigm_specs_of(&self, names: &[String]) -> Result<Vec<ParadigmSpec>, HarnessError> {
        if names.is_empty() {
            return Err(HarnessError::Plan("no paradigms".into()));
        }
        names.iter().map(|p| p.parse()).collect()
    }

    pub fn paradigms(&self) -> Result<Vec<ParadigmSpec>, HarnessError> {
        match self {
            ScalingPlan::SameDomain { paradigms, .. }
            | ScalingPlan::CrossDomain { paradigms, .. } => self.paradigm_specs_of(paradigms),
        }
    }

    /// Trees of the sweep, smallest first.
    pub fn steps(
        &self,
        base: &SkillTree,
        fixtures: &[QuestionFixture],
    ) -> Result<Vec<ScaleStep>, HarnessError> {
        match self {
            ScalingPlan::SameDomain {
                increments,
                seed,
                sampling,
                ..
            } => {
                let keep = extract_gt_minimal(fixtures);
                let rest = base.tool_count().saturating_sub(keep.len());
                increments
                    .iter()
                    .map(|inc| {
                        let extra = match inc {
                            Increment::Count(n) => *n,
                            Increment::Rest(_) => rest,
                        };
                        let tree = build_scaled_tree(base, &keep, extra, *seed, *sampling)?;
                        Ok(ScaleStep {
                            label: format!("same-{}", tree.tool_count()),
                            tree,
                        })
                    })
                    .collect()
            }
            ScalingPlan::CrossDomain { stages, .. } => {
                let noise = stages
                    .iter()
                    .map(load_manifest)
                    .collect::<Result<Vec<_>, _>>()?;
                let trees = inject_cross_domain(base, &noise)?;
                Ok(trees
                    .into_iter()
                    .enumerate()
                    .map(|(i, tree)| ScaleStep {
                        label: format!("stage{i}-{}", tree.tool_count()),
                        tree,
                    })
                    .collect())
            }
        }
    }
}

/// Result of one matrix cell.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CellSummary {
    pub cell: String,
    pub paradigm: String,
    pub tools: usize,
    pub report: RunReport,
}

fn write_file(path: &Path, contents: &[u8]) -> Result<(), HarnessError> {
    if let Some(dir) = path.parent() {
        fs::create_dir_all(dir).map_err(io_err(dir))?;
    }
    fs::write(path, contents).map_err(io_err(path))
}

pub fn records_to_jsonl(records: &[TrajectoryRecord]) -> String {
    let mut out = String::new();
    for r in records {
        out.push_str(&serde_json::to_string(r).expect("record serializes"));
        out.push('\n');
    }
    out
}

/// Runs every (tree, paradigm) cell and writes `reports/<cell>.json`,
/// `trajectories/<cell>.jsonl` and `curves.csv` under `out`.
pub fn run_matrix(
    plan: &ScalingPlan,
    base: &SkillTree,
    fixtures: &[QuestionFixture],
    cfg: &BatchConfig,
    out: &Path,
) -> Result<Vec<CellSummary>, HarnessError> {
    let steps = plan.steps(base, fixtures)?;
    let paradigms = plan.paradigms()?;
    let mut cells = Vec::new();
    for step in &steps {
        for &spec in &paradigms {
            let cell = format!("{}-{spec}", step.label);
            log::info!("cell {cell}: {} tools", step.tree.tool_count());
            let records = run_batch(&step.tree, fixtures, spec, cfg)?;
            let report = aggregate(&records, fixtures, cfg.scoring);
            write_file(
                &out.join("reports").join(format!("{cell}.json")),
                report.to_json().as_bytes(),
            )?;
            write_file(
                &out.join("trajectories").join(format!("{cell}.jsonl")),
                records_to_jsonl(&records).as_bytes(),
            )?;
            cells.push(CellSummary {
                cell,
                paradigm: spec.to_string(),
                tools: step.tree.tool_count(),
                report,
            });
        }
    }
    write_file(&out.join("curves.csv"), curves_csv(&cells).as_bytes())?;
    Ok(cells)
}

/// Tree size against tokens and accuracy, one row per cell.
pub fn curves_csv(cells: &[CellSummary]) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    let opt = |v: Option<f64>| v.map(|v| v.to_string()).unwrap_or_default();
    w.write_record([
        "cell",
        "paradigm",
        "tools",
        "tokens_per_turn",
        "tokens_per_question",
        "accuracy",
        "tool_any_order",
    ])
    .expect("in-memory csv");
    for c in cells {
        let m = &c.report.means;
        w.write_record([
            c.cell.clone(),
            c.paradigm.clone(),
            c.tools.to_string(),
            opt(m.tokens_per_turn),
            opt(m.tokens_per_question),
            opt(m.accuracy),
            opt(m.tool_any_order),
        ])
        .expect("in-memory csv");
    }
    String::from_utf8(w.into_inner().expect("flush")).expect("utf-8")
}

/// Per-paradigm series of (tools, tokens per turn), in cell order.
pub fn token_curves(cells: &[CellSummary]) -> BTreeMap<String, Vec<(usize, f64)>> {
    let mut out: BTreeMap<String, Vec<(usize, f64)>> = BTreeMap::new();
    for c in cells {
        if let Some(t) = c.report.means.tokens_per_turn {
            out.entry(c.paradigm.clone())
                .or_default()
                .push((c.tools, t));
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bundled;

    fn gt_min() -> BTreeSet<String> {
        extract_gt_minimal(&bundled::fixtures())
    }

    #[test]
    fn gt_minimal() {
        let expected: BTreeSet<String> = [
            "ATI",
            "calculate_threshold_ratio",
            "split_window",
            "band_ratio",
            "calculate_batch_ndti",
            "calc_batch_image_mean",
            "calc_batch_image_mean_mean",
            "mean",
            "get_filelist",
        ]
        .into_iter()
        .map(String::from)
        .collect();
        assert_eq!(gt_min(), expected);
        assert!(extract_gt_minimal(&[]).is_empty());
    }

    #[test]
    fn apportion_sums() {
        assert_eq!(apportion(&[10, 10], 5), vec![3, 2]);
        assert_eq!(apportion(&[1, 0, 3], 4), vec![1, 0, 3]);
        for total in 0..=40 {
            let q = apportion(&[12, 14, 13, 9, 46][..], total);
            assert_eq!(q.iter().sum::<usize>(), total);
        }
    }

    #[test]
    fn scaled_sizes_and_seeding() {
        let base = bundled::reference_tree();
        let keep = gt_min();
        for sampling in [Sampling::Stratified, Sampling::Uniform] {
            for extra in [0, 20, 40, 60, 80, 95] {
                let t = build_scaled_tree(&base, &keep, extra, 7, sampling).unwrap();
                assert_eq!(t.tool_count(), keep.len() + extra);
                t.validate().unwrap();
                for name in &keep {
                    assert_eq!(t.tool(name).unwrap().kit, base.tool(name).unwrap().kit);
                }
            }
            let a = build_scaled_tree(&base, &keep, 20, 3, sampling).unwrap();
            let b = build_scaled_tree(&base, &keep, 20, 3, sampling).unwrap();
            assert_eq!(a, b);
        }
        assert!(matches!(
            build_scaled_tree(&base, &keep, 96, 0, Sampling::Stratified),
            Err(HarnessError::NotEnoughDistractors { .. })
        ));
    }

    #[test]
    fn cross_domain_sizes() {
        let base = bundled::reference_tree();
        let trees = inject_cross_domain(&base, &[bundled::noise_stage1(), bundled::noise_stage2()])
            .unwrap();
        let sizes: Vec<usize> = trees.iter().map(SkillTree::tool_count).collect();
        assert_eq!(sizes, [104, 179, 234]);
        for t in &trees {
            for orig in base.tools() {
                let now = t.tool(&orig.name).unwrap();
                assert_eq!((&now.tool_id, &now.brief), (&orig.tool_id, &orig.brief));
            }
        }
        let dup = base.retain(|t| t.name == "mean").unwrap();
        assert!(inject_cross_domain(&base, &[dup]).is_err());
    }

    #[test]
    fn uniform_documents() {
        let t = with_uniform_documents(&bundled::reference_tree(), 900).unwrap();
        assert!(t.tools().all(|x| x.document.len() == 900));
    }

    #[test]
    fn paradigm_specs() {
        assert_eq!(
            "random:5".parse::<ParadigmSpec>().unwrap(),
            ParadigmSpec::Random(5)
        );
        assert_eq!(ParadigmSpec::Random(5).to_string(), "random-5");
        assert!("random:x".parse::<ParadigmSpec>().is_err());
        assert!("nope".parse::<ParadigmSpec>().is_err());
    }

    #[test]
    fn rag_needs_embedding() {
        let tree = bundled::reference_tree();
        let err = run_batch(
            &tree,
            &bundled::fixtures(),
            ParadigmSpec::Rag,
            &BatchConfig::default(),
        );
        assert!(matches!(err, Err(HarnessError::Config(_))));
    }

    #[test]
    fn jobs_do_not_change_order() {
        let tree = bundled::reference_tree();
        let fixtures = bundled::fixtures();
        let one = run_batch(
            &tree,
            &fixtures,
            ParadigmSpec::Active,
            &BatchConfig::default(),
        )
        .unwrap();
        let cfg = BatchConfig {
            jobs: 4,
            ..BatchConfig::default()
        };
        assert_eq!(
            one,
            run_batch(&tree, &fixtures, ParadigmSpec::Active, &cfg).unwrap()
        );
    }

    #[test]
    fn plan_checks() {
        let bad: ScalingPlan =
            serde_json::from_str(r#"{"mode":"same_domain","increments":[20,0]}"#).unwrap();
        assert!(bad.check().is_err());
        let bad: ScalingPlan =
            serde_json::from_str(r#"{"mode":"same_domain","increments":["all",20]}"#).unwrap();
        assert!(bad.check().is_err());
        let ok: ScalingPlan =
            serde_json::from_str(r#"{"mode":"same_domain","increments":[0,20,"all"]}"#).unwrap();
        ok.check().unwrap();
        assert_eq!(
            ok.paradigms().unwrap(),
            [ParadigmSpec::Flat, ParadigmSpec::Active]
        );
    }

    #[test]
    fn smallest_tree_suffices_for_oracle() {
        let base = bundled::reference_tree();
        let fixtures = bundled::fixtures();
        let t = build_scaled_tree(&base, &gt_min(), 0, 0, Sampling::Stratified).unwrap();
        for spec in [
            ParadigmSpec::Active,
            ParadigmSpec::Flat,
            ParadigmSpec::TwoLayers,
        ] {
            let recs = run_batch(&t, &fixtures, spec, &BatchConfig::default()).unwrap();
            let m = aggregate(&recs, &fixtures, ScoringOptions::default()).means;
            assert_eq!(m.accuracy, Some(1.0));
            assert_eq!(m.tool_exact_match, Some(1.0));
            assert_eq!(m.parameters, Some(1.0));
        }
    }
}
