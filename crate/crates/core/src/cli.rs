//! `skilltree` command line: `validate`, `run`, `scale` and `eval`.
//!
//! Exit codes: 0 success, 1 I/O or configuration error, 2 invalid manifest
//! or fixture, 3 at least one episode failed.

use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args as ClapArgs, Parser, Subcommand};

use crate::bundled;
use crate::engine::{TrajectoryRecord, DEFAULT_MAX_TURNS};
use crate::environment::{load_fixtures, FixtureError, QuestionFixture};
use crate::harness::{
    records_to_jsonl, run_batch, run_matrix, BatchConfig, HarnessError, ParadigmSpec, ScalingPlan,
};
use crate::metrics::{
    aggregate, ExactDenominator, InOrderMode, RunReport, ScoringOptions, TokenSource,
};
use crate::policy::{PolicyError, PolicySpec, PromptSet};
use crate::registry::{load_manifest, RegistryError, SkillTree};
use crate::retrieval::{EmbeddingProvider, RetrievalError};

pub const EXIT_OK: i32 = 0;
pub const EXIT_CONFIG: i32 = 1;
pub const EXIT_INVALID: i32 = 2;
pub const EXIT_EPISODES: i32 = 3;

#[derive(Debug)]
pub struct CliError {
    pub code: i32,
    pub message: String,
}

impl CliError {
    pub fn config(message: impl Into<String>) -> Self {
        Self {
            code: EXIT_CONFIG,
            message: message.into(),
        }
    }

    pub fn invalid(message: impl Into<String>) -> Self {
        Self {
            code: EXIT_INVALID,
            message: message.into(),
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.message)
    }
}

impl std::error::Error for CliError {}

impl From<RegistryError> for CliError {
    fn from(e: RegistryError) -> Self {
        match e {
            RegistryError::Io { .. } => Self::config(e.to_string()),
            _ => Self::invalid(e.to_string()),
        }
    }
}

impl From<FixtureError> for CliError {
    fn from(e: FixtureError) -> Self {
        match e {
            FixtureError::Io { .. } => Self::config(e.to_string()),
            _ => Self::invalid(e.to_string()),
        }
    }
}

impl From<HarnessError> for CliError {
    fn from(e: HarnessError) -> Self {
        match e {
            HarnessError::Registry(e) => e.into(),
            HarnessError::Validation(_) => Self::invalid(e.to_string()),
            _ => Self::config(e.to_string()),
        }
    }
}

impl From<PolicyError> for CliError {
    fn from(e: PolicyError) -> Self {
        Self::config(e.to_string())
    }
}

impl From<RetrievalError> for CliError {
    fn from(e: RetrievalError) -> Self {
        Self::config(e.to_string())
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "skilltree",
    version,
    about = "Progressive tool disclosure experiments"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Check a manifest and print its shape.
    Validate {
        #[arg(long)]
        manifest: PathBuf,
    },
    /// Run every fixture under one paradigm and policy.
    Run(RunArgs),
    /// Run a scaling plan (same-domain or cross-domain).
    Scale {
        #[arg(long)]
        plan: PathBuf,
        #[command(flatten)]
        run: RunArgs,
    },
    /// Re-score an existing trajectory file.
    Eval {
        #[arg(long)]
        trajectories: PathBuf,
        /// Fixture file or directory; the bundled fixtures when omitted.
        #[arg(long)]
        fixtures: Option<PathBuf>,
        /// Report directory; defaults to the trajectory file's directory.
        #[arg(long)]
        out: Option<PathBuf>,
        #[command(flatten)]
        scoring: ScoringArgs,
    },
}

#[derive(Debug, Clone, ClapArgs)]
pub struct ScoringArgs {
    #[arg(long, default_value = "optimal", value_parser = parse_in_order)]
    pub in_order: InOrderMode,
    #[arg(long, default_value = "gt", value_parser = parse_denominator)]
    pub exact_denominator: ExactDenominator,
}

impl ScoringArgs {
    pub fn options(&self) -> ScoringOptions {
        ScoringOptions {
            in_order: self.in_order,
            exact_denominator: self.exact_denominator,
        }
    }
}

fn parse_in_order(s: &str) -> Result<InOrderMode, String> {
    match s {
        "optimal" => Ok(InOrderMode::Optimal),
        "greedy" => Ok(InOrderMode::Greedy),
        _ => Err(format!("expected optimal|greedy, got `{s}`")),
    }
}

fn parse_denominator(s: &str) -> Result<ExactDenominator, String> {
    match s {
        "gt" => Ok(ExactDenominator::Gt),
        "shorter" => Ok(ExactDenominator::Shorter),
        _ => Err(format!("expected gt|shorter, got `{s}`")),
    }
}

#[derive(Debug, Clone, ClapArgs)]
pub struct RunArgs {
    /// Skill-tree manifest; the bundled reference tree when omitted.
    #[arg(long)]
    pub manifest: Option<PathBuf>,
    /// Fixture file or directory; the bundled fixtures when omitted.
    #[arg(long)]
    pub fixtures: Option<PathBuf>,
    /// active | flat | rag | 2layers | random:<seed>
    #[arg(long, default_value = "active")]
    pub paradigm: String,
    /// oracle | scripted:<file> | remote:<config> | remote
    #[arg(long, default_value = "oracle")]
    pub policy: String,
    #[arg(long, default_value_t = DEFAULT_MAX_TURNS)]
    pub max_turns: usize,
    #[arg(long, default_value_t = 19)]
    pub rag_k: usize,
    #[arg(long, default_value = "get_filelist", value_delimiter = ',')]
    pub rag_force: Vec<String>,
    /// builtin | provider
    #[arg(long, default_value = "builtin")]
    pub tokenizer: String,
    /// builtin[:dim] | remote[:url]; required by the rag paradigm.
    #[arg(long)]
    pub embedding: Option<String>,
    #[arg(long, default_value = "out")]
    pub out: PathBuf,
    /// Seed for `random` without an explicit seed and for scaling plans.
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long, default_value_t = 1)]
    pub jobs: usize,
    #[command(flatten)]
    pub scoring: ScoringArgs,
}

impl Default for RunArgs {
    fn default() -> Self {
        Cli::parse_from(["skilltree", "run"])
            .command
            .into_run()
            .expect("run subcommand")
    }
}

impl Command {
    fn into_run(self) -> Option<RunArgs> {
        match self {
            Command::Run(r) => Some(r),
            _ => None,
        }
    }
}

/// Resolved run settings.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub tree: SkillTree,
    pub fixtures: Vec<QuestionFixture>,
    pub paradigm: ParadigmSpec,
    pub batch: BatchConfig,
    pub out: PathBuf,
    pub seed: u64,
}

impl RunArgs {
    pub fn resolve(&self) -> Result<RunConfig, CliError> {
        let tree = match &self.manifest {
            Some(p) => load_manifest(p)?,
            None => bundled::reference_tree(),
        };
        let fixtures = match &self.fixtures {
            Some(p) => load_fixtures(p)?,
            None => bundled::fixtures(),
        };
        let seed = self.seed.unwrap_or(0);
        let paradigm = if self.paradigm == "random" {
            ParadigmSpec::Random(seed)
        } else {
            self.paradigm.parse()?
        };
        let token_source: TokenSource = self.tokenizer.parse().map_err(CliError::config)?;
        let embedding = self
            .embedding
            .as_deref()
            .map(str::parse::<EmbeddingProvider>)
            .transpose()?;
        if paradigm == ParadigmSpec::Rag && embedding.is_none() {
            return Err(CliError::config(
                "the rag paradigm needs an embedding provider (--embedding builtin)",
            ));
        }
        let batch = BatchConfig {
            policy: PolicySpec::parse(&self.policy)?,
            max_turns: self.max_turns,
            token_source,
            rag_k: self.rag_k,
            rag_force: self.rag_force.clone(),
            embedding,
            jobs: self.jobs.max(1),
            scoring: self.scoring.options(),
            prompts: PromptSet::default(),
        };
        Ok(RunConfig {
            tree,
            fixtures,
            paradigm,
            batch,
            out: self.out.clone(),
            seed,
        })
    }
}

fn write(path: &Path, contents: &str) -> Result<(), CliError> {
    if let Some(dir) = path.parent() {
        fs::create_dir_all(dir).map_err(|e| CliError::config(format!("{}: {e}", dir.display())))?;
    }
    fs::write(path, contents).map_err(|e| CliError::config(format!("{}: {e}", path.display())))
}

fn write_report(dir: &Path, report: &RunReport) -> Result<(), CliError> {
    write(&dir.join("report.json"), &report.to_json())?;
    write(&dir.join("report.csv"), &report.to_csv())
}

/// Prints `N kits, M tools` and the kit sizes.
pub fn cmd_validate(manifest: &Path) -> Result<String, CliError> {
    let tree = load_manifest(manifest)?;
    let sizes: Vec<String> = tree
        .nodes()
        .iter()
        .map(|n| format!("{}={}", n.kit_id, n.member_tool_ids.len()))
        .collect();
    Ok(format!(
        "{} kits, {} tools ({})",
        tree.kit_count(),
        tree.tool_count(),
        sizes.join(", ")
    ))
}

#[derive(Debug, Clone)]
pub struct RunOutcome {
    pub records: Vec<TrajectoryRecord>,
    pub report: RunReport,
}

impl RunOutcome {
    pub fn failures(&self) -> usize {
        self.records.iter().filter(|r| r.failure.is_some()).count()
    }

    pub fn exit_code(&self) -> i32 {
        if self.failures() > 0 {
            EXIT_EPISODES
        } else {
            EXIT_OK
        }
    }
}

/// Runs all fixtures, writes `trajectories.jsonl`, `report.json` and
/// `report.csv` under `config.out`.
pub fn cmd_run(config: &RunConfig) -> Result<RunOutcome, CliError> {
    let records = run_batch(
        &config.tree,
        &config.fixtures,
        config.paradigm,
        &config.batch,
    )?;
    let report = aggregate(&records, &config.fixtures, config.batch.scoring);
    write(
        &config.out.join("trajectories.jsonl"),
        &records_to_jsonl(&records),
    )?;
    write_report(&config.out, &report)?;
    Ok(RunOutcome { records, report })
}

pub fn read_trajectories(path: &Path) -> Result<Vec<TrajectoryRecord>, CliError> {
    let text = fs::read_to_string(path)
        .map_err(|e| CliError::config(format!("{}: {e}", path.display())))?;
    text.lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(i, l)| {
            serde_json::from_str(l)
                .map_err(|e| CliError::config(format!("{}:{}: {e}", path.display(), i + 1)))
        })
        .collect()
}

/// Re-scores a trajectory file and writes the report next to it (or to
/// `out`).
pub fn cmd_eval(
    trajectories: &Path,
    fixtures: &[QuestionFixture],
    out: Option<&Path>,
    scoring: ScoringOptions,
) -> Result<RunReport, CliError> {
    let records = read_trajectories(trajectories)?;
    let report = aggregate(&records, fixtures, scoring);
    for e in &report.errors {
        log::warn!("{}: {}", e.question_id, e.message);
    }
    let dir = out.map(Path::to_path_buf).unwrap_or_else(|| {
        trajectories
            .parent()
            .unwrap_or(Path::new("."))
            .to_path_buf()
    });
    write_report(&dir, &report)?;
    Ok(report)
}

pub fn cmd_scale(
    plan_path: &Path,
    config: &RunConfig,
    seed_override: Option<u64>,
) -> Result<String, CliError> {
    let mut plan = ScalingPlan::load(plan_path)?;
    if let (ScalingPlan::SameDomain { seed, .. }, Some(s)) = (&mut plan, seed_override) {
        *seed = s;
    }
    let cells = run_matrix(
        &plan,
        &config.tree,
        &config.fixtures,
        &config.batch,
        &config.out,
    )?;
    let mut lines: Vec<String> = cells
        .iter()
        .map(|c| format!("{}: {}", c.cell, c.report.summary()))
        .collect();
    lines.push(format!(
        "{} cells written to {}",
        cells.len(),
        config.out.display()
    ));
    Ok(lines.join("\n"))
}

/// Parses `args` and runs the command; returns the process exit code.
pub fn run_cli<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_CONFIG } else { EXIT_OK };
        }
    };
    match dispatch(cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            e.code
        }
    }
}

fn dispatch(command: Command) -> Result<i32, CliError> {
    match command {
        Command::Validate { manifest } => {
            println!("{}", cmd_validate(&manifest)?);
            Ok(EXIT_OK)
        }
        Command::Run(args) => {
            let config = args.resolve()?;
            let outcome = cmd_run(&config)?;
            println!("{}", outcome.report.summary());
            if outcome.failures() > 0 {
                eprintln!("{} episode(s) failed", outcome.failures());
            }
            Ok(outcome.exit_code())
        }
        Command::Scale { plan, run } => {
            let config = run.resolve()?;
            println!("{}", cmd_scale(&plan, &config, run.seed)?);
            Ok(EXIT_OK)
        }
        Command::Eval {
            trajectories,
            fixtures,
            out,
            scoring,
        } => {
            let fixtures = match fixtures {
                Some(p) => load_fixtures(p)?,
                None => bundled::fixtures(),
            };
            let report = cmd_eval(&trajectories, &fixtures, out.as_deref(), scoring.options())?;
            println!("{}", report.summary());
            Ok(EXIT_OK)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults() {
        let args = RunArgs::default();
        assert_eq!(args.paradigm, "active");
        assert_eq!(args.rag_k, 19);
        assert_eq!(args.rag_force, ["get_filelist"]);
        let config = args.resolve().unwrap();
        assert_eq!(config.seed, 0);
        assert_eq!(config.fixtures.len(), 4);
    }

    #[test]
    fn rag_without_embedding_is_a_config_error() {
        let args = RunArgs {
            paradigm: "rag".into(),
            ..RunArgs::default()
        };
        assert_eq!(args.resolve().unwrap_err().code, EXIT_CONFIG);
    }

    #[test]
    fn bare_random_uses_seed() {
        let args = RunArgs {
            paradigm: "random".into(),
            seed: Some(9),
            ..RunArgs::default()
        };
        assert_eq!(args.resolve().unwrap().paradigm, ParadigmSpec::Random(9));
    }
}
