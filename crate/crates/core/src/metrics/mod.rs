//! Trajectory scoring: end-to-end accuracy and efficiency, the four
//! step-level tool metrics, and prompt-token statistics.

pub mod tokens;

use std::collections::{BTreeSet, HashMap};
use std::io;

use serde::{Deserialize, Serialize};

pub use tokens::{count_tokens, ByteEstimate, TokenCounter, TokenSource};

use crate::engine::TrajectoryRecord;
use crate::environment::{args_equal, Args, QuestionFixture};
use crate::registry::unqualified;

/// Choice inside the last `<Answer>X<Answer>` or `<Answer>X</Answer>` tag.
pub fn extract_answer(text: &str) -> Option<String> {
    const OPEN: &str = "<Answer>";
    const CLOSE: &str = "</Answer>";
    let mut found = None;
    let mut pos = 0;
    while let Some(i) = text[pos..].find(OPEN) {
        let start = pos + i + OPEN.len();
        let rest = &text[start..];
        let next_open = rest.find(OPEN).map(|j| (j, OPEN.len()));
        let next_close = rest.find(CLOSE).map(|j| (j, CLOSE.len()));
        let end = match (next_open, next_close) {
            (Some(a), Some(b)) => Some(if a.0 <= b.0 { a } else { b }),
            (a, b) => a.or(b),
        };
        let Some((j, tag_len)) = end else { break };
        let inner = rest[..j].trim();
        if !inner.is_empty() {
            found = Some(inner.to_string());
        }
        pos = start + j + tag_len;
    }
    found
}

/// `n_model / n_gt`; `None` when the ground truth has no calls.
pub fn efficiency(n_model: usize, n_gt: usize) -> Option<f64> {
    (n_gt > 0).then(|| n_model as f64 / n_gt as f64)
}

/// Fraction of distinct ground-truth tools that appear anywhere in `pred`.
pub fn tool_any_order<T: Ord>(pred: &[T], gt: &[T]) -> f64 {
    let gt: BTreeSet<&T> = gt.iter().collect();
    if gt.is_empty() {
        return 1.0;
    }
    let pred: BTreeSet<&T> = pred.iter().collect();
    gt.intersection(&pred).count() as f64 / gt.len() as f64
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InOrderMode {
    /// Largest order-preserving matching (longest common subsequence).
    #[default]
    Optimal,
    /// Single left-to-right scan: each ground-truth tool takes the earliest
    /// matching prediction after the previous match; unmatched tools are
    /// skipped.
    Greedy,
}

/// Ordered matches between `pred` and `gt`, divided by `|gt|`.
pub fn tool_in_order<T: Eq>(pred: &[T], gt: &[T]) -> f64 {
    tool_in_order_with(pred, gt, InOrderMode::Optimal)
}

pub fn tool_in_order_with<T: Eq>(pred: &[T], gt: &[T], mode: InOrderMode) -> f64 {
    if gt.is_empty() {
        return 1.0;
    }
    let matched = match mode {
        InOrderMode::Optimal => lcs_len(pred, gt),
        InOrderMode::Greedy => {
            let mut cursor = 0;
            let mut matched = 0;
            for g in gt {
                if let Some(i) = pred[cursor..].iter().position(|p| p == g) {
                    matched += 1;
                    cursor += i + 1;
                }
            }
            matched
        }
    };
    matched as f64 / gt.len() as f64
}

fn lcs_len<T: Eq>(a: &[T], b: &[T]) -> usize {
    let mut row = vec![0usize; b.len() + 1];
    for x in a {
        let mut diag = 0;
        for (j, y) in b.iter().enumerate() {
            let up = row[j + 1];
            row[j + 1] = if x == y { diag + 1 } else { up.max(row[j]) };
            diag = up;
        }
    }
    row[b.len()]
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExactDenominator {
    #[default]
    Gt,
    Shorter,
}

fn prefix_len<A, B>(pred: &[A], gt: &[B], eq: impl Fn(&A, &B) -> bool) -> usize {
    pred.iter().zip(gt).take_while(|(p, g)| eq(p, g)).count()
}

/// Length of the agreeing prefix over `|gt|`.
pub fn tool_exact_match<T: Eq>(pred: &[T], gt: &[T]) -> f64 {
    tool_exact_match_with(pred, gt, ExactDenominator::Gt)
}

pub fn tool_exact_match_with<T: Eq>(pred: &[T], gt: &[T], denom: ExactDenominator) -> f64 {
    let d = match denom {
        ExactDenominator::Gt => gt.len(),
        ExactDenominator::Shorter => gt.len().min(pred.len()),
    };
    if gt.is_empty() {
        return 1.0;
    }
    if d == 0 {
        return 0.0;
    }
    prefix_len(pred, gt, |p, g| p == g) as f64 / d as f64
}

/// Like [`tool_exact_match`] but a step only agrees when the arguments are
/// equal too.
pub fn parameters_match<S: AsRef<str>>(pred: &[(S, Args)], gt: &[(S, Args)]) -> f64 {
    if gt.is_empty() {
        return 1.0;
    }
    let n = prefix_len(pred, gt, |p, g| {
        p.0.as_ref() == g.0.as_ref() && args_equal(&p.1, &g.1)
    });
    n as f64 / gt.len() as f64
}

/// `1 - method / baseline`.
pub fn compression_ratio(baseline: u64, method: u64) -> f64 {
    1.0 - method as f64 / baseline as f64
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScoringOptions {
    #[serde(default)]
    pub in_order: InOrderMode,
    #[serde(default)]
    pub exact_denominator: ExactDenominator,
}

fn choice_eq(a: &str, b: &str) -> bool {
    a.trim().eq_ignore_ascii_case(b.trim())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuestionScore {
    pub question_id: String,
    pub accuracy: f64,
    pub efficiency: Option<f64>,
    pub tool_any_order: f64,
    pub tool_in_order: f64,
    pub tool_exact_match: f64,
    pub parameters: f64,
    pub tokens_per_question: u64,
    pub turn_token_list: Vec<u64>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub flags: Vec<String>,
}

impl QuestionScore {
    pub fn turns(&self) -> usize {
        self.turn_token_list.len()
    }

    pub fn tokens_per_turn(&self) -> f64 {
        if self.turns() == 0 {
            0.0
        } else {
            self.tokens_per_question as f64 / self.turns() as f64
        }
    }
}

pub fn score_question(
    record: &TrajectoryRecord,
    fixture: &QuestionFixture,
    opts: ScoringOptions,
) -> QuestionScore {
    let mut flags = Vec::new();
    let pred: Vec<&str> = record.calls.iter().map(|c| unqualified(&c.tool)).collect();
    let gt: Vec<&str> = fixture
        .gt_trajectory
        .iter()
        .map(|s| unqualified(&s.tool))
        .collect();
    if gt.is_empty() {
        flags.push("empty ground truth: step metrics vacuous".to_string());
    }
    let answer = record
        .answer
        .as_deref()
        .map(|a| extract_answer(a).unwrap_or_else(|| a.to_string()));
    let accuracy = match &answer {
        Some(a) if choice_eq(a, &fixture.gt_answer) => 1.0,
        _ => 0.0,
    };
    let efficiency = efficiency(pred.len(), gt.len());
    if efficiency.is_none() {
        log::warn!(
            "{}: efficiency undefined without ground-truth calls",
            record.question_id
        );
        flags.push("efficiency omitted".to_string());
    }
    if let Some(f) = &record.failure {
        flags.push(format!("episode failure: {f}"));
    }
    let pred_steps: Vec<(&str, Args)> = record
        .calls
        .iter()
        .map(|c| (unqualified(&c.tool), c.args.clone()))
        .collect();
    let gt_steps: Vec<(&str, Args)> = fixture
        .gt_trajectory
        .iter()
        .map(|s| (unqualified(&s.tool), s.args.clone()))
        .collect();
    let turn_token_list: Vec<u64> = record.turn_tokens().collect();
    QuestionScore {
        question_id: record.question_id.clone(),
        accuracy,
        efficiency,
        tool_any_order: tool_any_order(&pred, &gt),
        tool_in_order: tool_in_order_with(&pred, &gt, opts.in_order),
        tool_exact_match: tool_exact_match_with(&pred, &gt, opts.exact_denominator),
        parameters: parameters_match(&pred_steps, &gt_steps),
        tokens_per_question: turn_token_list.iter().sum(),
        turn_token_list,
        flags,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RowError {
    pub question_id: String,
    pub message: String,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct MetricMeans {
    pub accuracy: Option<f64>,
    pub efficiency: Option<f64>,
    pub tool_any_order: Option<f64>,
    pub tool_in_order: Option<f64>,
    pub tool_exact_match: Option<f64>,
    pub parameters: Option<f64>,
    pub tokens_per_question: Option<f64>,
    /// Turn-weighted: all turn tokens over all turns.
    pub tokens_per_turn: Option<f64>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub questions: Vec<QuestionScore>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub errors: Vec<RowError>,
    pub means: MetricMeans,
}

fn mean(values: impl Iterator<Item = f64>) -> Option<f64> {
    let (sum, n) = values.fold((0.0, 0usize), |(s, n), v| (s + v, n + 1));
    (n > 0).then(|| sum / n as f64)
}

impl RunReport {
    pub fn from_scores(questions: Vec<QuestionScore>, errors: Vec<RowError>) -> Self {
        let q = &questions;
        let total_turns: usize = q.iter().map(QuestionScore::turns).sum();
        let total_tokens: u64 = q.iter().map(|s| s.tokens_per_question).sum();
        let means = MetricMeans {
            accuracy: mean(q.iter().map(|s| s.accuracy)),
            efficiency: mean(q.iter().filter_map(|s| s.efficiency)),
            tool_any_order: mean(q.iter().map(|s| s.tool_any_order)),
            tool_in_order: mean(q.iter().map(|s| s.tool_in_order)),
            tool_exact_match: mean(q.iter().map(|s| s.tool_exact_match)),
            parameters: mean(q.iter().map(|s| s.parameters)),
            tokens_per_question: mean(q.iter().map(|s| s.tokens_per_question as f64)),
            tokens_per_turn: (total_turns > 0).then(|| total_tokens as f64 / total_turns as f64),
        };
        Self {
            questions,
            errors,
            means,
        }
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    pub fn write_csv<W: io::Write>(&self, out: W) -> Result<(), csv::Error> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record([
            "question_id",
            "accuracy",
            "efficiency",
            "tao",
            "tio",
            "tem",
            "params",
            "tokens_q",
            "turns",
            "tokens_turn_mean",
        ])?;
        for s in &self.questions {
            w.write_record([
                s.question_id.clone(),
                s.accuracy.to_string(),
                s.efficiency.map(|e| e.to_string()).unwrap_or_default(),
                s.tool_any_order.to_string(),
                s.tool_in_order.to_string(),
                s.tool_exact_match.to_string(),
                s.parameters.to_string(),
                s.tokens_per_question.to_string(),
                s.turns().to_string(),
                s.tokens_per_turn().to_string(),
            ])?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn to_csv(&self) -> String {
        let mut buf = Vec::new();
        self.write_csv(&mut buf).expect("in-memory csv");
        String::from_utf8(buf).expect("utf-8 csv")
    }

    /// One line per mean, for terminal output.
    pub fn summary(&self) -> String {
        let m = &self.means;
        let f = |v: Option<f64>| v.map_or("n/a".to_string(), |v| format!("{v:.4}"));
        format!(
            "questions={} accuracy={} efficiency={} tao={} tio={} tem={} params={} tokens/question={} tokens/turn={}",
            self.questions.len(),
            f(m.accuracy),
            f(m.efficiency),
            f(m.tool_any_order),
            f(m.tool_in_order),
            f(m.tool_exact_match),
            f(m.parameters),
            f(m.tokens_per_question),
            f(m.tokens_per_turn),
        )
    }
}

/// Scores each record against the fixture with the same question id.
/// Records without a fixture become row errors; the rest are scored.
pub fn aggregate(
    records: &[TrajectoryRecord],
    fixtures: &[QuestionFixture],
    opts: ScoringOptions,
) -> RunReport {
    let by_id: HashMap<&str, &QuestionFixture> = fixtures
        .iter()
        .map(|f| (f.question_id.as_str(), f))
        .collect();
    let mut scores = Vec::with_capacity(records.len());
    let mut errors = Vec::new();
    for r in records {
        match by_id.get(r.question_id.as_str()) {
            Some(f) => scores.push(score_question(r, f, opts)),
            None => errors.push(RowError {
                question_id: r.question_id.clone(),
                message: "no fixture with this question id".to_string(),
            }),
        }
    }
    RunReport::from_scores(scores, errors)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::engine::{run_episode, CallRecord, EpisodeSetup, Paradigm};
    use crate::policy::OraclePolicy;
    use proptest::prelude::*;

    fn s(x: &str) -> Vec<char> {
        x.chars().collect()
    }

    #[test]
    fn answers() {
        assert_eq!(extract_answer("<Answer>D<Answer>").as_deref(), Some("D"));
        assert_eq!(
            extract_answer("I think A. <Answer>B</Answer>").as_deref(),
            Some("B")
        );
        assert_eq!(extract_answer("no tags here"), None);
        assert_eq!(
            extract_answer("<Answer>A<Answer> then <Answer> C </Answer>").as_deref(),
            Some("C")
        );
    }

    #[test]
    fn efficiency_cases() {
        assert_eq!(efficiency(3, 2), Some(1.5));
        assert_eq!(efficiency(2, 2), Some(1.0));
        assert_eq!(efficiency(12, 12), Some(1.0));
        assert_eq!(efficiency(1, 0), None);
    }

    #[test]
    fn any_order() {
        assert_eq!(tool_any_order(&s("CA"), &s("AC")), 1.0);
        assert_eq!(tool_any_order(&s("AAB"), &s("AC")), 0.5);
        assert_eq!(tool_any_order(&s(""), &s("A")), 0.0);
    }

    #[test]
    fn in_order() {
        assert_eq!(tool_in_order(&s("ABC"), &s("AC")), 1.0);
        assert_eq!(tool_in_order(&s("CA"), &s("AC")), 0.5);
        assert_eq!(tool_in_order(&s("ACAC"), &s("AAC")), 1.0);
    }

    #[test]
    fn greedy_scan_can_undercount() {
        let (pred, gt) = (s("BCA"), s("ABC"));
        assert!((tool_in_order_with(&pred, &gt, InOrderMode::Greedy) - 1.0 / 3.0).abs() < 1e-12);
        assert!((tool_in_order(&pred, &gt) - 2.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn exact_match() {
        assert!((tool_exact_match(&s("ABC"), &s("ABD")) - 2.0 / 3.0).abs() < 1e-12);
        assert_eq!(tool_exact_match(&s("AB"), &s("AB")), 1.0);
        assert_eq!(tool_exact_match(&s("BA"), &s("AB")), 0.0);
        assert_eq!(
            tool_exact_match_with(&s("A"), &s("AB"), ExactDenominator::Shorter),
            1.0
        );
        assert_eq!(tool_exact_match(&s("A"), &s("AB")), 0.5);
    }

    fn step(tool: &str, v: i64) -> (&str, Args) {
        let mut a = Args::new();
        a.insert("x".into(), serde_json::json!(v));
        (tool, a)
    }

    #[test]
    fn parameters() {
        assert_eq!(parameters_match(&[step("A", 1)], &[step("A", 1)]), 1.0);
        assert_eq!(parameters_match(&[step("A", 2)], &[step("A", 1)]), 0.0);
        let gt = [step("A", 1), step("B", 1), step("C", 1)];
        let pred = [step("A", 1), step("B", 1), step("C", 2)];
        assert!((parameters_match(&pred, &gt) - 2.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn compression() {
        assert!((compression_ratio(502119, 70759) - 0.859).abs() < 0.001);
        assert!((compression_ratio(30612, 5951) - 0.806).abs() < 0.001);
        assert_eq!(compression_ratio(100, 100), 0.0);
    }

    fn record(qid: &str, answer: &str, turn_tokens: &[u64]) -> TrajectoryRecord {
        use crate::engine::{Action, ObservationKind, TurnRecord};
        TrajectoryRecord {
            question_id: qid.into(),
            paradigm: "active".into(),
            turns: turn_tokens
                .iter()
                .map(|&t| TurnRecord {
                    action: Action::filelist("."),
                    observation_kind: ObservationKind::Exec,
                    observation_len: 0,
                    input_tokens: t,
                })
                .collect(),
            calls: Vec::<CallRecord>::new(),
            answer: Some(answer.into()),
            terminated: true,
            turn_count: turn_tokens.len(),
            failure: None,
        }
    }

    #[test]
    fn aggregation() {
        let fixtures = crate::bundled::fixtures();
        let recs = [
            record(&fixtures[0].question_id, "d", &[10, 20, 30]),
            record(&fixtures[1].question_id, "A", &[40]),
        ];
        let report = aggregate(&recs, &fixtures, ScoringOptions::default());
        assert_eq!(report.means.accuracy, Some(0.5));
        assert_eq!(report.questions[0].tokens_per_question, 60);
        assert_eq!(report.questions[0].tokens_per_turn(), 20.0);
        assert_eq!(report.means.tokens_per_turn, Some(25.0));
        assert_eq!(report.means.tokens_per_question, Some(50.0));

        let mut reversed = recs.to_vec();
        reversed.reverse();
        let other = aggregate(&reversed, &fixtures, ScoringOptions::default());
        assert_eq!(other.means, report.means);
    }

    #[test]
    fn unknown_question_is_a_row_error() {
        let fixtures = crate::bundled::fixtures();
        let recs = [
            record("nope", "A", &[1]),
            record(&fixtures[2].question_id, "D", &[1]),
        ];
        let report = aggregate(&recs, &fixtures, ScoringOptions::default());
        assert_eq!(report.errors.len(), 1);
        assert_eq!(report.questions.len(), 1);
        let empty = aggregate(&[], &fixtures, ScoringOptions::default());
        assert!(empty.questions.is_empty());
        assert_eq!(empty.means.accuracy, None);
        assert_eq!(empty.to_csv().lines().count(), 1);
    }

    #[test]
    fn empty_ground_truth_is_vacuous_and_flagged() {
        let mut fixture = crate::bundled::fixture_a1();
        fixture.gt_trajectory.clear();
        let score = score_question(
            &record(&fixture.question_id, "D", &[5]),
            &fixture,
            ScoringOptions::default(),
        );
        assert_eq!(score.tool_any_order, 1.0);
        assert_eq!(score.tool_in_order, 1.0);
        assert_eq!(score.tool_exact_match, 1.0);
        assert_eq!(score.parameters, 1.0);
        assert_eq!(score.efficiency, None);
        assert!(!score.flags.is_empty());
    }

    #[test]
    fn oracle_run_scores_one() {
        let tree = crate::bundled::reference_tree();
        let fixtures = crate::bundled::fixtures();
        let setup = EpisodeSetup::new(Paradigm::Active);
        let recs: Vec<_> = fixtures
            .iter()
            .map(|f| run_episode(f, &tree, &setup, &mut OraclePolicy::new()).unwrap())
            .collect();
        let m = aggregate(&recs, &fixtures, ScoringOptions::default()).means;
        for v in [
            m.accuracy,
            m.efficiency,
            m.tool_any_order,
            m.tool_in_order,
            m.tool_exact_match,
            m.parameters,
        ] {
            assert_eq!(v, Some(1.0));
        }
    }

    proptest! {
        #[test]
        fn ordering_chain(pred in proptest::collection::vec(0u8..5, 0..8),
                          gt in proptest::sample::subsequence(vec![0u8, 1, 2, 3, 4], 1..5)
                              .prop_shuffle()) {
            let tem = tool_exact_match(&pred, &gt);
            let tio = tool_in_order(&pred, &gt);
            let tao = tool_any_order(&pred, &gt);
            prop_assert!(tem <= tio && tio <= tao);
        }
    }
}
