//! Replay recorded action scripts against their fixtures and score them.

use skilltree::bundled;
use skilltree::engine::{run_episode, EpisodeSetup, Paradigm};
use skilltree::metrics::{score_question, ScoringOptions};
use skilltree::policy::{Script, ScriptedPolicy};

const TRACES: [(&str, &str, Paradigm); 4] = [
    (
        "a1_split_window_active.json",
        "question33",
        Paradigm::Active,
    ),
    (
        "a1_split_window_2layers.json",
        "question33",
        Paradigm::TwoLayers,
    ),
    ("a2_water_vapor_active.json", "question61", Paradigm::Active),
    ("a1_wrong_answer.json", "question33", Paradigm::Active),
];

fn main() {
    let tree = bundled::reference_tree();
    let dir = std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("data/traces");
    for (file, qid, paradigm) in TRACES {
        let fixture = bundled::fixtures()
            .into_iter()
            .find(|f| f.question_id == qid)
            .unwrap();
        let script = Script::load(&dir.join(file)).unwrap();
        let mut policy = ScriptedPolicy::new(script.actions_for(qid).to_vec()).unwrap();
        let rec = run_episode(
            &fixture,
            &tree,
            &EpisodeSetup::new(paradigm.clone()),
            &mut policy,
        )
        .unwrap();
        let s = score_question(&rec, &fixture, ScoringOptions::default());
        println!(
            "{file:<30} {:<7} turns={:<2} answer={:?} acc={} tao={:.2} tio={:.2} tem={:.2} params={:.2}",
            paradigm.label(),
            rec.turn_count,
            rec.answer.as_deref().unwrap_or("-"),
            s.accuracy,
            s.tool_any_order,
            s.tool_in_order,
            s.tool_exact_match,
            s.parameters
        );
    }
}
