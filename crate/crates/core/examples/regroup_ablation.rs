//! Ablations: kits with shuffled membership, and catalogs shown up front.

use skilltree::bundled;
use skilltree::engine::{init_state, Action, Paradigm};
use skilltree::environment::MockEnvironment;
use skilltree::harness::{run_batch, BatchConfig, ParadigmSpec};
use skilltree::metrics::{aggregate, ScoringOptions};

fn main() {
    let tree = bundled::reference_tree();
    let shuffled = tree.random_regroup(7);
    shuffled.validate().unwrap();
    let node = &shuffled.nodes()[0];
    let members: Vec<&str> = shuffled
        .members(node)
        .take(5)
        .map(|t| t.name.as_str())
        .collect();
    println!("random:7 kit `{}` now starts with {members:?}", node.kit_id);

    let fixtures = bundled::fixtures();
    for spec in [
        ParadigmSpec::Active,
        ParadigmSpec::Random(7),
        ParadigmSpec::TwoLayers,
    ] {
        let recs = run_batch(&tree, &fixtures, spec, &BatchConfig::default()).unwrap();
        let m = aggregate(&recs, &fixtures, ScoringOptions::default()).means;
        let skills: usize = recs.iter().map(|r| r.count_actions("skill")).sum();
        println!(
            "{:<9} skill actions {skills:>2}, tokens/turn {:>6.0}",
            spec.to_string(),
            m.tokens_per_turn.unwrap()
        );
    }

    let fixture = bundled::fixture_f1();
    let mut state = init_state("q", &tree, Paradigm::TwoLayers, None).unwrap();
    let err = state
        .step_with(
            Action::skill("inversion"),
            &mut MockEnvironment::new(&fixture),
            &tree,
        )
        .unwrap_err();
    println!("2layers skill -> {err}");
}
