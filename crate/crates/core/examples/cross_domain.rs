//! Cross-domain growth: the reference tree plus two bundled noise libraries.

use skilltree::bundled;
use skilltree::harness::{inject_cross_domain, run_batch, BatchConfig, ParadigmSpec};
use skilltree::metrics::{aggregate, ScoringOptions};

fn main() {
    let fixtures = bundled::fixtures();
    let stages = inject_cross_domain(
        &bundled::reference_tree(),
        &[bundled::noise_stage1(), bundled::noise_stage2()],
    )
    .unwrap();
    for (i, tree) in stages.iter().enumerate() {
        let kits: Vec<&str> = tree.nodes().iter().map(|n| n.kit_id.as_str()).collect();
        print!(
            "stage{i}: {:>3} tools, {:>2} kits",
            tree.tool_count(),
            kits.len()
        );
        for spec in [ParadigmSpec::Flat, ParadigmSpec::Active] {
            let recs = run_batch(tree, &fixtures, spec, &BatchConfig::default()).unwrap();
            let m = aggregate(&recs, &fixtures, ScoringOptions::default()).means;
            print!("  {spec} {:>6.0} tok/turn", m.tokens_per_turn.unwrap());
        }
        println!();
    }
}
