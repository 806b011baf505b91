//! Same-domain scaling: add distractor tools around the minimal ground-truth
//! set and watch per-turn context under Flat and Active.
//!
//! cargo run --example scaling_sweep [-- out_dir]

use skilltree::bundled;
use skilltree::harness::{run_matrix, token_curves, BatchConfig, ScalingPlan};

fn main() {
    let out = std::env::args()
        .nth(1)
        .unwrap_or_else(|| "scaling_out".into());
    let plan: ScalingPlan = serde_json::from_str(
        r#"{"mode":"same_domain","increments":[0,20,40,60,80,"all"],"seed":0,"paradigms":["flat","active"]}"#,
    )
    .unwrap();
    let cells = run_matrix(
        &plan,
        &bundled::reference_tree(),
        &bundled::fixtures(),
        &BatchConfig::default(),
        std::path::Path::new(&out),
    )
    .unwrap();
    for (paradigm, curve) in token_curves(&cells) {
        let points: Vec<String> = curve.iter().map(|(n, t)| format!("{n}:{t:.0}")).collect();
        println!("{paradigm:<7} {}", points.join("  "));
    }
    println!("reports and curves.csv written to {out}/");
}
