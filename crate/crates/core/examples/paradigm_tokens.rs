//! Prompt-token load of the same oracle episodes under each paradigm.

use skilltree::bundled;
use skilltree::harness::{run_batch, BatchConfig, ParadigmSpec};
use skilltree::metrics::{aggregate, compression_ratio, ScoringOptions};
use skilltree::retrieval::EmbeddingProvider;

fn main() {
    let tree = bundled::reference_tree();
    let fixtures = bundled::fixtures();
    let cfg = BatchConfig {
        embedding: Some(EmbeddingProvider::default()),
        ..BatchConfig::default()
    };
    let mut per_question = Vec::new();
    println!(
        "{:<8} {:>14} {:>12} {:>6}",
        "paradigm", "tokens/question", "tokens/turn", "tao"
    );
    for spec in [
        ParadigmSpec::Flat,
        ParadigmSpec::Rag,
        ParadigmSpec::TwoLayers,
        ParadigmSpec::Active,
    ] {
        let records = run_batch(&tree, &fixtures, spec, &cfg).unwrap();
        let m = aggregate(&records, &fixtures, ScoringOptions::default()).means;
        let (q, t) = (m.tokens_per_question.unwrap(), m.tokens_per_turn.unwrap());
        println!(
            "{:<8} {q:>14.0} {t:>12.0} {:>6.2}",
            spec.to_string(),
            m.tool_any_order.unwrap()
        );
        per_question.push((spec, q, t));
    }
    let (_, flat_q, flat_t) = per_question[0];
    let (_, act_q, act_t) = per_question[3];
    println!(
        "\nactive vs flat: {:.1}% fewer tokens per question, {:.1}% per turn",
        100.0 * compression_ratio(flat_q as u64, act_q as u64),
        100.0 * compression_ratio(flat_t as u64, act_t as u64)
    );
}
