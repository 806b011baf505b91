//! Run the bundled fixtures against a chat-completions endpoint.
//!
//! LLM_ENDPOINT=https://host/v1/chat/completions LLM_MODEL=name LLM_API_KEY=... \
//!     cargo run --example remote_llm -- active

use skilltree::bundled;
use skilltree::harness::{run_batch, BatchConfig, ParadigmSpec};
use skilltree::metrics::{aggregate, ScoringOptions, TokenSource};
use skilltree::policy::{PolicySpec, RemoteLlmConfig};
use skilltree::retrieval::EmbeddingProvider;

fn main() {
    let config = match RemoteLlmConfig::from_env() {
        Ok(c) => c,
        Err(e) => {
            eprintln!(
                "{e}\nset LLM_ENDPOINT and LLM_MODEL (and LLM_API_KEY if the endpoint needs one)"
            );
            return;
        }
    };
    let spec: ParadigmSpec = std::env::args()
        .nth(1)
        .as_deref()
        .unwrap_or("active")
        .parse()
        .unwrap();
    let cfg = BatchConfig {
        policy: PolicySpec::Remote(config),
        token_source: TokenSource::Provider,
        embedding: Some(EmbeddingProvider::default()),
        ..BatchConfig::default()
    };
    let fixtures = bundled::fixtures();
    let records = run_batch(&bundled::reference_tree(), &fixtures, spec, &cfg).unwrap();
    for r in &records {
        println!(
            "{}: {} turns, answer {:?}, failure {:?}",
            r.question_id, r.turn_count, r.answer, r.failure
        );
    }
    println!(
        "{}",
        aggregate(&records, &fixtures, ScoringOptions::default()).summary()
    );
}
