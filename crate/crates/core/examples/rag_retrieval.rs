//! Top-k tool retrieval with a forced include, as used by the RAG baseline.

use skilltree::bundled;
use skilltree::retrieval::{build_index, retrieve, EmbeddingProvider};

fn main() {
    let tree = bundled::reference_tree();
    let index = build_index(&tree, EmbeddingProvider::Builtin { dim: 256 }).unwrap();
    let forced = vec!["get_filelist".to_string()];
    for fixture in bundled::fixtures() {
        let tools = retrieve(&index, &fixture.query, 19, &forced).unwrap();
        let needed: Vec<&str> = fixture
            .gt_trajectory
            .iter()
            .map(|s| s.tool.as_str())
            .collect();
        let missing: Vec<&&str> = needed
            .iter()
            .filter(|t| !tools.iter().any(|x| x == *t))
            .collect();
        println!(
            "{}: {} tools retrieved, top 5 {:?}",
            fixture.question_id,
            tools.len(),
            &tools[..5]
        );
        println!("    ground-truth tools missing from the context: {missing:?}");
    }
}
