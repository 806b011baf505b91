//! Load a skill-tree manifest and print its shape.
//!
//! cargo run --example validate_manifest [-- path/to/manifest.json]

use skilltree::registry::load_manifest;

fn main() {
    let tree = match std::env::args().nth(1) {
        Some(path) => match load_manifest(&path) {
            Ok(tree) => tree,
            Err(e) => {
                eprintln!("{path}: {e}");
                std::process::exit(2);
            }
        },
        None => skilltree::bundled::reference_tree(),
    };
    println!("{} kits, {} tools", tree.kit_count(), tree.tool_count());
    for node in tree.nodes() {
        println!(
            "  {:<12} {:>3} tools  {}",
            node.kit_id,
            node.member_tool_ids.len(),
            node.applicable_tasks
        );
    }
}
