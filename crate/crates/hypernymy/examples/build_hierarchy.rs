//! Load a hypernym hierarchy from its two text files and poke around:
//! summary statistics, classifiable subtrees, multi-parent nodes, and
//! leaf distances.
//!
//! Run with `cargo run --example build_hierarchy`.

use hypernymy::{load_hierarchy, Result, SynsetId};
use std::path::Path;

fn data(name: &str) -> String {
    format!("{}/examples/data/{name}", env!("CARGO_MANIFEST_DIR"))
}

fn main() -> Result<()> {
    let graph = load_hierarchy(
        Path::new(&data("edges.txt")),
        Path::new(&data("leaf_map.txt")),
    )?;

    println!("loaded toy hierarchy:");
    println!(
        "  {} nodes, {} edges, {} leaves, {} evaluation synsets, root {}",
        graph.node_count(),
        graph.edge_count(),
        graph.leaf_count(),
        graph.evaluation_set().len(),
        graph.root()
    );

    // The classifiable subtree A(s) of a synset is the set of leaf
    // classes reachable downward from it.
    let animal = SynsetId::parse("n10000001")?;
    let subtree = graph.classifiable_subtree(animal)?;
    println!("\nA(animal) covers {} of {} leaf classes:", subtree.len(), graph.leaf_count());
    for &index in subtree.leaf_indices() {
        let leaf = graph.leaves()[index as usize];
        println!("  class {index}: {} ({})", graph.first_lemma(leaf)?.unwrap_or("?"), leaf);
    }

    // WordNet is a DAG, not a tree: seal is both a mammal and an
    // aquatic animal.
    let seal = SynsetId::parse("n10000012")?;
    let parents = graph.hypernyms(seal)?;
    println!("\nhypernyms of seal: {parents:?}");

    // Evaluation synsets close to the leaves make good candidates for
    // human inspection: their prompts are concrete.
    println!("\nevaluation synsets within leaf distance 1:");
    for s in graph.evaluation_synsets_within_leaf_distance(1) {
        println!("  {} ({})", graph.first_lemma(s)?.unwrap_or("?"), s);
    }

    // Full statistics, as the CLI's `hierarchy stats` prints them.
    println!("\n{}", serde_json::to_string_pretty(&graph.stats()).expect("stats serialize"));
    Ok(())
}
