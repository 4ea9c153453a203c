//! Emit the generation prompt for every evaluation synset.
//!
//! Each internal synset contributes its first lemma inside the template
//! `An image of {a/an} {lemma}.`; feeding these prompts to an image
//! generator is the first step of the pipeline.
//!
//! Run with `cargo run --example prompt_manifest`.

use hypernymy::{load_hierarchy, Result};
use std::path::Path;

fn data(name: &str) -> String {
    format!("{}/examples/data/{name}", env!("CARGO_MANIFEST_DIR"))
}

fn main() -> Result<()> {
    let graph = load_hierarchy(
        Path::new(&data("edges.txt")),
        Path::new(&data("leaf_map.txt")),
    )?;
    let manifest = graph.prompt_manifest()?;
    println!("{} prompts, one JSONL record each:\n", manifest.entries.len());
    print!("{}", manifest.to_jsonl());
    Ok(())
}
