//! Find the concepts a model draws worst, with the prompts to
//! regenerate them for visual inspection.
//!
//! Ranks evaluation synsets by ascending metric value — low ISP means
//! the images left the concept's subtree entirely; low SCS means every
//! image was the same hyponym.
//!
//! Run with `cargo run --example find_weak_concepts`.

use hypernymy::analysis::{annotate_prompts, annotated_listing, worst_synsets};
use hypernymy::ingest::load_predictions;
use hypernymy::metrics::{evaluate, MetricKind};
use hypernymy::{load_hierarchy, NormalizerMode, Result};
use std::path::Path;

fn data(name: &str) -> String {
    format!("{}/examples/data/{name}", env!("CARGO_MANIFEST_DIR"))
}

fn main() -> Result<()> {
    let graph = load_hierarchy(
        Path::new(&data("edges.txt")),
        Path::new(&data("leaf_map.txt")),
    )?;
    let predictions = load_predictions(Path::new(&data("predictions.jsonl")))?;
    let report = evaluate(&graph, &predictions, NormalizerMode::Derived)?;

    for metric in [MetricKind::Isp, MetricKind::Scs] {
        let ranked = worst_synsets(&report, metric, 4)?;
        let annotated = annotate_prompts(&graph, &ranked)?;
        println!("lowest {metric} (value, lemma, regeneration prompt):");
        print!("{}", annotated_listing(&annotated));
        println!();
    }
    Ok(())
}
