//! Count how often each concept's lemma appears in a caption corpus,
//! and correlate corpus frequency with a model's per-synset scores.
//!
//! Matching is word-bounded and case-insensitive ("hotdog stand" does
//! not mention a dog), and by default counts each caption at most once
//! per synset.
//!
//! Run with `cargo run --example corpus_frequency`.

use hypernymy::corpus::{count_concepts, frequency_correlation, MatchingPolicy};
use hypernymy::ingest::load_predictions;
use hypernymy::metrics::{evaluate, MetricKind};
use hypernymy::{load_hierarchy, NormalizerMode, Result};
use std::path::{Path, PathBuf};

fn data(name: &str) -> String {
    format!("{}/examples/data/{name}", env!("CARGO_MANIFEST_DIR"))
}

fn main() -> Result<()> {
    let graph = load_hierarchy(
        Path::new(&data("edges.txt")),
        Path::new(&data("leaf_map.txt")),
    )?;

    let shards = [PathBuf::from(data("captions.txt"))];
    let table = count_concepts(&graph, MatchingPolicy::default(), &shards, "toy-captions", None)?;

    println!("counted {} captions:", table.n_captions);
    for (synset, c) in table.counts.iter().filter(|(_, c)| c.count > 0) {
        println!("  {:<10} {:>3}  {}", synset.to_string(), c.count, c.lemma);
    }
    let dog = table.count("n10000010".parse()?);
    println!("('hotdog stand' did not count toward dog: {dog} dog captions)");

    // Do frequent concepts score better? On toy data the answer is
    // noise; on a real corpus and model this is a substantive question.
    let predictions = load_predictions(Path::new(&data("predictions.jsonl")))?;
    let report = evaluate(&graph, &predictions, NormalizerMode::Derived)?;
    let (rho, p) = frequency_correlation(&table, &report, MetricKind::Isp)?;
    println!("\ncorpus frequency vs ISP: rho {rho:+.3} (p {p:.3})");
    Ok(())
}
