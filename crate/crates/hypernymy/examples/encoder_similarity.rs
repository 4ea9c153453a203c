//! Do the metrics agree with an embedding space's view of the
//! hierarchy?
//!
//! For each evaluation synset, average the cosine similarity between
//! its text-encoder embedding and the embeddings of the leaves in its
//! subtree; then rank-correlate those similarities with the synset's
//! ISP or SCS. Agreement suggests both are tracking the same notion of
//! concept tightness.
//!
//! Run with `cargo run --example encoder_similarity`.

use hypernymy::analysis::{hyponym_similarity, similarity_metric_correlation};
use hypernymy::ingest::{load_embeddings, load_predictions};
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
    let embeddings = load_embeddings(Path::new(&data("embeddings.jsonl")))?;
    let similarities = hyponym_similarity(&graph, &embeddings)?;

    println!("mean cosine similarity to own leaf hyponyms (d = {}):", similarities.dim);
    for e in &similarities.entries {
        println!(
            "  {:<16} {:+.4}  ({} of {} leaves embedded)",
            graph.first_lemma(e.synset)?.unwrap_or("?").replace('_', " "),
            e.mean_cosine,
            e.n_leaves,
            e.subtree_size
        );
    }
    if !similarities.skipped.is_empty() {
        println!("  skipped (missing vectors): {:?}", similarities.skipped);
    }

    let predictions = load_predictions(Path::new(&data("predictions.jsonl")))?;
    let report = evaluate(&graph, &predictions, NormalizerMode::Derived)?;
    for metric in [MetricKind::Isp, MetricKind::Scs] {
        let (rho, p) = similarity_metric_correlation(&similarities, &report, metric)?;
        println!("similarity vs {metric}: rho {rho:+.3} (p {p:.3})");
    }
    Ok(())
}
