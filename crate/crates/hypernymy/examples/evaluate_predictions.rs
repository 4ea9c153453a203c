//! Score a prediction file against a hierarchy: per-synset ISP and SCS,
//! then the normalized aggregates.
//!
//! The input file carries, for every evaluation synset, one classifier
//! probability row per generated image. ISP is the mass inside the
//! synset's subtree; SCS is the diversity (mean KL to the average) of
//! the within-subtree conditionals.
//!
//! Run with `cargo run --example evaluate_predictions`.

use hypernymy::ingest::load_predictions;
use hypernymy::metrics::evaluate;
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
    println!(
        "loaded {} synsets x {} samples x {} classes from {:?} predictions",
        predictions.len(),
        predictions.max_n_samples(),
        predictions.n_classes(),
        predictions.kind()
    );

    let report = evaluate(&graph, &predictions, NormalizerMode::Derived)?;

    println!("\nper-synset scores (SCS '-' means single-leaf subtree, excluded):");
    println!("{:<12} {:>8} {:>8} {:>4}  lemma", "synset", "ISP", "SCS", "|A|");
    for m in &report.synsets {
        let scs = m.scs.map(|v| format!("{v:.4}")).unwrap_or_else(|| "-".into());
        println!(
            "{:<12} {:>8.4} {:>8} {:>4}  {}",
            m.synset.to_string(),
            m.isp,
            scs,
            m.subtree_size,
            graph.first_lemma(m.synset)?.unwrap_or("?")
        );
    }

    println!(
        "\naggregate ISP {:.4} | aggregate SCS {:.4} (divisor {:.4}, mode {}) | {} of {} synsets scored on SCS",
        report.aggregate_isp,
        report.aggregate_scs,
        report.scs_normalizer,
        report.normalizer_mode,
        report.included_scs_synsets,
        report.included_scs_synsets + report.excluded_scs_synsets,
    );

    // Reports round-trip through JSON without losing a bit.
    let reparsed = hypernymy::MetricReport::from_json(&report.to_json())?;
    assert_eq!(reparsed, report);
    println!("JSON round-trip: exact");
    Ok(())
}
