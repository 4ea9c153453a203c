//! Slice a report by region of the hierarchy: how does the model do on
//! animals vs. artifacts?
//!
//! A subtree aggregate averages the per-synset scores of every
//! evaluation synset reachable downward from a chosen root (the root
//! included), using the same SCS divisor as the global report — so the
//! numbers stay directly comparable.
//!
//! Run with `cargo run --example subtree_breakdown`.

use hypernymy::analysis::subtree_report;
use hypernymy::ingest::load_predictions;
use hypernymy::metrics::evaluate;
use hypernymy::{load_hierarchy, NormalizerMode, Result, SynsetId};
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

    let roots = [
        SynsetId::parse("n10000001")?, // animal
        SynsetId::parse("n10000005")?, // artifact
        graph.root(),
    ];
    let rows = subtree_report(&report, &graph, &roots)?;

    println!(
        "{:<16} {:>8} {:>8} {:>9} {:>8}",
        "subtree", "synsets", "scored", "ISP", "SCS"
    );
    for r in &rows {
        let scs = r.aggregate_scs.map(|v| format!("{v:.4}")).unwrap_or_else(|| "-".into());
        println!(
            "{:<16} {:>8} {:>8} {:>9.4} {:>8}",
            r.lemma.as_deref().unwrap_or("?"),
            r.n_synsets,
            r.included_scs_synsets,
            r.aggregate_isp,
            scs
        );
    }

    // The global root's subtree is the whole evaluation set, so its row
    // must reproduce the global aggregates.
    let global = rows.last().unwrap();
    assert!((global.aggregate_isp - report.aggregate_isp).abs() < 1e-12);
    assert!((global.aggregate_scs.unwrap() - report.aggregate_scs).abs() < 1e-12);
    println!("\nroot subtree equals the global aggregates, as it must.");
    Ok(())
}
