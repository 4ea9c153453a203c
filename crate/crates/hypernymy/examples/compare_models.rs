//! Compare two models synset by synset: where does one beat the other,
//! and by how much?
//!
//! The diff ranks synsets by `score(A) − score(B)` and summarizes the
//! distribution with quantiles, so a single outlier concept cannot
//! masquerade as an across-the-board win.
//!
//! Run with `cargo run --example compare_models`.

use hypernymy::analysis::model_diff;
use hypernymy::metrics::{evaluate, MetricKind};
use hypernymy::simulator::{simulate, CompetenceProfile, ProfileKind};
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

    // Model A keeps more mass in-subtree than model B.
    let mut strong = CompetenceProfile::new(ProfileKind::Mixture).with_seed(5);
    strong.in_subtree_mass = 0.85;
    let mut weak = CompetenceProfile::new(ProfileKind::Mixture).with_seed(6);
    weak.in_subtree_mass = 0.45;

    let report_a = evaluate(&graph, &simulate(&graph, &strong, 64)?, NormalizerMode::Derived)?;
    let report_b = evaluate(&graph, &simulate(&graph, &weak, 64)?, NormalizerMode::Derived)?;

    let diff = model_diff(&report_a, &report_b, MetricKind::Isp)?;
    println!(
        "ISP diff, {} (A) minus {} (B): aggregate {:+.4}",
        diff.model_a,
        diff.model_b,
        report_a.aggregate_isp - report_b.aggregate_isp
    );
    println!("{:<12} {:>9} {:>9} {:>9}", "synset", "A", "B", "A-B");
    for e in &diff.entries {
        println!(
            "{:<12} {:>9.4} {:>9.4} {:>+9.4}",
            e.synset.to_string(),
            e.value_a,
            e.value_b,
            e.diff
        );
    }
    let q = &diff.quantiles;
    println!(
        "\nquantiles: min {:+.4}  q25 {:+.4}  median {:+.4}  q75 {:+.4}  max {:+.4}",
        q.min, q.q25, q.median, q.q75, q.max
    );
    Ok(())
}
