//! How stable are per-synset rankings across generation seeds?
//!
//! Run the same synthetic model under several seeds, evaluate each run,
//! and correlate the per-synset scores of every report pair (Spearman).
//! High mean rank correlation means the metric measures the model, not
//! the seed.
//!
//! Run with `cargo run --example seed_stability`.

use hypernymy::metrics::{evaluate, MetricKind};
use hypernymy::simulator::{simulate, CompetenceProfile, ProfileKind};
use hypernymy::stats::pairwise_seed_correlation;
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

    let mut reports = Vec::new();
    for seed in [1, 2, 3, 4, 5] {
        let profile = CompetenceProfile::new(ProfileKind::Mixture).with_seed(seed);
        let predictions = simulate(&graph, &profile, 64)?;
        reports.push(evaluate(&graph, &predictions, NormalizerMode::Derived)?);
    }

    for metric in [MetricKind::Isp, MetricKind::Scs] {
        let stability = pairwise_seed_correlation(&reports, metric)?;
        println!(
            "{metric}: mean rho {:.3} over {} seed pairs",
            stability.mean_rho,
            stability.pairs.len()
        );
        for pair in &stability.pairs {
            println!(
                "  seed {} vs seed {}: rho {:+.3} (p {:.3}, n {})",
                pair.seed_a, pair.seed_b, pair.rho, pair.p, pair.n
            );
        }
    }
    Ok(())
}
