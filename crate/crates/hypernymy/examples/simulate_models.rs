//! Generate synthetic classifier predictions for models of very
//! different competence, and score them all.
//!
//! The four profiles bracket the metric space:
//! * `perfect`   — uniform over each subtree: ISP 1, high SCS;
//! * `collapsed` — always the same leaf per concept: ISP 1, SCS 0;
//! * `ignorant`  — uniform over all classes: ISP |A|/n, high SCS;
//! * `mixture`   — partial competence between those extremes.
//!
//! Run with `cargo run --example simulate_models`.

use hypernymy::metrics::evaluate;
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

    println!("{:<16} {:>8} {:>8}", "model", "ISP", "SCS");
    for kind in [
        ProfileKind::Perfect,
        ProfileKind::Collapsed,
        ProfileKind::Ignorant,
        ProfileKind::Mixture,
        ProfileKind::Concentrated,
    ] {
        let profile = CompetenceProfile::new(kind).with_seed(17);
        let predictions = simulate(&graph, &profile, 32)?;
        let report = evaluate(&graph, &predictions, NormalizerMode::Derived)?;
        println!(
            "{:<16} {:>8.4} {:>8.4}",
            report.model_id, report.aggregate_isp, report.aggregate_scs
        );
    }

    // Profiles can also come from a TOML file (see data/profile.toml),
    // which is what the CLI's `simulate --profile` reads.
    let profile = hypernymy::simulator::load_profile(Path::new(&data("profile.toml")))?;
    let report = evaluate(&graph, &simulate(&graph, &profile, 32)?, NormalizerMode::Derived)?;
    println!(
        "{:<16} {:>8.4} {:>8.4}   (from profile.toml, seed {})",
        report.model_id, report.aggregate_isp, report.aggregate_scs, profile.seed
    );
    Ok(())
}
