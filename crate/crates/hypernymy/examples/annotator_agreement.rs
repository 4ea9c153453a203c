//! Chance-corrected agreement between human annotators.
//!
//! When humans verify a sample of generated images ("is this actually
//! an instrument?"), their labels only mean something if the annotators
//! agree more than chance would predict. Krippendorff's alpha handles
//! missing ratings and any number of raters: 1 is perfect agreement,
//! 0 is chance level.
//!
//! Run with `cargo run --example annotator_agreement`.

use hypernymy::stats::{krippendorff_alpha, RatingMatrix};
use hypernymy::Result;
use std::path::Path;

fn data(name: &str) -> String {
    format!("{}/examples/data/{name}", env!("CARGO_MANIFEST_DIR"))
}

fn main() -> Result<()> {
    // data/ratings.csv: four items, three raters, one missing cell.
    let ratings = RatingMatrix::from_csv(Path::new(&data("ratings.csv")))?;
    println!(
        "{} items x {} raters, {} categories, {} pairable items",
        ratings.n_items(),
        ratings.n_raters(),
        ratings.n_categories(),
        ratings.pairable_items()
    );
    println!("alpha = {:.6}\n", krippendorff_alpha(&ratings)?);

    // The same matrix can be built in memory from (item, rater,
    // category) records — useful straight out of an annotation tool.
    let unanimous = RatingMatrix::from_records([
        ("img1", "alice", "yes"),
        ("img1", "bob", "yes"),
        ("img2", "alice", "no"),
        ("img2", "bob", "no"),
        ("img3", "alice", "yes"),
        ("img3", "bob", "yes"),
    ])?;
    println!("unanimous raters: alpha = {}", krippendorff_alpha(&unanimous)?);
    Ok(())
}
