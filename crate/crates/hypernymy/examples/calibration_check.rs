//! Is the classifier honest about its own uncertainty?
//!
//! ISP and SCS trust the classifier's probabilities, so it is worth
//! checking its calibration: bin predictions by confidence and compare
//! each bin's mean confidence with its empirical accuracy. The gap,
//! weighted by bin mass, is the expected calibration error (ECE).
//!
//! This example builds two synthetic classifiers over 4 classes — one
//! perfectly calibrated (it is correct exactly as often as it claims),
//! one overconfident — and prints both reliability tables.
//!
//! Run with `cargo run --example calibration_check`.

use hypernymy::stats::{calibration_curve, ece, top1_accuracy, LabeledPredictionSet};
use hypernymy::Result;
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;

/// Rows whose argmax is right with probability equal to its confidence
/// (calibrated), or less often than claimed (overconfident).
fn synthetic(n: usize, overconfident: bool, seed: u64) -> Result<LabeledPredictionSet> {
    let n_classes = 4;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut rows = Vec::with_capacity(n * n_classes);
    let mut labels = Vec::with_capacity(n);
    for _ in 0..n {
        let confidence: f64 = rng.gen_range(0.25..1.0);
        let top: usize = rng.gen_range(0..n_classes);
        // Spread the remaining mass evenly over the other classes.
        let rest = (1.0 - confidence) / (n_classes - 1) as f64;
        for c in 0..n_classes {
            rows.push(if c == top { confidence as f32 } else { rest as f32 });
        }
        // The calibrated model is right exactly `confidence` of the
        // time; the overconfident one only half that often.
        let p_correct = if overconfident { confidence / 2.0 } else { confidence };
        let label = if rng.gen_bool(p_correct.clamp(0.0, 1.0)) {
            top
        } else {
            (top + rng.gen_range(1..n_classes)) % n_classes
        };
        labels.push(label as u32);
    }
    LabeledPredictionSet::new(n_classes, rows, labels)
}

fn show(name: &str, data: &LabeledPredictionSet) -> Result<()> {
    println!(
        "{name}: {} rows, top-1 accuracy {:.3}, ECE {:.4}",
        data.n_rows(),
        top1_accuracy(data)?,
        ece(data, 10)?
    );
    println!("  {:>12} {:>7} {:>12} {:>9}", "bin", "count", "confidence", "accuracy");
    for bin in calibration_curve(data, 10)? {
        let (conf, acc) = match (bin.mean_confidence, bin.accuracy) {
            (Some(c), Some(a)) => (format!("{c:.3}"), format!("{a:.3}")),
            _ => ("-".into(), "-".into()),
        };
        println!(
            "  ({:.1}, {:.1}] {:>7} {:>12} {:>9}",
            bin.lower, bin.upper, bin.count, conf, acc
        );
    }
    Ok(())
}

fn main() -> Result<()> {
    show("calibrated", &synthetic(20_000, false, 11)?)?;
    println!();
    show("overconfident", &synthetic(20_000, true, 11)?)?;
    Ok(())
}
