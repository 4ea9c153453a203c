//! Calibration and agreement statistics: expected calibration error,
//! top-1 accuracy, Spearman rank correlation with p-values,
//! Krippendorff's alpha, and pairwise seed-stability correlations.
//!
//! These support the side analyses around the core metrics: checking
//! that the classifier's confidences are trustworthy, correlating
//! per-synset scores with external quantities (corpus frequency,
//! embedding similarity), measuring inter-annotator agreement on human
//! preference data, and quantifying how stable per-synset rankings are
//! across generation seeds.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, StudentsT};

use crate::error::{Error, Result};
use crate::metrics::{MetricKind, MetricReport};
use crate::numeric::KahanSum;

// ---------------------------------------------------------------------
// Calibration
// ---------------------------------------------------------------------

/// Probability rows paired with ground-truth class labels, for
/// calibration checks of the classifier itself.
#[derive(Clone, Debug, PartialEq)]
pub struct LabeledPredictionSet {
    n_classes: usize,
    rows: Vec<f32>,
    labels: Vec<u32>,
}

impl LabeledPredictionSet {
    /// Wrap row-major probability rows and their labels, validating
    /// shape, label range, and row normalization (sum 1 ± 1e-6).
    pub fn new(n_classes: usize, rows: Vec<f32>, labels: Vec<u32>) -> Result<Self> {
        if n_classes == 0 {
            return Err(Error::validation("need at least one class"));
        }
        if rows.len() != labels.len() * n_classes {
            return Err(Error::validation(format!(
                "{} values do not form {} rows of {n_classes} classes",
                rows.len(),
                labels.len()
            )));
        }
        for (i, row) in rows.chunks_exact(n_classes).enumerate() {
            if row.iter().any(|v| !v.is_finite() || *v < 0.0) {
                return Err(Error::validation(format!(
                    "row {i} has negative or non-finite probabilities"
                )));
            }
            let mut sum = KahanSum::new();
            for &v in row {
                sum.add(v as f64);
            }
            if (sum.total() - 1.0).abs() > 1e-6 {
                return Err(Error::validation(format!(
                    "row {i} sums to {}, not 1",
                    sum.total()
                )));
            }
        }
        if let Some(bad) = labels.iter().position(|&l| l as usize >= n_classes) {
            return Err(Error::validation(format!(
                "label {} at row {bad} is out of range for {n_classes} classes",
                labels[bad]
            )));
        }
        Ok(LabeledPredictionSet { n_classes, rows, labels })
    }

    pub fn n_rows(&self) -> usize {
        self.labels.len()
    }

    pub fn n_classes(&self) -> usize {
        self.n_classes
    }

    /// (confidence, correct) per row: max probability and whether the
    /// argmax (ties broken toward the lowest index) equals the label.
    fn confidences(&self) -> impl Iterator<Item = (f64, bool)> + '_ {
        self.rows
            .chunks_exact(self.n_classes)
            .zip(&self.labels)
            .map(|(row, &label)| {
                let mut best = 0usize;
                for (i, &v) in row.iter().enumerate().skip(1) {
                    if v > row[best] {
                        best = i;
                    }
                }
                (row[best] as f64, best == label as usize)
            })
    }
}

#[derive(Deserialize)]
struct LabeledRow {
    values: Vec<f32>,
    label: u32,
}

/// Load labeled probability rows from JSONL:
/// `{"values": [...], "label": 3}` per line.
pub fn load_labeled_jsonl(path: &Path) -> Result<LabeledPredictionSet> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let mut n_classes = None;
    let mut rows = Vec::new();
    let mut labels = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let row: LabeledRow = serde_json::from_str(line)
            .map_err(|e| Error::parse(path, lineno + 1, e.to_string()))?;
        let n = *n_classes.get_or_insert(row.values.len());
        if row.values.len() != n {
            return Err(Error::parse(
                path,
                lineno + 1,
                format!("row has {} values, expected {n}", row.values.len()),
            ));
        }
        rows.extend_from_slice(&row.values);
        labels.push(row.label);
    }
    let Some(n_classes) = n_classes else {
        return Err(Error::validation(format!("{}: no labeled rows", path.display())));
    };
    LabeledPredictionSet::new(n_classes, rows, labels)
}

/// Fraction of rows whose argmax matches the label (ties toward the
/// lowest class index).
pub fn top1_accuracy(data: &LabeledPredictionSet) -> Result<f64> {
    if data.n_rows() == 0 {
        return Err(Error::validation("empty labeled prediction set"));
    }
    let correct = data.confidences().filter(|(_, c)| *c).count();
    Ok(correct as f64 / data.n_rows() as f64)
}

/// One confidence bin of the reliability curve.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CalibrationBin {
    /// Exclusive lower edge (the first bin also admits confidence 0).
    pub lower: f64,
    /// Inclusive upper edge.
    pub upper: f64,
    pub count: usize,
    /// Mean confidence of rows in the bin; `None` when empty.
    pub mean_confidence: Option<f64>,
    /// Fraction of correct rows in the bin; `None` when empty.
    pub accuracy: Option<f64>,
}

/// Equal-width reliability curve over max-probability confidences.
///
/// Bins are right-inclusive: bin `b` of `B` covers `(b/B, (b+1)/B]`,
/// with confidence 0 falling into the first bin.
pub fn calibration_curve(data: &LabeledPredictionSet, n_bins: usize) -> Result<Vec<CalibrationBin>> {
    if n_bins == 0 {
        return Err(Error::usage("need at least one calibration bin"));
    }
    if data.n_rows() == 0 {
        return Err(Error::validation("empty labeled prediction set"));
    }
    let mut counts = vec![0usize; n_bins];
    let mut conf_sums = vec![KahanSum::new(); n_bins];
    let mut correct = vec![0usize; n_bins];
    for (conf, ok) in data.confidences() {
        let bin = ((conf * n_bins as f64).ceil() as isize - 1).clamp(0, n_bins as isize - 1) as usize;
        counts[bin] += 1;
        conf_sums[bin].add(conf);
        if ok {
            correct[bin] += 1;
        }
    }
    Ok((0..n_bins)
        .map(|b| CalibrationBin {
            lower: b as f64 / n_bins as f64,
            upper: (b + 1) as f64 / n_bins as f64,
            count: counts[b],
            mean_confidence: (counts[b] > 0).then(|| conf_sums[b].total() / counts[b] as f64),
            accuracy: (counts[b] > 0).then(|| correct[b] as f64 / counts[b] as f64),
        })
        .collect())
}

/// Expected calibration error over `n_bins` equal-width bins:
/// `Σ_b (|b|/N) · |accuracy(b) − confidence(b)|`, empty bins contributing
/// nothing. Always in `[0, 1]` and invariant to row order.
pub fn ece(data: &LabeledPredictionSet, n_bins: usize) -> Result<f64> {
    let curve = calibration_curve(data, n_bins)?;
    let n = data.n_rows() as f64;
    let mut total = KahanSum::new();
    for bin in &curve {
        if let (Some(conf), Some(acc)) = (bin.mean_confidence, bin.accuracy) {
            total.add(bin.count as f64 / n * (acc - conf).abs());
        }
    }
    Ok(total.total())
}

/// Render a reliability curve as CSV
/// (`bin_lower,bin_upper,count,mean_confidence,accuracy`; empty fields
/// for empty bins).
pub fn calibration_csv(curve: &[CalibrationBin]) -> String {
    let mut out = String::from("bin_lower,bin_upper,count,mean_confidence,accuracy\n");
    for bin in curve {
        let conf = bin.mean_confidence.map(|v| v.to_string()).unwrap_or_default();
        let acc = bin.accuracy.map(|v| v.to_string()).unwrap_or_default();
        out.push_str(&format!(
            "{},{},{},{},{}\n",
            bin.lower, bin.upper, bin.count, conf, acc
        ));
    }
    out
}

// ---------------------------------------------------------------------
// Spearman rank correlation
// ---------------------------------------------------------------------

/// Average ranks (1-based) with ties sharing the mean of their
/// positions: `(1, 2, 2, 3)` ranks as `(1, 2.5, 2.5, 4)`.
pub fn average_ranks(values: &[f64]) -> Result<Vec<f64>> {
    if values.iter().any(|v| !v.is_finite()) {
        return Err(Error::validation("cannot rank non-finite values"));
    }
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[a].partial_cmp(&values[b]).expect("finite values compare"));
    let mut ranks = vec![0.0f64; values.len()];
    let mut i = 0;
    while i < order.len() {
        let mut j = i;
        while j + 1 < order.len() && values[order[j + 1]] == values[order[i]] {
            j += 1;
        }
        // Positions i..=j (0-based) share the average 1-based rank.
        let rank = (i + j) as f64 / 2.0 + 1.0;
        for &k in &order[i..=j] {
            ranks[k] = rank;
        }
        i = j + 1;
    }
    Ok(ranks)
}

/// Pearson correlation for pre-ranked vectors; errors when either side
/// is constant (correlation undefined).
fn pearson(x: &[f64], y: &[f64]) -> Result<f64> {
    let n = x.len() as f64;
    let mean = |v: &[f64]| {
        let mut s = KahanSum::new();
        for &t in v {
            s.add(t);
        }
        s.total() / n
    };
    let (mx, my) = (mean(x), mean(y));
    let mut sxy = KahanSum::new();
    let mut sxx = KahanSum::new();
    let mut syy = KahanSum::new();
    for (&a, &b) in x.iter().zip(y) {
        sxy.add((a - mx) * (b - my));
        sxx.add((a - mx) * (a - mx));
        syy.add((b - my) * (b - my));
    }
    let denom = (sxx.total() * syy.total()).sqrt();
    if denom == 0.0 {
        return Err(Error::validation(
            "correlation undefined for a constant input vector",
        ));
    }
    Ok((sxy.total() / denom).clamp(-1.0, 1.0))
}

/// Largest n for which the p-value enumerates all n! rank permutations.
/// Beyond it the Student-t approximation takes over (standard once n
/// reaches the dozens; the evaluation set has hundreds of synsets).
const EXACT_PERMUTATION_MAX_N: usize = 9;

/// Spearman rank correlation with a two-sided p-value.
///
/// Ranks are averaged over ties; rho is the Pearson correlation of the
/// rank vectors. The p-value is exact (all `n!` permutations of one
/// rank vector, counting `|rho_perm| ≥ |rho_observed|`) for `n ≤ 9`,
/// and the `t = rho·sqrt((n−2)/(1−rho²))` Student-t approximation with
/// `n−2` degrees of freedom above that. The exact regime covers
/// `rho = ±1` like any other value (`p = 2/n!` for distinct ranks — a
/// perfect ranking of 3 items is a 1-in-3 event, not a significant
/// one); in the t regime `rho = ±1` maps to the formula's limit `p = 0`.
///
/// Errors: length mismatch, `n < 3`, non-finite input, or a constant
/// input vector (rho undefined).
pub fn spearman(x: &[f64], y: &[f64]) -> Result<(f64, f64)> {
    if x.len() != y.len() {
        return Err(Error::validation(format!(
            "correlation inputs have different lengths ({} vs {})",
            x.len(),
            y.len()
        )));
    }
    if x.len() < 3 {
        return Err(Error::validation(format!(
            "need at least 3 points for a rank correlation, got {}",
            x.len()
        )));
    }
    let rx = average_ranks(x)?;
    let ry = average_ranks(y)?;
    let rho = pearson(&rx, &ry)?;
    let n = x.len();
    let p = if n <= EXACT_PERMUTATION_MAX_N {
        exact_permutation_p(&rx, &ry, rho.abs())
    } else if rho.abs() >= 1.0 - 1e-12 {
        0.0
    } else {
        let df = (n - 2) as f64;
        let t = rho * (df / (1.0 - rho * rho)).sqrt();
        let dist = StudentsT::new(0.0, 1.0, df).expect("valid t distribution");
        (2.0 * (1.0 - dist.cdf(t.abs()))).clamp(0.0, 1.0)
    };
    Ok((rho, p))
}

/// Exact two-sided permutation p-value: the fraction of the n!
/// permutations of `ry` whose |rho| against `rx` reaches |rho_observed|
/// (within 1e-12, so the observed permutation always counts itself).
///
/// Only the cross term `Σ rx_i·ry_π(i)` varies under permutation, so
/// each permutation costs one dot product.
fn exact_permutation_p(rx: &[f64], ry: &[f64], observed_abs: f64) -> f64 {
    let n = rx.len();
    let mean = (n + 1) as f64 / 2.0;
    let sum_sq = |v: &[f64]| -> f64 {
        let mut s = KahanSum::new();
        for &t in v {
            s.add((t - mean) * (t - mean));
        }
        s.total()
    };
    // Both rank vectors have mean (n+1)/2 regardless of ties.
    let denom = (sum_sq(rx) * sum_sq(ry)).sqrt();
    debug_assert!(denom > 0.0, "constant vectors rejected earlier");
    let rho_of = |perm: &[f64]| -> f64 {
        let mut cross = KahanSum::new();
        for (&a, &b) in rx.iter().zip(perm) {
            cross.add((a - mean) * (b - mean));
        }
        cross.total() / denom
    };

    // Heap's algorithm, counting as we go.
    let mut perm = ry.to_vec();
    let mut extreme = 0u64;
    let mut total = 0u64;
    let mut tally = |p: &[f64]| {
        total += 1;
        if rho_of(p).abs() >= observed_abs - 1e-12 {
            extreme += 1;
        }
    };
    tally(&perm);
    let mut c = vec![0usize; n];
    let mut i = 0;
    while i < n {
        if c[i] < i {
            if i % 2 == 0 {
                perm.swap(0, i);
            } else {
                perm.swap(c[i], i);
            }
            tally(&perm);
            c[i] += 1;
            i = 0;
        } else {
            c[i] = 0;
            i += 1;
        }
    }
    extreme as f64 / total as f64
}

// ---------------------------------------------------------------------
// Krippendorff's alpha
// ---------------------------------------------------------------------

/// Items × raters matrix of categorical ratings with missing entries.
#[derive(Clone, Debug, PartialEq)]
pub struct RatingMatrix {
    items: Vec<String>,
    raters: Vec<String>,
    categories: Vec<String>,
    /// `cells[item][rater]` = category index.
    cells: Vec<Vec<Option<u32>>>,
}

impl RatingMatrix {
    /// Build from long-form records; item/rater/category identities are
    /// arbitrary strings, registered in first-appearance order.
    pub fn from_records<'a>(
        records: impl IntoIterator<Item = (&'a str, &'a str, &'a str)>,
    ) -> Result<Self> {
        let mut items: Vec<String> = Vec::new();
        let mut raters: Vec<String> = Vec::new();
        let mut categories: Vec<String> = Vec::new();
        let mut triples: Vec<(usize, usize, u32)> = Vec::new();
        let index_of = |pool: &mut Vec<String>, name: &str| -> usize {
            match pool.iter().position(|x| x == name) {
                Some(i) => i,
                None => {
                    pool.push(name.to_owned());
                    pool.len() - 1
                }
            }
        };
        for (item, rater, category) in records {
            let i = index_of(&mut items, item);
            let r = index_of(&mut raters, rater);
            let c = index_of(&mut categories, category) as u32;
            triples.push((i, r, c));
        }
        let mut cells = vec![vec![None; raters.len()]; items.len()];
        for (i, r, c) in triples {
            if cells[i][r].replace(c).is_some() {
                return Err(Error::validation(format!(
                    "duplicate rating for item {:?} by rater {:?}",
                    items[i], raters[r]
                )));
            }
        }
        if raters.len() < 2 {
            return Err(Error::validation(format!(
                "need at least 2 raters, got {}",
                raters.len()
            )));
        }
        Ok(RatingMatrix { items, raters, categories, cells })
    }

    /// Load from CSV with an `item,rater,category` header.
    pub fn from_csv(path: &Path) -> Result<Self> {
        #[derive(Deserialize)]
        struct Record {
            item: String,
            rater: String,
            category: String,
        }
        let mut reader = csv::Reader::from_path(path).map_err(|e| match e.kind() {
            csv::ErrorKind::Io(_) => {
                Error::io(path, std::io::Error::new(std::io::ErrorKind::Other, e.to_string()))
            }
            _ => Error::validation(format!("{}: {e}", path.display())),
        })?;
        let mut records: Vec<(String, String, String)> = Vec::new();
        for (i, row) in reader.deserialize::<Record>().enumerate() {
            let row = row.map_err(|e| Error::parse(path, i + 2, e.to_string()))?;
            records.push((row.item, row.rater, row.category));
        }
        Self::from_records(records.iter().map(|(a, b, c)| (a.as_str(), b.as_str(), c.as_str())))
    }

    pub fn n_items(&self) -> usize {
        self.items.len()
    }

    pub fn n_raters(&self) -> usize {
        self.raters.len()
    }

    pub fn n_categories(&self) -> usize {
        self.categories.len()
    }

    /// Items rated by at least two raters (the ones that carry
    /// agreement information).
    pub fn pairable_items(&self) -> usize {
        self.cells
            .iter()
            .filter(|row| row.iter().flatten().count() >= 2)
            .count()
    }
}

/// Krippendorff's alpha at the nominal level via the coincidence
/// matrix: `α = 1 − D_o/D_e` with pairs within an item weighted by
/// `1/(m_u − 1)`. A complete, unanimous matrix scores exactly 1 (the
/// chance term vanishes together with the disagreement term).
pub fn krippendorff_alpha(ratings: &RatingMatrix) -> Result<f64> {
    let k = ratings.n_categories();
    let mut coincidence = vec![vec![0.0f64; k]; k];
    for row in &ratings.cells {
        let values: Vec<u32> = row.iter().flatten().copied().collect();
        let m = values.len();
        if m < 2 {
            continue;
        }
        let weight = 1.0 / (m as f64 - 1.0);
        for (a, &ca) in values.iter().enumerate() {
            for (b, &cb) in values.iter().enumerate() {
                if a != b {
                    coincidence[ca as usize][cb as usize] += weight;
                }
            }
        }
    }
    let marginals: Vec<f64> = (0..k).map(|c| coincidence[c].iter().sum()).collect();
    let n: f64 = marginals.iter().sum();
    if n == 0.0 {
        return Err(Error::validation(
            "no item has two or more ratings; alpha is undefined",
        ));
    }
    let mut observed_disagreement = 0.0;
    let mut expected_disagreement = 0.0;
    for c in 0..k {
        for d in 0..k {
            if c != d {
                observed_disagreement += coincidence[c][d];
                expected_disagreement += marginals[c] * marginals[d];
            }
        }
    }
    let d_o = observed_disagreement / n;
    let d_e = expected_disagreement / (n * (n - 1.0));
    if d_e == 0.0 {
        // Every pairable rating is the same single category. With no
        // observed disagreement either, this is perfect agreement.
        return if d_o == 0.0 {
            Ok(1.0)
        } else {
            Err(Error::validation("degenerate rating matrix: D_e = 0 with disagreement"))
        };
    }
    Ok(1.0 - d_o / d_e)
}

// ---------------------------------------------------------------------
// Seed stability
// ---------------------------------------------------------------------

/// Rank correlation between one pair of runs.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PairCorrelation {
    pub model_a: String,
    pub seed_a: u64,
    pub model_b: String,
    pub seed_b: u64,
    /// Synsets contributing to this pair (after pairwise SCS drops).
    pub n: usize,
    pub rho: f64,
    pub p: f64,
}

/// Mean pairwise rank correlation across runs, per metric.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SeedStabilityReport {
    pub metric: MetricKind,
    pub mean_rho: f64,
    pub pairs: Vec<PairCorrelation>,
}

impl SeedStabilityReport {
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("reports serialize");
        s.push('\n');
        s
    }
}

/// Mean Spearman rho of per-synset scores over all unordered report
/// pairs. All reports must cover the same synsets; for SCS, synsets
/// excluded in either report of a pair are dropped pairwise.
pub fn pairwise_seed_correlation(
    reports: &[MetricReport],
    metric: MetricKind,
) -> Result<SeedStabilityReport> {
    if reports.len() < 2 {
        return Err(Error::validation(format!(
            "need at least 2 reports to correlate, got {}",
            reports.len()
        )));
    }
    let synsets: Vec<_> = reports[0].synsets.iter().map(|m| m.synset).collect();
    for r in &reports[1..] {
        let other: Vec<_> = r.synsets.iter().map(|m| m.synset).collect();
        if other != synsets {
            return Err(Error::validation(format!(
                "reports {} and {} cover different synset sets",
                reports[0].model_id, r.model_id
            )));
        }
    }
    let mut pairs = Vec::new();
    let mut rho_sum = KahanSum::new();
    for a in 0..reports.len() {
        for b in a + 1..reports.len() {
            let (ra, rb) = (&reports[a], &reports[b]);
            let mut x = Vec::new();
            let mut y = Vec::new();
            for (ma, mb) in ra.synsets.iter().zip(&rb.synsets) {
                if let (Some(va), Some(vb)) = (metric.value_of(ma), metric.value_of(mb)) {
                    x.push(va);
                    y.push(vb);
                }
            }
            let (rho, p) = spearman(&x, &y)?;
            rho_sum.add(rho);
            pairs.push(PairCorrelation {
                model_a: ra.model_id.clone(),
                seed_a: ra.seed,
                model_b: rb.model_id.clone(),
                seed_b: rb.seed,
                n: x.len(),
                rho,
                p,
            });
        }
    }
    Ok(SeedStabilityReport {
        metric,
        mean_rho: rho_sum.total() / pairs.len() as f64,
        pairs,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metrics::SynsetMetrics;
    use crate::synset::SynsetId;
    use approx::assert_relative_eq;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn labeled(rows: &[(&[f32], u32)]) -> LabeledPredictionSet {
        let n_classes = rows[0].0.len();
        let mut values = Vec::new();
        let mut labels = Vec::new();
        for (row, label) in rows {
            values.extend_from_slice(row);
            labels.push(*label);
        }
        LabeledPredictionSet::new(n_classes, values, labels).unwrap()
    }

    #[test]
    fn top1_accuracy_basics() {
        let data = labeled(&[(&[0.9, 0.1], 0)]);
        assert_eq!(top1_accuracy(&data).unwrap(), 1.0);
        let data = labeled(&[(&[0.9, 0.1], 1)]);
        assert_eq!(top1_accuracy(&data).unwrap(), 0.0);
        // Tie goes to the lowest index.
        let data = labeled(&[(&[0.5, 0.5], 0), (&[0.5, 0.5], 1)]);
        assert_eq!(top1_accuracy(&data).unwrap(), 0.5);
    }

    #[test]
    fn ece_extremes() {
        let all_right = labeled(&[(&[1.0, 0.0], 0), (&[0.0, 1.0], 1)]);
        assert_eq!(ece(&all_right, 100).unwrap(), 0.0);
        let all_wrong = labeled(&[(&[1.0, 0.0], 1), (&[0.0, 1.0], 0)]);
        assert_relative_eq!(ece(&all_wrong, 100).unwrap(), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn ece_hand_example() {
        // Bins of width 0.01: rows fall in distinct bins, so each
        // contributes (1/2)·|acc − conf|.
        let data = labeled(&[(&[0.6, 0.4], 0), (&[0.2, 0.8], 0)]);
        let expected = 0.5 * (1.0 - 0.6f32 as f64) + 0.5 * (0.8f32 as f64 - 0.0);
        assert_relative_eq!(ece(&data, 100).unwrap(), expected, epsilon = 1e-9);
    }

    #[test]
    fn ece_is_invariant_to_row_order() {
        let a = labeled(&[(&[0.6, 0.4], 0), (&[0.2, 0.8], 1), (&[0.55, 0.45], 1)]);
        let b = labeled(&[(&[0.55, 0.45], 1), (&[0.6, 0.4], 0), (&[0.2, 0.8], 1)]);
        assert_eq!(ece(&a, 10).unwrap(), ece(&b, 10).unwrap());
    }

    #[test]
    fn ece_bins_are_right_inclusive() {
        // Confidence exactly 0.5 with 2 bins must land in the first bin
        // (0, 0.5], not the second.
        let data = labeled(&[(&[0.5, 0.5], 0)]);
        let curve = calibration_curve(&data, 2).unwrap();
        assert_eq!(curve[0].count, 1);
        assert_eq!(curve[1].count, 0);
        assert_eq!(curve[1].accuracy, None);
    }

    #[test]
    fn ece_synthetic_calibrated_classifier_scores_low() {
        // Confidence c ~ U(0.5, 1), correct with probability exactly c.
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let mut rows = Vec::new();
        let mut labels = Vec::new();
        for _ in 0..20_000 {
            let c: f32 = rng.gen_range(0.5..1.0);
            rows.extend_from_slice(&[c, 1.0 - c]);
            labels.push(if rng.gen_bool(c as f64) { 0 } else { 1 });
        }
        let data = LabeledPredictionSet::new(2, rows, labels).unwrap();
        let value = ece(&data, 100).unwrap();
        assert!(value < 0.03, "ECE of calibrated data was {value}");
    }

    #[test]
    fn ranks_average_over_ties() {
        let r = average_ranks(&[1.0, 2.0, 2.0, 3.0]).unwrap();
        assert_eq!(r, vec![1.0, 2.5, 2.5, 4.0]);
        let r = average_ranks(&[5.0, 1.0, 5.0, 5.0]).unwrap();
        assert_eq!(r, vec![3.0, 1.0, 3.0, 3.0]);
    }

    #[test]
    fn spearman_perfect_monotone() {
        // With 3 distinct ranks, 2 of the 3! permutations reach |rho| = 1.
        let (rho, p) = spearman(&[1.0, 2.0, 3.0], &[1.0, 2.0, 3.0]).unwrap();
        assert_eq!((rho, p), (1.0, 2.0 / 6.0));
        let (rho, p) = spearman(&[1.0, 2.0, 3.0], &[3.0, 2.0, 1.0]).unwrap();
        assert_eq!((rho, p), (-1.0, 2.0 / 6.0));
    }

    #[test]
    fn spearman_perfect_monotone_large_n_uses_t_limit() {
        let x: Vec<f64> = (0..20).map(|i| i as f64).collect();
        let y: Vec<f64> = x.iter().map(|v| v * 2.0 + 1.0).collect();
        let (rho, p) = spearman(&x, &y).unwrap();
        assert_eq!((rho, p), (1.0, 0.0));
    }

    #[test]
    fn spearman_is_invariant_under_monotone_transforms() {
        let x = [0.3f64, 1.2, 0.7, 2.4, 1.9];
        let y = [4.0, 2.0, 5.0, 1.0, 3.0];
        let fx: Vec<f64> = x.iter().map(|v| v.exp()).collect();
        let gy: Vec<f64> = y.iter().map(|v| v * 100.0 - 7.0).collect();
        let (rho1, p1) = spearman(&x, &y).unwrap();
        let (rho2, p2) = spearman(&fx, &gy).unwrap();
        assert_eq!((rho1, p1), (rho2, p2));
    }

    #[test]
    fn spearman_exact_p_small_n() {
        // x = 1..5, y = (1,3,2,5,4): Σd² = 4, rho = 1 − 24/120 = 0.8.
        // Permutations with Σd² ≤ 4 (rho ≥ 0.8): 1 + 4 + 3 = 8; by
        // symmetry 8 more have rho ≤ −0.8 → p = 16/120.
        let (rho, p) = spearman(&[1.0, 2.0, 3.0, 4.0, 5.0], &[1.0, 3.0, 2.0, 5.0, 4.0]).unwrap();
        assert_relative_eq!(rho, 0.8, epsilon = 1e-12);
        assert_relative_eq!(p, 16.0 / 120.0, epsilon = 1e-12);
    }

    #[test]
    fn spearman_constant_vector_errors() {
        let err = spearman(&[1.0, 1.0, 1.0], &[1.0, 2.0, 3.0]).unwrap_err();
        assert!(err.to_string().contains("constant"), "{err}");
    }

    #[test]
    fn spearman_t_approximation_for_large_n() {
        // n = 20 noisy monotone data; compare against the frozen value
        // of the t formula computed with independent tooling.
        let x: Vec<f64> = (0..20).map(|i| i as f64).collect();
        let y = [
            0.2, 1.1, 0.9, 3.4, 2.8, 5.0, 6.1, 5.9, 8.2, 7.7, 10.1, 9.8, 12.3, 11.9, 14.2, 13.8,
            16.1, 15.7, 18.0, 17.5,
        ];
        let (rho, p) = spearman(&x, &y).unwrap();
        assert!(rho > 0.9 && p < 1e-6, "rho={rho} p={p}");
    }

    #[test]
    fn krippendorff_unanimous_is_one() {
        let m = RatingMatrix::from_records([
            ("i1", "r1", "yes"),
            ("i1", "r2", "yes"),
            ("i2", "r1", "no"),
            ("i2", "r2", "no"),
        ])
        .unwrap();
        assert_eq!(krippendorff_alpha(&m).unwrap(), 1.0);
    }

    #[test]
    fn krippendorff_hand_example() {
        // Items A (0,0,0), B (0,1,·), C (1,1,1), D (0,0,1):
        // coincidences o00=4, o11=3, o01=o10=2 → n0=6, n1=5, n=11;
        // D_o = 4/11, D_e = 60/110 → α = 1 − (4/11)/(6/11) = 1/3.
        let m = RatingMatrix::from_records([
            ("A", "r1", "0"),
            ("A", "r2", "0"),
            ("A", "r3", "0"),
            ("B", "r1", "0"),
            ("B", "r2", "1"),
            ("C", "r1", "1"),
            ("C", "r2", "1"),
            ("C", "r3", "1"),
            ("D", "r1", "0"),
            ("D", "r2", "0"),
            ("D", "r3", "1"),
        ])
        .unwrap();
        assert_relative_eq!(krippendorff_alpha(&m).unwrap(), 1.0 / 3.0, epsilon = 1e-9);
    }

    #[test]
    fn krippendorff_random_ratings_near_zero() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let records: Vec<(String, String, String)> = (0..4000)
            .flat_map(|i| {
                let item = format!("i{i}");
                (0..2)
                    .map(|r| (item.clone(), format!("r{r}"), format!("{}", rng.gen_range(0..2))))
                    .collect::<Vec<_>>()
            })
            .collect();
        let m = RatingMatrix::from_records(
            records.iter().map(|(a, b, c)| (a.as_str(), b.as_str(), c.as_str())),
        )
        .unwrap();
        let alpha = krippendorff_alpha(&m).unwrap();
        assert!(alpha.abs() < 0.05, "alpha of random ratings was {alpha}");
    }

    #[test]
    fn krippendorff_unpairable_matrix_errors() {
        let m = RatingMatrix::from_records([("i1", "r1", "a"), ("i2", "r2", "b")]).unwrap();
        assert!(krippendorff_alpha(&m).is_err());
    }

    fn report_with(model: &str, seed: u64, values: &[(u32, f64, Option<f64>)]) -> MetricReport {
        let synsets = values
            .iter()
            .map(|&(offset, isp, scs)| SynsetMetrics {
                synset: SynsetId::new(offset).unwrap(),
                isp,
                scs,
                n_samples: 4,
                subtree_size: if scs.is_some() { 2 } else { 1 },
            })
            .collect();
        crate::metrics::aggregate(model, seed, synsets, 1.0, crate::metrics::NormalizerMode::None, 0)
            .unwrap()
    }

    #[test]
    fn seed_correlation_identical_reports() {
        let a = report_with("m", 0, &[(1, 0.1, Some(0.5)), (2, 0.5, Some(0.2)), (3, 0.9, Some(0.9))]);
        let b = report_with("m", 1, &[(1, 0.1, Some(0.5)), (2, 0.5, Some(0.2)), (3, 0.9, Some(0.9))]);
        let out = pairwise_seed_correlation(&[a, b], MetricKind::Isp).unwrap();
        assert_eq!(out.mean_rho, 1.0);
        assert_eq!(out.pairs.len(), 1);
        assert_eq!(out.pairs[0].n, 3);
    }

    #[test]
    fn seed_correlation_drops_scs_exclusions_pairwise() {
        let a = report_with(
            "m",
            0,
            &[(1, 0.1, Some(0.5)), (2, 0.5, None), (3, 0.9, Some(0.9)), (4, 0.4, Some(0.1))],
        );
        let b = report_with(
            "m",
            1,
            &[(1, 0.1, Some(0.4)), (2, 0.5, None), (3, 0.9, Some(0.8)), (4, 0.4, Some(0.2))],
        );
        let out = pairwise_seed_correlation(&[a, b], MetricKind::Scs).unwrap();
        assert_eq!(out.pairs[0].n, 3);
        assert_eq!(out.mean_rho, 1.0);
    }

    #[test]
    fn seed_correlation_rejects_mismatched_synsets() {
        let a = report_with("m", 0, &[(1, 0.1, None), (2, 0.5, None), (3, 0.9, None)]);
        let b = report_with("m", 1, &[(1, 0.1, None), (2, 0.5, None), (4, 0.9, None)]);
        let err = pairwise_seed_correlation(&[a, b], MetricKind::Isp).unwrap_err();
        assert!(err.to_string().contains("different synset sets"), "{err}");
    }

    #[test]
    fn seed_correlation_shuffled_values_near_zero() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let mut reports = Vec::new();
        for seed in 0..4u64 {
            let values: Vec<(u32, f64, Option<f64>)> =
                (1..=200).map(|i| (i, rng.gen::<f64>(), None)).collect();
            reports.push(report_with("m", seed, &values));
        }
        let out = pairwise_seed_correlation(&reports, MetricKind::Isp).unwrap();
        assert!(out.mean_rho.abs() < 0.15, "mean rho {}", out.mean_rho);
        assert_eq!(out.pairs.len(), 6);
    }

    #[test]
    fn labeled_jsonl_loads() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("labeled.jsonl");
        std::fs::write(
            &path,
            "{\"values\":[0.9,0.1],\"label\":0}\n{\"values\":[0.3,0.7],\"label\":1}\n",
        )
        .unwrap();
        let data = load_labeled_jsonl(&path).unwrap();
        assert_eq!(data.n_rows(), 2);
        assert_eq!(top1_accuracy(&data).unwrap(), 1.0);
    }

    #[test]
    fn rating_csv_loads() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("ratings.csv");
        std::fs::write(&path, "item,rater,category\ni1,r1,yes\ni1,r2,yes\n").unwrap();
        let m = RatingMatrix::from_csv(&path).unwrap();
        assert_eq!(m.n_items(), 1);
        assert_eq!(m.n_raters(), 2);
        assert_eq!(m.pairable_items(), 1);
        assert_eq!(krippendorff_alpha(&m).unwrap(), 1.0);
    }
}
