//! Per-synset and model-level hierarchy metrics.
//!
//! Two scores are computed for every evaluation synset `s` from the
//! prediction rows generated for its prompt:
//!
//! * **In-subtree probability (ISP)**: the mean, over samples, of the
//!   total probability mass the classifier assigns inside the
//!   classifiable subtree `A(s)`. Measures whether generated images
//!   depict *some* kind of `s`. Always 1 at the root.
//! * **Subtree coverage score (SCS)**: the mean, over samples, of the
//!   KL divergence (natural log) between each sample's conditional
//!   distribution over `A(s)` and the mean conditional distribution.
//!   Measures how *diverse* the depicted kinds are. Synsets with a
//!   single classifiable leaf are excluded: their divergence is 0 by
//!   construction.
//!
//! Model-level scores average per-synset values over the evaluation set
//! (all of it for ISP; the multi-leaf subset for SCS) and divide by a
//! normalizer so models with different sample budgets stay comparable.
//!
//! Determinism: all reductions use compensated summation in a fixed
//! order (synsets ascending, samples ascending), so reports are
//! byte-identical across runs and thread counts.

use std::fmt;
use std::fs;
use std::path::Path;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hierarchy::{ClassifiableSubtree, HierarchyGraph};
use crate::ingest::{
    full_distribution_into, hyponym_distribution, PredictionKind, PredictionSet, SampleMatrix,
};
use crate::numeric::{kl_divergence, KahanSum};
use crate::synset::SynsetId;

/// The conventional fixed normalization constant for aggregate SCS.
///
/// This is the large-sample limit of the mean per-synset divergence
/// bound over the WordNet-3.0/ImageNet-1k evaluation set: the mean of
/// `ln |A(s)|` over multi-leaf synsets (≈1.6211 on this hierarchy,
/// conventionally rounded to ≈1.624). Pinning it makes scores
/// comparable across sample budgets and hierarchy revisions.
pub const PAPER_SCS_NORMALIZER: f64 = 1.624;

/// How aggregate SCS is normalized.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum NormalizerMode {
    /// Compute the attainable bound from the graph and sample budget:
    /// mean of `ln(min(n_samples, |A(s)|))` over multi-leaf synsets.
    #[default]
    Derived,
    /// Pin the fixed constant [`PAPER_SCS_NORMALIZER`].
    Paper,
    /// No normalization (raw mean divergence).
    None,
}

impl fmt::Display for NormalizerMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            NormalizerMode::Derived => "derived",
            NormalizerMode::Paper => "paper",
            NormalizerMode::None => "none",
        })
    }
}

impl FromStr for NormalizerMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "derived" => Ok(NormalizerMode::Derived),
            "paper" => Ok(NormalizerMode::Paper),
            "none" => Ok(NormalizerMode::None),
            other => Err(Error::usage(format!(
                "unknown normalizer '{other}' (expected derived, paper, or none)"
            ))),
        }
    }
}

/// Which per-synset metric an analysis or correlation runs over.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MetricKind {
    Isp,
    Scs,
}

impl MetricKind {
    /// Extract this metric from one synset's entry (`None` for SCS on
    /// singleton subtrees).
    pub fn value_of(self, metrics: &SynsetMetrics) -> Option<f64> {
        match self {
            MetricKind::Isp => Some(metrics.isp),
            MetricKind::Scs => metrics.scs,
        }
    }
}

impl fmt::Display for MetricKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            MetricKind::Isp => "isp",
            MetricKind::Scs => "scs",
        })
    }
}

impl FromStr for MetricKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "isp" => Ok(MetricKind::Isp),
            "scs" => Ok(MetricKind::Scs),
            other => Err(Error::usage(format!(
                "unknown metric '{other}' (expected isp or scs)"
            ))),
        }
    }
}

/// Metrics for a single evaluation synset.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SynsetMetrics {
    pub synset: SynsetId,
    /// In-subtree probability, in `[0, 1]`.
    pub isp: f64,
    /// Raw (unnormalized) subtree coverage score; `None` when the
    /// subtree has a single leaf.
    pub scs: Option<f64>,
    /// Number of prediction rows evaluated.
    pub n_samples: usize,
    /// `|A(s)|`.
    pub subtree_size: usize,
}

/// Model-level metric report: per-synset scores plus normalized
/// aggregates and bookkeeping counts.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MetricReport {
    pub model_id: String,
    /// Generation seed the predictions came from (0 when unknown).
    pub seed: u64,
    /// Mean ISP over all evaluation synsets (normalizer 1).
    pub aggregate_isp: f64,
    /// Mean raw SCS over multi-leaf synsets, divided by `scs_normalizer`.
    pub aggregate_scs: f64,
    /// The divisor applied to aggregate SCS.
    pub scs_normalizer: f64,
    /// How the divisor was chosen.
    pub normalizer_mode: NormalizerMode,
    /// Multi-leaf synsets contributing to aggregate SCS.
    pub included_scs_synsets: usize,
    /// Singleton-subtree synsets excluded from aggregate SCS.
    pub excluded_scs_synsets: usize,
    /// Probability rows with zero subtree mass, replaced by the uniform
    /// fallback during SCS conditioning.
    pub degenerate_rows: u64,
    /// Per-synset metrics, synsets ascending.
    pub synsets: Vec<SynsetMetrics>,
}

/// In-subtree probability for one synset's prediction rows.
///
/// Mean over samples of the mass the *full* distribution puts on the
/// subtree's class indices. Clamped into `[0, 1]` (probability rows are
/// only sum-normalized to 1e-6).
pub fn isp(matrix: &SampleMatrix, kind: PredictionKind, subtree: &ClassifiableSubtree) -> f64 {
    let mut full = vec![0.0f64; matrix.n_classes()];
    let mut mean = KahanSum::new();
    for row in matrix.rows() {
        full_distribution_into(row, kind, &mut full);
        let mut mass = KahanSum::new();
        for &i in subtree.leaf_indices() {
            mass.add(full[i as usize]);
        }
        mean.add(mass.total());
    }
    (mean.total() / matrix.n_samples() as f64).clamp(0.0, 1.0)
}

/// Subtree coverage score for one synset's prediction rows, or `None`
/// for singleton subtrees.
pub fn scs(matrix: &SampleMatrix, kind: PredictionKind, subtree: &ClassifiableSubtree) -> Option<f64> {
    scs_detail(matrix, kind, subtree).0
}

/// SCS plus the number of degenerate (zero-mass) rows encountered.
fn scs_detail(
    matrix: &SampleMatrix,
    kind: PredictionKind,
    subtree: &ClassifiableSubtree,
) -> (Option<f64>, u64) {
    if subtree.len() <= 1 {
        return (None, 0);
    }
    let n = matrix.n_samples();
    if matrix.all_rows_identical() {
        // Identical rows have identical conditionals: the mean equals
        // every row and the divergence is 0 exactly, with no float
        // round-off to leak in.
        let first = hyponym_distribution(matrix.row(0), kind, subtree);
        let degenerate = if first.degenerate { n as u64 } else { 0 };
        return (Some(0.0), degenerate);
    }
    let mut degenerate = 0u64;
    let mut conditionals: Vec<Vec<f64>> = Vec::with_capacity(n);
    for row in matrix.rows() {
        let d = hyponym_distribution(row, kind, subtree);
        if d.degenerate {
            degenerate += 1;
        }
        conditionals.push(d.probabilities);
    }
    let k = subtree.len();
    let mut mean = vec![0.0f64; k];
    for (j, slot) in mean.iter_mut().enumerate() {
        let mut sum = KahanSum::new();
        for row in &conditionals {
            sum.add(row[j]);
        }
        *slot = sum.total() / n as f64;
    }
    let mut total = KahanSum::new();
    for row in &conditionals {
        total.add(kl_divergence(row, &mean));
    }
    (Some((total.total() / n as f64).max(0.0)), degenerate)
}

/// ISP and SCS for one synset, with the degenerate-row count.
fn synset_metrics(
    matrix: &SampleMatrix,
    kind: PredictionKind,
    subtree: &ClassifiableSubtree,
) -> (SynsetMetrics, u64) {
    let (scs, degenerate) = scs_detail(matrix, kind, subtree);
    let metrics = SynsetMetrics {
        synset: subtree.synset(),
        isp: isp(matrix, kind, subtree),
        scs,
        n_samples: matrix.n_samples(),
        subtree_size: subtree.len(),
    };
    (metrics, degenerate)
}

/// The attainable aggregate-SCS bound for this graph and sample budget:
/// mean over multi-leaf evaluation synsets of `ln(min(n_samples, |A(s)|))`.
///
/// With `n` samples the mean conditional has at most `n` atoms, so no
/// per-synset divergence can exceed `ln(min(n, |A|))`. Note the bound is
/// 0 when `n_samples` is 1 (a single sample never diverges from its own
/// mean) — normalizing by it is then meaningless, and [`evaluate`]
/// substitutes 1. See [`scs_normalizer_unbounded`] for the large-sample
/// limit behind [`PAPER_SCS_NORMALIZER`].
pub fn scs_normalizer(graph: &HierarchyGraph, n_samples: usize) -> f64 {
    normalizer_over_eval(graph, |size| {
        (n_samples.min(size) as f64).ln()
    })
}

/// The large-sample limit of [`scs_normalizer`]: mean of `ln |A(s)|`
/// over multi-leaf evaluation synsets.
pub fn scs_normalizer_unbounded(graph: &HierarchyGraph) -> f64 {
    normalizer_over_eval(graph, |size| (size as f64).ln())
}

fn normalizer_over_eval(graph: &HierarchyGraph, per_synset: impl Fn(usize) -> f64) -> f64 {
    let mut sum = KahanSum::new();
    let mut count = 0usize;
    for &s in graph.evaluation_set() {
        let size = graph.subtree_size(s).expect("evaluation synsets are nodes");
        if size > 1 {
            sum.add(per_synset(size));
            count += 1;
        }
    }
    if count == 0 {
        0.0
    } else {
        sum.total() / count as f64
    }
}

/// Combine per-synset metrics into a model-level report.
///
/// `metrics` must already be in ascending synset order (as produced by
/// [`evaluate`]); aggregation runs in that fixed order. `scs_normalizer`
/// must be positive.
pub fn aggregate(
    model_id: impl Into<String>,
    seed: u64,
    mut metrics: Vec<SynsetMetrics>,
    scs_normalizer: f64,
    normalizer_mode: NormalizerMode,
    degenerate_rows: u64,
) -> Result<MetricReport> {
    if metrics.is_empty() {
        return Err(Error::validation("cannot aggregate an empty metric list"));
    }
    if !(scs_normalizer > 0.0) {
        return Err(Error::validation(format!(
            "SCS normalizer must be positive, got {scs_normalizer}"
        )));
    }
    metrics.sort_by_key(|m| m.synset);
    let mut isp_sum = KahanSum::new();
    let mut scs_sum = KahanSum::new();
    let mut included = 0usize;
    let mut excluded = 0usize;
    for m in &metrics {
        isp_sum.add(m.isp);
        match m.scs {
            Some(v) => {
                scs_sum.add(v);
                included += 1;
            }
            None => excluded += 1,
        }
    }
    let aggregate_isp = isp_sum.total() / metrics.len() as f64;
    let aggregate_scs = if included == 0 {
        0.0
    } else {
        scs_sum.total() / included as f64 / scs_normalizer
    };
    Ok(MetricReport {
        model_id: model_id.into(),
        seed,
        aggregate_isp,
        aggregate_scs,
        scs_normalizer,
        normalizer_mode,
        included_scs_synsets: included,
        excluded_scs_synsets: excluded,
        degenerate_rows,
        synsets: metrics,
    })
}

/// Evaluate a prediction set against a hierarchy.
///
/// Every evaluation synset must have prediction rows; prediction synsets
/// outside the evaluation set are ignored. Per-synset work fans out over
/// the rayon pool; results are reduced in sorted-synset order, so the
/// report is identical for any thread count.
pub fn evaluate(
    graph: &HierarchyGraph,
    predictions: &PredictionSet,
    mode: NormalizerMode,
) -> Result<MetricReport> {
    if predictions.n_classes() != graph.leaf_count() {
        return Err(Error::validation(format!(
            "predictions have {} classes but the hierarchy has {} leaves",
            predictions.n_classes(),
            graph.leaf_count()
        )));
    }
    let eval = graph.evaluation_set();
    for &s in eval {
        if predictions.matrix(s).is_none() {
            return Err(Error::validation(format!(
                "predictions are missing evaluation synset {s}"
            )));
        }
    }
    let per_synset: Vec<(SynsetMetrics, u64)> = eval
        .par_iter()
        .map(|&s| {
            let subtree = graph.classifiable_subtree(s).expect("evaluation synsets are nodes");
            let matrix = predictions.matrix(s).expect("checked above");
            synset_metrics(matrix, predictions.kind(), subtree)
        })
        .collect();
    let degenerate_rows: u64 = per_synset.iter().map(|(_, d)| *d).sum();
    let metrics: Vec<SynsetMetrics> = per_synset.into_iter().map(|(m, _)| m).collect();

    let budget = predictions.uniform_n_samples().unwrap_or_else(|| predictions.max_n_samples());
    let normalizer = match mode {
        NormalizerMode::Derived => {
            let v = scs_normalizer(graph, budget);
            // A budget of 1 sample (or an all-singleton evaluation set)
            // yields a 0 bound; fall back to raw means rather than
            // dividing by zero.
            if v > 0.0 {
                v
            } else {
                1.0
            }
        }
        NormalizerMode::Paper => PAPER_SCS_NORMALIZER,
        NormalizerMode::None => 1.0,
    };
    aggregate(
        predictions.model_id.clone(),
        predictions.seed,
        metrics,
        normalizer,
        mode,
        degenerate_rows,
    )
}

impl MetricReport {
    /// Serialize as pretty JSON (stable field order, trailing newline).
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("reports serialize");
        s.push('\n');
        s
    }

    /// Parse a report from JSON text.
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::validation(format!("bad report JSON: {e}")))
    }

    /// Load a report from a JSON file.
    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_json(&text)
            .map_err(|e| Error::validation(format!("{}: {e}", path.display())))
    }

    /// Write the report as JSON.
    pub fn save(&self, path: &Path) -> Result<()> {
        fs::write(path, self.to_json()).map_err(|e| Error::io(path, e))
    }

    /// Per-synset metrics as CSV (`synset,isp,scs,subtree_size,n_samples`);
    /// the `scs` field is empty for excluded synsets.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("synset,isp,scs,subtree_size,n_samples\n");
        for m in &self.synsets {
            let scs = m.scs.map(|v| v.to_string()).unwrap_or_default();
            out.push_str(&format!(
                "{},{},{},{},{}\n",
                m.synset, m.isp, scs, m.subtree_size, m.n_samples
            ));
        }
        out
    }

    /// Look up one synset's metrics.
    pub fn synset(&self, id: SynsetId) -> Option<&SynsetMetrics> {
        self.synsets
            .binary_search_by_key(&id, |m| m.synset)
            .ok()
            .map(|i| &self.synsets[i])
    }
}
