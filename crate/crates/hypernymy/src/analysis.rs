//! Report-level analyses: weak-concept discovery, model comparison,
//! per-subtree aggregation, and embedding-similarity correlation.
//!
//! Everything here consumes finished [`MetricReport`]s (and optionally
//! the hierarchy or an embedding table); nothing touches raw
//! predictions. All functions are pure and deterministic.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hierarchy::{prompt_for_lemma, HierarchyGraph};
use crate::ingest::EmbeddingTable;
use crate::metrics::{MetricKind, MetricReport};
use crate::numeric::KahanSum;
use crate::stats::spearman;
use crate::synset::SynsetId;

/// One synset with the metric value it was ranked by.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RankedSynset {
    pub synset: SynsetId,
    pub value: f64,
}

/// A ranked synset annotated with its lemma and generation prompt, so
/// the images behind a weak concept can be pulled up for inspection.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AnnotatedSynset {
    pub synset: SynsetId,
    pub value: f64,
    pub lemma: String,
    pub prompt: String,
}

fn rank_ascending(mut entries: Vec<RankedSynset>, k: usize) -> Vec<RankedSynset> {
    entries.sort_by(|a, b| {
        a.value
            .total_cmp(&b.value)
            .then_with(|| a.synset.cmp(&b.synset))
    });
    entries.truncate(k);
    entries
}

/// The `k` synsets with the lowest value of `metric`, ascending, ties
/// broken by synset id. Synsets without a value for the metric
/// (singleton subtrees under SCS) are skipped; `k` larger than the
/// number of scored synsets returns them all.
pub fn worst_synsets(
    report: &MetricReport,
    metric: MetricKind,
    k: usize,
) -> Result<Vec<RankedSynset>> {
    if k == 0 {
        return Err(Error::usage("k must be at least 1"));
    }
    let entries = report
        .synsets
        .iter()
        .filter_map(|m| metric.value_of(m).map(|value| RankedSynset { synset: m.synset, value }))
        .collect();
    Ok(rank_ascending(entries, k))
}

/// Like [`worst_synsets`], but ranking by the mean of the metric
/// across several reports (e.g. one per seed or per model). Only
/// synsets scored in *every* report participate.
pub fn worst_synsets_mean(
    reports: &[MetricReport],
    metric: MetricKind,
    k: usize,
) -> Result<Vec<RankedSynset>> {
    if k == 0 {
        return Err(Error::usage("k must be at least 1"));
    }
    if reports.is_empty() {
        return Err(Error::usage("need at least one report"));
    }
    let mut sums: BTreeMap<SynsetId, (KahanSum, usize)> = BTreeMap::new();
    for report in reports {
        for m in &report.synsets {
            if let Some(value) = metric.value_of(m) {
                let slot = sums.entry(m.synset).or_default();
                slot.0.add(value);
                slot.1 += 1;
            }
        }
    }
    let entries = sums
        .into_iter()
        .filter(|(_, (_, n))| *n == reports.len())
        .map(|(synset, (sum, n))| RankedSynset { synset, value: sum.total() / n as f64 })
        .collect();
    Ok(rank_ascending(entries, k))
}

/// Attach each ranked synset's first lemma and prompt. Synsets without
/// a lemma annotation fall back to their id as the display name.
pub fn annotate_prompts(
    graph: &HierarchyGraph,
    ranked: &[RankedSynset],
) -> Result<Vec<AnnotatedSynset>> {
    ranked
        .iter()
        .map(|r| {
            let lemma = graph
                .first_lemma(r.synset)?
                .map(|l| l.replace('_', " "))
                .unwrap_or_else(|| r.synset.to_string());
            let prompt = prompt_for_lemma(&lemma);
            Ok(AnnotatedSynset { synset: r.synset, value: r.value, lemma, prompt })
        })
        .collect()
}

/// Human-readable listing of annotated synsets, one line each:
/// `synset  value  lemma  prompt`.
pub fn annotated_listing(entries: &[AnnotatedSynset]) -> String {
    let lemma_width = entries.iter().map(|e| e.lemma.len()).max().unwrap_or(5).max(5);
    let mut out = String::new();
    for e in entries {
        out.push_str(&format!(
            "{}  {:>8.4}  {:<lemma_width$}  {}\n",
            e.synset, e.value, e.lemma, e.prompt
        ));
    }
    out
}

/// CSV listing (`synset,value`) of a ranking.
pub fn ranked_csv(entries: &[RankedSynset]) -> String {
    let mut out = String::from("synset,value\n");
    for e in entries {
        out.push_str(&format!("{},{}\n", e.synset, e.value));
    }
    out
}

/// Per-synset difference between two reports.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DiffEntry {
    pub synset: SynsetId,
    pub value_a: f64,
    pub value_b: f64,
    /// `value_a − value_b`.
    pub diff: f64,
}

/// Five-number summary of the per-synset differences.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DiffQuantiles {
    pub min: f64,
    pub q25: f64,
    pub median: f64,
    pub q75: f64,
    pub max: f64,
}

/// Ranked per-synset comparison of two models on one metric.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModelDiff {
    pub metric: MetricKind,
    pub model_a: String,
    pub seed_a: u64,
    pub model_b: String,
    pub seed_b: u64,
    /// Sorted by `diff` descending (largest advantage of model A
    /// first), ties by synset id.
    pub entries: Vec<DiffEntry>,
    pub quantiles: DiffQuantiles,
}

impl ModelDiff {
    /// The whole comparison as pretty JSON.
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("diffs serialize");
        s.push('\n');
        s
    }

    /// CSV listing (`synset,value_a,value_b,diff`), ranked order.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("synset,value_a,value_b,diff\n");
        for e in &self.entries {
            out.push_str(&format!("{},{},{},{}\n", e.synset, e.value_a, e.value_b, e.diff));
        }
        out
    }
}

/// Linear-interpolation quantile of ascending-sorted values.
fn quantile(sorted: &[f64], q: f64) -> f64 {
    debug_assert!(!sorted.is_empty());
    let h = (sorted.len() - 1) as f64 * q;
    let lo = h.floor() as usize;
    let hi = h.ceil() as usize;
    if lo == hi {
        sorted[lo]
    } else {
        sorted[lo] + (h - lo as f64) * (sorted[hi] - sorted[lo])
    }
}

/// Per-synset `a − b` differences on one metric, ranked descending,
/// plus summary quantiles.
///
/// Both reports must cover the same synsets and agree on which of
/// them are scored (for SCS, the excluded singleton set is a property
/// of the hierarchy and therefore must coincide).
pub fn model_diff(
    a: &MetricReport,
    b: &MetricReport,
    metric: MetricKind,
) -> Result<ModelDiff> {
    if a.synsets.len() != b.synsets.len() {
        return Err(Error::validation(format!(
            "reports cover different synset counts ({} vs {})",
            a.synsets.len(),
            b.synsets.len()
        )));
    }
    let mut entries = Vec::new();
    for (ma, mb) in a.synsets.iter().zip(&b.synsets) {
        if ma.synset != mb.synset {
            return Err(Error::validation(format!(
                "reports cover different synsets ({} vs {})",
                ma.synset, mb.synset
            )));
        }
        match (metric.value_of(ma), metric.value_of(mb)) {
            (Some(va), Some(vb)) => {
                entries.push(DiffEntry { synset: ma.synset, value_a: va, value_b: vb, diff: va - vb });
            }
            (None, None) => {}
            _ => {
                return Err(Error::validation(format!(
                    "synset {} is scored in one report but excluded in the other",
                    ma.synset
                )));
            }
        }
    }
    if entries.is_empty() {
        return Err(Error::validation("no synsets scored on this metric in either report"));
    }
    let mut diffs: Vec<f64> = entries.iter().map(|e| e.diff).collect();
    diffs.sort_by(f64::total_cmp);
    let quantiles = DiffQuantiles {
        min: diffs[0],
        q25: quantile(&diffs, 0.25),
        median: quantile(&diffs, 0.5),
        q75: quantile(&diffs, 0.75),
        max: diffs[diffs.len() - 1],
    };
    entries.sort_by(|x, y| {
        y.diff
            .total_cmp(&x.diff)
            .then_with(|| x.synset.cmp(&y.synset))
    });
    Ok(ModelDiff {
        metric,
        model_a: a.model_id.clone(),
        seed_a: a.seed,
        model_b: b.model_id.clone(),
        seed_b: b.seed,
        entries,
        quantiles,
    })
}

/// Aggregates restricted to the evaluation synsets under one root.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SubtreeAggregate {
    pub root: SynsetId,
    pub lemma: Option<String>,
    /// Evaluation synsets reachable downward from the root, inclusive.
    pub n_synsets: usize,
    /// How many of them carry an SCS value.
    pub included_scs_synsets: usize,
    /// Mean ISP over the subtree's evaluation synsets.
    pub aggregate_isp: f64,
    /// Mean raw SCS over the scored synsets, divided by the report's
    /// normalizer; absent when every synset in the subtree is a
    /// singleton.
    pub aggregate_scs: Option<f64>,
}

/// Recompute the report's aggregates inside each root's subtree.
///
/// Subtree membership is DAG reachability: every evaluation synset
/// reachable downward from the root, including the root itself. The
/// SCS divisor is the one stored in the report, so per-subtree values
/// stay comparable with the global aggregate — the global root
/// reproduces the global aggregates exactly.
pub fn subtree_report(
    report: &MetricReport,
    graph: &HierarchyGraph,
    roots: &[SynsetId],
) -> Result<Vec<SubtreeAggregate>> {
    if roots.is_empty() {
        return Err(Error::usage("no subtree roots given"));
    }
    roots
        .iter()
        .map(|&root| {
            let members = graph.descendant_evaluation_synsets(root)?;
            let mut isp_sum = KahanSum::new();
            let mut scs_sum = KahanSum::new();
            let mut included = 0usize;
            for &synset in &members {
                let m = report.synset(synset).ok_or_else(|| {
                    Error::validation(format!("report has no entry for synset {synset}"))
                })?;
                isp_sum.add(m.isp);
                if let Some(scs) = m.scs {
                    scs_sum.add(scs);
                    included += 1;
                }
            }
            let aggregate_scs = (included > 0)
                .then(|| scs_sum.total() / included as f64 / report.scs_normalizer);
            Ok(SubtreeAggregate {
                root,
                lemma: graph.first_lemma(root)?.map(|l| l.replace('_', " ")),
                n_synsets: members.len(),
                included_scs_synsets: included,
                aggregate_isp: isp_sum.total() / members.len() as f64,
                aggregate_scs,
            })
        })
        .collect()
}

/// CSV listing of subtree aggregates
/// (`root,lemma,n_synsets,included_scs_synsets,aggregate_isp,aggregate_scs`).
pub fn subtree_csv(rows: &[SubtreeAggregate]) -> String {
    let mut out = String::from("root,lemma,n_synsets,included_scs_synsets,aggregate_isp,aggregate_scs\n");
    for r in rows {
        let scs = r.aggregate_scs.map(|v| v.to_string()).unwrap_or_default();
        out.push_str(&format!(
            "{},{},{},{},{},{}\n",
            r.root,
            r.lemma.as_deref().unwrap_or(""),
            r.n_synsets,
            r.included_scs_synsets,
            r.aggregate_isp,
            scs
        ));
    }
    out
}

/// Mean cosine similarity between one synset's embedding and its leaf
/// hyponyms' embeddings.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SynsetSimilarity {
    pub synset: SynsetId,
    pub mean_cosine: f64,
    /// Leaves of the subtree that had an embedding.
    pub n_leaves: usize,
    /// Total leaves in the subtree.
    pub subtree_size: usize,
}

/// Per-synset hyponym similarities plus the synsets that could not be
/// scored.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SimilarityReport {
    pub dim: usize,
    pub entries: Vec<SynsetSimilarity>,
    /// Evaluation synsets skipped because their own vector, or every
    /// leaf vector in their subtree, was missing.
    pub skipped: Vec<SynsetId>,
}

impl SimilarityReport {
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("similarities serialize");
        s.push('\n');
        s
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("synset,mean_cosine,n_leaves,subtree_size\n");
        for e in &self.entries {
            out.push_str(&format!(
                "{},{},{},{}\n",
                e.synset, e.mean_cosine, e.n_leaves, e.subtree_size
            ));
        }
        out
    }
}

fn cosine(a: &[f32], b: &[f32]) -> f64 {
    let mut dot = KahanSum::new();
    let mut na = KahanSum::new();
    let mut nb = KahanSum::new();
    for (&x, &y) in a.iter().zip(b) {
        let (x, y) = (x as f64, y as f64);
        dot.add(x * y);
        na.add(x * x);
        nb.add(y * y);
    }
    dot.total() / (na.total().sqrt() * nb.total().sqrt())
}

/// For each evaluation synset with an embedding, the mean cosine
/// similarity between its vector and the vectors of the leaves in its
/// classifiable subtree.
///
/// Leaves without vectors are dropped from the mean; a synset whose
/// own vector is missing (or that retains no leaf vectors) is skipped
/// and listed in [`SimilarityReport::skipped`]. Zero-norm vectors are
/// rejected at table load, so every cosine here is well defined.
pub fn hyponym_similarity(
    graph: &HierarchyGraph,
    embeddings: &EmbeddingTable,
) -> Result<SimilarityReport> {
    let mut entries = Vec::new();
    let mut skipped = Vec::new();
    for &synset in graph.evaluation_set() {
        let Some(own) = embeddings.get(synset) else {
            skipped.push(synset);
            continue;
        };
        let subtree = graph.classifiable_subtree(synset)?;
        let mut sum = KahanSum::new();
        let mut n_leaves = 0usize;
        for &leaf_index in subtree.leaf_indices() {
            let leaf = graph.leaves()[leaf_index as usize];
            if let Some(vec) = embeddings.get(leaf) {
                sum.add(cosine(own, vec));
                n_leaves += 1;
            }
        }
        if n_leaves == 0 {
            skipped.push(synset);
            continue;
        }
        entries.push(SynsetSimilarity {
            synset,
            mean_cosine: sum.total() / n_leaves as f64,
            n_leaves,
            subtree_size: subtree.len(),
        });
    }
    if entries.is_empty() {
        return Err(Error::validation(
            "no evaluation synset has both its own embedding and a leaf embedding",
        ));
    }
    Ok(SimilarityReport { dim: embeddings.dim(), entries, skipped })
}

/// Spearman correlation between hyponym similarities and a per-synset
/// metric, over the synsets present in both.
pub fn similarity_metric_correlation(
    similarities: &SimilarityReport,
    report: &MetricReport,
    metric: MetricKind,
) -> Result<(f64, f64)> {
    let mut x = Vec::new();
    let mut y = Vec::new();
    for e in &similarities.entries {
        let Some(m) = report.synset(e.synset) else {
            continue;
        };
        let Some(value) = metric.value_of(m) else {
            continue;
        };
        x.push(e.mean_cosine);
        y.push(value);
    }
    if x.len() < 3 {
        return Err(Error::validation(format!(
            "only {} synsets are shared between the similarities and the report; need 3",
            x.len()
        )));
    }
    spearman(&x, &y)
}
