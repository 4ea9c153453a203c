//! Synthetic prediction generator: parametric "models" with known
//! competence, for validating metric behavior without a real generator
//! or classifier.
//!
//! Each profile fabricates, per evaluation synset, `n_samples`
//! probability rows over the leaf classes:
//!
//! * `perfect` — every sample is a different uniformly drawn leaf of
//!   `A(s)` (one-hot): full precision, full diversity.
//! * `collapsed` — every sample is the *same* leaf of `A(s)`: full
//!   precision, zero diversity (mode collapse).
//! * `ignorant` — every sample is a uniformly drawn leaf of the whole
//!   class set: the prompt is ignored entirely.
//! * `mixture` — smooth rows: a `concentration`-controlled share of
//!   mass inside `A(s)`, spread over `coverage` "known" leaves with
//!   per-synset preferences plus per-sample noise. Raising the
//!   concentration pushes mass into the subtree *and* collapses the
//!   within-subtree spread onto the preferred leaf — the qualitative
//!   guidance-scale trade-off.
//! * `concentrated` — like `mixture`, but each sample sharpens onto
//!   its own noise-chosen leaf, so diversity survives sharpening.
//!
//! Randomness is counter-based: every (seed, synset, sample) triple
//! keys an independent RNG, so generation is order-independent,
//! parallel-safe, and bitwise reproducible.

use std::fmt;
use std::fs;
use std::path::Path;

use rand::distributions::Distribution;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hierarchy::HierarchyGraph;
use crate::ingest::{PredictionKind, PredictionSet, SampleMatrix};
use crate::metrics::{evaluate, MetricReport, NormalizerMode};
use crate::numeric::KahanSum;
use crate::synset::SynsetId;

/// Synthetic model families.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ProfileKind {
    Perfect,
    Collapsed,
    Ignorant,
    Mixture,
    Concentrated,
}

impl fmt::Display for ProfileKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ProfileKind::Perfect => "perfect",
            ProfileKind::Collapsed => "collapsed",
            ProfileKind::Ignorant => "ignorant",
            ProfileKind::Mixture => "mixture",
            ProfileKind::Concentrated => "concentrated",
        })
    }
}

impl std::str::FromStr for ProfileKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "perfect" => Ok(ProfileKind::Perfect),
            "collapsed" => Ok(ProfileKind::Collapsed),
            "ignorant" => Ok(ProfileKind::Ignorant),
            "mixture" => Ok(ProfileKind::Mixture),
            "concentrated" => Ok(ProfileKind::Concentrated),
            other => Err(Error::usage(format!(
                "unknown profile '{other}' (expected perfect, collapsed, ignorant, mixture, or concentrated)"
            ))),
        }
    }
}

/// How many distinct subtree leaves the synthetic model "knows".
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Coverage {
    /// Every leaf of the subtree.
    All,
    /// The first `k` (per-synset, deterministically chosen) leaves;
    /// clamped to the subtree size where it exceeds it.
    Leaves(u32),
}

impl Serialize for Coverage {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Coverage::All => s.serialize_str("all"),
            Coverage::Leaves(k) => s.serialize_u32(*k),
        }
    }
}

impl<'de> Deserialize<'de> for Coverage {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Repr {
            Count(u32),
            Word(String),
        }
        match Repr::deserialize(d)? {
            Repr::Count(k) if k >= 1 => Ok(Coverage::Leaves(k)),
            Repr::Count(_) => Err(serde::de::Error::custom("coverage must be at least 1")),
            Repr::Word(w) if w == "all" => Ok(Coverage::All),
            Repr::Word(w) => Err(serde::de::Error::custom(format!(
                "coverage must be a positive integer or \"all\", got {w:?}"
            ))),
        }
    }
}

/// The knobs of a synthetic model.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CompetenceProfile {
    pub kind: ProfileKind,
    /// Pre-sharpening probability mass placed inside `A(s)`
    /// (mixture/concentrated only).
    #[serde(default = "default_in_subtree_mass")]
    pub in_subtree_mass: f64,
    /// Peakedness of per-sample rows — the guidance-like knob
    /// (mixture/concentrated only). Must be positive.
    #[serde(default = "default_concentration")]
    pub concentration: f64,
    /// Distinct subtree leaves the model can produce
    /// (mixture/concentrated only).
    #[serde(default = "default_coverage")]
    pub coverage: Coverage,
    /// Per-sample preference noise (mixture only).
    #[serde(default = "default_noise_scale")]
    pub noise_scale: f64,
    #[serde(default)]
    pub seed: u64,
}

fn default_in_subtree_mass() -> f64 {
    0.7
}

fn default_concentration() -> f64 {
    1.0
}

fn default_coverage() -> Coverage {
    Coverage::All
}

fn default_noise_scale() -> f64 {
    1.0
}

impl CompetenceProfile {
    /// A profile of the given kind with default knobs.
    pub fn new(kind: ProfileKind) -> Self {
        CompetenceProfile {
            kind,
            in_subtree_mass: default_in_subtree_mass(),
            concentration: default_concentration(),
            coverage: default_coverage(),
            noise_scale: default_noise_scale(),
            seed: 0,
        }
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_concentration(mut self, concentration: f64) -> Self {
        self.concentration = concentration;
        self
    }

    /// Check parameter ranges.
    pub fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.in_subtree_mass) {
            return Err(Error::usage(format!(
                "in_subtree_mass must be in [0, 1], got {}",
                self.in_subtree_mass
            )));
        }
        if !(self.concentration > 0.0) || !self.concentration.is_finite() {
            return Err(Error::usage(format!(
                "concentration must be positive and finite, got {}",
                self.concentration
            )));
        }
        if !(self.noise_scale >= 0.0) || !self.noise_scale.is_finite() {
            return Err(Error::usage(format!(
                "noise_scale must be non-negative and finite, got {}",
                self.noise_scale
            )));
        }
        if let Coverage::Leaves(0) = self.coverage {
            return Err(Error::usage("coverage must be at least 1"));
        }
        Ok(())
    }

    /// Stable model identifier used in generated prediction sets.
    pub fn model_id(&self) -> String {
        format!("sim-{}", self.kind)
    }
}

/// Load a profile from a TOML file (`kind` required; other keys
/// default: `in_subtree_mass = 0.7`, `concentration = 1.0`,
/// `coverage = "all"`, `noise_scale = 1.0`, `seed = 0`).
pub fn load_profile(path: &Path) -> Result<CompetenceProfile> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let profile: CompetenceProfile = toml::from_str(&text)
        .map_err(|e| Error::validation(format!("{}: {e}", path.display())))?;
    profile.validate()?;
    Ok(profile)
}

/// splitmix64: the standard 64-bit finalizer-based generator step.
fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9e3779b97f4a7c15);
    x = (x ^ (x >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94d049bb133111eb);
    x ^ (x >> 31)
}

/// Mix a (seed, stream tag, synset, counter) tuple into one RNG key.
fn stream_key(seed: u64, tag: u64, synset: SynsetId, counter: u64) -> u64 {
    let mut k = splitmix64(seed ^ splitmix64(tag));
    k = splitmix64(k ^ splitmix64(synset.offset() as u64));
    splitmix64(k ^ splitmix64(counter))
}

/// Per-sample RNG: independent across (seed, synset, sample).
fn row_rng(seed: u64, synset: SynsetId, sample: u32) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(stream_key(seed, 1, synset, sample as u64))
}

/// Per-synset RNG: sample-independent state (known leaves, biases,
/// the collapsed profile's fixed leaf).
fn synset_rng(seed: u64, synset: SynsetId) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(stream_key(seed, 2, synset, 0))
}

/// The subtree-leaf positions the model "knows" for this synset, and
/// their per-synset preference biases: a deterministic partial shuffle
/// of the subtree, truncated to the coverage.
fn known_leaves(profile: &CompetenceProfile, subtree: &[u32], rng: &mut ChaCha8Rng) -> Vec<(u32, f64)> {
    let k = match profile.coverage {
        Coverage::All => subtree.len(),
        Coverage::Leaves(k) => (k as usize).min(subtree.len()),
    };
    let mut pool: Vec<u32> = subtree.to_vec();
    for i in 0..k {
        let j = rng.gen_range(i..pool.len());
        pool.swap(i, j);
    }
    pool.truncate(k);
    pool.into_iter()
        .map(|leaf| (leaf, StandardNormal.sample(rng)))
        .collect()
}

/// Evaluation synsets whose subtree is smaller than the requested
/// coverage, with their sizes; generation clamps these. Exposed so
/// front ends can warn.
pub fn clamped_coverage_synsets(
    graph: &HierarchyGraph,
    profile: &CompetenceProfile,
) -> Vec<(SynsetId, usize)> {
    let Coverage::Leaves(k) = profile.coverage else {
        return Vec::new();
    };
    graph
        .evaluation_set()
        .iter()
        .filter_map(|&s| {
            let size = graph.subtree_size(s).expect("evaluation synsets are nodes");
            (size < k as usize).then_some((s, size))
        })
        .collect()
}

/// One smooth row (mixture/concentrated): sharpened in-subtree share
/// over the known leaves, remainder uniform over the out-of-subtree
/// classes. Subtree leaves outside the known set get exactly 0.
fn smooth_row(
    profile: &CompetenceProfile,
    n_classes: usize,
    subtree: &[u32],
    known: &[(u32, f64)],
    rng: &mut ChaCha8Rng,
) -> Vec<f32> {
    let gamma = profile.concentration;
    let outside = n_classes - subtree.len();
    // Sharpening drives the in-subtree share toward 1 (and toward 0 as
    // the knob loosens), bottoming out at the configured mass at γ = 1.
    let in_mass = if outside == 0 {
        1.0
    } else {
        profile.in_subtree_mass.powf(1.0 / gamma)
    };

    // Log-weights over the known leaves.
    let logits: Vec<f64> = match profile.kind {
        ProfileKind::Mixture => known
            .iter()
            .map(|&(_, bias)| {
                let noise: f64 = StandardNormal.sample(rng);
                gamma * bias + profile.noise_scale * noise
            })
            .collect(),
        ProfileKind::Concentrated => known
            .iter()
            .map(|_| {
                let noise: f64 = StandardNormal.sample(rng);
                gamma * noise
            })
            .collect(),
        _ => unreachable!("smooth_row only serves mixture/concentrated"),
    };
    let max = logits.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let exps: Vec<f64> = logits.iter().map(|&l| (l - max).exp()).collect();
    let mut z = KahanSum::new();
    for &e in &exps {
        z.add(e);
    }
    let z = z.total();

    let mut row = vec![0.0f64; n_classes];
    if outside > 0 {
        let out_share = (1.0 - in_mass) / outside as f64;
        for slot in row.iter_mut() {
            *slot = out_share;
        }
        for &leaf in subtree {
            row[leaf as usize] = 0.0;
        }
    }
    for (&(leaf, _), &e) in known.iter().zip(&exps) {
        row[leaf as usize] = in_mass * e / z;
    }
    row.iter().map(|&v| v as f32).collect()
}

/// Generate a synthetic prediction set for every evaluation synset.
///
/// Deterministic: the same (graph, profile, n_samples) triple yields a
/// bitwise-identical set regardless of thread count or call order.
/// Coverage larger than a subtree is clamped silently; use
/// [`clamped_coverage_synsets`] to enumerate the affected synsets.
pub fn simulate(
    graph: &HierarchyGraph,
    profile: &CompetenceProfile,
    n_samples: usize,
) -> Result<PredictionSet> {
    profile.validate()?;
    if n_samples == 0 {
        return Err(Error::usage("n_samples must be at least 1"));
    }
    let n_classes = graph.leaf_count();
    let eval = graph.evaluation_set();
    let matrices: Vec<(SynsetId, SampleMatrix)> = eval
        .par_iter()
        .map(|&s| {
            let subtree = graph
                .classifiable_subtree(s)
                .expect("evaluation synsets are nodes")
                .leaf_indices();
            let mut values = Vec::with_capacity(n_samples * n_classes);
            let mut per_synset = synset_rng(profile.seed, s);
            match profile.kind {
                ProfileKind::Perfect => {
                    for sample in 0..n_samples {
                        let mut rng = row_rng(profile.seed, s, sample as u32);
                        let leaf = subtree[rng.gen_range(0..subtree.len())];
                        values.extend(one_hot(n_classes, leaf));
                    }
                }
                ProfileKind::Collapsed => {
                    let leaf = subtree[per_synset.gen_range(0..subtree.len())];
                    for _ in 0..n_samples {
                        values.extend(one_hot(n_classes, leaf));
                    }
                }
                ProfileKind::Ignorant => {
                    for sample in 0..n_samples {
                        let mut rng = row_rng(profile.seed, s, sample as u32);
                        let leaf = rng.gen_range(0..n_classes) as u32;
                        values.extend(one_hot(n_classes, leaf));
                    }
                }
                ProfileKind::Mixture | ProfileKind::Concentrated => {
                    let known = known_leaves(profile, subtree, &mut per_synset);
                    for sample in 0..n_samples {
                        let mut rng = row_rng(profile.seed, s, sample as u32);
                        values.extend(smooth_row(profile, n_classes, subtree, &known, &mut rng));
                    }
                }
            }
            (s, SampleMatrix::new(n_classes, values).expect("simulator rows are well-formed"))
        })
        .collect();

    let mut set = PredictionSet::new(
        profile.model_id(),
        profile.seed,
        PredictionKind::Probabilities,
        n_classes,
    );
    for (synset, matrix) in matrices {
        set.insert(synset, matrix)?;
    }
    Ok(set)
}

fn one_hot(n_classes: usize, leaf: u32) -> Vec<f32> {
    let mut row = vec![0.0f32; n_classes];
    row[leaf as usize] = 1.0;
    row
}

/// Evaluate one profile across a range of concentrations (the
/// guidance-like sweep). Every step shares the base profile's seed, so
/// a single-value sweep equals a plain simulate-then-evaluate run.
pub fn guidance_sweep(
    graph: &HierarchyGraph,
    base_profile: &CompetenceProfile,
    concentration_values: &[f64],
    n_samples: usize,
    normalizer: NormalizerMode,
) -> Result<Vec<MetricReport>> {
    if concentration_values.is_empty() {
        return Err(Error::usage("sweep needs at least one concentration value"));
    }
    let mut reports = Vec::with_capacity(concentration_values.len());
    for &c in concentration_values {
        let profile = base_profile.with_concentration(c);
        let predictions = simulate(graph, &profile, n_samples)?;
        reports.push(evaluate(graph, &predictions, normalizer)?);
    }
    Ok(reports)
}
