//! Measure how well an image generator understands hypernymy — the
//! "is-a" structure of concepts — using an off-the-shelf image
//! classifier and the WordNet noun hierarchy.
//!
//! The pipeline: prompt a generator with a concept ("an image of an
//! instrument"), classify the generated images over the ImageNet-1k
//! leaves, and locate the predictions in the hypernym hierarchy. Two
//! scores summarize the outcome per concept:
//!
//! * **ISP** (in-subtree probability): how much probability mass lands
//!   inside the concept's classifiable subtree — does the model draw
//!   *some* instrument?
//! * **SCS** (subtree coverage score): how diverse the in-subtree
//!   predictions are across samples — does it draw *many kinds* of
//!   instruments, or always a violin?
//!
//! The crate provides the hierarchy machinery ([`hierarchy`]), ingestion
//! of classifier outputs ([`ingest`]), the metrics ([`metrics`]),
//! supporting statistics ([`stats`]), result analyses ([`analysis`]),
//! caption-corpus concept counting ([`corpus`]), and a synthetic
//! prediction generator for testing pipelines end to end
//! ([`simulator`]). The `hypernymy` binary exposes all of it as
//! subcommands; the `examples/` directory shows each capability as a
//! small runnable program.

pub mod analysis;
pub mod cli;
pub mod corpus;
pub mod error;
pub mod hierarchy;
pub mod ingest;
pub mod metrics;
pub mod numeric;
pub mod simulator;
pub mod stats;
pub mod synset;

pub use error::{Error, Result};
pub use hierarchy::{load_hierarchy, load_hierarchy_str, HierarchyGraph};
pub use ingest::{load_predictions, PredictionKind, PredictionSet};
pub use metrics::{evaluate, MetricReport, NormalizerMode};
pub use synset::SynsetId;
