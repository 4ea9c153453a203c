//! Command-line front end: batch subcommands over the library modules.
//!
//! Conventions shared by every subcommand:
//! * stdout carries data (reports, tables, listings); stderr carries
//!   diagnostics (warnings, progress, errors);
//! * exit codes: 0 success, 1 usage mistake, 2 validation/parse
//!   failure, 3 I/O failure;
//! * all randomness enters through an explicit `--seed` (default 0),
//!   and `--jobs` never changes results, only wall time;
//! * `--config FILE` loads a TOML file supplying defaults for the
//!   recurring flags (`seed`, `jobs`, `normalizer`, `format`);
//!   explicit flags always win;
//! * a `-` in place of a predictions path means stdin/stdout, so
//!   `simulate` can pipe straight into `evaluate`.

use std::io::{BufRead, BufReader, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::{Deserialize, Serialize};

use crate::analysis::{
    annotate_prompts, annotated_listing, hyponym_similarity, model_diff, ranked_csv,
    similarity_metric_correlation, subtree_csv, subtree_report, worst_synsets,
    worst_synsets_mean,
};
use crate::corpus::{
    count_concepts, frequency_correlation, ConceptCountTable, CountMode, LemmaMode,
    MatchingPolicy,
};
use crate::error::{Error, Result};
use crate::hierarchy::{load_hierarchy, HierarchyGraph};
use crate::ingest::{
    load_embeddings, load_predictions_reader, read_predictions_binary, read_predictions_jsonl,
    write_predictions_binary_to, write_predictions_jsonl_to, PredictionSet,
};
use crate::metrics::{evaluate, MetricKind, MetricReport, NormalizerMode};
use crate::simulator::{
    clamped_coverage_synsets, guidance_sweep, load_profile, simulate, CompetenceProfile,
    Coverage, ProfileKind,
};
use crate::stats::{
    calibration_csv, calibration_curve, ece, krippendorff_alpha, load_labeled_jsonl,
    pairwise_seed_correlation, top1_accuracy, RatingMatrix,
};
use crate::synset::SynsetId;

/// Hierarchy-aware evaluation of image generators.
#[derive(Parser, Debug)]
#[command(name = "hypernymy", version, about = "Locate classifier predictions in a hypernym \
hierarchy and score in-subtree probability and subtree coverage.")]
struct Cli {
    /// TOML file with defaults for `seed`, `jobs`, `normalizer`, `format`.
    #[arg(long, global = true, value_name = "FILE")]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Load, check, or rewrite a hypernym hierarchy.
    #[command(subcommand)]
    Hierarchy(HierarchyCmd),
    /// Emit the prompt manifest for every evaluation synset (JSONL).
    Prompts(PromptsArgs),
    /// Score a prediction file against a hierarchy.
    Evaluate(EvaluateArgs),
    /// Generate synthetic classifier predictions from a competence profile.
    Simulate(SimulateArgs),
    /// Evaluate a profile across several concentration values.
    Sweep(SweepArgs),
    /// Rank per-synset differences between two metric reports.
    Compare(CompareArgs),
    /// List the lowest-scoring synsets of one or more reports.
    Worst(WorstArgs),
    /// Recompute aggregates inside chosen subtrees of the hierarchy.
    Subtree(SubtreeArgs),
    /// Count concept mentions in caption corpus shards.
    CorpusCount(CorpusCountArgs),
    /// Rank correlations between reports and other per-synset signals.
    #[command(subcommand)]
    Correlate(CorrelateCmd),
    /// Calibration curve and expected calibration error of labeled predictions.
    Calibration(CalibrationArgs),
    /// Krippendorff's alpha over an item,rater,category table.
    Agreement(AgreementArgs),
}

/// Optional defaults, loaded from `--config`.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct Config {
    seed: Option<u64>,
    jobs: Option<usize>,
    normalizer: Option<NormalizerMode>,
    format: Option<PredictionFormat>,
}

impl Config {
    fn load(path: Option<&Path>) -> Result<Self> {
        let Some(path) = path else {
            return Ok(Config::default());
        };
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        toml::from_str(&text)
            .map_err(|e| Error::validation(format!("{}: bad config: {e}", path.display())))
    }
}

/// On-disk layout of a prediction file.
#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
enum PredictionFormat {
    /// One JSON record per (synset, sample) row.
    Jsonl,
    /// Packed little-endian binary.
    Bin,
}

/// The two files defining a hierarchy.
#[derive(Args, Debug)]
struct GraphArgs {
    /// Hypernym edge list: one `child parent` pair per line.
    #[arg(long, value_name = "FILE")]
    edges: PathBuf,
    /// Leaf map: `class_index synset lemma[|lemma...]` per line, `-`
    /// as the index for non-leaf synsets.
    #[arg(long, value_name = "FILE")]
    leaf_map: PathBuf,
}

impl GraphArgs {
    fn load(&self) -> Result<HierarchyGraph> {
        load_hierarchy(&self.edges, &self.leaf_map)
    }
}

#[derive(Subcommand, Debug)]
enum HierarchyCmd {
    /// Load a hierarchy and rewrite it in normalized form.
    Build {
        #[command(flatten)]
        graph: GraphArgs,
        /// Where to write the normalized edge list.
        #[arg(long, value_name = "FILE")]
        out_edges: PathBuf,
        /// Where to write the normalized leaf map.
        #[arg(long, value_name = "FILE")]
        out_leaf_map: PathBuf,
    },
    /// Load a hierarchy and report whether it is well formed.
    Validate {
        #[command(flatten)]
        graph: GraphArgs,
    },
    /// Print summary statistics, or the evaluation synsets close to the leaves.
    Stats {
        #[command(flatten)]
        graph: GraphArgs,
        /// Instead of statistics, list evaluation synsets whose
        /// distance to the closest leaf is at most this many edges.
        #[arg(long, value_name = "K")]
        max_leaf_distance: Option<u32>,
    },
}

#[derive(Args, Debug)]
struct PromptsArgs {
    #[command(flatten)]
    graph: GraphArgs,
    /// Output file (default stdout).
    #[arg(short, long, value_name = "FILE")]
    output: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct EvaluateArgs {
    #[command(flatten)]
    graph: GraphArgs,
    /// Prediction file (`-` for stdin).
    #[arg(long, value_name = "FILE")]
    predictions: PathBuf,
    /// Force the input format instead of sniffing the magic bytes.
    #[arg(long, value_enum)]
    format: Option<PredictionFormat>,
    /// SCS divisor: `derived` (from this hierarchy and sample count),
    /// `paper` (the fixed reference constant 1.624), or `none` (raw means).
    #[arg(long)]
    normalizer: Option<NormalizerMode>,
    /// Worker threads (default: all cores). Never changes the output.
    #[arg(long, value_name = "N")]
    jobs: Option<usize>,
    /// Output file (default stdout).
    #[arg(short, long, value_name = "FILE")]
    output: Option<PathBuf>,
    /// Emit the per-synset table as CSV instead of the JSON report.
    #[arg(long)]
    csv: bool,
}

#[derive(Args, Debug)]
struct ProfileArgs {
    /// TOML competence profile to start from.
    #[arg(long, value_name = "FILE")]
    profile: Option<PathBuf>,
    /// Profile kind (perfect, collapsed, ignorant, mixture,
    /// concentrated); overrides the file's `kind`.
    #[arg(long)]
    kind: Option<ProfileKind>,
    /// Probability mass kept inside the subtree before sharpening.
    #[arg(long, value_name = "MASS")]
    in_subtree_mass: Option<f64>,
    /// Sharpening exponent (the guidance-like knob).
    #[arg(long, value_name = "GAMMA")]
    concentration: Option<f64>,
    /// Distinct subtree leaves the model knows: `all` or a count.
    #[arg(long, value_name = "all|K", value_parser = parse_coverage)]
    coverage: Option<Coverage>,
    /// Scale of the per-sample logit noise.
    #[arg(long, value_name = "SCALE")]
    noise_scale: Option<f64>,
    /// Generation seed; overrides the profile file and the config.
    #[arg(long)]
    seed: Option<u64>,
}

impl ProfileArgs {
    /// Profile = file (if any) + flag overrides; seed precedence is
    /// flag > profile file > config > 0.
    fn resolve(&self, config: &Config) -> Result<CompetenceProfile> {
        let mut profile = match (&self.profile, self.kind) {
            (Some(path), _) => load_profile(path)?,
            (None, Some(kind)) => CompetenceProfile::new(kind),
            (None, None) => {
                return Err(Error::usage("either --profile or --kind is required"));
            }
        };
        if let Some(kind) = self.kind {
            profile.kind = kind;
        }
        if let Some(v) = self.in_subtree_mass {
            profile.in_subtree_mass = v;
        }
        if let Some(v) = self.concentration {
            profile.concentration = v;
        }
        if let Some(v) = self.coverage {
            profile.coverage = v;
        }
        if let Some(v) = self.noise_scale {
            profile.noise_scale = v;
        }
        if let Some(seed) = self.seed {
            profile.seed = seed;
        } else if self.profile.is_none() {
            profile.seed = config.seed.unwrap_or(0);
        }
        profile.validate()?;
        Ok(profile)
    }
}

fn parse_coverage(s: &str) -> Result<Coverage> {
    if s == "all" {
        return Ok(Coverage::All);
    }
    s.parse::<u32>()
        .map(Coverage::Leaves)
        .map_err(|_| Error::usage(format!("coverage must be `all` or a positive count, got {s:?}")))
}

#[derive(Args, Debug)]
struct SimulateArgs {
    #[command(flatten)]
    graph: GraphArgs,
    #[command(flatten)]
    profile: ProfileArgs,
    /// Prediction rows per synset.
    #[arg(long, default_value_t = 32, value_name = "N")]
    samples: usize,
    /// Output format.
    #[arg(long, value_enum)]
    format: Option<PredictionFormat>,
    /// Worker threads (default: all cores). Never changes the output.
    #[arg(long, value_name = "N")]
    jobs: Option<usize>,
    /// Output file (default stdout, for piping into `evaluate`).
    #[arg(short, long, value_name = "FILE")]
    output: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct SweepArgs {
    #[command(flatten)]
    graph: GraphArgs,
    #[command(flatten)]
    profile: ProfileArgs,
    /// Comma-separated concentration values to evaluate.
    #[arg(long, value_delimiter = ',', required = true, value_name = "G1,G2,...")]
    concentrations: Vec<f64>,
    /// Prediction rows per synset.
    #[arg(long, default_value_t = 32, value_name = "N")]
    samples: usize,
    /// SCS divisor mode (see `evaluate`).
    #[arg(long)]
    normalizer: Option<NormalizerMode>,
    /// Worker threads (default: all cores). Never changes the output.
    #[arg(long, value_name = "N")]
    jobs: Option<usize>,
    /// Also write each full report to this directory.
    #[arg(long, value_name = "DIR")]
    out_dir: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct CompareArgs {
    /// Report for model A.
    report_a: PathBuf,
    /// Report for model B.
    report_b: PathBuf,
    /// Which per-synset metric to difference.
    #[arg(long, default_value = "isp")]
    metric: MetricKind,
    /// Emit CSV instead of JSON.
    #[arg(long)]
    csv: bool,
    /// Output file (default stdout).
    #[arg(short, long, value_name = "FILE")]
    output: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct WorstArgs {
    /// One report, or several to rank by the per-synset mean.
    #[arg(required = true)]
    reports: Vec<PathBuf>,
    /// Which metric to rank by.
    #[arg(long, default_value = "isp")]
    metric: MetricKind,
    /// How many synsets to list.
    #[arg(short = 'k', long, default_value_t = 20)]
    top: usize,
    /// Hierarchy edge list; with --leaf-map, annotates each synset
    /// with its lemma and prompt.
    #[arg(long, value_name = "FILE", requires = "leaf_map")]
    edges: Option<PathBuf>,
    /// Hierarchy leaf map (see --edges).
    #[arg(long, value_name = "FILE", requires = "edges")]
    leaf_map: Option<PathBuf>,
    /// Emit JSON instead of the text listing.
    #[arg(long, conflicts_with = "csv")]
    json: bool,
    /// Emit CSV (`synset,value`) instead of the text listing.
    #[arg(long)]
    csv: bool,
    /// Output file (default stdout).
    #[arg(short, long, value_name = "FILE")]
    output: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct SubtreeArgs {
    #[command(flatten)]
    graph: GraphArgs,
    /// Metric report to slice.
    #[arg(long, value_name = "FILE")]
    report: PathBuf,
    /// Comma-separated subtree root synsets.
    #[arg(long, value_delimiter = ',', required = true, value_name = "SYNSET,...")]
    roots: Vec<SynsetId>,
    /// Emit CSV instead of JSON.
    #[arg(long)]
    csv: bool,
    /// Output file (default stdout).
    #[arg(short, long, value_name = "FILE")]
    output: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct CorpusCountArgs {
    #[command(flatten)]
    graph: GraphArgs,
    /// Caption shards: plain text or `.gz`, one caption per line.
    #[arg(required = true)]
    shards: Vec<PathBuf>,
    /// Identifier recorded in the output table.
    #[arg(long, default_value = "corpus")]
    corpus_id: String,
    /// Count each caption at most once per synset, or every occurrence.
    #[arg(long, value_enum, default_value_t = CountModeArg::PerCaption)]
    count_mode: CountModeArg,
    /// Match only each synset's first lemma, or all of its lemmas.
    #[arg(long, value_enum, default_value_t = LemmaModeArg::First)]
    lemma_mode: LemmaModeArg,
    /// Treat lines as TSV and read captions from this 0-based column.
    #[arg(long, value_name = "COL")]
    tsv_column: Option<usize>,
    /// Worker threads (default: all cores). Never changes the output.
    #[arg(long, value_name = "N")]
    jobs: Option<usize>,
    /// Emit CSV (`synset,lemma,count`) instead of the JSON table.
    #[arg(long)]
    csv: bool,
    /// Output file (default stdout).
    #[arg(short, long, value_name = "FILE")]
    output: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
enum CountModeArg {
    PerCaption,
    PerOccurrence,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
enum LemmaModeArg {
    First,
    All,
}

#[derive(Subcommand, Debug)]
enum CorrelateCmd {
    /// Corpus frequency vs. a report metric.
    Counts {
        /// Concept count table (JSON, from `corpus-count`).
        #[arg(long, value_name = "FILE")]
        counts: PathBuf,
        /// Metric report (JSON, from `evaluate`).
        #[arg(long, value_name = "FILE")]
        report: PathBuf,
        #[arg(long, default_value = "isp")]
        metric: MetricKind,
    },
    /// Mean hyponym embedding similarity vs. a report metric.
    Similarity {
        #[command(flatten)]
        graph: GraphArgs,
        /// Embedding table (JSONL: {"synset", "vector"}).
        #[arg(long, value_name = "FILE")]
        embeddings: PathBuf,
        /// Metric report (JSON, from `evaluate`).
        #[arg(long, value_name = "FILE")]
        report: PathBuf,
        #[arg(long, default_value = "isp")]
        metric: MetricKind,
        /// Also write the per-synset similarity report here.
        #[arg(long, value_name = "FILE")]
        similarities_out: Option<PathBuf>,
    },
    /// Rank stability of one model across seeds (pairwise Spearman).
    Seeds {
        /// Two or more reports of the same model under different seeds.
        #[arg(required = true)]
        reports: Vec<PathBuf>,
        #[arg(long, default_value = "isp")]
        metric: MetricKind,
    },
}

#[derive(Args, Debug)]
struct CalibrationArgs {
    /// Labeled predictions (JSONL: {"values", "label"}).
    #[arg(long, value_name = "FILE")]
    predictions: PathBuf,
    /// Number of equal-width confidence bins.
    #[arg(long, default_value_t = 10)]
    bins: usize,
    /// Emit the binned curve as CSV instead of the JSON summary.
    #[arg(long)]
    csv: bool,
    /// Output file (default stdout).
    #[arg(short, long, value_name = "FILE")]
    output: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct AgreementArgs {
    /// Ratings CSV with an `item,rater,category` header.
    #[arg(long, value_name = "FILE")]
    ratings: PathBuf,
}

/// Parse arguments, run, and translate errors into exit codes.
pub fn main_entry() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let usage_ok =
                matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion);
            let _ = e.print();
            return if usage_ok { ExitCode::SUCCESS } else { ExitCode::from(1) };
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        // A downstream consumer (e.g. `head`) closing the pipe early is
        // not a failure of this process.
        Err(Error::Io { source, .. })
            if source.kind() == std::io::ErrorKind::BrokenPipe =>
        {
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

fn run(cli: Cli) -> Result<()> {
    let config = Config::load(cli.config.as_deref())?;
    match cli.command {
        Command::Hierarchy(cmd) => run_hierarchy(cmd),
        Command::Prompts(args) => run_prompts(args),
        Command::Evaluate(args) => run_evaluate(args, &config),
        Command::Simulate(args) => run_simulate(args, &config),
        Command::Sweep(args) => run_sweep(args, &config),
        Command::Compare(args) => run_compare(args),
        Command::Worst(args) => run_worst(args),
        Command::Subtree(args) => run_subtree(args),
        Command::CorpusCount(args) => run_corpus_count(args, &config),
        Command::Correlate(cmd) => run_correlate(cmd),
        Command::Calibration(args) => run_calibration(args),
        Command::Agreement(args) => run_agreement(args),
    }
}

/// Write text to a file or stdout.
fn emit(output: Option<&Path>, data: &str) -> Result<()> {
    match output {
        Some(path) => std::fs::write(path, data).map_err(|e| Error::io(path, e)),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(data.as_bytes())
                .and_then(|()| out.flush())
                .map_err(|e| Error::io("<stdout>", e))
        }
    }
}

/// Run a closure on a pool of exactly `jobs` workers (or the global
/// default pool when unset).
fn with_jobs<T: Send>(jobs: Option<usize>, f: impl FnOnce() -> Result<T> + Send) -> Result<T> {
    match jobs {
        None => f(),
        Some(0) => Err(Error::usage("--jobs must be at least 1")),
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| Error::validation(format!("failed to build worker pool: {e}")))?
            .install(f),
    }
}

fn run_hierarchy(cmd: HierarchyCmd) -> Result<()> {
    match cmd {
        HierarchyCmd::Build { graph, out_edges, out_leaf_map } => {
            let g = graph.load()?;
            g.save(&out_edges, &out_leaf_map)?;
            eprintln!(
                "wrote {} nodes / {} edges to {} and {}",
                g.node_count(),
                g.edge_count(),
                out_edges.display(),
                out_leaf_map.display()
            );
            Ok(())
        }
        HierarchyCmd::Validate { graph } => {
            let g = graph.load()?;
            println!(
                "valid: {} nodes, {} edges, {} leaves, {} evaluation synsets",
                g.node_count(),
                g.edge_count(),
                g.leaf_count(),
                g.evaluation_set().len()
            );
            Ok(())
        }
        HierarchyCmd::Stats { graph, max_leaf_distance } => {
            let g = graph.load()?;
            match max_leaf_distance {
                None => {
                    let stats = serde_json::to_string_pretty(&g.stats())
                        .expect("stats serialize");
                    println!("{stats}");
                }
                Some(k) => {
                    let mut out = String::new();
                    for s in g.evaluation_synsets_within_leaf_distance(k) {
                        let lemma = g.first_lemma(s)?.unwrap_or("").replace('_', " ");
                        out.push_str(&format!("{s}\t{lemma}\n"));
                    }
                    emit(None, &out)?;
                }
            }
            Ok(())
        }
    }
}

fn run_prompts(args: PromptsArgs) -> Result<()> {
    let graph = args.graph.load()?;
    let manifest = graph.prompt_manifest()?;
    emit(args.output.as_deref(), &manifest.to_jsonl())
}

fn load_predictions_arg(path: &Path, format: Option<PredictionFormat>) -> Result<PredictionSet> {
    let reader: Box<dyn BufRead> = if path == Path::new("-") {
        Box::new(BufReader::new(std::io::stdin().lock()))
    } else {
        let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
        Box::new(BufReader::new(file))
    };
    let origin = if path == Path::new("-") { Path::new("<stdin>") } else { path };
    match format {
        None => load_predictions_reader(reader, origin),
        Some(PredictionFormat::Jsonl) => read_predictions_jsonl(reader, origin),
        Some(PredictionFormat::Bin) => read_predictions_binary(reader, origin),
    }
}

fn run_evaluate(args: EvaluateArgs, config: &Config) -> Result<()> {
    let graph = args.graph.load()?;
    let predictions = load_predictions_arg(&args.predictions, args.format.or(config.format))?;
    let mode = args
        .normalizer
        .or(config.normalizer)
        .unwrap_or(NormalizerMode::Derived);
    let jobs = args.jobs.or(config.jobs);
    let report = with_jobs(jobs, || evaluate(&graph, &predictions, mode))?;
    let data = if args.csv { report.to_csv() } else { report.to_json() };
    emit(args.output.as_deref(), &data)
}

fn write_predictions_arg(
    set: &PredictionSet,
    output: Option<&Path>,
    format: PredictionFormat,
) -> Result<()> {
    let (mut writer, origin): (Box<dyn Write>, &Path) = match output {
        Some(path) => (
            Box::new(std::io::BufWriter::new(
                std::fs::File::create(path).map_err(|e| Error::io(path, e))?,
            )),
            path,
        ),
        None => (Box::new(std::io::stdout().lock()), Path::new("<stdout>")),
    };
    match format {
        PredictionFormat::Jsonl => write_predictions_jsonl_to(set, &mut writer, origin)?,
        PredictionFormat::Bin => write_predictions_binary_to(set, &mut writer, origin)?,
    }
    writer.flush().map_err(|e| Error::io(origin, e))
}

fn warn_clamped(graph: &HierarchyGraph, profile: &CompetenceProfile) {
    let clamped = clamped_coverage_synsets(graph, profile);
    if !clamped.is_empty() {
        eprintln!(
            "note: coverage exceeds the subtree size for {} synsets and was clamped",
            clamped.len()
        );
    }
}

fn run_simulate(args: SimulateArgs, config: &Config) -> Result<()> {
    let graph = args.graph.load()?;
    let profile = args.profile.resolve(config)?;
    warn_clamped(&graph, &profile);
    let jobs = args.jobs.or(config.jobs);
    let set = with_jobs(jobs, || simulate(&graph, &profile, args.samples))?;
    let format = args.format.or(config.format).unwrap_or(PredictionFormat::Jsonl);
    write_predictions_arg(&set, args.output.as_deref(), format)
}

fn run_sweep(args: SweepArgs, config: &Config) -> Result<()> {
    let graph = args.graph.load()?;
    let profile = args.profile.resolve(config)?;
    warn_clamped(&graph, &profile);
    let mode = args
        .normalizer
        .or(config.normalizer)
        .unwrap_or(NormalizerMode::Derived);
    let jobs = args.jobs.or(config.jobs);
    let reports = with_jobs(jobs, || {
        guidance_sweep(&graph, &profile, &args.concentrations, args.samples, mode)
    })?;
    if let Some(dir) = &args.out_dir {
        std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
        for (c, report) in args.concentrations.iter().zip(&reports) {
            let path = dir.join(format!("report-c{c}.json"));
            report.save(&path)?;
        }
    }
    let mut out = String::from("concentration,aggregate_isp,aggregate_scs\n");
    for (c, report) in args.concentrations.iter().zip(&reports) {
        out.push_str(&format!("{c},{},{}\n", report.aggregate_isp, report.aggregate_scs));
    }
    emit(None, &out)
}

fn run_compare(args: CompareArgs) -> Result<()> {
    let a = MetricReport::load(&args.report_a)?;
    let b = MetricReport::load(&args.report_b)?;
    let diff = model_diff(&a, &b, args.metric)?;
    let data = if args.csv { diff.to_csv() } else { diff.to_json() };
    emit(args.output.as_deref(), &data)
}

fn run_worst(args: WorstArgs) -> Result<()> {
    let reports: Vec<MetricReport> = args
        .reports
        .iter()
        .map(|p| MetricReport::load(p))
        .collect::<Result<_>>()?;
    let ranked = if reports.len() == 1 {
        worst_synsets(&reports[0], args.metric, args.top)?
    } else {
        worst_synsets_mean(&reports, args.metric, args.top)?
    };
    let graph = match (&args.edges, &args.leaf_map) {
        (Some(edges), Some(leaf_map)) => Some(load_hierarchy(edges, leaf_map)?),
        _ => None,
    };
    let data = match (&graph, args.json, args.csv) {
        (_, _, true) => ranked_csv(&ranked),
        (Some(g), true, _) => {
            let mut s = serde_json::to_string_pretty(&annotate_prompts(g, &ranked)?)
                .expect("rankings serialize");
            s.push('\n');
            s
        }
        (None, true, _) => {
            let mut s = serde_json::to_string_pretty(&ranked).expect("rankings serialize");
            s.push('\n');
            s
        }
        (Some(g), false, false) => annotated_listing(&annotate_prompts(g, &ranked)?),
        (None, false, false) => {
            let mut out = String::new();
            for r in &ranked {
                out.push_str(&format!("{}  {:>8.4}\n", r.synset, r.value));
            }
            out
        }
    };
    emit(args.output.as_deref(), &data)
}

fn run_subtree(args: SubtreeArgs) -> Result<()> {
    let graph = args.graph.load()?;
    let report = MetricReport::load(&args.report)?;
    let rows = subtree_report(&report, &graph, &args.roots)?;
    let data = if args.csv {
        subtree_csv(&rows)
    } else {
        let mut s = serde_json::to_string_pretty(&rows).expect("aggregates serialize");
        s.push('\n');
        s
    };
    emit(args.output.as_deref(), &data)
}

fn run_corpus_count(args: CorpusCountArgs, config: &Config) -> Result<()> {
    let graph = args.graph.load()?;
    let policy = MatchingPolicy {
        count: match args.count_mode {
            CountModeArg::PerCaption => CountMode::PerCaption,
            CountModeArg::PerOccurrence => CountMode::PerOccurrence,
        },
        lemmas: match args.lemma_mode {
            LemmaModeArg::First => LemmaMode::First,
            LemmaModeArg::All => LemmaMode::All,
        },
    };
    let jobs = args.jobs.or(config.jobs);
    let table = with_jobs(jobs, || {
        count_concepts(&graph, policy, &args.shards, &args.corpus_id, args.tsv_column)
    })?;
    for reason in &table.skipped_shards {
        eprintln!("warning: skipped shard: {reason}");
    }
    if table.partial {
        eprintln!("warning: counts are partial ({} shards skipped)", table.skipped_shards.len());
    }
    let data = if args.csv { table.to_csv() } else { table.to_json() };
    emit(args.output.as_deref(), &data)
}

fn run_correlate(cmd: CorrelateCmd) -> Result<()> {
    match cmd {
        CorrelateCmd::Counts { counts, report, metric } => {
            let table = ConceptCountTable::load(&counts)?;
            let report = MetricReport::load(&report)?;
            let (rho, p) = frequency_correlation(&table, &report, metric)?;
            println!(
                "{}",
                serde_json::json!({ "metric": metric, "rho": rho, "p": p })
            );
            Ok(())
        }
        CorrelateCmd::Similarity { graph, embeddings, report, metric, similarities_out } => {
            let g = graph.load()?;
            let table = load_embeddings(&embeddings)?;
            let report = MetricReport::load(&report)?;
            let similarities = hyponym_similarity(&g, &table)?;
            if !similarities.skipped.is_empty() {
                eprintln!(
                    "note: {} evaluation synsets lacked embeddings and were skipped",
                    similarities.skipped.len()
                );
            }
            if let Some(path) = similarities_out {
                std::fs::write(&path, similarities.to_json()).map_err(|e| Error::io(&path, e))?;
            }
            let (rho, p) = similarity_metric_correlation(&similarities, &report, metric)?;
            println!(
                "{}",
                serde_json::json!({
                    "metric": metric,
                    "n": similarities.entries.len(),
                    "rho": rho,
                    "p": p,
                })
            );
            Ok(())
        }
        CorrelateCmd::Seeds { reports, metric } => {
            let reports: Vec<MetricReport> = reports
                .iter()
                .map(|p| MetricReport::load(p))
                .collect::<Result<_>>()?;
            let stability = pairwise_seed_correlation(&reports, metric)?;
            emit(None, &stability.to_json())
        }
    }
}

fn run_calibration(args: CalibrationArgs) -> Result<()> {
    let data = load_labeled_jsonl(&args.predictions)?;
    let curve = calibration_curve(&data, args.bins)?;
    let out = if args.csv {
        calibration_csv(&curve)
    } else {
        let mut s = serde_json::to_string_pretty(&serde_json::json!({
            "n_samples": data.n_rows(),
            "top1_accuracy": top1_accuracy(&data)?,
            "ece": ece(&data, args.bins)?,
            "bins": curve,
        }))
        .expect("curves serialize");
        s.push('\n');
        s
    };
    emit(args.output.as_deref(), &out)
}

fn run_agreement(args: AgreementArgs) -> Result<()> {
    let ratings = RatingMatrix::from_csv(&args.ratings)?;
    let alpha = krippendorff_alpha(&ratings)?;
    println!(
        "{}",
        serde_json::json!({
            "alpha": alpha,
            "n_items": ratings.n_items(),
            "n_raters": ratings.n_raters(),
            "n_categories": ratings.n_categories(),
            "pairable_items": ratings.pairable_items(),
        })
    );
    Ok(())
}
