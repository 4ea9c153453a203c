//! Concept frequency counting over large caption corpora.
//!
//! Counts, for every evaluation synset and every leaf, how often its
//! lemma appears in a line-oriented caption corpus, using one shared
//! Aho-Corasick pass per shard (all patterns matched simultaneously).
//! Matching is case-insensitive (ASCII lowercasing) and word-bounded:
//! a hit must not touch an alphanumeric codepoint on either side, so
//! "hotdog" never counts as "dog". Multi-word lemmas match as phrases
//! ("great white shark").
//!
//! Two policy axes:
//! * count mode — per-caption (a caption contributes at most 1 per
//!   synset; the default, robust to caption spam) or per-occurrence;
//! * lemma mode — first lemma only (mirroring the prompt construction)
//!   or all lemmas of the synset.
//!
//! Shards stream independently on the worker pool (gzip decoded on the
//! fly for `.gz` paths) and merge by summation, so sharding never
//! changes per-caption counts. Unreadable shards are skipped and
//! recorded, flagging the table as partial.

use std::collections::BTreeMap;
use std::fs::File;
use std::io::{BufRead, BufReader, Read};
use std::path::{Path, PathBuf};

use aho_corasick::{AhoCorasick, AhoCorasickKind, MatchKind};
use flate2::read::MultiGzDecoder;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hierarchy::HierarchyGraph;
use crate::metrics::{MetricKind, MetricReport};
use crate::stats::spearman;
use crate::synset::SynsetId;

/// Whether a caption can contribute more than once to one synset.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CountMode {
    /// Document frequency: at most 1 per (caption, synset).
    #[default]
    PerCaption,
    /// Raw occurrence frequency.
    PerOccurrence,
}

/// Which lemmas of a synset become match patterns.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum LemmaMode {
    /// Only the first lemma (the one used in prompts).
    #[default]
    First,
    /// Every annotated lemma.
    All,
}

/// The two policy axes together.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct MatchingPolicy {
    pub count: CountMode,
    pub lemmas: LemmaMode,
}

/// Count and display lemma for one synset.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConceptCount {
    /// First lemma, underscores replaced by spaces.
    pub lemma: String,
    pub count: u64,
}

/// Per-synset corpus frequencies plus provenance.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConceptCountTable {
    pub corpus_id: String,
    pub n_captions: u64,
    pub policy: MatchingPolicy,
    /// True when at least one shard could not be read.
    pub partial: bool,
    /// Paths of skipped shards with the reason.
    pub skipped_shards: Vec<String>,
    pub counts: BTreeMap<SynsetId, ConceptCount>,
}

impl ConceptCountTable {
    /// Count for one synset (0 when the synset carries no pattern).
    pub fn count(&self, synset: SynsetId) -> u64 {
        self.counts.get(&synset).map(|c| c.count).unwrap_or(0)
    }

    /// Merge another shard's table into this one (counts add,
    /// caption totals add, partial flags accumulate). Policies must
    /// match or per-caption semantics would silently change.
    pub fn merge(&mut self, other: ConceptCountTable) -> Result<()> {
        if self.policy != other.policy {
            return Err(Error::validation("cannot merge tables with different policies"));
        }
        self.n_captions += other.n_captions;
        self.partial |= other.partial;
        self.skipped_shards.extend(other.skipped_shards);
        for (synset, c) in other.counts {
            self.counts
                .entry(synset)
                .and_modify(|mine| mine.count += c.count)
                .or_insert(c);
        }
        Ok(())
    }

    /// CSV listing (`synset,lemma,count`), synsets ascending. Lemmas
    /// are quoted when they contain commas or quotes.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("synset,lemma,count\n");
        for (synset, c) in &self.counts {
            let lemma = if c.lemma.contains([',', '"']) {
                format!("\"{}\"", c.lemma.replace('"', "\"\""))
            } else {
                c.lemma.clone()
            };
            out.push_str(&format!("{synset},{lemma},{}\n", c.count));
        }
        out
    }

    /// The whole table as pretty JSON.
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("tables serialize");
        s.push('\n');
        s
    }

    /// Parse a table from JSON text.
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text)
            .map_err(|e| Error::validation(format!("bad count table JSON: {e}")))
    }

    /// Load a table from a JSON file.
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_json(&text).map_err(|e| Error::validation(format!("{}: {e}", path.display())))
    }
}

/// A compiled multi-pattern matcher over the graph's lemmas.
///
/// Patterns are the lemmas of every evaluation synset and every leaf
/// (first or all, per policy), lowercased, underscores to spaces. A
/// lemma shared by several synsets counts for each of them.
pub struct ConceptMatcher {
    automaton: AhoCorasick,
    /// Pattern index → synset slots it counts for.
    pattern_slots: Vec<Vec<u32>>,
    /// Slot → synset.
    synsets: Vec<SynsetId>,
    /// Slot → display lemma.
    display: Vec<String>,
    policy: MatchingPolicy,
}

impl ConceptMatcher {
    /// Compile the matcher for a graph under a policy. Synsets without
    /// lemma annotations are silently absent (they cannot be matched).
    pub fn new(graph: &HierarchyGraph, policy: MatchingPolicy) -> Result<Self> {
        let mut synsets = Vec::new();
        let mut display = Vec::new();
        let mut pattern_index: BTreeMap<String, Vec<u32>> = BTreeMap::new();
        let mut targets: Vec<SynsetId> = graph.evaluation_set().to_vec();
        targets.extend_from_slice(graph.leaves());
        targets.sort_unstable();
        targets.dedup();
        for synset in targets {
            let lemmas = graph.lemmas(synset).expect("targets are nodes");
            if lemmas.is_empty() {
                continue;
            }
            let slot = synsets.len() as u32;
            synsets.push(synset);
            display.push(lemmas[0].replace('_', " "));
            let chosen: &[String] = match policy.lemmas {
                LemmaMode::First => &lemmas[..1],
                LemmaMode::All => lemmas,
            };
            for lemma in chosen {
                let pattern = lemma.replace('_', " ").to_ascii_lowercase();
                if pattern.is_empty() {
                    continue;
                }
                pattern_index.entry(pattern).or_default().push(slot);
            }
        }
        if pattern_index.is_empty() {
            return Err(Error::validation("no lemma patterns to match"));
        }
        let (patterns, pattern_slots): (Vec<String>, Vec<Vec<u32>>) =
            pattern_index.into_iter().unzip();
        let automaton = AhoCorasick::builder()
            .match_kind(MatchKind::Standard)
            .kind(Some(AhoCorasickKind::DFA))
            .build(&patterns)
            .map_err(|e| Error::validation(format!("failed to build matcher: {e}")))?;
        Ok(ConceptMatcher { automaton, pattern_slots, synsets, display, policy })
    }

    /// Number of countable synsets.
    pub fn n_synsets(&self) -> usize {
        self.synsets.len()
    }

    fn empty_table(&self, corpus_id: &str) -> ConceptCountTable {
        let counts = self
            .synsets
            .iter()
            .zip(&self.display)
            .map(|(&s, d)| (s, ConceptCount { lemma: d.clone(), count: 0 }))
            .collect();
        ConceptCountTable {
            corpus_id: corpus_id.to_owned(),
            n_captions: 0,
            policy: self.policy,
            partial: false,
            skipped_shards: Vec::new(),
            counts,
        }
    }

    /// Count one caption into `slot_counts`, using `stamps` to dedupe
    /// per-caption hits (stamp = caption ordinal).
    fn count_caption(
        &self,
        caption: &str,
        stamp: u64,
        stamps: &mut [u64],
        slot_counts: &mut [u64],
        lower_buf: &mut String,
    ) {
        lower_buf.clear();
        lower_buf.push_str(caption);
        lower_buf.make_ascii_lowercase();
        let hay = lower_buf.as_str();
        for m in self.automaton.find_overlapping_iter(hay) {
            if !word_bounded(hay, m.start(), m.end()) {
                continue;
            }
            for &slot in &self.pattern_slots[m.pattern().as_usize()] {
                match self.policy.count {
                    CountMode::PerCaption => {
                        if stamps[slot as usize] != stamp {
                            stamps[slot as usize] = stamp;
                            slot_counts[slot as usize] += 1;
                        }
                    }
                    CountMode::PerOccurrence => {
                        slot_counts[slot as usize] += 1;
                    }
                }
            }
        }
    }

    /// Count every caption readable from `reader` (one per line;
    /// `tsv_column` selects a tab-separated field instead of the whole
    /// line — lines without that field are ignored).
    pub fn count_reader(
        &self,
        reader: impl BufRead,
        corpus_id: &str,
        tsv_column: Option<usize>,
    ) -> Result<ConceptCountTable> {
        let mut table = self.empty_table(corpus_id);
        let mut slot_counts = vec![0u64; self.synsets.len()];
        // Stamp 0 means "never seen"; caption ordinals start at 1.
        let mut stamps = vec![0u64; self.synsets.len()];
        let mut lower = String::new();
        let mut caption_no = 0u64;
        for line in reader.lines() {
            let line = line.map_err(|e| Error::io(corpus_id, e))?;
            let caption = match tsv_column {
                None => line.as_str(),
                Some(col) => match line.split('\t').nth(col) {
                    Some(field) => field,
                    None => continue,
                },
            };
            caption_no += 1;
            self.count_caption(caption, caption_no, &mut stamps, &mut slot_counts, &mut lower);
        }
        table.n_captions = caption_no;
        for (slot, &count) in slot_counts.iter().enumerate() {
            table.counts.get_mut(&self.synsets[slot]).expect("slot synsets present").count = count;
        }
        Ok(table)
    }

    /// Count an in-memory corpus (one caption per line).
    pub fn count_text(&self, text: &str, corpus_id: &str) -> Result<ConceptCountTable> {
        self.count_reader(std::io::Cursor::new(text), corpus_id, None)
    }
}

/// True when the byte range `[start, end)` of `hay` touches no
/// alphanumeric codepoint on either side.
fn word_bounded(hay: &str, start: usize, end: usize) -> bool {
    let before_ok = hay[..start]
        .chars()
        .next_back()
        .map(|c| !c.is_alphanumeric())
        .unwrap_or(true);
    let after_ok = hay[end..]
        .chars()
        .next()
        .map(|c| !c.is_alphanumeric())
        .unwrap_or(true);
    before_ok && after_ok
}

fn open_shard(path: &Path) -> Result<Box<dyn BufRead + Send>> {
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    let reader: Box<dyn Read + Send> = if path.extension().is_some_and(|e| e == "gz") {
        Box::new(MultiGzDecoder::new(file))
    } else {
        Box::new(file)
    };
    Ok(Box::new(BufReader::with_capacity(1 << 16, reader)))
}

/// Count concepts across corpus shards.
///
/// Shards run on the worker pool, each against the shared automaton
/// with a private table; tables merge by summation in path order, so
/// results are independent of the worker count. Unreadable shards are
/// skipped, recorded in `skipped_shards`, and flip the `partial` flag.
pub fn count_concepts(
    graph: &HierarchyGraph,
    policy: MatchingPolicy,
    shards: &[PathBuf],
    corpus_id: &str,
    tsv_column: Option<usize>,
) -> Result<ConceptCountTable> {
    if shards.is_empty() {
        return Err(Error::usage("no corpus shards given"));
    }
    let matcher = ConceptMatcher::new(graph, policy)?;
    let results: Vec<std::result::Result<ConceptCountTable, String>> = shards
        .par_iter()
        .map(|path| {
            let reader = open_shard(path).map_err(|e| format!("{}: {e}", path.display()))?;
            matcher
                .count_reader(reader, &path.display().to_string(), tsv_column)
                .map_err(|e| format!("{}: {e}", path.display()))
        })
        .collect();
    let mut table = matcher.empty_table(corpus_id);
    for result in results {
        match result {
            Ok(shard_table) => table.merge(shard_table)?,
            Err(reason) => {
                table.partial = true;
                table.skipped_shards.push(reason);
            }
        }
    }
    table.corpus_id = corpus_id.to_owned();
    Ok(table)
}

/// Spearman correlation between corpus counts and a per-synset metric,
/// over the synsets present in both (SCS-excluded synsets dropped).
pub fn frequency_correlation(
    counts: &ConceptCountTable,
    report: &MetricReport,
    metric: MetricKind,
) -> Result<(f64, f64)> {
    let mut x = Vec::new();
    let mut y = Vec::new();
    for m in &report.synsets {
        let Some(c) = counts.counts.get(&m.synset) else {
            continue;
        };
        let Some(value) = metric.value_of(m) else {
            continue;
        };
        x.push(c.count as f64);
        y.push(value);
    }
    if x.len() < 3 {
        return Err(Error::validation(format!(
            "only {} synsets are shared between the count table and the report; need 3",
            x.len()
        )));
    }
    spearman(&x, &y)
}
