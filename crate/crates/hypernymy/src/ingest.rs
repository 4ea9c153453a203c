//! Ingestion of externally produced classifier predictions and text
//! embeddings, plus the full/conditional distribution kernels.
//!
//! Predictions arrive as one row per generated sample: the classifier's
//! logits or probabilities over the leaf classes. Two on-disk formats are
//! supported and hold bit-identical `f32` payloads:
//!
//! * **JSONL** for interop: one object per sample,
//!   `{"synset": "n...", "sample": 0, "kind": "logits", "values": [...]}`;
//! * **packed binary** for bulk dumps (`HLPR` magic): fixed-size records,
//!   little-endian, written and read in streaming fashion.
//!
//! Embeddings arrive as JSONL `{"synset": "n...", "vector": [...]}`.

use std::collections::BTreeMap;
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hierarchy::ClassifiableSubtree;
use crate::numeric::{softmax_into, softmax_subset, KahanSum};
use crate::synset::SynsetId;

/// Whether prediction rows hold raw logits or normalized probabilities.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PredictionKind {
    Logits,
    Probabilities,
}

impl PredictionKind {
    fn code(self) -> u8 {
        match self {
            PredictionKind::Logits => 0,
            PredictionKind::Probabilities => 1,
        }
    }

    fn from_code(code: u8) -> Result<Self> {
        match code {
            0 => Ok(PredictionKind::Logits),
            1 => Ok(PredictionKind::Probabilities),
            other => Err(Error::validation(format!("unknown prediction kind code {other}"))),
        }
    }
}

/// The prediction rows for one synset: `n_samples × n_classes`, row-major,
/// sample index = row position.
#[derive(Clone, Debug, PartialEq)]
pub struct SampleMatrix {
    n_classes: usize,
    values: Vec<f32>,
}

impl SampleMatrix {
    /// Wrap a row-major buffer; `values.len()` must be a multiple of
    /// `n_classes`.
    pub fn new(n_classes: usize, values: Vec<f32>) -> Result<Self> {
        if n_classes == 0 || values.is_empty() || values.len() % n_classes != 0 {
            return Err(Error::validation(format!(
                "sample matrix of {} values is not a positive multiple of {n_classes} classes",
                values.len()
            )));
        }
        Ok(SampleMatrix { n_classes, values })
    }

    pub fn n_samples(&self) -> usize {
        self.values.len() / self.n_classes
    }

    pub fn n_classes(&self) -> usize {
        self.n_classes
    }

    /// Row for sample `i`.
    pub fn row(&self, i: usize) -> &[f32] {
        &self.values[i * self.n_classes..(i + 1) * self.n_classes]
    }

    /// Rows in ascending sample order.
    pub fn rows(&self) -> impl Iterator<Item = &[f32]> {
        self.values.chunks_exact(self.n_classes)
    }

    /// Whether every row is bitwise identical to the first.
    pub fn all_rows_identical(&self) -> bool {
        let first = self.row(0);
        self.rows().all(|r| {
            r.iter()
                .zip(first)
                .all(|(a, b)| a.to_bits() == b.to_bits())
        })
    }
}

/// A validated set of prediction rows keyed by synset.
#[derive(Clone, Debug, PartialEq)]
pub struct PredictionSet {
    /// Free-form model identifier carried into reports.
    pub model_id: String,
    /// Generation seed carried into reports (0 when unknown).
    pub seed: u64,
    kind: PredictionKind,
    n_classes: usize,
    data: BTreeMap<SynsetId, SampleMatrix>,
}

impl PredictionSet {
    /// Empty set for programmatic construction (e.g. the simulator).
    pub fn new(model_id: impl Into<String>, seed: u64, kind: PredictionKind, n_classes: usize) -> Self {
        PredictionSet {
            model_id: model_id.into(),
            seed,
            kind,
            n_classes,
            data: BTreeMap::new(),
        }
    }

    pub fn kind(&self) -> PredictionKind {
        self.kind
    }

    pub fn n_classes(&self) -> usize {
        self.n_classes
    }

    /// Number of synsets with rows.
    pub fn len(&self) -> usize {
        self.data.len()
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    /// Insert (or replace) the matrix for `synset`, validating rows.
    pub fn insert(&mut self, synset: SynsetId, matrix: SampleMatrix) -> Result<()> {
        if matrix.n_classes() != self.n_classes {
            return Err(Error::validation(format!(
                "synset {synset}: rows have {} classes, expected {}",
                matrix.n_classes(),
                self.n_classes
            )));
        }
        for (i, row) in matrix.rows().enumerate() {
            validate_row(self.kind, row)
                .map_err(|e| Error::validation(format!("synset {synset} sample {i}: {e}")))?;
        }
        self.data.insert(synset, matrix);
        Ok(())
    }

    /// Rows for one synset.
    pub fn matrix(&self, synset: SynsetId) -> Option<&SampleMatrix> {
        self.data.get(&synset)
    }

    /// Iterate synsets in ascending order.
    pub fn iter(&self) -> impl Iterator<Item = (SynsetId, &SampleMatrix)> {
        self.data.iter().map(|(k, v)| (*k, v))
    }

    /// Synsets in ascending order.
    pub fn synsets(&self) -> impl Iterator<Item = SynsetId> + '_ {
        self.data.keys().copied()
    }

    /// The common sample count, when every synset has the same.
    pub fn uniform_n_samples(&self) -> Option<usize> {
        let mut it = self.data.values().map(SampleMatrix::n_samples);
        let first = it.next()?;
        it.all(|n| n == first).then_some(first)
    }

    /// Largest per-synset sample count (0 when empty).
    pub fn max_n_samples(&self) -> usize {
        self.data.values().map(SampleMatrix::n_samples).max().unwrap_or(0)
    }
}

/// Reject non-finite values; in probability mode also enforce
/// non-negativity and unit sum (±1e-6).
fn validate_row(kind: PredictionKind, row: &[f32]) -> std::result::Result<(), String> {
    if let Some(pos) = row.iter().position(|v| !v.is_finite()) {
        return Err(format!("non-finite value at class {pos}"));
    }
    if kind == PredictionKind::Probabilities {
        if let Some(pos) = row.iter().position(|v| *v < 0.0) {
            return Err(format!("negative probability at class {pos}"));
        }
        let mut sum = KahanSum::new();
        for &v in row {
            sum.add(v as f64);
        }
        let sum = sum.total();
        if (sum - 1.0).abs() > 1e-6 {
            return Err(format!("probability row sums to {sum}, not 1"));
        }
    }
    Ok(())
}

/// One JSONL prediction record.
#[derive(Serialize, Deserialize)]
struct JsonRow {
    synset: SynsetId,
    sample: u32,
    kind: PredictionKind,
    values: Vec<f32>,
}

/// Load predictions from either format, sniffing the binary magic.
pub fn load_predictions(path: &Path) -> Result<PredictionSet> {
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    load_predictions_reader(BufReader::new(file), path)
}

/// Load predictions from any buffered reader (e.g. a pipe), sniffing
/// the format from the leading magic bytes; `origin` labels errors and
/// names the model.
pub fn load_predictions_reader(
    mut reader: impl BufRead,
    origin: &Path,
) -> Result<PredictionSet> {
    let mut head = Vec::with_capacity(4);
    reader
        .by_ref()
        .take(4)
        .read_to_end(&mut head)
        .map_err(|e| Error::io(origin, e))?;
    let is_binary = head == BINARY_MAGIC;
    let rejoined = BufReader::new(std::io::Cursor::new(head).chain(reader));
    if is_binary {
        read_predictions_binary(rejoined, origin)
    } else {
        read_predictions_jsonl(rejoined, origin)
    }
}

fn model_id_from(path: &Path) -> String {
    path.file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "unknown".to_owned())
}

/// Assemble per-synset matrices from unordered (synset, sample, row)
/// records; sample indices must form `0..n` exactly once per synset.
fn assemble(
    path: &Path,
    kind: PredictionKind,
    n_classes: usize,
    mut rows: BTreeMap<SynsetId, Vec<(u32, Vec<f32>)>>,
) -> Result<PredictionSet> {
    let mut set = PredictionSet::new(model_id_from(path), 0, kind, n_classes);
    for (synset, mut samples) in std::mem::take(&mut rows) {
        samples.sort_by_key(|(i, _)| *i);
        for (pos, (i, _)) in samples.iter().enumerate() {
            if *i as usize != pos {
                return Err(Error::validation(format!(
                    "synset {synset}: sample indices must cover 0..{} exactly once (got index {i} at position {pos})",
                    samples.len()
                )));
            }
        }
        let mut values = Vec::with_capacity(samples.len() * n_classes);
        for (_, row) in samples {
            values.extend_from_slice(&row);
        }
        set.insert(synset, SampleMatrix::new(n_classes, values)?)?;
    }
    Ok(set)
}

/// Load the JSONL prediction format.
pub fn load_predictions_jsonl(path: &Path) -> Result<PredictionSet> {
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    read_predictions_jsonl(BufReader::new(file), path)
}

pub(crate) fn read_predictions_jsonl(reader: impl BufRead, path: &Path) -> Result<PredictionSet> {
    let mut rows: BTreeMap<SynsetId, Vec<(u32, Vec<f32>)>> = BTreeMap::new();
    let mut kind: Option<PredictionKind> = None;
    let mut n_classes: Option<usize> = None;
    for (lineno, line) in std::io::BufRead::lines(reader).enumerate() {
        let line = line.map_err(|e| Error::io(path, e))?;
        if line.trim().is_empty() {
            continue;
        }
        let row: JsonRow = serde_json::from_str(&line)
            .map_err(|e| Error::parse(path, lineno + 1, e.to_string()))?;
        let k = *kind.get_or_insert(row.kind);
        if row.kind != k {
            return Err(Error::parse(path, lineno + 1, "mixed prediction kinds in one file"));
        }
        let n = *n_classes.get_or_insert(row.values.len());
        if row.values.len() != n {
            return Err(Error::parse(
                path,
                lineno + 1,
                format!("row has {} values, expected {n}", row.values.len()),
            ));
        }
        let duplicate = rows
            .get(&row.synset)
            .is_some_and(|v| v.iter().any(|(i, _)| *i == row.sample));
        if duplicate {
            return Err(Error::parse(
                path,
                lineno + 1,
                format!("duplicate record for synset {} sample {}", row.synset, row.sample),
            ));
        }
        rows.entry(row.synset).or_default().push((row.sample, row.values));
    }
    let (Some(kind), Some(n_classes)) = (kind, n_classes) else {
        return Err(Error::validation(format!("{}: no prediction records", path.display())));
    };
    assemble(path, kind, n_classes, rows)
}

/// Write the JSONL prediction format (synsets ascending, samples ascending).
pub fn write_predictions_jsonl(set: &PredictionSet, path: &Path) -> Result<()> {
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut out = BufWriter::new(file);
    write_predictions_jsonl_to(set, &mut out, path)?;
    out.flush().map_err(|e| Error::io(path, e))
}

/// Write the JSONL prediction format to any writer; `origin` labels
/// I/O errors.
pub fn write_predictions_jsonl_to(
    set: &PredictionSet,
    mut out: impl Write,
    origin: &Path,
) -> Result<()> {
    let path = origin;
    for (synset, matrix) in set.iter() {
        for (sample, row) in matrix.rows().enumerate() {
            let record = JsonRow {
                synset,
                sample: sample as u32,
                kind: set.kind(),
                values: row.to_vec(),
            };
            serde_json::to_writer(&mut out, &record).map_err(|e| {
                Error::io(path, std::io::Error::new(std::io::ErrorKind::Other, e))
            })?;
            out.write_all(b"\n").map_err(|e| Error::io(path, e))?;
        }
    }
    out.flush().map_err(|e| Error::io(path, e))
}

const BINARY_MAGIC: &[u8; 4] = b"HLPR";
const BINARY_VERSION: u16 = 1;

/// Load the packed binary prediction format.
pub fn load_predictions_binary(path: &Path) -> Result<PredictionSet> {
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    read_predictions_binary(BufReader::new(file), path)
}

pub(crate) fn read_predictions_binary(mut reader: impl BufRead, path: &Path) -> Result<PredictionSet> {
    let io_err = |e: std::io::Error| Error::io(path, e);

    let mut header = [0u8; 4 + 2 + 1 + 4 + 8];
    reader.read_exact(&mut header).map_err(io_err)?;
    if &header[0..4] != BINARY_MAGIC {
        return Err(Error::validation(format!(
            "{}: missing HLPR magic; not a binary prediction file",
            path.display()
        )));
    }
    let version = u16::from_le_bytes([header[4], header[5]]);
    if version != BINARY_VERSION {
        return Err(Error::validation(format!(
            "{}: unsupported binary version {version}",
            path.display()
        )));
    }
    let kind = PredictionKind::from_code(header[6])?;
    let n_classes = u32::from_le_bytes(header[7..11].try_into().unwrap()) as usize;
    let n_records = u64::from_le_bytes(header[11..19].try_into().unwrap());
    if n_classes == 0 {
        return Err(Error::validation(format!("{}: zero classes", path.display())));
    }

    let mut rows: BTreeMap<SynsetId, Vec<(u32, Vec<f32>)>> = BTreeMap::new();
    let mut fixed = [0u8; 12];
    let mut payload = vec![0u8; n_classes * 4];
    for record in 0..n_records {
        reader.read_exact(&mut fixed).map_err(|e| {
            Error::parse(path, record as usize + 1, format!("truncated record: {e}"))
        })?;
        let offset = u64::from_le_bytes(fixed[0..8].try_into().unwrap());
        let sample = u32::from_le_bytes(fixed[8..12].try_into().unwrap());
        let synset = u32::try_from(offset)
            .ok()
            .and_then(|o| SynsetId::new(o).ok())
            .ok_or_else(|| {
                Error::parse(path, record as usize + 1, format!("bad synset offset {offset}"))
            })?;
        reader.read_exact(&mut payload).map_err(|e| {
            Error::parse(path, record as usize + 1, format!("truncated record: {e}"))
        })?;
        let values: Vec<f32> = payload
            .chunks_exact(4)
            .map(|b| f32::from_le_bytes(b.try_into().unwrap()))
            .collect();
        let duplicate = rows
            .get(&synset)
            .is_some_and(|v| v.iter().any(|(i, _)| *i == sample));
        if duplicate {
            return Err(Error::parse(
                path,
                record as usize + 1,
                format!("duplicate record for synset {synset} sample {sample}"),
            ));
        }
        rows.entry(synset).or_default().push((sample, values));
    }
    if rows.is_empty() {
        return Err(Error::validation(format!("{}: no prediction records", path.display())));
    }
    assemble(path, kind, n_classes, rows)
}

/// Write the packed binary prediction format (synsets ascending, samples
/// ascending).
pub fn write_predictions_binary(set: &PredictionSet, path: &Path) -> Result<()> {
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut out = BufWriter::new(file);
    write_predictions_binary_to(set, &mut out, path)?;
    out.flush().map_err(|e| Error::io(path, e))
}

/// Write the packed binary prediction format to any writer; `origin`
/// labels I/O errors.
pub fn write_predictions_binary_to(
    set: &PredictionSet,
    mut out: impl Write,
    origin: &Path,
) -> Result<()> {
    let io_err = |e: std::io::Error| Error::io(origin, e);

    let n_records: u64 = set.iter().map(|(_, m)| m.n_samples() as u64).sum();
    out.write_all(BINARY_MAGIC).map_err(io_err)?;
    out.write_all(&BINARY_VERSION.to_le_bytes()).map_err(io_err)?;
    out.write_all(&[set.kind().code()]).map_err(io_err)?;
    out.write_all(&(set.n_classes() as u32).to_le_bytes()).map_err(io_err)?;
    out.write_all(&n_records.to_le_bytes()).map_err(io_err)?;
    for (synset, matrix) in set.iter() {
        for (sample, row) in matrix.rows().enumerate() {
            out.write_all(&(synset.offset() as u64).to_le_bytes()).map_err(io_err)?;
            out.write_all(&(sample as u32).to_le_bytes()).map_err(io_err)?;
            for &v in row {
                out.write_all(&v.to_le_bytes()).map_err(io_err)?;
            }
        }
    }
    out.flush().map_err(io_err)
}

/// Turn one prediction row into the full probability distribution.
///
/// Logit rows pass through a max-shifted softmax; probability rows are
/// returned as-is (already validated at ingest).
pub fn full_distribution(row: &[f32], kind: PredictionKind) -> Vec<f64> {
    let mut out = vec![0.0f64; row.len()];
    full_distribution_into(row, kind, &mut out);
    out
}

/// As [`full_distribution`] but writing into a caller-provided buffer.
pub fn full_distribution_into(row: &[f32], kind: PredictionKind, out: &mut [f64]) {
    match kind {
        PredictionKind::Logits => softmax_into(row, out),
        PredictionKind::Probabilities => {
            for (o, &v) in out.iter_mut().zip(row) {
                *o = v as f64;
            }
        }
    }
}

/// The conditional distribution over a classifiable subtree, plus whether
/// the degenerate zero-mass fallback fired.
#[derive(Clone, Debug, PartialEq)]
pub struct HyponymDistribution {
    /// Probabilities aligned with `subtree.leaf_indices()`.
    pub probabilities: Vec<f64>,
    /// True when a probability row had zero mass inside the subtree and
    /// the uniform fallback was substituted.
    pub degenerate: bool,
}

/// Condition one prediction row on a classifiable subtree.
///
/// For logit rows this is the softmax over the subtree's class positions;
/// for probability rows it is restriction + renormalization. The two
/// characterizations agree to 1e-12 on the same underlying row (the
/// subset softmax *is* the renormalized full softmax, computed without
/// forming the full distribution).
///
/// Probability rows with exactly zero subtree mass cannot be normalized;
/// the uniform distribution over the subtree is substituted and flagged.
pub fn hyponym_distribution(
    row: &[f32],
    kind: PredictionKind,
    subtree: &ClassifiableSubtree,
) -> HyponymDistribution {
    let indices = subtree.leaf_indices();
    debug_assert!(!indices.is_empty());
    match kind {
        PredictionKind::Logits => HyponymDistribution {
            probabilities: softmax_subset(row, indices),
            degenerate: false,
        },
        PredictionKind::Probabilities => {
            let mut mass = KahanSum::new();
            for &i in indices {
                mass.add(row[i as usize] as f64);
            }
            let mass = mass.total();
            if mass <= 0.0 {
                let uniform = 1.0 / indices.len() as f64;
                return HyponymDistribution {
                    probabilities: vec![uniform; indices.len()],
                    degenerate: true,
                };
            }
            HyponymDistribution {
                probabilities: indices.iter().map(|&i| row[i as usize] as f64 / mass).collect(),
                degenerate: false,
            }
        }
    }
}

/// Synset-keyed embedding vectors of a fixed dimension.
#[derive(Clone, Debug, PartialEq)]
pub struct EmbeddingTable {
    dim: usize,
    data: BTreeMap<SynsetId, Vec<f32>>,
}

impl EmbeddingTable {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.data.len()
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn get(&self, synset: SynsetId) -> Option<&[f32]> {
        self.data.get(&synset).map(Vec::as_slice)
    }

    pub fn synsets(&self) -> impl Iterator<Item = SynsetId> + '_ {
        self.data.keys().copied()
    }

    /// Build from (synset, vector) pairs, validating dimensions, finite
    /// entries, and nonzero norms.
    pub fn from_pairs(pairs: impl IntoIterator<Item = (SynsetId, Vec<f32>)>) -> Result<Self> {
        let mut dim = None;
        let mut data = BTreeMap::new();
        for (synset, vector) in pairs {
            let d = *dim.get_or_insert(vector.len());
            if vector.len() != d {
                return Err(Error::validation(format!(
                    "embedding for {synset} has dimension {}, expected {d}",
                    vector.len()
                )));
            }
            if vector.iter().any(|v| !v.is_finite()) {
                return Err(Error::validation(format!("embedding for {synset} has non-finite entries")));
            }
            let norm: f64 = vector.iter().map(|&v| (v as f64) * (v as f64)).sum();
            if norm == 0.0 {
                return Err(Error::validation(format!("embedding for {synset} has zero norm")));
            }
            if data.insert(synset, vector).is_some() {
                return Err(Error::validation(format!("duplicate embedding for {synset}")));
            }
        }
        let Some(dim) = dim else {
            return Err(Error::validation("no embedding records"));
        };
        Ok(EmbeddingTable { dim, data })
    }
}

#[derive(Deserialize)]
struct EmbeddingRow {
    synset: SynsetId,
    vector: Vec<f32>,
}

/// Load a JSONL embedding table: `{"synset": "n...", "vector": [...]}`.
pub fn load_embeddings(path: &Path) -> Result<EmbeddingTable> {
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    let reader = BufReader::new(file);
    let mut pairs = Vec::new();
    for (lineno, line) in std::io::BufRead::lines(reader).enumerate() {
        let line = line.map_err(|e| Error::io(path, e))?;
        if line.trim().is_empty() {
            continue;
        }
        let row: EmbeddingRow = serde_json::from_str(&line)
            .map_err(|e| Error::parse(path, lineno + 1, e.to_string()))?;
        pairs.push((row.synset, row.vector));
    }
    EmbeddingTable::from_pairs(pairs)
}
