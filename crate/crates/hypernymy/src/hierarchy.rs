//! The hypernym hierarchy: loading, validation, subtree queries, and
//! prompt manifests.
//!
//! The hierarchy is a DAG of noun synsets connected by hypernym ("is-a")
//! edges. A fixed subset of nodes — the *leaves* — carries classifier
//! class indices (for ImageNet-1k, indices `0..=999` in canonical order).
//! Every other node must be an ancestor of at least one leaf, and exactly
//! one node (the root, "entity" in WordNet) has no hypernym.
//!
//! Two derived structures drive all downstream metrics:
//!
//! * the **classifiable subtree** `A(s)` of a synset `s`: the class
//!   indices of all leaves reachable downward from `s`;
//! * the **evaluation set**: all strict ancestors of leaves (the leaves
//!   themselves are excluded), i.e. the synsets that get prompted.
//!
//! Multiple parents are fully supported: WordNet noun hypernymy is a DAG,
//! and `A(s)` is defined by reachability, which subsumes the tree case.

use std::collections::HashMap;
use std::fmt;
use std::fs;
use std::io::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::synset::SynsetId;

/// The classifiable subtree `A(s)`: class indices of all leaves reachable
/// downward from `synset` (including `synset` itself if it is a leaf).
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassifiableSubtree {
    synset: SynsetId,
    /// Sorted, deduplicated class indices.
    leaf_indices: Vec<u32>,
}

impl ClassifiableSubtree {
    /// Build a subtree from explicit class indices (useful for synthetic
    /// setups; hierarchies built from files derive these automatically).
    /// Indices are sorted and must be non-empty and duplicate-free.
    pub fn from_indices(synset: SynsetId, mut leaf_indices: Vec<u32>) -> Result<Self> {
        if leaf_indices.is_empty() {
            return Err(Error::validation(format!("subtree of {synset} has no leaves")));
        }
        leaf_indices.sort_unstable();
        if leaf_indices.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::validation(format!(
                "subtree of {synset} has duplicate class indices"
            )));
        }
        Ok(ClassifiableSubtree { synset, leaf_indices })
    }

    /// The synset this subtree belongs to.
    pub fn synset(&self) -> SynsetId {
        self.synset
    }

    /// Sorted class indices of the reachable leaves.
    pub fn leaf_indices(&self) -> &[u32] {
        &self.leaf_indices
    }

    /// Number of reachable leaves.
    pub fn len(&self) -> usize {
        self.leaf_indices.len()
    }

    /// A valid subtree is never empty.
    pub fn is_empty(&self) -> bool {
        self.leaf_indices.is_empty()
    }

    /// Whether `class_index` lies inside the subtree.
    pub fn contains(&self, class_index: u32) -> bool {
        self.leaf_indices.binary_search(&class_index).is_ok()
    }
}

/// One prompt line: the synset, its display lemma, and the final prompt.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PromptEntry {
    pub synset: SynsetId,
    pub lemma: String,
    pub prompt: String,
}

/// Prompts for every evaluation-set synset, in sorted synset order.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PromptManifest {
    pub entries: Vec<PromptEntry>,
}

impl PromptManifest {
    /// Serialize as JSON lines (one entry object per line).
    pub fn to_jsonl(&self) -> String {
        let mut out = String::new();
        for entry in &self.entries {
            out.push_str(&serde_json::to_string(entry).expect("manifest entries serialize"));
            out.push('\n');
        }
        out
    }
}

/// Build the prompt for a raw lemma.
///
/// Underscores become spaces; the article is "an" exactly when the lemma
/// starts with a vowel *letter* (a, e, i, o, u, case-insensitive). The
/// letter rule is a deliberate convention: it is deterministic and
/// matches the reference examples ("a dog", "an oven"), at the cost of
/// phonetic edge cases like "an hour".
pub fn prompt_for_lemma(lemma: &str) -> String {
    let text = lemma.replace('_', " ");
    let article = match text.chars().next().map(|c| c.to_ascii_lowercase()) {
        Some('a' | 'e' | 'i' | 'o' | 'u') => "an",
        _ => "a",
    };
    format!("An image of {article} {text}.")
}

/// Aggregate facts about a loaded hierarchy.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct GraphStats {
    pub nodes: usize,
    pub edges: usize,
    pub leaves: usize,
    pub evaluation_synsets: usize,
    /// Evaluation synsets whose subtree contains exactly one leaf.
    pub singleton_subtrees: usize,
    /// Nodes with more than one hypernym (DAG, not tree, when > 0).
    pub multi_parent_nodes: usize,
    /// Longest root-to-node path length in edges.
    pub max_depth: usize,
    pub root: SynsetId,
}

/// An immutable, validated hypernym hierarchy.
///
/// Construction precomputes every classifiable subtree, the evaluation
/// set, and per-node minimum leaf distances, so all queries afterwards
/// are lookups. The graph is safe to share across threads.
pub struct HierarchyGraph {
    /// All synsets, sorted ascending; node index = position here.
    ids: Vec<SynsetId>,
    /// Hypernym adjacency: node -> parent node indices (sorted).
    parents: Vec<Vec<u32>>,
    /// Reverse adjacency: node -> child node indices (sorted).
    children: Vec<Vec<u32>>,
    /// Lemmas per node (may be empty when no annotation was provided).
    lemmas: Vec<Vec<String>>,
    /// Class index per node; `None` for internal synsets.
    class_index: Vec<Option<u32>>,
    /// Leaves in class-index order.
    leaves: Vec<SynsetId>,
    /// Node index of the unique root.
    root: u32,
    /// Precomputed subtree per node (aligned with `ids`).
    subtrees: Vec<ClassifiableSubtree>,
    /// Strict ancestors of leaves, sorted.
    evaluation: Vec<SynsetId>,
    /// Minimum downward edge distance to a leaf, per node.
    leaf_distance: Vec<u32>,
    edge_count: usize,
}

impl HierarchyGraph {
    /// Construct and fully validate a hierarchy from raw parts.
    ///
    /// `edges` are `(child, parent)` hypernym pairs; `leaves` are
    /// `(class_index, synset, lemmas)` triples and must cover the
    /// contiguous index range `0..leaves.len()`; `extra_lemmas` annotates
    /// internal synsets that appear in `edges`.
    pub fn from_parts(
        edges: &[(SynsetId, SynsetId)],
        leaves: &[(u32, SynsetId, Vec<String>)],
        extra_lemmas: &[(SynsetId, Vec<String>)],
    ) -> Result<Self> {
        if leaves.is_empty() {
            return Err(Error::validation("leaf map declares no classes"));
        }

        // Node universe: every edge endpoint plus every declared leaf.
        let mut ids: Vec<SynsetId> = Vec::with_capacity(edges.len() + leaves.len());
        for &(c, p) in edges {
            ids.push(c);
            ids.push(p);
        }
        for &(_, s, _) in leaves {
            ids.push(s);
        }
        ids.sort_unstable();
        ids.dedup();
        let n = ids.len();
        let index_of = |id: SynsetId| ids.binary_search(&id).map(|i| i as u32);

        // Leaf table: indices must form 0..k exactly once each.
        let k = leaves.len();
        let mut leaf_ids: Vec<Option<SynsetId>> = vec![None; k];
        let mut class_index: Vec<Option<u32>> = vec![None; n];
        let mut lemmas: Vec<Vec<String>> = vec![Vec::new(); n];
        for (ci, s, lm) in leaves {
            let ci = *ci as usize;
            if ci >= k {
                return Err(Error::validation(format!(
                    "class index {ci} out of range for {k} declared classes (indices must be 0..{k})"
                )));
            }
            if leaf_ids[ci].is_some() {
                return Err(Error::validation(format!("duplicate class index {ci}")));
            }
            let node = index_of(*s).expect("leaf is in universe") as usize;
            if class_index[node].is_some() {
                return Err(Error::validation(format!(
                    "synset {s} declared as more than one class"
                )));
            }
            leaf_ids[ci] = Some(*s);
            class_index[node] = Some(ci as u32);
            lemmas[node] = lm.clone();
        }
        let leaves_ordered: Vec<SynsetId> = leaf_ids
            .into_iter()
            .map(|o| o.expect("contiguity checked via range+duplicates"))
            .collect();

        for (s, lm) in extra_lemmas {
            let node = index_of(*s).map_err(|_| {
                Error::validation(format!("lemma annotation for unknown synset {s}"))
            })? as usize;
            if class_index[node].is_some() {
                return Err(Error::validation(format!(
                    "synset {s} has both a class line and a '-' lemma line"
                )));
            }
            lemmas[node] = lm.clone();
        }

        // Adjacency (deduplicated).
        let mut parents: Vec<Vec<u32>> = vec![Vec::new(); n];
        let mut children: Vec<Vec<u32>> = vec![Vec::new(); n];
        for &(c, p) in edges {
            if c == p {
                return Err(Error::validation(format!("self-loop on {c}")));
            }
            let ci = index_of(c).expect("endpoint in universe");
            let pi = index_of(p).expect("endpoint in universe");
            parents[ci as usize].push(pi);
            children[pi as usize].push(ci);
        }
        let mut edge_count = 0;
        for list in parents.iter_mut().chain(children.iter_mut()) {
            list.sort_unstable();
            list.dedup();
        }
        for list in &parents {
            edge_count += list.len();
        }

        // Acyclicity via Kahn's algorithm over child -> parent edges.
        let mut remaining: Vec<u32> = children.iter().map(|c| c.len() as u32).collect();
        let mut queue: Vec<u32> = (0..n as u32).filter(|&i| remaining[i as usize] == 0).collect();
        let mut processed = 0usize;
        let mut head = 0usize;
        while head < queue.len() {
            let node = queue[head] as usize;
            head += 1;
            processed += 1;
            for &p in &parents[node] {
                remaining[p as usize] -= 1;
                if remaining[p as usize] == 0 {
                    queue.push(p);
                }
            }
        }
        if processed != n {
            let cycle = describe_cycle(&ids, &children, &remaining);
            return Err(Error::validation(format!("hypernym graph has a cycle: {cycle}")));
        }

        // Exactly one root.
        let roots: Vec<u32> = (0..n as u32)
            .filter(|&i| parents[i as usize].is_empty())
            .collect();
        let root = match roots.as_slice() {
            [r] => *r,
            [] => unreachable!("acyclic non-empty graph has a parentless node"),
            many => {
                let names: Vec<String> = many.iter().map(|&i| ids[i as usize].to_string()).collect();
                return Err(Error::validation(format!(
                    "expected exactly one root, found {}: {}",
                    many.len(),
                    names.join(", ")
                )));
            }
        };

        // Subtrees bottom-up: process each node once all children are done.
        let mut subtree_sets: Vec<Vec<u32>> = vec![Vec::new(); n];
        let mut remaining: Vec<u32> = children.iter().map(|c| c.len() as u32).collect();
        let mut queue: Vec<u32> = (0..n as u32).filter(|&i| remaining[i as usize] == 0).collect();
        let mut leaf_distance: Vec<u32> = vec![u32::MAX; n];
        let mut head = 0usize;
        while head < queue.len() {
            let node = queue[head] as usize;
            head += 1;
            let mut set: Vec<u32> = Vec::new();
            let mut dist = u32::MAX;
            if let Some(ci) = class_index[node] {
                set.push(ci);
                dist = 0;
            }
            for &c in &children[node] {
                let c = c as usize;
                set = merge_sorted(&set, &subtree_sets[c]);
                if leaf_distance[c] != u32::MAX {
                    dist = dist.min(leaf_distance[c] + 1);
                }
            }
            if set.is_empty() {
                return Err(Error::validation(format!(
                    "synset {} is not an ancestor of any leaf",
                    ids[node]
                )));
            }
            subtree_sets[node] = set;
            leaf_distance[node] = dist;
            for &p in &parents[node] {
                remaining[p as usize] -= 1;
                if remaining[p as usize] == 0 {
                    queue.push(p);
                }
            }
        }

        let subtrees: Vec<ClassifiableSubtree> = subtree_sets
            .into_iter()
            .enumerate()
            .map(|(i, leaf_indices)| ClassifiableSubtree {
                synset: ids[i],
                leaf_indices,
            })
            .collect();

        // Evaluation set: every non-leaf node (all are leaf ancestors by
        // the check above); leaves never appear even when they are
        // ancestors of other leaves.
        let evaluation: Vec<SynsetId> = (0..n)
            .filter(|&i| class_index[i].is_none())
            .map(|i| ids[i])
            .collect();

        Ok(HierarchyGraph {
            ids,
            parents,
            children,
            lemmas,
            class_index,
            leaves: leaves_ordered,
            root,
            subtrees,
            evaluation,
            leaf_distance,
            edge_count,
        })
    }

    fn node(&self, id: SynsetId) -> Result<usize> {
        self.ids
            .binary_search(&id)
            .map_err(|_| Error::validation(format!("unknown synset {id}")))
    }

    /// All synsets, sorted ascending.
    pub fn synsets(&self) -> &[SynsetId] {
        &self.ids
    }

    /// Whether `id` is a node of this graph.
    pub fn contains(&self, id: SynsetId) -> bool {
        self.ids.binary_search(&id).is_ok()
    }

    /// Number of nodes.
    pub fn node_count(&self) -> usize {
        self.ids.len()
    }

    /// Number of hypernym edges.
    pub fn edge_count(&self) -> usize {
        self.edge_count
    }

    /// Leaves in class-index order; position = class index.
    pub fn leaves(&self) -> &[SynsetId] {
        &self.leaves
    }

    /// Number of classes (leaves).
    pub fn leaf_count(&self) -> usize {
        self.leaves.len()
    }

    /// The unique root synset.
    pub fn root(&self) -> SynsetId {
        self.ids[self.root as usize]
    }

    /// Class index of `id` when it is a leaf.
    pub fn class_index(&self, id: SynsetId) -> Result<Option<u32>> {
        Ok(self.class_index[self.node(id)?])
    }

    /// Whether `id` is one of the class leaves.
    pub fn is_leaf(&self, id: SynsetId) -> bool {
        self.node(id)
            .map(|n| self.class_index[n].is_some())
            .unwrap_or(false)
    }

    /// Hypernyms (parents) of `id`.
    pub fn hypernyms(&self, id: SynsetId) -> Result<Vec<SynsetId>> {
        let n = self.node(id)?;
        Ok(self.parents[n].iter().map(|&p| self.ids[p as usize]).collect())
    }

    /// Hyponyms (children) of `id` within the graph.
    pub fn hyponyms(&self, id: SynsetId) -> Result<Vec<SynsetId>> {
        let n = self.node(id)?;
        Ok(self.children[n].iter().map(|&c| self.ids[c as usize]).collect())
    }

    /// Lemmas annotated for `id` (possibly empty).
    pub fn lemmas(&self, id: SynsetId) -> Result<&[String]> {
        Ok(&self.lemmas[self.node(id)?])
    }

    /// First lemma of `id`, if any lemma is annotated.
    pub fn first_lemma(&self, id: SynsetId) -> Result<Option<&str>> {
        Ok(self.lemmas[self.node(id)?].first().map(String::as_str))
    }

    /// The strict ancestors of leaves, sorted ascending.
    ///
    /// These are the prompted synsets. Leaves are never included, even
    /// when a leaf happens to be an ancestor of another leaf.
    pub fn evaluation_set(&self) -> &[SynsetId] {
        &self.evaluation
    }

    /// The classifiable subtree `A(s)`.
    pub fn classifiable_subtree(&self, s: SynsetId) -> Result<&ClassifiableSubtree> {
        Ok(&self.subtrees[self.node(s)?])
    }

    /// `|A(s)|` without cloning.
    pub fn subtree_size(&self, s: SynsetId) -> Result<usize> {
        Ok(self.subtrees[self.node(s)?].len())
    }

    /// Minimum downward edge distance from `s` to any leaf (0 for leaves).
    pub fn leaf_distance(&self, s: SynsetId) -> Result<u32> {
        Ok(self.leaf_distance[self.node(s)?])
    }

    /// Evaluation synsets whose minimum leaf distance is at most `k`,
    /// sorted ascending.
    pub fn evaluation_synsets_within_leaf_distance(&self, k: u32) -> Vec<SynsetId> {
        self.evaluation
            .iter()
            .copied()
            .filter(|&s| {
                let n = self.ids.binary_search(&s).expect("evaluation synsets are nodes");
                self.leaf_distance[n] <= k
            })
            .collect()
    }

    /// Evaluation synsets reachable downward from `root` (inclusive when
    /// `root` itself is an evaluation synset), sorted ascending.
    pub fn descendant_evaluation_synsets(&self, root: SynsetId) -> Result<Vec<SynsetId>> {
        let start = self.node(root)?;
        if self.class_index[start].is_some() {
            return Err(Error::validation(format!(
                "synset {root} is a leaf, not an evaluation synset"
            )));
        }
        let mut seen = vec![false; self.ids.len()];
        let mut stack = vec![start as u32];
        let mut out = Vec::new();
        while let Some(node) = stack.pop() {
            let node = node as usize;
            if seen[node] {
                continue;
            }
            seen[node] = true;
            if self.class_index[node].is_none() {
                out.push(self.ids[node]);
            }
            stack.extend_from_slice(&self.children[node]);
        }
        out.sort_unstable();
        Ok(out)
    }

    /// Prompts for every evaluation synset, in sorted synset order.
    ///
    /// Each synset contributes its first lemma (underscores replaced by
    /// spaces) inside the template `An image of {a/an} {lemma}.`.
    pub fn prompt_manifest(&self) -> Result<PromptManifest> {
        let mut entries = Vec::with_capacity(self.evaluation.len());
        for &s in &self.evaluation {
            let node = self.ids.binary_search(&s).expect("evaluation synsets are nodes");
            let lemma = self.lemmas[node].first().ok_or_else(|| {
                Error::validation(format!("synset {s} has no lemma; cannot build a prompt"))
            })?;
            let display = lemma.replace('_', " ");
            entries.push(PromptEntry {
                synset: s,
                prompt: prompt_for_lemma(lemma),
                lemma: display,
            });
        }
        Ok(PromptManifest { entries })
    }

    /// Aggregate statistics used by front ends and sanity checks.
    pub fn stats(&self) -> GraphStats {
        let singleton_subtrees = self
            .evaluation
            .iter()
            .filter(|&&s| {
                let n = self.ids.binary_search(&s).expect("node");
                self.subtrees[n].len() == 1
            })
            .count();
        let multi_parent_nodes = self.parents.iter().filter(|p| p.len() > 1).count();

        // Longest path from the root, walking parents-before-children.
        let n = self.ids.len();
        let mut depth = vec![0u32; n];
        let mut remaining: Vec<u32> = self.parents.iter().map(|p| p.len() as u32).collect();
        let mut queue: Vec<u32> = (0..n as u32).filter(|&i| remaining[i as usize] == 0).collect();
        let mut head = 0;
        let mut max_depth = 0;
        while head < queue.len() {
            let node = queue[head] as usize;
            head += 1;
            max_depth = max_depth.max(depth[node]);
            for &c in &self.children[node] {
                let c = c as usize;
                depth[c] = depth[c].max(depth[node] + 1);
                remaining[c] -= 1;
                if remaining[c] == 0 {
                    queue.push(c as u32);
                }
            }
        }

        GraphStats {
            nodes: self.node_count(),
            edges: self.edge_count,
            leaves: self.leaf_count(),
            evaluation_synsets: self.evaluation.len(),
            singleton_subtrees,
            multi_parent_nodes,
            max_depth: max_depth as usize,
            root: self.root(),
        }
    }

    /// Write the graph back to the two text formats, canonicalized
    /// (sorted edges, class-ordered leaf lines, sorted annotation lines).
    /// Loading the written files reproduces an identical graph.
    pub fn save(&self, edge_path: &Path, leaf_map_path: &Path) -> Result<()> {
        let mut edges = Vec::with_capacity(self.edge_count);
        for (node, ps) in self.parents.iter().enumerate() {
            for &p in ps {
                edges.push((self.ids[node], self.ids[p as usize]));
            }
        }
        edges.sort_unstable();
        let mut out = String::new();
        for (c, p) in edges {
            out.push_str(&format!("{c} {p}\n"));
        }
        fs::write(edge_path, out).map_err(|e| Error::io(edge_path, e))?;

        let mut map = fs::File::create(leaf_map_path).map_err(|e| Error::io(leaf_map_path, e))?;
        let mut write = |line: String| -> Result<()> {
            map.write_all(line.as_bytes()).map_err(|e| Error::io(leaf_map_path, e))
        };
        for (ci, &s) in self.leaves.iter().enumerate() {
            let node = self.ids.binary_search(&s).expect("leaf is a node");
            write(format!("{ci} {s} {}\n", self.lemmas[node].join("|")))?;
        }
        for (node, &s) in self.ids.iter().enumerate() {
            if self.class_index[node].is_none() && !self.lemmas[node].is_empty() {
                write(format!("- {s} {}\n", self.lemmas[node].join("|")))?;
            }
        }
        Ok(())
    }
}

impl PartialEq for HierarchyGraph {
    fn eq(&self, other: &Self) -> bool {
        self.ids == other.ids
            && self.parents == other.parents
            && self.lemmas == other.lemmas
            && self.class_index == other.class_index
            && self.leaves == other.leaves
    }
}

impl fmt::Debug for HierarchyGraph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("HierarchyGraph")
            .field("nodes", &self.node_count())
            .field("edges", &self.edge_count)
            .field("leaves", &self.leaf_count())
            .field("root", &self.root())
            .finish()
    }
}

/// Merge two sorted, deduplicated `u32` slices.
fn merge_sorted(a: &[u32], b: &[u32]) -> Vec<u32> {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => {
                out.push(a[i]);
                i += 1;
            }
            std::cmp::Ordering::Greater => {
                out.push(b[j]);
                j += 1;
            }
            std::cmp::Ordering::Equal => {
                out.push(a[i]);
                i += 1;
                j += 1;
            }
        }
    }
    out.extend_from_slice(&a[i..]);
    out.extend_from_slice(&b[j..]);
    out
}

/// Walk child pointers among unprocessed nodes to print one cycle.
///
/// `remaining[i] > 0` after Kahn's algorithm means node `i` still has an
/// unprocessed child, so a downward walk restricted to such nodes must
/// revisit one of them.
fn describe_cycle(ids: &[SynsetId], children: &[Vec<u32>], remaining: &[u32]) -> String {
    let start = (0..ids.len())
        .find(|&i| remaining[i] > 0)
        .expect("a cycle leaves unprocessed nodes");
    let mut seen_at = HashMap::new();
    let mut path = vec![start as u32];
    seen_at.insert(start as u32, 0usize);
    let mut cur = start as u32;
    loop {
        let next = children[cur as usize]
            .iter()
            .copied()
            .find(|&c| remaining[c as usize] > 0)
            .expect("unprocessed node has an unprocessed child");
        if let Some(&at) = seen_at.get(&next) {
            // Reverse so the arrows read child -> parent (hypernym direction).
            let mut names: Vec<String> = path[at..]
                .iter()
                .chain(std::iter::once(&next))
                .map(|&i| ids[i as usize].to_string())
                .collect();
            names.reverse();
            return names.join(" -> ");
        }
        seen_at.insert(next, path.len());
        path.push(next);
        cur = next;
    }
}

/// Load and validate a hierarchy from an edge file and a leaf-map file.
///
/// Edge file: one `<child_wnid> <parent_wnid>` pair per line; blank lines
/// and lines starting with `#` are ignored.
///
/// Leaf-map file: `<class_index> <wnid> <lemma1|lemma2|...>` lines for
/// the classes, plus optional `- <wnid> <lemma1|lemma2|...>` lines that
/// annotate internal synsets with lemmas (needed for prompts). Blank
/// lines and `#` comments are ignored.
pub fn load_hierarchy(edge_file: &Path, leaf_map_file: &Path) -> Result<HierarchyGraph> {
    let edge_text = fs::read_to_string(edge_file).map_err(|e| Error::io(edge_file, e))?;
    let map_text = fs::read_to_string(leaf_map_file).map_err(|e| Error::io(leaf_map_file, e))?;
    parse_hierarchy(&edge_text, edge_file, &map_text, leaf_map_file)
}

/// As [`load_hierarchy`] but from in-memory text (parse errors cite the
/// pseudo-paths `<edges>` and `<leaf-map>`).
pub fn load_hierarchy_str(edge_text: &str, leaf_map_text: &str) -> Result<HierarchyGraph> {
    parse_hierarchy(
        edge_text,
        Path::new("<edges>"),
        leaf_map_text,
        Path::new("<leaf-map>"),
    )
}

fn parse_hierarchy(
    edge_text: &str,
    edge_file: &Path,
    map_text: &str,
    leaf_map_file: &Path,
) -> Result<HierarchyGraph> {
    let mut edges = Vec::new();
    for (lineno, line) in edge_text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let mut parts = line.split_ascii_whitespace();
        let (child, parent, extra) = (parts.next(), parts.next(), parts.next());
        let (Some(child), Some(parent), None) = (child, parent, extra) else {
            return Err(Error::parse(
                edge_file,
                lineno + 1,
                format!("expected '<child_wnid> <parent_wnid>', got {line:?}"),
            ));
        };
        let child = SynsetId::parse(child)
            .map_err(|e| Error::parse(edge_file, lineno + 1, e.to_string()))?;
        let parent = SynsetId::parse(parent)
            .map_err(|e| Error::parse(edge_file, lineno + 1, e.to_string()))?;
        edges.push((child, parent));
    }

    let mut leaves = Vec::new();
    let mut extra = Vec::new();
    for (lineno, line) in map_text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let mut parts = line.split_ascii_whitespace();
        let (Some(first), Some(wnid)) = (parts.next(), parts.next()) else {
            return Err(Error::parse(
                leaf_map_file,
                lineno + 1,
                format!("expected '<class_index>|- <wnid> <lemmas>', got {line:?}"),
            ));
        };
        let lemma_field = parts.next().unwrap_or("");
        if parts.next().is_some() {
            return Err(Error::parse(
                leaf_map_file,
                lineno + 1,
                "unexpected trailing field (lemmas must be |-separated, without spaces)",
            ));
        }
        let synset = SynsetId::parse(wnid)
            .map_err(|e| Error::parse(leaf_map_file, lineno + 1, e.to_string()))?;
        let lemmas: Vec<String> = lemma_field
            .split('|')
            .filter(|s| !s.is_empty())
            .map(str::to_owned)
            .collect();
        if first == "-" {
            extra.push((synset, lemmas));
        } else {
            let class_index: u32 = first.parse().map_err(|_| {
                Error::parse(
                    leaf_map_file,
                    lineno + 1,
                    format!("bad class index {first:?}"),
                )
            })?;
            leaves.push((class_index, synset, lemmas));
        }
    }

    // Detect edge endpoints that are neither leaves nor connected upward;
    // from_parts sees the union, so a dangling reference shows up as a
    // node that cannot reach a leaf, reported there.
    HierarchyGraph::from_parts(&edges, &leaves, &extra)
}
