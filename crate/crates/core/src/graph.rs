//! Immutable directed graph with dual adjacency and dense node ids.
//!
//! An edge `u -> v` records that `u` depends on `v`. Out-adjacency therefore
//! lists a node's dependencies and in-adjacency its direct dependents. Both
//! directions are stored in compressed sparse rows with sorted target lists,
//! so a graph of ~10^6 nodes and a few million edges fits comfortably in
//! memory and neighbor slices come back without allocation.
//!
//! Graphs remember the node count of the graph they were derived from (see
//! [`DependencyGraph::original_node_count`]); failure simulations divide by
//! that count so every reported fraction shares one denominator.

use alloc::borrow::ToOwned;
use alloc::collections::VecDeque;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::{Error, Result};

/// Dense node identifier; ids run contiguously from zero within one graph.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct NodeId(pub u32);

impl NodeId {
    #[inline]
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Counters for edges discarded while building a graph.
///
/// Registry data contains self-dependencies and repeated declarations; both
/// are dropped at build time and tallied here.
#[derive(Clone, Copy, Default, PartialEq, Eq, Debug)]
pub struct DroppedEdges {
    pub self_loops: u64,
    pub duplicates: u64,
}

/// Immutable directed dependency graph.
///
/// Construction deduplicates edges, drops self-loops and materializes both
/// adjacency directions. A built graph never changes; removal operations
/// return new graphs. Values are `Send + Sync` and safe to share across
/// threads for concurrent read-only queries.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct DependencyGraph {
    out_offsets: Vec<usize>,
    out_targets: Vec<NodeId>,
    in_offsets: Vec<usize>,
    in_targets: Vec<NodeId>,
    labels: Option<Vec<String>>,
    original_node_count: usize,
    /// Current id -> id in the graph this one was derived from; `None` means
    /// the identity mapping.
    original_ids: Option<Vec<u32>>,
    dropped: DroppedEdges,
}

/// Node-to-component assignment of the weakly connected components.
#[derive(Clone, Debug)]
pub struct ComponentLabeling {
    /// Component id per node; ids are contiguous from 0 in discovery order,
    /// so a component's id orders with the smallest node id it contains.
    pub component_of: Vec<u32>,
    /// Size of each component, indexed by component id.
    pub component_sizes: Vec<usize>,
    /// Largest component size divided by the graph's original node count.
    pub lcc_fraction: f64,
}

impl ComponentLabeling {
    pub fn component_count(&self) -> usize {
        self.component_sizes.len()
    }

    /// Id of the largest component; ties go to the smallest component id,
    /// which is the component containing the smallest node id.
    pub fn largest_component(&self) -> Option<u32> {
        let mut best: Option<(usize, u32)> = None;
        for (id, &size) in self.component_sizes.iter().enumerate() {
            if best.is_none_or(|(s, _)| size > s) {
                best = Some((size, id as u32));
            }
        }
        best.map(|(_, id)| id)
    }
}

impl DependencyGraph {
    /// Builds a graph from integer endpoint pairs; every endpoint must be
    /// `< node_count`. Isolated nodes are allowed (any id not mentioned by an
    /// edge). Self-loops and duplicate edges are dropped and counted.
    pub fn from_index_edges(
        node_count: usize,
        edges: impl IntoIterator<Item = (u32, u32)>,
    ) -> Result<Self> {
        let mut pairs: Vec<(u32, u32)> = Vec::new();
        for (u, v) in edges {
            for id in [u, v] {
                if id as usize >= node_count {
                    return Err(Error::NodeOutOfRange {
                        index: id,
                        node_count,
                    });
                }
            }
            pairs.push((u, v));
        }
        Ok(Self::from_checked_pairs(node_count, pairs, None))
    }

    /// Builds a graph from labeled endpoint pairs.
    ///
    /// The node universe is the set of endpoint labels plus `extra_labels`;
    /// node ids are assigned in sorted label order, which makes construction
    /// deterministic for any input order. `extra_labels` admits isolated
    /// nodes and must not repeat a label.
    pub fn from_labeled_edges<S: AsRef<str>>(edges: &[(S, S)], extra_labels: &[S]) -> Result<Self> {
        let mut universe: Vec<&str> = Vec::with_capacity(edges.len() * 2 + extra_labels.len());
        for (u, v) in edges {
            universe.push(u.as_ref());
            universe.push(v.as_ref());
        }
        universe.extend(extra_labels.iter().map(|l| l.as_ref()));
        universe.sort_unstable();
        universe.dedup();
        // A repeat inside extra_labels is a caller error even though edge
        // endpoints repeat freely.
        let mut extras: Vec<&str> = extra_labels.iter().map(|l| l.as_ref()).collect();
        extras.sort_unstable();
        for pair in extras.windows(2) {
            if pair[0] == pair[1] {
                return Err(Error::DuplicateLabel {
                    label: pair[0].to_owned(),
                });
            }
        }
        let labels: Vec<String> = universe.iter().map(|&l| l.to_owned()).collect();
        Self::with_label_universe(labels, edges)
    }

    /// Builds a graph over an explicit label list from already-resolved
    /// integer endpoint pairs; node ids are the positions in `labels`.
    pub fn from_index_edges_with_labels(
        labels: Vec<String>,
        edges: impl IntoIterator<Item = (u32, u32)>,
    ) -> Result<Self> {
        ensure_unique_labels(&labels)?;
        let mut graph = Self::from_index_edges(labels.len(), edges)?;
        graph.labels = Some(labels);
        Ok(graph)
    }

    /// Builds a graph over an explicit label universe: node ids are the
    /// positions in `labels`. Rejects duplicate labels and edge endpoints
    /// that do not occur in the universe.
    pub fn with_label_universe<S: AsRef<str>>(labels: Vec<String>, edges: &[(S, S)]) -> Result<Self> {
        let node_count = labels.len();
        let mut sorted: Vec<(&str, u32)> = labels
            .iter()
            .enumerate()
            .map(|(i, l)| (l.as_str(), i as u32))
            .collect();
        sorted.sort_unstable();
        for pair in sorted.windows(2) {
            if pair[0].0 == pair[1].0 {
                return Err(Error::DuplicateLabel {
                    label: pair[0].0.to_owned(),
                });
            }
        }
        let resolve = |label: &str| -> Option<u32> {
            sorted
                .binary_search_by(|&(l, _)| l.cmp(label))
                .ok()
                .map(|pos| sorted[pos].1)
        };
        let mut pairs = Vec::with_capacity(edges.len());
        let mut unresolved: Vec<String> = Vec::new();
        for (u, v) in edges {
            match (resolve(u.as_ref()), resolve(v.as_ref())) {
                (Some(a), Some(b)) => pairs.push((a, b)),
                (a, b) => {
                    if a.is_none() {
                        unresolved.push(u.as_ref().to_owned());
                    }
                    if b.is_none() {
                        unresolved.push(v.as_ref().to_owned());
                    }
                }
            }
        }
        if !unresolved.is_empty() {
            unresolved.sort_unstable();
            unresolved.dedup();
            return Err(Error::UnresolvedLabels { labels: unresolved });
        }
        Ok(Self::from_checked_pairs(node_count, pairs, Some(labels)))
    }

    /// `pairs` must already be range-checked.
    fn from_checked_pairs(
        node_count: usize,
        mut pairs: Vec<(u32, u32)>,
        labels: Option<Vec<String>>,
    ) -> Self {
        let before = pairs.len();
        pairs.retain(|&(u, v)| u != v);
        let self_loops = (before - pairs.len()) as u64;
        pairs.sort_unstable();
        let before = pairs.len();
        pairs.dedup();
        let duplicates = (before - pairs.len()) as u64;

        let (out_offsets, out_targets) = csr(node_count, pairs.iter().copied());
        let (in_offsets, in_targets) = {
            let mut rev: Vec<(u32, u32)> = pairs.iter().map(|&(u, v)| (v, u)).collect();
            rev.sort_unstable();
            csr(node_count, rev.into_iter())
        };

        DependencyGraph {
            out_offsets,
            out_targets,
            in_offsets,
            in_targets,
            labels,
            original_node_count: node_count,
            original_ids: None,
            dropped: DroppedEdges {
                self_loops,
                duplicates,
            },
        }
    }

    pub fn node_count(&self) -> usize {
        self.out_offsets.len() - 1
    }

    pub fn edge_count(&self) -> usize {
        self.out_targets.len()
    }

    /// Node count of the graph this one was derived from through
    /// [`remove_nodes`](Self::remove_nodes); equals [`node_count`](Self::node_count)
    /// for graphs built directly. Every fraction reported by the analysis
    /// modules uses this as its denominator.
    pub fn original_node_count(&self) -> usize {
        self.original_node_count
    }

    /// Id a node had in the graph this one was derived from.
    pub fn original_id(&self, v: NodeId) -> u32 {
        match &self.original_ids {
            Some(ids) => ids[v.index()],
            None => v.0,
        }
    }

    pub fn dropped(&self) -> DroppedEdges {
        self.dropped
    }

    pub fn nodes(&self) -> impl Iterator<Item = NodeId> {
        (0..self.node_count() as u32).map(NodeId)
    }

    /// All edges in (source, target) order, sorted.
    pub fn edges(&self) -> impl Iterator<Item = (NodeId, NodeId)> + '_ {
        self.nodes()
            .flat_map(move |u| self.out_slice(u.index()).iter().map(move |&v| (u, v)))
    }

    fn check(&self, v: NodeId) -> Result<()> {
        if v.index() < self.node_count() {
            Ok(())
        } else {
            Err(Error::NodeOutOfRange {
                index: v.0,
                node_count: self.node_count(),
            })
        }
    }

    #[inline]
    pub(crate) fn out_slice(&self, v: usize) -> &[NodeId] {
        &self.out_targets[self.out_offsets[v]..self.out_offsets[v + 1]]
    }

    #[inline]
    pub(crate) fn in_slice(&self, v: usize) -> &[NodeId] {
        &self.in_targets[self.in_offsets[v]..self.in_offsets[v + 1]]
    }

    /// Direct dependencies of `v` (out-neighbors), sorted by id.
    pub fn dependencies(&self, v: NodeId) -> Result<&[NodeId]> {
        self.check(v)?;
        Ok(self.out_slice(v.index()))
    }

    /// Direct dependents of `v` (in-neighbors), sorted by id.
    pub fn dependents(&self, v: NodeId) -> Result<&[NodeId]> {
        self.check(v)?;
        Ok(self.in_slice(v.index()))
    }

    pub fn out_degree(&self, v: NodeId) -> Result<usize> {
        Ok(self.dependencies(v)?.len())
    }

    pub fn in_degree(&self, v: NodeId) -> Result<usize> {
        Ok(self.dependents(v)?.len())
    }

    pub fn has_edge(&self, u: NodeId, v: NodeId) -> Result<bool> {
        self.check(v)?;
        Ok(self.dependencies(u)?.binary_search(&v).is_ok())
    }

    pub fn labels(&self) -> Option<&[String]> {
        self.labels.as_deref()
    }

    pub fn label(&self, v: NodeId) -> Option<&str> {
        self.labels
            .as_ref()
            .and_then(|ls| ls.get(v.index()))
            .map(String::as_str)
    }

    /// Label of `v`, or its decimal id when the graph is unlabeled.
    pub fn display_label(&self, v: NodeId) -> String {
        match self.label(v) {
            Some(l) => l.to_owned(),
            None => v.to_string(),
        }
    }

    /// Id of the node carrying `label`, if any.
    pub fn find_label(&self, label: &str) -> Option<NodeId> {
        let labels = self.labels.as_ref()?;
        labels
            .iter()
            .position(|l| l == label)
            .map(|i| NodeId(i as u32))
    }

    /// Every node with a directed path of length >= 1 to `v`: the transitive
    /// dependents. Excludes `v` itself unless `v` lies on a cycle through
    /// itself. Returned sorted by id.
    pub fn reverse_reachable_set(&self, v: NodeId) -> Result<Vec<NodeId>> {
        self.check(v)?;
        let mut visited = vec![false; self.node_count()];
        let mut queue = VecDeque::new();
        // Seed with the direct dependents rather than the root, so the root
        // only appears if some path loops back to it.
        for &u in self.in_slice(v.index()) {
            if !visited[u.index()] {
                visited[u.index()] = true;
                queue.push_back(u);
            }
        }
        while let Some(u) = queue.pop_front() {
            for &w in self.in_slice(u.index()) {
                if !visited[w.index()] {
                    visited[w.index()] = true;
                    queue.push_back(w);
                }
            }
        }
        Ok(visited
            .iter()
            .enumerate()
            .filter(|&(_, &seen)| seen)
            .map(|(i, _)| NodeId(i as u32))
            .collect())
    }

    /// Weakly connected components of the graph viewed as undirected.
    pub fn weakly_connected_components(&self) -> ComponentLabeling {
        let n = self.node_count();
        let mut component_of = vec![u32::MAX; n];
        let mut component_sizes = Vec::new();
        let mut queue = VecDeque::new();
        for start in 0..n {
            if component_of[start] != u32::MAX {
                continue;
            }
            let id = component_sizes.len() as u32;
            let mut size = 0usize;
            component_of[start] = id;
            queue.push_back(start);
            while let Some(u) = queue.pop_front() {
                size += 1;
                for &w in self.out_slice(u).iter().chain(self.in_slice(u)) {
                    if component_of[w.index()] == u32::MAX {
                        component_of[w.index()] = id;
                        queue.push_back(w.index());
                    }
                }
            }
            component_sizes.push(size);
        }
        let largest = component_sizes.iter().copied().max().unwrap_or(0);
        let lcc_fraction = if self.original_node_count == 0 {
            0.0
        } else {
            largest as f64 / self.original_node_count as f64
        };
        ComponentLabeling {
            component_of,
            component_sizes,
            lcc_fraction,
        }
    }

    /// Induced subgraph on the nodes not in `victims`.
    ///
    /// The result keeps this graph's original node count and a mapping from
    /// surviving ids back to the ids they had before removal, so fractions
    /// computed downstream stay expressed against the pre-removal network.
    pub fn remove_nodes(&self, victims: &[NodeId]) -> Result<Self> {
        let mut keep = vec![true; self.node_count()];
        for &v in victims {
            self.check(v)?;
            keep[v.index()] = false;
        }
        Ok(self.induced_subgraph(&keep))
    }

    /// Induced subgraph of the largest weakly connected component; size ties
    /// break toward the component containing the smallest original node id.
    ///
    /// Unlike [`remove_nodes`](Self::remove_nodes) this starts a fresh
    /// universe: the extracted component becomes the network under study, so
    /// its original node count is its own size.
    pub fn largest_weakly_connected_subgraph(&self) -> Result<Self> {
        if self.node_count() == 0 {
            return Err(Error::EmptyGraph);
        }
        let labeling = self.weakly_connected_components();
        // Component ids are assigned in discovery order over ascending node
        // ids, and surviving original ids ascend with current ids, so the
        // smallest qualifying component id realizes the tie-break.
        let target = labeling.largest_component().expect("nonempty graph");
        let keep: Vec<bool> = labeling.component_of.iter().map(|&c| c == target).collect();
        let mut sub = self.induced_subgraph(&keep);
        sub.original_node_count = sub.node_count();
        sub.original_ids = None;
        Ok(sub)
    }

    fn induced_subgraph(&self, keep: &[bool]) -> Self {
        let n = self.node_count();
        let mut new_id = vec![u32::MAX; n];
        let mut survivors: Vec<u32> = Vec::new();
        for v in 0..n {
            if keep[v] {
                new_id[v] = survivors.len() as u32;
                survivors.push(v as u32);
            }
        }
        let mut pairs: Vec<(u32, u32)> = Vec::new();
        for &v in &survivors {
            for &w in self.out_slice(v as usize) {
                if keep[w.index()] {
                    pairs.push((new_id[v as usize], new_id[w.index()]));
                }
            }
        }
        let labels = self.labels.as_ref().map(|ls| {
            survivors
                .iter()
                .map(|&v| ls[v as usize].clone())
                .collect::<Vec<_>>()
        });
        let original_ids = Some(match &self.original_ids {
            Some(ids) => survivors.iter().map(|&v| ids[v as usize]).collect(),
            None => survivors.clone(),
        });
        let mut sub = Self::from_checked_pairs(survivors.len(), pairs, labels);
        sub.original_node_count = self.original_node_count;
        sub.original_ids = original_ids;
        // Nothing is dropped when inducing: the source graph was clean.
        sub.dropped = DroppedEdges::default();
        sub
    }
}

fn ensure_unique_labels(labels: &[String]) -> Result<()> {
    let mut sorted: Vec<&str> = labels.iter().map(String::as_str).collect();
    sorted.sort_unstable();
    for pair in sorted.windows(2) {
        if pair[0] == pair[1] {
            return Err(Error::DuplicateLabel {
                label: pair[0].to_owned(),
            });
        }
    }
    Ok(())
}

fn csr(node_count: usize, sorted_pairs: impl Iterator<Item = (u32, u32)>) -> (Vec<usize>, Vec<NodeId>) {
    let mut offsets = vec![0usize; node_count + 1];
    let mut targets = Vec::new();
    for (u, v) in sorted_pairs {
        offsets[u as usize + 1] += 1;
        targets.push(NodeId(v));
    }
    for i in 0..node_count {
        offsets[i + 1] += offsets[i];
    }
    (offsets, targets)
}
