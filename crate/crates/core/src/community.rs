//! Louvain community detection on the undirected projection of the
//! dependency graph, and intersection analysis between detected communities
//! and the dependent-neighborhoods of top-ranked packages.

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;

use crate::centrality::{rank_nodes, Strategy};
use crate::graph::{DependencyGraph, NodeId};
use crate::{Error, Result};

/// Ignore moves whose modularity gain is below this; guards the local-moving
/// loop against oscillating on floating-point noise while keeping every
/// accepted move strictly improving.
const MIN_GAIN: f64 = 1e-12;

/// Weighted undirected projection of a directed graph.
///
/// `u -- v` is present iff `u -> v` or `v -> u`; a reciprocal pair merges
/// into one edge of weight 2 so the projection preserves the directed
/// graph's total edge mass. Adjacency lists are sorted and symmetric; the
/// graph has no self-loops.
#[derive(Clone, Debug)]
pub struct UndirectedGraph {
    offsets: Vec<usize>,
    neighbors: Vec<NodeId>,
    weights: Vec<f64>,
}

impl UndirectedGraph {
    pub fn node_count(&self) -> usize {
        self.offsets.len() - 1
    }

    /// Number of undirected edges.
    pub fn edge_count(&self) -> usize {
        self.neighbors.len() / 2
    }

    /// Sorted neighbor ids of `v` with their edge weights.
    pub fn neighbors(&self, v: NodeId) -> (&[NodeId], &[f64]) {
        let range = self.offsets[v.index()]..self.offsets[v.index() + 1];
        (&self.neighbors[range.clone()], &self.weights[range])
    }

    /// Weighted degree of `v`.
    pub fn degree_weight(&self, v: NodeId) -> f64 {
        let (_, ws) = self.neighbors(v);
        ws.iter().sum()
    }

    /// Sum of all weighted degrees (twice the total edge weight).
    pub fn total_weight_x2(&self) -> f64 {
        self.weights.iter().sum()
    }
}

/// Projects the directed graph onto an undirected weighted one.
pub fn to_undirected(g: &DependencyGraph) -> UndirectedGraph {
    let n = g.node_count();
    let mut offsets = vec![0usize; n + 1];
    let mut neighbors = Vec::new();
    let mut weights = Vec::new();
    for v in 0..n {
        // Both slices are sorted; merge them counting multiplicity.
        let out = g.out_slice(v);
        let inn = g.in_slice(v);
        let (mut i, mut j) = (0, 0);
        while i < out.len() || j < inn.len() {
            let next = match (out.get(i), inn.get(j)) {
                (Some(&a), Some(&b)) => {
                    if a == b {
                        i += 1;
                        j += 1;
                        (a, 2.0)
                    } else if a < b {
                        i += 1;
                        (a, 1.0)
                    } else {
                        j += 1;
                        (b, 1.0)
                    }
                }
                (Some(&a), None) => {
                    i += 1;
                    (a, 1.0)
                }
                (None, Some(&b)) => {
                    j += 1;
                    (b, 1.0)
                }
                (None, None) => unreachable!(),
            };
            neighbors.push(next.0);
            weights.push(next.1);
        }
        offsets[v + 1] = neighbors.len();
    }
    UndirectedGraph {
        offsets,
        neighbors,
        weights,
    }
}

/// Node-to-community assignment together with the modularity it achieves.
#[derive(Clone, Debug)]
pub struct CommunityPartition {
    /// Community id per node; ids are contiguous from 0.
    pub community_of: Vec<u32>,
    pub community_count: usize,
    pub modularity: f64,
}

/// Weighted modularity of a partition, computed from scratch.
///
/// Uses the convention `Q = sum_c [ in_c/(2W) - resolution * (tot_c/(2W))^2 ]`
/// where `in_c` counts ordered intra-community neighbor pairs and `2W` is the
/// sum of weighted degrees. A graph with zero edge weight has modularity 0.
///
/// Panics if `community_of` does not cover every node.
pub fn modularity(ug: &UndirectedGraph, community_of: &[u32], resolution: f64) -> f64 {
    assert_eq!(
        community_of.len(),
        ug.node_count(),
        "partition must assign every node"
    );
    let two_w = ug.total_weight_x2();
    if two_w == 0.0 {
        return 0.0;
    }
    let mut internal = 0.0;
    let mut tot: BTreeMap<u32, f64> = BTreeMap::new();
    for v in 0..ug.node_count() {
        let id = NodeId(v as u32);
        let (ns, ws) = ug.neighbors(id);
        let mut degree = 0.0;
        for (&u, &w) in ns.iter().zip(ws) {
            degree += w;
            if community_of[u.index()] == community_of[v] {
                internal += w;
            }
        }
        *tot.entry(community_of[v]).or_insert(0.0) += degree;
    }
    let mut expectation = 0.0;
    for t in tot.values() {
        let share = t / two_w;
        expectation += share * share;
    }
    internal / two_w - resolution * expectation
}

/// Aggregated graph the algorithm works on between levels. `self_weight`
/// counts both directions of every internal edge, so
/// `degree = self_weight + sum of external weights` is preserved across
/// aggregation and `two_w` stays constant.
struct LevelGraph {
    adj: Vec<Vec<(u32, f64)>>,
    self_weight: Vec<f64>,
    degree: Vec<f64>,
}

impl LevelGraph {
    fn from_undirected(ug: &UndirectedGraph) -> Self {
        let n = ug.node_count();
        let mut adj = Vec::with_capacity(n);
        let mut degree = Vec::with_capacity(n);
        for v in 0..n {
            let (ns, ws) = ug.neighbors(NodeId(v as u32));
            adj.push(
                ns.iter()
                    .zip(ws)
                    .map(|(&u, &w)| (u.0, w))
                    .collect::<Vec<_>>(),
            );
            degree.push(ws.iter().sum());
        }
        LevelGraph {
            adj,
            self_weight: vec![0.0; n],
            degree,
        }
    }

    fn node_count(&self) -> usize {
        self.adj.len()
    }

    /// Modularity of the all-singletons partition of this level, which equals
    /// the modularity of the flat partition the levels so far encode.
    fn singleton_modularity(&self, resolution: f64, two_w: f64) -> f64 {
        let mut q = 0.0;
        for v in 0..self.node_count() {
            let share = self.degree[v] / two_w;
            q += self.self_weight[v] / two_w - resolution * share * share;
        }
        q
    }

    /// One round of local moving; returns whether any node changed community.
    fn local_moving(
        &self,
        comm: &mut [u32],
        resolution: f64,
        two_w: f64,
        rng: &mut ChaCha20Rng,
    ) -> bool {
        let n = self.node_count();
        let mut comm_tot: Vec<f64> = vec![0.0; n];
        for v in 0..n {
            comm_tot[comm[v] as usize] += self.degree[v];
        }
        let mut order: Vec<u32> = (0..n as u32).collect();
        order.shuffle(rng);

        let mut moved_any = false;
        loop {
            let mut moves = 0usize;
            for &v in &order {
                let v = v as usize;
                let cur = comm[v];
                // Edge weight from v toward each adjacent community,
                // accumulated in adjacency order.
                let mut link: BTreeMap<u32, f64> = BTreeMap::new();
                for &(u, w) in &self.adj[v] {
                    if u as usize != v {
                        *link.entry(comm[u as usize]).or_insert(0.0) += w;
                    }
                }
                comm_tot[cur as usize] -= self.degree[v];
                let score = |c: u32, w_c: f64| {
                    w_c - resolution * comm_tot[c as usize] * self.degree[v] / two_w
                };
                let stay = score(cur, link.get(&cur).copied().unwrap_or(0.0));
                let mut best = (cur, stay);
                for (&c, &w_c) in &link {
                    if c == cur {
                        continue;
                    }
                    let s = score(c, w_c);
                    // Strict improvement; equal scores keep the smaller
                    // community id thanks to the ascending iteration.
                    if s > best.1 {
                        best = (c, s);
                    }
                }
                let gain = 2.0 * (best.1 - stay) / two_w;
                let dest = if best.0 != cur && gain > MIN_GAIN {
                    debug_assert!(gain > 0.0);
                    moves += 1;
                    moved_any = true;
                    best.0
                } else {
                    cur
                };
                comm_tot[dest as usize] += self.degree[v];
                comm[v] = dest;
            }
            if moves == 0 {
                break;
            }
        }
        moved_any
    }

    /// Collapses communities into single nodes. Returns the new graph and the
    /// mapping from old community id to new node id (ascending community id
    /// order, so aggregation is deterministic).
    fn aggregate(&self, comm: &[u32]) -> (LevelGraph, BTreeMap<u32, u32>) {
        let mut ids: Vec<u32> = comm.to_vec();
        ids.sort_unstable();
        ids.dedup();
        let renumber: BTreeMap<u32, u32> = ids
            .into_iter()
            .enumerate()
            .map(|(new, old)| (old, new as u32))
            .collect();

        let k = renumber.len();
        let mut self_weight = vec![0.0; k];
        let mut maps: Vec<BTreeMap<u32, f64>> = vec![BTreeMap::new(); k];
        for v in 0..self.node_count() {
            let cv = renumber[&comm[v]];
            self_weight[cv as usize] += self.self_weight[v];
            for &(u, w) in &self.adj[v] {
                let cu = renumber[&comm[u as usize]];
                if cu == cv {
                    // Both directions of the pair pass through here, so the
                    // internal mass lands twice, as the convention requires.
                    self_weight[cv as usize] += w;
                } else {
                    *maps[cv as usize].entry(cu).or_insert(0.0) += w;
                }
            }
        }
        let adj: Vec<Vec<(u32, f64)>> = maps
            .into_iter()
            .map(|m| m.into_iter().collect::<Vec<_>>())
            .collect();
        let degree: Vec<f64> = (0..k)
            .map(|c| self_weight[c] + adj[c].iter().map(|&(_, w)| w).sum::<f64>())
            .collect();
        (
            LevelGraph {
                adj,
                self_weight,
                degree,
            },
            renumber,
        )
    }
}

/// Two-phase Louvain modularity optimization.
///
/// Local moving visits nodes in a seeded shuffled order and accepts only
/// strictly positive modularity gains; the graph is then aggregated and the
/// process repeats until no node moves. Returns the flat partition with
/// contiguous community ids (numbered by first occurrence in node order) and
/// the modularity of that partition as tracked through aggregation.
pub fn louvain(ug: &UndirectedGraph, resolution: f64, seed: u64) -> Result<CommunityPartition> {
    let n = ug.node_count();
    if n == 0 {
        return Err(Error::EmptyGraph);
    }
    if !(resolution > 0.0 && resolution.is_finite()) {
        return Err(Error::parameter("resolution must be positive and finite"));
    }
    let two_w = ug.total_weight_x2();
    if two_w == 0.0 {
        // Zero edge weight: every node keeps its own community and the
        // modularity is 0 by convention.
        return Ok(CommunityPartition {
            community_of: (0..n as u32).collect(),
            community_count: n,
            modularity: 0.0,
        });
    }

    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let mut level = LevelGraph::from_undirected(ug);
    // assignment[v] = node of the current level that contains original v.
    let mut assignment: Vec<u32> = (0..n as u32).collect();

    loop {
        let mut comm: Vec<u32> = (0..level.node_count() as u32).collect();
        let moved = level.local_moving(&mut comm, resolution, two_w, &mut rng);
        if !moved {
            break;
        }
        let (next, renumber) = level.aggregate(&comm);
        for slot in assignment.iter_mut() {
            *slot = renumber[&comm[*slot as usize]];
        }
        level = next;
    }

    let modularity = level.singleton_modularity(resolution, two_w);
    // Renumber communities contiguously by first occurrence in node order.
    let mut relabel: BTreeMap<u32, u32> = BTreeMap::new();
    let mut community_of = Vec::with_capacity(n);
    for &c in &assignment {
        let next = relabel.len() as u32;
        let id = *relabel.entry(c).or_insert(next);
        community_of.push(id);
    }
    Ok(CommunityPartition {
        community_of,
        community_count: relabel.len(),
        modularity,
    })
}

/// `v` plus every node within `k` hops along in-edges: the package together
/// with its direct and near-transitive dependents. `k` must be 1, 2 or 3.
/// Returned sorted by id.
pub fn k_step_neighborhood(g: &DependencyGraph, v: NodeId, k: usize) -> Result<Vec<NodeId>> {
    if !(1..=3).contains(&k) {
        return Err(Error::parameter("neighborhood depth k must be 1, 2 or 3"));
    }
    g.dependents(v)?; // validates v
    let mut depth = vec![usize::MAX; g.node_count()];
    let mut queue = alloc::collections::VecDeque::new();
    depth[v.index()] = 0;
    queue.push_back(v);
    while let Some(u) = queue.pop_front() {
        let d = depth[u.index()];
        if d == k {
            continue;
        }
        for &w in g.in_slice(u.index()) {
            if depth[w.index()] == usize::MAX {
                depth[w.index()] = d + 1;
                queue.push_back(w);
            }
        }
    }
    Ok(depth
        .iter()
        .enumerate()
        .filter(|&(_, &d)| d != usize::MAX)
        .map(|(i, _)| NodeId(i as u32))
        .collect())
}

/// Overlap between one package's community and its k-step neighborhood.
#[derive(Clone, Debug)]
pub struct IntersectionReport {
    /// Label of the package, or its decimal id when the graph is unlabeled.
    pub package: String,
    pub node: NodeId,
    pub k: usize,
    pub community_size: usize,
    pub neighborhood_size: usize,
    pub intersection_size: usize,
    pub frac_of_community: f64,
    pub frac_of_neighborhood: f64,
    /// The package's own dependency count (out-degree).
    pub dependency_count: usize,
}

/// Computes the overlap report for one package at one neighborhood depth.
pub fn intersection_report(
    g: &DependencyGraph,
    partition: &CommunityPartition,
    v: NodeId,
    k: usize,
) -> Result<IntersectionReport> {
    intersection_report_impl(g, partition, v, k, true)
}

fn intersection_report_impl(
    g: &DependencyGraph,
    partition: &CommunityPartition,
    v: NodeId,
    k: usize,
    include_root: bool,
) -> Result<IntersectionReport> {
    if partition.community_of.len() != g.node_count() {
        return Err(Error::parameter("partition does not cover the graph"));
    }
    let neighborhood = {
        let mut set = k_step_neighborhood(g, v, k)?;
        if !include_root {
            set.retain(|&u| u != v);
        }
        set
    };
    let home = partition.community_of[v.index()];
    let community_size = partition
        .community_of
        .iter()
        .filter(|&&c| c == home)
        .count();
    let intersection_size = neighborhood
        .iter()
        .filter(|&&u| partition.community_of[u.index()] == home)
        .count();
    let ratio = |num: usize, den: usize| {
        if den == 0 {
            0.0
        } else {
            num as f64 / den as f64
        }
    };
    Ok(IntersectionReport {
        package: g.display_label(v),
        node: v,
        k,
        community_size,
        neighborhood_size: neighborhood.len(),
        intersection_size,
        frac_of_community: ratio(intersection_size, community_size),
        frac_of_neighborhood: ratio(intersection_size, neighborhood.len()),
        dependency_count: g.out_slice(v.index()).len(),
    })
}

/// Parameters for [`top_package_study`].
#[derive(Clone, Debug)]
pub struct StudyConfig {
    /// How many of the highest-PageRank packages to report on.
    pub top_n: usize,
    /// Neighborhood depths to evaluate, each in 1..=3.
    pub ks: Vec<usize>,
    /// Seed for the Louvain node-visit shuffle.
    pub seed: u64,
    pub resolution: f64,
    /// Whether the package itself counts as part of its neighborhood.
    pub include_root: bool,
}

impl Default for StudyConfig {
    fn default() -> Self {
        StudyConfig {
            top_n: 20,
            ks: vec![1, 2, 3],
            seed: 0,
            resolution: 1.0,
            include_root: true,
        }
    }
}

/// Runs Louvain once on the undirected projection, then reports the
/// community/neighborhood overlap for each of the `top_n` PageRank-ranked
/// packages at every requested depth (rank-major, depth-minor order).
pub fn top_package_study(
    g: &DependencyGraph,
    config: &StudyConfig,
) -> Result<Vec<IntersectionReport>> {
    if g.node_count() == 0 {
        return Err(Error::EmptyGraph);
    }
    if config.top_n == 0 || config.top_n > g.node_count() {
        return Err(Error::parameter(alloc::format!(
            "top_n must lie in 1..={}",
            g.node_count()
        )));
    }
    if config.ks.is_empty() || config.ks.iter().any(|k| !(1..=3).contains(k)) {
        return Err(Error::parameter("ks must be a nonempty subset of {1, 2, 3}"));
    }
    let ranking = rank_nodes(g, Strategy::PageRank, config.seed)?;
    let partition = louvain(&to_undirected(g), config.resolution, config.seed)?;
    let mut reports = Vec::with_capacity(config.top_n * config.ks.len());
    for &v in &ranking.order[..config.top_n] {
        for &k in &config.ks {
            reports.push(intersection_report_impl(
                g,
                &partition,
                v,
                k,
                config.include_root,
            )?);
        }
    }
    Ok(reports)
}
