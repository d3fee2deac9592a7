//! Reference implementations for the test suites.
//!
//! Everything here trades speed for obviousness: dense matrices, transitive
//! closure by Floyd-Warshall, union-find component labeling, exhaustive
//! partition enumeration. The production crates never call this code; tests
//! use it as an independent route to the same answers.
//!
//! All functions work on plain `(node_count, edge list)` inputs so they stay
//! decoupled from the production graph types.

use std::collections::BTreeSet;

/// Boolean transitive closure: `closure[u][v]` is true iff a directed path
/// of length >= 1 leads from `u` to `v`. Floyd-Warshall style relaxation.
pub fn transitive_closure(n: usize, edges: &[(u32, u32)]) -> Vec<Vec<bool>> {
    let mut reach = vec![vec![false; n]; n];
    for &(u, v) in edges {
        reach[u as usize][v as usize] = true;
    }
    for k in 0..n {
        let via_k = reach[k].clone();
        for row in reach.iter_mut() {
            if row[k] {
                for (slot, &reachable) in row.iter_mut().zip(&via_k) {
                    if reachable {
                        *slot = true;
                    }
                }
            }
        }
    }
    reach
}

/// All nodes with a directed path into `target`, via the dense closure.
pub fn reverse_reachable(n: usize, edges: &[(u32, u32)], target: u32) -> BTreeSet<u32> {
    let closure = transitive_closure(n, edges);
    (0..n as u32)
        .filter(|&u| closure[u as usize][target as usize])
        .collect()
}

/// Weakly-connected component labels via union-find (contiguous ids in
/// smallest-member order).
pub fn weak_components(n: usize, edges: &[(u32, u32)]) -> Vec<u32> {
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(parent: &mut [usize], x: usize) -> usize {
        let mut root = x;
        while parent[root] != root {
            root = parent[root];
        }
        let mut cur = x;
        while parent[cur] != root {
            let next = parent[cur];
            parent[cur] = root;
            cur = next;
        }
        root
    }
    for &(u, v) in edges {
        let (a, b) = (find(&mut parent, u as usize), find(&mut parent, v as usize));
        if a != b {
            parent[a.max(b)] = a.min(b);
        }
    }
    let mut label = vec![u32::MAX; n];
    let mut next = 0u32;
    for v in 0..n {
        let root = find(&mut parent, v);
        if label[root] == u32::MAX {
            label[root] = next;
            next += 1;
        }
        label[v] = label[root];
    }
    label
}

/// Dense power-iteration PageRank with uniform dangling redistribution and
/// rank flowing along edge direction. Runs to an L1 change below `tol` or
/// `max_iters`, whichever comes first.
pub fn dense_pagerank(
    n: usize,
    edges: &[(u32, u32)],
    damping: f64,
    tol: f64,
    max_iters: usize,
) -> Vec<f64> {
    assert!(n > 0);
    let mut matrix = vec![vec![0.0f64; n]; n]; // matrix[v][u]: mass u sends to v
    let mut out_degree = vec![0usize; n];
    for &(u, _) in edges {
        out_degree[u as usize] += 1;
    }
    for &(u, v) in edges {
        matrix[v as usize][u as usize] = 1.0 / out_degree[u as usize] as f64;
    }
    for u in 0..n {
        if out_degree[u] == 0 {
            for row in matrix.iter_mut() {
                row[u] = 1.0 / n as f64;
            }
        }
    }
    let mut x = vec![1.0 / n as f64; n];
    for _ in 0..max_iters {
        let mut next = vec![(1.0 - damping) / n as f64; n];
        for v in 0..n {
            let mut acc = 0.0;
            for u in 0..n {
                acc += matrix[v][u] * x[u];
            }
            next[v] += damping * acc;
        }
        let delta: f64 = next.iter().zip(&x).map(|(a, b)| (a - b).abs()).sum();
        x = next;
        if delta < tol {
            break;
        }
    }
    x
}

/// Step-by-step cascade simulation that rebuilds the full transitive closure
/// of the surviving subgraph before every removal. `order` is the frozen
/// target ranking; targets already removed are skipped. Returns the removed
/// node set of each executed step.
pub fn cascade_by_closure(
    n: usize,
    edges: &[(u32, u32)],
    order: &[u32],
    target_budget: usize,
) -> Vec<(u32, BTreeSet<u32>)> {
    let mut alive: Vec<bool> = vec![true; n];
    let mut alive_count = n;
    let mut steps = Vec::new();
    for &target in order {
        if steps.len() == target_budget || alive_count == 0 {
            break;
        }
        if !alive[target as usize] {
            continue;
        }
        let current: Vec<(u32, u32)> = edges
            .iter()
            .copied()
            .filter(|&(u, v)| alive[u as usize] && alive[v as usize])
            .collect();
        // Closure over ids of the original graph restricted to survivors.
        let mut removed = reverse_reachable(n, &current, target);
        removed.retain(|&u| alive[u as usize]);
        removed.insert(target);
        for &u in &removed {
            alive[u as usize] = false;
        }
        alive_count -= removed.len();
        steps.push((target, removed));
    }
    steps
}

/// Nodes within `k` in-edge hops of `root`, root included, computed by `k`
/// rounds of whole-edge-list expansion.
pub fn in_neighborhood_within(
    n: usize,
    edges: &[(u32, u32)],
    root: u32,
    k: usize,
) -> BTreeSet<u32> {
    assert!((root as usize) < n);
    let mut set = BTreeSet::from([root]);
    for _ in 0..k {
        let mut grown = set.clone();
        for &(u, v) in edges {
            if set.contains(&v) {
                grown.insert(u);
            }
        }
        if grown.len() == set.len() {
            break;
        }
        set = grown;
    }
    set
}

/// Dense adjacency snapshot for modularity evaluation, built once so that
/// exhaustive partition searches only pay for the double sum.
pub struct DenseModularity {
    n: usize,
    weight: Vec<Vec<f64>>,
    degree: Vec<f64>,
    two_w: f64,
}

impl DenseModularity {
    /// `edges` lists each undirected edge once with its weight.
    pub fn new(n: usize, edges: &[(u32, u32, f64)]) -> Self {
        let mut weight = vec![vec![0.0f64; n]; n];
        let mut degree = vec![0.0f64; n];
        for &(u, v, w) in edges {
            weight[u as usize][v as usize] += w;
            weight[v as usize][u as usize] += w;
            degree[u as usize] += w;
            degree[v as usize] += w;
        }
        let two_w = degree.iter().sum();
        DenseModularity {
            n,
            weight,
            degree,
            two_w,
        }
    }

    /// Textbook double sum over ordered node pairs.
    pub fn eval(&self, community_of: &[u32], resolution: f64) -> f64 {
        if self.two_w == 0.0 {
            return 0.0;
        }
        let mut q = 0.0;
        for i in 0..self.n {
            for j in 0..self.n {
                if community_of[i] == community_of[j] {
                    q += self.weight[i][j]
                        - resolution * self.degree[i] * self.degree[j] / self.two_w;
                }
            }
        }
        q / self.two_w
    }
}

/// One-shot modularity of a node partition of a weighted undirected graph.
pub fn modularity_pairsum(
    n: usize,
    edges: &[(u32, u32, f64)],
    community_of: &[u32],
    resolution: f64,
) -> f64 {
    DenseModularity::new(n, edges).eval(community_of, resolution)
}

/// Enumerates every partition of `{0, .., n-1}` as restricted growth strings;
/// each yielded vector maps element -> block id with blocks numbered by first
/// occurrence. Bell(n) grows fast; keep n small.
pub fn for_each_partition(n: usize, mut f: impl FnMut(&[u32])) {
    assert!(n >= 1);
    let mut assignment = vec![0u32; n];
    loop {
        f(&assignment);
        // Next restricted growth string.
        let mut i = n;
        loop {
            if i == 1 {
                return;
            }
            i -= 1;
            let max_prefix = assignment[..i].iter().copied().max().unwrap_or(0);
            if assignment[i] <= max_prefix {
                assignment[i] += 1;
                for slot in assignment.iter_mut().skip(i + 1) {
                    *slot = 0;
                }
                break;
            }
        }
    }
}

/// The partition of maximal modularity, found exhaustively.
pub fn best_partition_exhaustive(
    n: usize,
    edges: &[(u32, u32, f64)],
    resolution: f64,
) -> (Vec<u32>, f64) {
    let eval = DenseModularity::new(n, edges);
    let mut best_q = f64::NEG_INFINITY;
    let mut best: Vec<u32> = Vec::new();
    for_each_partition(n, |assignment| {
        let q = eval.eval(assignment, resolution);
        if q > best_q {
            best_q = q;
            best = assignment.to_vec();
        }
    });
    (best, best_q)
}

/// Canonical form of a partition for set-equality comparison: blocks as
/// sorted lists, sorted by smallest member.
pub fn canonical_blocks(assignment: &[u32]) -> Vec<Vec<u32>> {
    let mut blocks: std::collections::BTreeMap<u32, Vec<u32>> = Default::default();
    for (i, &c) in assignment.iter().enumerate() {
        blocks.entry(c).or_default().push(i as u32);
    }
    let mut out: Vec<Vec<u32>> = blocks.into_values().collect();
    out.sort_by_key(|b| b[0]);
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn closure_on_chain() {
        let closure = transitive_closure(3, &[(0, 1), (1, 2)]);
        assert!(closure[0][2]);
        assert!(!closure[2][0]);
        assert!(!closure[0][0]);
    }

    #[test]
    fn closure_sees_cycles() {
        let closure = transitive_closure(2, &[(0, 1), (1, 0)]);
        assert!(closure[0][0] && closure[1][1]);
    }

    #[test]
    fn reverse_reachability_matches_hand_count() {
        // A->B, C->B, B->D: everything but D reaches D.
        let set = reverse_reachable(4, &[(0, 1), (2, 1), (1, 3)], 3);
        assert_eq!(set, BTreeSet::from([0, 1, 2]));
    }

    #[test]
    fn components_by_union_find() {
        let labels = weak_components(5, &[(0, 1), (3, 4)]);
        assert_eq!(labels, vec![0, 0, 1, 2, 2]);
    }

    #[test]
    fn partition_count_is_bell_number() {
        let mut count = 0usize;
        for_each_partition(5, |_| count += 1);
        assert_eq!(count, 52); // Bell(5)
    }

    #[test]
    fn exhaustive_optimum_of_two_triangles() {
        let mut edges = vec![
            (0, 1, 1.0),
            (1, 2, 1.0),
            (0, 2, 1.0),
            (3, 4, 1.0),
            (4, 5, 1.0),
            (3, 5, 1.0),
        ];
        edges.push((2, 3, 1.0)); // bridge
        let (best, q) = best_partition_exhaustive(6, &edges, 1.0);
        assert_eq!(
            canonical_blocks(&best),
            vec![vec![0, 1, 2], vec![3, 4, 5]]
        );
        assert!(q > 0.3);
    }

    #[test]
    fn dense_pagerank_two_cycle() {
        let scores = dense_pagerank(2, &[(0, 1), (1, 0)], 0.85, 1e-14, 1000);
        assert!((scores[0] - 0.5).abs() < 1e-12);
    }
}
