//! Failure simulations: cascading removal with propagation to transitive
//! dependents, and batch connectivity attacks measured by the size of the
//! largest weakly connected component, with a random-graph baseline.
//!
//! Targets are ranked once on the intact graph and consumed in that frozen
//! order; nodes that an earlier cascade already tore out are skipped. All
//! fractions are relative to the graph's original node count.

use alloc::collections::VecDeque;
use alloc::vec;
use alloc::vec::Vec;

use crate::centrality::{rank_nodes, Strategy};
use crate::graph::{DependencyGraph, NodeId};
use crate::{ceil_fraction, generate, Error, Result};

/// One step of a cascade attack.
#[derive(Clone, Debug)]
pub struct CascadeStep {
    /// 1-based step index.
    pub step: usize,
    /// The targeted node (an id of the attacked graph).
    pub target: NodeId,
    /// Nodes removed this step: the target plus everything that transitively
    /// depended on it among the survivors. Sorted by id.
    pub removed_nodes: Vec<NodeId>,
    /// Total removed so far divided by the original node count.
    pub cumulative_affected_fraction: f64,
}

impl CascadeStep {
    pub fn removed_this_step(&self) -> usize {
        self.removed_nodes.len()
    }
}

/// Ordered record of a cascade attack.
#[derive(Clone, Debug)]
pub struct RemovalTrace {
    pub strategy: Strategy,
    pub steps: Vec<CascadeStep>,
}

impl RemovalTrace {
    pub fn total_removed(&self) -> usize {
        self.steps.iter().map(|s| s.removed_this_step()).sum()
    }
}

/// One measurement of a connectivity attack.
#[derive(Clone, Copy, Debug)]
pub struct ConnectivityPoint {
    /// Removed nodes so far divided by the original node count.
    pub removed_fraction: f64,
    /// Largest-component size among survivors divided by the original node
    /// count.
    pub lcc_fraction: f64,
}

/// Trace of a batch connectivity attack, starting at the intact graph.
#[derive(Clone, Debug)]
pub struct ConnectivityTrace {
    pub strategy: Strategy,
    pub points: Vec<ConnectivityPoint>,
}

/// The same connectivity attack run on the input graph and on a uniform
/// random graph with matching node and edge counts.
#[derive(Clone, Debug)]
pub struct BaselineComparison {
    pub attacked: ConnectivityTrace,
    pub baseline: ConnectivityTrace,
}

/// Simulates cascading failures: per step the highest-ranked surviving node
/// fails and takes all of its transitive dependents with it.
///
/// The ranking is computed once on the intact graph; targets that were
/// already swept away by an earlier cascade are passed over and do not count
/// toward the stop budget. The attack stops once `ceil(stop_fraction * n)`
/// targets have been removed (cascade victims do not count) or the graph is
/// empty.
pub fn cascade_attack(
    g: &DependencyGraph,
    strategy: Strategy,
    stop_fraction: f64,
    seed: u64,
) -> Result<RemovalTrace> {
    if g.node_count() == 0 {
        return Err(Error::EmptyGraph);
    }
    if !(stop_fraction > 0.0 && stop_fraction <= 1.0) {
        return Err(Error::parameter("stop_fraction must lie in (0, 1]"));
    }
    let n = g.node_count();
    let denominator = g.original_node_count() as f64;
    let budget = ceil_fraction(stop_fraction, g.original_node_count());

    let ranking = rank_nodes(g, strategy, seed)?;
    let mut alive = vec![true; n];
    let mut alive_count = n;
    // Stamped visit marks make per-step BFS resets O(1); each node and each
    // in-edge is processed at most once over the whole attack.
    let mut stamp = vec![0u32; n];
    let mut current = 0u32;
    let mut queue: VecDeque<u32> = VecDeque::new();
    let mut steps = Vec::new();
    let mut removed_total = 0usize;
    let mut targets_removed = 0usize;

    for &target in &ranking.order {
        if targets_removed == budget || alive_count == 0 {
            break;
        }
        if !alive[target.index()] {
            continue;
        }
        current += 1;
        stamp[target.index()] = current;
        queue.push_back(target.0);
        let mut removed_here: Vec<NodeId> = Vec::new();
        while let Some(u) = queue.pop_front() {
            alive[u as usize] = false;
            removed_here.push(NodeId(u));
            for &w in g.in_slice(u as usize) {
                let w = w.index();
                if alive[w] && stamp[w] != current {
                    stamp[w] = current;
                    queue.push_back(w as u32);
                }
            }
        }
        removed_here.sort_unstable();
        alive_count -= removed_here.len();
        removed_total += removed_here.len();
        targets_removed += 1;
        steps.push(CascadeStep {
            step: targets_removed,
            target,
            removed_nodes: removed_here,
            cumulative_affected_fraction: removed_total as f64 / denominator,
        });
    }

    Ok(RemovalTrace { strategy, steps })
}

/// Removes ranked nodes in batches without failure propagation and records
/// the surviving largest-component fraction after each batch.
///
/// Batches hold `ceil(batch_fraction * n)` nodes (the last one is truncated
/// to land exactly on `max_fraction`). The first trace point is the intact
/// graph at removed fraction zero.
pub fn connectivity_attack(
    g: &DependencyGraph,
    strategy: Strategy,
    batch_fraction: f64,
    max_fraction: f64,
    seed: u64,
) -> Result<ConnectivityTrace> {
    if g.node_count() == 0 {
        return Err(Error::EmptyGraph);
    }
    if !(batch_fraction > 0.0 && batch_fraction <= max_fraction && max_fraction <= 1.0) {
        return Err(Error::parameter(
            "need 0 < batch_fraction <= max_fraction <= 1",
        ));
    }
    let n = g.node_count();
    let n_orig = g.original_node_count();
    let denominator = n_orig as f64;
    let batch_size = ceil_fraction(batch_fraction, n_orig);
    let total_to_remove = ceil_fraction(max_fraction, n_orig).min(n);

    let ranking = rank_nodes(g, strategy, seed)?;
    let mut alive = vec![true; n];
    let mut points = Vec::new();
    points.push(ConnectivityPoint {
        removed_fraction: 0.0,
        lcc_fraction: largest_component_alive(g, &alive) as f64 / denominator,
    });
    let mut removed = 0usize;
    while removed < total_to_remove {
        let this_batch = batch_size.min(total_to_remove - removed);
        for &v in &ranking.order[removed..removed + this_batch] {
            alive[v.index()] = false;
        }
        removed += this_batch;
        points.push(ConnectivityPoint {
            removed_fraction: removed as f64 / denominator,
            lcc_fraction: largest_component_alive(g, &alive) as f64 / denominator,
        });
    }

    Ok(ConnectivityTrace { strategy, points })
}

/// Runs [`connectivity_attack`] on `g` and on a G(n, m) graph with the same
/// node and edge counts; both traces share the removed-fraction grid.
pub fn compare_to_random_baseline(
    g: &DependencyGraph,
    strategy: Strategy,
    batch_fraction: f64,
    max_fraction: f64,
    seed: u64,
) -> Result<BaselineComparison> {
    let attacked = connectivity_attack(g, strategy, batch_fraction, max_fraction, seed)?;
    let random = generate::gnm_random(g.node_count(), g.edge_count(), seed)?;
    let baseline = connectivity_attack(&random, strategy, batch_fraction, max_fraction, seed)?;
    Ok(BaselineComparison { attacked, baseline })
}

/// Size of the largest weakly connected component among alive nodes.
fn largest_component_alive(g: &DependencyGraph, alive: &[bool]) -> usize {
    let n = g.node_count();
    let mut seen = vec![false; n];
    let mut queue: VecDeque<usize> = VecDeque::new();
    let mut largest = 0usize;
    for start in 0..n {
        if !alive[start] || seen[start] {
            continue;
        }
        seen[start] = true;
        queue.push_back(start);
        let mut size = 0usize;
        while let Some(u) = queue.pop_front() {
            size += 1;
            for &w in g.out_slice(u).iter().chain(g.in_slice(u)) {
                let w = w.index();
                if alive[w] && !seen[w] {
                    seen[w] = true;
                    queue.push_back(w);
                }
            }
        }
        largest = largest.max(size);
    }
    largest
}
