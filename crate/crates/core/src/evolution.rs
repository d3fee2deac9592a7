//! Per-snapshot statistics for temporal analysis: average out-degree over
//! all nodes and over the top-ranked nodes, and how much of the network
//! transitively depends on the top-ranked nodes.

use alloc::format;
use alloc::vec;

use crate::centrality::{rank_nodes, RankedList, Strategy};
use crate::graph::DependencyGraph;
use crate::{parallel, Error, Result};

/// Mean number of dependencies per package: `edge_count / node_count`.
pub fn avg_out_degree(g: &DependencyGraph) -> Result<f64> {
    if g.node_count() == 0 {
        return Err(Error::EmptyGraph);
    }
    Ok(g.edge_count() as f64 / g.node_count() as f64)
}

fn check_k(g: &DependencyGraph, ranking: &RankedList, k: usize) -> Result<()> {
    if k == 0 || k > g.node_count() {
        return Err(Error::parameter(format!(
            "k must lie in 1..={}, got {k}",
            g.node_count()
        )));
    }
    if ranking.order.len() != g.node_count() {
        return Err(Error::parameter(
            "ranking does not cover the graph's nodes",
        ));
    }
    Ok(())
}

/// Mean out-degree of the `k` highest-ranked nodes.
pub fn avg_out_degree_top_ranked(
    g: &DependencyGraph,
    ranking: &RankedList,
    k: usize,
) -> Result<f64> {
    check_k(g, ranking, k)?;
    let total: usize = ranking.order[..k]
        .iter()
        .map(|&v| g.out_slice(v.index()).len())
        .sum();
    Ok(total as f64 / k as f64)
}

/// Mean out-degree of the top `k` nodes ranked by PageRank with default
/// parameters.
pub fn avg_out_degree_top_k(g: &DependencyGraph, k: usize) -> Result<f64> {
    let ranking = rank_nodes(g, Strategy::PageRank, 0)?;
    avg_out_degree_top_ranked(g, &ranking, k)
}

/// Mean over the `k` highest-ranked nodes of the fraction of the network
/// that transitively depends on each, denominated by the current node count.
///
/// Reachability is computed independently per top node; those traversals are
/// read-only and may fan out over the parallel pool.
pub fn avg_dependence_on_top_ranked(
    g: &DependencyGraph,
    ranking: &RankedList,
    k: usize,
) -> Result<f64> {
    check_k(g, ranking, k)?;
    let top = &ranking.order[..k];
    let mut counts = vec![0usize; k];
    parallel::fill_indexed(&mut counts, |i| {
        g.reverse_reachable_set(top[i])
            .expect("ranked ids are valid")
            .len()
    });
    let n = g.node_count() as f64;
    // Fixed summation order keeps the mean identical at any thread count.
    let total: usize = counts.iter().sum();
    Ok(total as f64 / k as f64 / n)
}

/// Mean dependence on the top `k` nodes ranked by PageRank with default
/// parameters.
pub fn avg_dependence_on_top_k(g: &DependencyGraph, k: usize) -> Result<f64> {
    let ranking = rank_nodes(g, Strategy::PageRank, 0)?;
    avg_dependence_on_top_ranked(g, &ranking, k)
}
