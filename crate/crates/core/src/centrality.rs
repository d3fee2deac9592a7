//! Node importance: PageRank scores, in-degree (hub) ranking, and seeded
//! random ordering — the three target-selection strategies used by the
//! failure simulations.

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;

use crate::graph::{DependencyGraph, NodeId};
use crate::{parallel, Error, Result};

/// Power-iteration parameters.
#[derive(Clone, Copy, Debug)]
pub struct PageRankConfig {
    /// Damping factor in (0, 1).
    pub damping: f64,
    /// L1 convergence threshold on the change between iterations.
    pub tolerance: f64,
    pub max_iterations: usize,
}

impl Default for PageRankConfig {
    fn default() -> Self {
        PageRankConfig {
            damping: 0.85,
            tolerance: 1e-10,
            max_iterations: 200,
        }
    }
}

/// PageRank result; scores sum to 1.
#[derive(Clone, Debug)]
pub struct PageRankScores {
    /// Per-node score, indexed by node id.
    pub scores: Vec<f64>,
    pub iterations: usize,
    /// False when the iteration hit `max_iterations` before the L1 change
    /// dropped below tolerance; the scores are still the best iterate.
    pub converged: bool,
}

/// PageRank where rank flows along out-edges, from dependents to their
/// dependencies, so frequently-depended-on packages score high.
///
/// Each node splits its rank across its dependencies; nodes with no
/// dependencies (dangling) redistribute theirs uniformly. The per-node inner
/// sums and all cross-node reductions run in a fixed order, so results are
/// identical at any thread count.
pub fn pagerank(g: &DependencyGraph, config: &PageRankConfig) -> Result<PageRankScores> {
    let n = g.node_count();
    if n == 0 {
        return Err(Error::EmptyGraph);
    }
    if !(config.damping > 0.0 && config.damping < 1.0) {
        return Err(Error::parameter("damping must lie strictly between 0 and 1"));
    }
    if config.tolerance.is_nan() || config.tolerance <= 0.0 {
        return Err(Error::parameter("tolerance must be positive"));
    }
    if config.max_iterations == 0 {
        return Err(Error::parameter("max_iterations must be at least 1"));
    }
    let uniform = 1.0 / n as f64;
    if g.edge_count() == 0 {
        // All nodes dangling: the uniform vector is the exact fixed point.
        return Ok(PageRankScores {
            scores: vec![uniform; n],
            iterations: 0,
            converged: true,
        });
    }

    let inv_out: Vec<f64> = (0..n)
        .map(|v| {
            let d = g.out_slice(v).len();
            if d == 0 {
                0.0
            } else {
                1.0 / d as f64
            }
        })
        .collect();
    let d = config.damping;
    let mut scores = vec![uniform; n];
    let mut next = vec![0.0; n];
    let mut iterations = 0;
    let mut converged = false;

    while iterations < config.max_iterations {
        let mut dangling = 0.0;
        for v in 0..n {
            if inv_out[v] == 0.0 {
                dangling += scores[v];
            }
        }
        let base = (1.0 - d) * uniform + d * dangling * uniform;
        parallel::fill_indexed(&mut next, |v| {
            let mut acc = 0.0;
            for &u in g.in_slice(v) {
                acc += scores[u.index()] * inv_out[u.index()];
            }
            base + d * acc
        });
        iterations += 1;
        let mut delta = 0.0;
        for v in 0..n {
            delta += (next[v] - scores[v]).abs();
        }
        core::mem::swap(&mut scores, &mut next);
        if delta < config.tolerance {
            converged = true;
            break;
        }
    }

    Ok(PageRankScores {
        scores,
        iterations,
        converged,
    })
}

/// Target-selection strategy for attacks and rankings.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Strategy {
    /// Seeded uniform shuffle.
    Random,
    /// Descending in-degree.
    Hub,
    /// Descending PageRank score.
    PageRank,
}

impl Strategy {
    pub fn name(self) -> &'static str {
        match self {
            Strategy::Random => "random",
            Strategy::Hub => "hub",
            Strategy::PageRank => "pagerank",
        }
    }
}

impl fmt::Display for Strategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Strategy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "random" => Ok(Strategy::Random),
            "hub" => Ok(Strategy::Hub),
            "pagerank" => Ok(Strategy::PageRank),
            other => Err(Error::parameter(alloc::format!(
                "unknown strategy {other:?}; expected random, hub or pagerank"
            ))),
        }
    }
}

/// Nodes ordered most-important-first under one strategy.
#[derive(Clone, Debug)]
pub struct RankedList {
    pub strategy: Strategy,
    /// Permutation of all node ids.
    pub order: Vec<NodeId>,
    /// Per-node scores (indexed by node id) for hub and pagerank rankings.
    pub scores: Option<Vec<f64>>,
}

/// Permutation of node ids by descending score; equal scores order by
/// ascending id so rankings are reproducible.
pub fn order_by_score(scores: &[f64]) -> Vec<NodeId> {
    let mut order: Vec<u32> = (0..scores.len() as u32).collect();
    order.sort_unstable_by(|&a, &b| {
        scores[b as usize]
            .total_cmp(&scores[a as usize])
            .then(a.cmp(&b))
    });
    order.into_iter().map(NodeId).collect()
}

/// Ranks every node under the given strategy. The seed only matters for
/// [`Strategy::Random`]; hub and pagerank orders are fully deterministic.
pub fn rank_nodes(g: &DependencyGraph, strategy: Strategy, seed: u64) -> Result<RankedList> {
    let n = g.node_count();
    match strategy {
        Strategy::Random => {
            let mut order: Vec<NodeId> = g.nodes().collect();
            order.shuffle(&mut ChaCha20Rng::seed_from_u64(seed));
            Ok(RankedList {
                strategy,
                order,
                scores: None,
            })
        }
        Strategy::Hub => {
            let scores: Vec<f64> = (0..n).map(|v| g.in_slice(v).len() as f64).collect();
            Ok(RankedList {
                strategy,
                order: order_by_score(&scores),
                scores: Some(scores),
            })
        }
        Strategy::PageRank => {
            if n == 0 {
                return Ok(RankedList {
                    strategy,
                    order: Vec::new(),
                    scores: Some(Vec::new()),
                });
            }
            let pr = pagerank(g, &PageRankConfig::default())?;
            Ok(RankedList {
                strategy,
                order: order_by_score(&pr.scores),
                scores: Some(pr.scores),
            })
        }
    }
}
