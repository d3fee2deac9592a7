//! Yearly snapshot statistics: average out-degree over all packages and the
//! top 50 by PageRank, plus average network dependence on the top 100.

use anyhow::{bail, Result};
use depnet_core::centrality::{rank_nodes, Strategy};
use depnet_core::evolution::{
    avg_dependence_on_top_ranked, avg_out_degree, avg_out_degree_top_ranked,
};
use rayon::prelude::*;

use crate::registry::{snapshot_edges, year_of, PackageRecord, SnapshotSpec};

pub const TOP_OUT_DEGREE: usize = 50;
pub const TOP_DEPENDENCE: usize = 100;

/// One snapshot's statistics; `None` marks a snapshot with no packages.
#[derive(Clone, Debug, PartialEq)]
pub struct EvolutionRow {
    pub year: i32,
    pub avg_out_degree_all: Option<f64>,
    pub avg_out_degree_top50: Option<f64>,
    pub avg_dependence_top100: Option<f64>,
}

#[derive(Clone, Copy, Debug, Default)]
pub struct EvolutionOptions {
    /// Restrict each snapshot to its largest weakly connected component
    /// before computing statistics.
    pub restrict_to_lwcc: bool,
}

/// Builds one snapshot per cutoff (strictly increasing, epoch milliseconds)
/// and computes its statistics. Snapshots are independent and processed in
/// parallel; the row order follows the cutoffs. Returns the rows plus the
/// number of empty snapshots encountered.
///
/// On snapshots smaller than the nominal top-k sizes the k values clamp to
/// the node count so early, tiny networks still produce rows.
pub fn evolution_report(
    records: &[PackageRecord],
    cutoffs: &[i64],
    options: EvolutionOptions,
) -> Result<(Vec<EvolutionRow>, usize)> {
    if cutoffs.is_empty() {
        bail!("need at least one cutoff");
    }
    for pair in cutoffs.windows(2) {
        if pair[0] >= pair[1] {
            bail!("cutoffs must be strictly increasing");
        }
    }
    let rows = cutoffs
        .par_iter()
        .map(|&cutoff_ms| row_for_cutoff(records, cutoff_ms, options))
        .collect::<Result<Vec<_>>>()?;
    let warnings = rows.iter().filter(|r| r.avg_out_degree_all.is_none()).count();
    Ok((rows, warnings))
}

fn row_for_cutoff(
    records: &[PackageRecord],
    cutoff_ms: i64,
    options: EvolutionOptions,
) -> Result<EvolutionRow> {
    let year = year_of(cutoff_ms);
    let snapshot = snapshot_edges(records, SnapshotSpec { cutoff_ms });
    let graph = snapshot.into_graph()?;
    let graph = if options.restrict_to_lwcc && graph.node_count() > 0 {
        graph.largest_weakly_connected_subgraph()?
    } else {
        graph
    };
    let n = graph.node_count();
    if n == 0 {
        return Ok(EvolutionRow {
            year,
            avg_out_degree_all: None,
            avg_out_degree_top50: None,
            avg_dependence_top100: None,
        });
    }
    let ranking = rank_nodes(&graph, Strategy::PageRank, 0)?;
    Ok(EvolutionRow {
        year,
        avg_out_degree_all: Some(avg_out_degree(&graph)?),
        avg_out_degree_top50: Some(avg_out_degree_top_ranked(
            &graph,
            &ranking,
            TOP_OUT_DEGREE.min(n),
        )?),
        avg_dependence_top100: Some(avg_dependence_on_top_ranked(
            &graph,
            &ranking,
            TOP_DEPENDENCE.min(n),
        )?),
    })
}
