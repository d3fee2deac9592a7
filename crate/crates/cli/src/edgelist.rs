//! Edge-list text format and the label sidecar file.
//!
//! Edge lists carry one `source<TAB>target` pair per line in UTF-8; lines
//! beginning with `#` are ignored. The sidecar holds one package name per
//! line, and the line number is the node id — it both pins id assignment and
//! preserves isolated nodes, which a bare edge list cannot express.

use std::fs::File;
use std::io::{BufRead, BufReader};
use std::path::Path;

use anyhow::{bail, Context, Result};
use depnet_core::{DependencyGraph, NodeId};

use crate::fsutil::write_atomic;

/// Label written for node `v`: the graph's label, or the decimal id padded
/// to fixed width so that lexicographic equals numeric order and unlabeled
/// graphs round-trip through the text formats unchanged.
fn effective_label(g: &DependencyGraph, v: NodeId, width: usize) -> String {
    match g.label(v) {
        Some(l) => l.to_owned(),
        None => format!("{:0width$}", v.0),
    }
}

fn pad_width(g: &DependencyGraph) -> usize {
    g.node_count().saturating_sub(1).to_string().len()
}

fn check_writable_labels(g: &DependencyGraph) -> Result<()> {
    if let Some(labels) = g.labels() {
        for l in labels {
            if l.contains(['\t', '\n', '\r']) {
                bail!("label {l:?} contains characters the edge-list format cannot carry");
            }
        }
    }
    Ok(())
}

/// Writes the graph's edges sorted by (source, target) id.
pub fn write_edge_list(path: &Path, g: &DependencyGraph) -> Result<()> {
    check_writable_labels(g)?;
    let width = pad_width(g);
    write_atomic(path, |w| {
        for (u, v) in g.edges() {
            writeln!(
                w,
                "{}\t{}",
                effective_label(g, u, width),
                effective_label(g, v, width)
            )?;
        }
        Ok(())
    })
    .with_context(|| format!("writing edge list {}", path.display()))
}

/// Writes the sidecar label file: line number = node id.
pub fn write_label_file(path: &Path, g: &DependencyGraph) -> Result<()> {
    check_writable_labels(g)?;
    let width = pad_width(g);
    write_atomic(path, |w| {
        for v in g.nodes() {
            writeln!(w, "{}", effective_label(g, v, width))?;
        }
        Ok(())
    })
    .with_context(|| format!("writing label file {}", path.display()))
}

/// Reads an edge list, optionally with a sidecar label file.
///
/// With a sidecar the node universe and id assignment come from it verbatim;
/// without one the universe is the set of endpoint labels with ids assigned
/// in sorted label order.
pub fn read_edge_list(edges_path: &Path, labels_path: Option<&Path>) -> Result<DependencyGraph> {
    let file = File::open(edges_path)
        .with_context(|| format!("opening edge list {}", edges_path.display()))?;
    let mut edges: Vec<(String, String)> = Vec::new();
    for (i, line) in BufReader::new(file).lines().enumerate() {
        let line = line?;
        let line = line.strip_suffix('\r').unwrap_or(&line);
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let mut fields = line.split('\t');
        match (fields.next(), fields.next(), fields.next()) {
            (Some(source), Some(target), None) => {
                edges.push((source.to_owned(), target.to_owned()));
            }
            _ => bail!(
                "{}:{}: expected exactly one tab-separated pair",
                edges_path.display(),
                i + 1
            ),
        }
    }
    let graph = match labels_path {
        Some(path) => {
            let file = File::open(path)
                .with_context(|| format!("opening label file {}", path.display()))?;
            let labels: Vec<String> = BufReader::new(file)
                .lines()
                .collect::<std::io::Result<_>>()?;
            let labels = labels
                .into_iter()
                .map(|l| l.strip_suffix('\r').map(str::to_owned).unwrap_or(l))
                .collect();
            DependencyGraph::with_label_universe(labels, &edges)?
        }
        None => DependencyGraph::from_labeled_edges(&edges, &[])?,
    };
    Ok(graph)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn g1() -> DependencyGraph {
        DependencyGraph::from_labeled_edges(&[("A", "B"), ("C", "B"), ("B", "D")], &[]).unwrap()
    }

    #[test]
    fn round_trip_with_sidecar() {
        let dir = tempfile::tempdir().unwrap();
        let edges = dir.path().join("g.tsv");
        let labels = dir.path().join("g.labels");
        let g = g1();
        write_edge_list(&edges, &g).unwrap();
        write_label_file(&labels, &g).unwrap();
        let back = read_edge_list(&edges, Some(&labels)).unwrap();
        assert_eq!(g, back);
    }

    #[test]
    fn round_trip_without_sidecar_loses_only_isolated_nodes() {
        let dir = tempfile::tempdir().unwrap();
        let edges = dir.path().join("g.tsv");
        let g = DependencyGraph::from_labeled_edges(&[("A", "B")], &["isolated"]).unwrap();
        write_edge_list(&edges, &g).unwrap();
        let back = read_edge_list(&edges, None).unwrap();
        assert_eq!(back.node_count(), 2);
        assert_eq!(back.edge_count(), 1);
    }

    #[test]
    fn unlabeled_graphs_round_trip_through_padded_ids() {
        let dir = tempfile::tempdir().unwrap();
        let edges = dir.path().join("g.tsv");
        let labels = dir.path().join("g.labels");
        let g = depnet_core::generate::gnm_random(120, 300, 9).unwrap();
        write_edge_list(&edges, &g).unwrap();
        write_label_file(&labels, &g).unwrap();
        // Sorted-label assignment equals id order thanks to the padding.
        let unsidecar = read_edge_list(&edges, None).unwrap();
        for (u, v) in g.edges() {
            assert!(unsidecar.has_edge(u, v).unwrap());
        }
        let sidecar = read_edge_list(&edges, Some(&labels)).unwrap();
        assert_eq!(sidecar.node_count(), 120);
        assert_eq!(sidecar.edge_count(), g.edge_count());
    }

    #[test]
    fn comments_and_blank_lines_are_ignored() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("g.tsv");
        std::fs::write(&path, "# header\nA\tB\n\nB\tC\n").unwrap();
        let g = read_edge_list(&path, None).unwrap();
        assert_eq!(g.node_count(), 3);
        assert_eq!(g.edge_count(), 2);
    }

    #[test]
    fn malformed_line_is_rejected_with_location() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("g.tsv");
        std::fs::write(&path, "A\tB\nB C\n").unwrap();
        let err = read_edge_list(&path, None).unwrap_err().to_string();
        assert!(err.contains(":2:"), "{err}");
    }

    #[test]
    fn sidecar_pins_id_assignment() {
        let dir = tempfile::tempdir().unwrap();
        let edges = dir.path().join("g.tsv");
        let labels = dir.path().join("g.labels");
        std::fs::write(&edges, "zeta\talpha\n").unwrap();
        std::fs::write(&labels, "zeta\nalpha\n").unwrap();
        let g = read_edge_list(&edges, Some(&labels)).unwrap();
        assert_eq!(g.label(NodeId(0)), Some("zeta"));
        assert_eq!(g.dependencies(NodeId(0)).unwrap(), &[NodeId(1)]);
    }
}
