//! Subcommand implementations.

use std::fs::File;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use depnet_core::centrality::{order_by_score, pagerank, PageRankConfig};
use depnet_core::community::{top_package_study, StudyConfig};
use depnet_core::generate;
use depnet_core::robustness::{cascade_attack, compare_to_random_baseline, connectivity_attack};
use depnet_core::DependencyGraph;

use depnet_cli::edgelist::{read_edge_list, write_edge_list, write_label_file};
use depnet_cli::evolution::{evolution_report, EvolutionOptions};
use depnet_cli::fsutil::write_atomic;
use depnet_cli::manifest::RunManifest;
use depnet_cli::registry;

use crate::{
    CascadeArgs, CommunitiesArgs, ConnectivityArgs, EvolutionArgs, GenerateArgs, GraphInput,
    IngestArgs, Model, PagerankArgs, SnapshotArgs, StatsArgs,
};

/// Uses the caller's seed or draws one from OS entropy, printing it so the
/// run can be reproduced.
fn resolve_seed(seed: Option<u64>) -> u64 {
    match seed {
        Some(s) => s,
        None => {
            let s: u64 = rand::random();
            eprintln!("seed: {s}");
            s
        }
    }
}

fn load_graph(input: &GraphInput) -> Result<DependencyGraph> {
    read_edge_list(&input.edges, input.labels.as_deref())
}

fn record_graph_input(manifest: &mut RunManifest, input: &GraphInput) -> Result<()> {
    manifest.input(&input.edges)?;
    manifest.parameter("edges", input.edges.display());
    if let Some(labels) = &input.labels {
        manifest.input(labels)?;
        manifest.parameter("labels", labels.display());
    }
    Ok(())
}

fn write_csv(
    path: &Path,
    header: &str,
    rows: impl Iterator<Item = String>,
) -> Result<()> {
    write_atomic(path, |w| {
        writeln!(w, "{header}")?;
        for row in rows {
            writeln!(w, "{row}")?;
        }
        Ok(())
    })
    .with_context(|| format!("writing {}", path.display()))
}

fn default_labels_path(out: &Path) -> PathBuf {
    let mut name = out.file_name().unwrap_or_default().to_owned();
    name.push(".labels");
    out.with_file_name(name)
}

pub fn ingest(args: IngestArgs) -> Result<()> {
    let mut manifest = RunManifest::start("ingest");
    manifest.input(&args.dump)?;
    manifest.parameter("dump", args.dump.display());
    manifest.parameter("out", args.out.display());

    let file = File::open(&args.dump)
        .with_context(|| format!("opening dump {}", args.dump.display()))?;
    let (records, stats) = registry::parse_registry_dump(file)?;
    write_atomic(&args.out, |w| {
        registry::write_cache(w, &records)?;
        Ok(())
    })?;

    let versions: usize = records.iter().map(|r| r.versions.len()).sum();
    eprintln!(
        "ingested {} packages ({versions} versions) from {} lines",
        records.len(),
        stats.lines
    );
    if stats.docs_without_name > 0 || stats.duplicate_names > 0 {
        eprintln!(
            "skipped {} documents without a name, replaced {} duplicates",
            stats.docs_without_name, stats.duplicate_names
        );
    }
    if stats.versions_without_time > 0 || stats.versions_with_bad_time > 0 {
        eprintln!(
            "dropped {} versions without release time, {} with unparseable time",
            stats.versions_without_time, stats.versions_with_bad_time
        );
    }
    if !stats.parse_errors.is_empty() {
        eprintln!("{} malformed lines, e.g.:", stats.parse_errors.len());
        for err in stats.parse_errors.iter().take(5) {
            eprintln!("  line {}: {}", err.line, err.message);
        }
    }
    manifest.output(&args.out);
    manifest.write_for(&args.out)?;
    Ok(())
}

pub fn snapshot(args: SnapshotArgs) -> Result<()> {
    let mut manifest = RunManifest::start("snapshot");
    manifest.input(&args.cache)?;
    manifest.parameter("cache", args.cache.display());
    manifest.parameter("cutoff", &args.cutoff);

    let records = registry::read_cache(File::open(&args.cache)?)?;
    let cutoff_ms = registry::parse_cutoff(&args.cutoff)?;
    let snap = registry::snapshot_edges(&records, registry::SnapshotSpec { cutoff_ms });
    let dropped_unresolved = snap.dropped_unresolved;
    let graph = snap.into_graph()?;
    let labels_path = args
        .labels_out
        .clone()
        .unwrap_or_else(|| default_labels_path(&args.out));

    write_edge_list(&args.out, &graph)?;
    write_label_file(&labels_path, &graph)?;
    eprintln!(
        "snapshot at {}: {} nodes, {} edges ({} unresolved dependencies dropped, {} self-loops, {} duplicate declarations)",
        args.cutoff,
        graph.node_count(),
        graph.edge_count(),
        dropped_unresolved,
        graph.dropped().self_loops,
        graph.dropped().duplicates,
    );
    manifest.parameter("labels-out", labels_path.display());
    manifest.output(&args.out);
    manifest.output(&labels_path);
    manifest.write_for(&args.out)?;
    Ok(())
}

pub fn generate(args: GenerateArgs) -> Result<()> {
    let seed = resolve_seed(args.seed);
    let mut manifest = RunManifest::start("generate");
    manifest.parameter("nodes", args.nodes);
    manifest.parameter("seed", seed);

    let graph = match args.model {
        Model::Gnm => {
            let edges = args.edges.expect("clap enforces --edges for gnm");
            manifest.parameter("model", "gnm");
            manifest.parameter("edges", edges);
            generate::gnm_random(args.nodes, edges, seed)?
        }
        Model::Pa => {
            let epn = args.epn.expect("clap enforces --epn for pa");
            manifest.parameter("model", "pa");
            manifest.parameter("epn", epn);
            generate::preferential_attachment(args.nodes, epn, seed)?
        }
    };
    let labels_path = default_labels_path(&args.out);
    write_edge_list(&args.out, &graph)?;
    write_label_file(&labels_path, &graph)?;
    eprintln!(
        "generated {} nodes, {} edges",
        graph.node_count(),
        graph.edge_count()
    );
    manifest.output(&args.out);
    manifest.output(&labels_path);
    manifest.write_for(&args.out)?;
    Ok(())
}

pub fn pagerank_cmd(args: PagerankArgs) -> Result<()> {
    let mut manifest = RunManifest::start("pagerank");
    record_graph_input(&mut manifest, &args.input)?;
    manifest.parameter("damping", args.damping);
    manifest.parameter("tol", args.tol);
    manifest.parameter("max-iter", args.max_iter);

    let graph = load_graph(&args.input)?;
    let config = PageRankConfig {
        damping: args.damping,
        tolerance: args.tol,
        max_iterations: args.max_iter,
    };
    let result = pagerank(&graph, &config)?;
    if !result.converged {
        eprintln!(
            "warning: did not converge within {} iterations",
            args.max_iter
        );
    }
    let order = order_by_score(&result.scores);
    write_csv(
        &args.out,
        "node_label,score",
        order.iter().map(|&v| {
            format!("{},{}", graph.display_label(v), result.scores[v.index()])
        }),
    )?;
    manifest.parameter("converged", result.converged);
    manifest.parameter("iterations", result.iterations);
    manifest.output(&args.out);
    manifest.write_for(&args.out)?;
    Ok(())
}

pub fn attack_cascade(args: CascadeArgs) -> Result<()> {
    let seed = resolve_seed(args.seed);
    let mut manifest = RunManifest::start("attack cascade");
    record_graph_input(&mut manifest, &args.input)?;
    manifest.parameter("strategy", args.strategy);
    manifest.parameter("stop-fraction", args.stop_fraction);
    manifest.parameter("seed", seed);

    let graph = load_graph(&args.input)?;
    let trace = cascade_attack(&graph, args.strategy, args.stop_fraction, seed)?;
    write_csv(
        &args.out,
        "step,target_label,removed_this_step,cumulative_affected_fraction",
        trace.steps.iter().map(|s| {
            format!(
                "{},{},{},{}",
                s.step,
                graph.display_label(s.target),
                s.removed_this_step(),
                s.cumulative_affected_fraction
            )
        }),
    )?;
    eprintln!(
        "removed {} nodes over {} steps",
        trace.total_removed(),
        trace.steps.len()
    );
    manifest.output(&args.out);
    manifest.write_for(&args.out)?;
    Ok(())
}

pub fn attack_connectivity(args: ConnectivityArgs) -> Result<()> {
    let seed = resolve_seed(args.seed);
    let mut manifest = RunManifest::start("attack connectivity");
    record_graph_input(&mut manifest, &args.input)?;
    manifest.parameter("strategy", args.strategy);
    manifest.parameter("batch-fraction", args.batch_fraction);
    manifest.parameter("max-fraction", args.max_fraction);
    manifest.parameter("baseline", args.baseline);
    manifest.parameter("seed", seed);

    let graph = load_graph(&args.input)?;
    if args.baseline {
        let pair = compare_to_random_baseline(
            &graph,
            args.strategy,
            args.batch_fraction,
            args.max_fraction,
            seed,
        )?;
        write_csv(
            &args.out,
            "removed_fraction,lcc_fraction,baseline_lcc_fraction",
            pair.attacked
                .points
                .iter()
                .zip(&pair.baseline.points)
                .map(|(a, b)| {
                    format!("{},{},{}", a.removed_fraction, a.lcc_fraction, b.lcc_fraction)
                }),
        )?;
    } else {
        let trace = connectivity_attack(
            &graph,
            args.strategy,
            args.batch_fraction,
            args.max_fraction,
            seed,
        )?;
        write_csv(
            &args.out,
            "removed_fraction,lcc_fraction",
            trace
                .points
                .iter()
                .map(|p| format!("{},{}", p.removed_fraction, p.lcc_fraction)),
        )?;
    }
    manifest.output(&args.out);
    manifest.write_for(&args.out)?;
    Ok(())
}

pub fn evolution(args: EvolutionArgs) -> Result<()> {
    let mut manifest = RunManifest::start("evolution");
    manifest.input(&args.cache)?;
    manifest.parameter("cache", args.cache.display());
    manifest.parameter("cutoffs", args.cutoffs.join(","));
    manifest.parameter("lwcc", args.lwcc);

    let records = registry::read_cache(File::open(&args.cache)?)?;
    let cutoffs = args
        .cutoffs
        .iter()
        .map(|c| registry::parse_cutoff(c).map_err(Into::into))
        .collect::<Result<Vec<i64>>>()?;
    let options = EvolutionOptions {
        restrict_to_lwcc: args.lwcc,
    };
    let (rows, warnings) = evolution_report(&records, &cutoffs, options)?;
    if warnings > 0 {
        eprintln!("warning: {warnings} snapshots contained no packages");
    }
    let cell = |v: Option<f64>| v.map(|x| x.to_string()).unwrap_or_default();
    write_csv(
        &args.out,
        "year,avg_out_degree_all,avg_out_degree_top50,avg_dependence_top100",
        rows.iter().map(|r| {
            format!(
                "{},{},{},{}",
                r.year,
                cell(r.avg_out_degree_all),
                cell(r.avg_out_degree_top50),
                cell(r.avg_dependence_top100)
            )
        }),
    )?;
    manifest.output(&args.out);
    manifest.write_for(&args.out)?;
    Ok(())
}

pub fn communities(args: CommunitiesArgs) -> Result<()> {
    let seed = resolve_seed(args.seed);
    let mut manifest = RunManifest::start("communities");
    record_graph_input(&mut manifest, &args.input)?;
    manifest.parameter("top", args.top);
    manifest.parameter(
        "k",
        args.ks
            .iter()
            .map(ToString::to_string)
            .collect::<Vec<_>>()
            .join(","),
    );
    manifest.parameter("resolution", args.resolution);
    manifest.parameter("exclude-root", args.exclude_root);
    manifest.parameter("seed", seed);

    let graph = load_graph(&args.input)?;
    let config = StudyConfig {
        top_n: args.top,
        ks: args.ks.clone(),
        seed,
        resolution: args.resolution,
        include_root: !args.exclude_root,
    };
    let reports = top_package_study(&graph, &config)?;
    write_csv(
        &args.out,
        "package,k,community_size,neighborhood_size,intersection_size,frac_of_community,frac_of_neighborhood,dependencies",
        reports.iter().map(|r| {
            format!(
                "{},{},{},{},{},{},{},{}",
                r.package,
                r.k,
                r.community_size,
                r.neighborhood_size,
                r.intersection_size,
                r.frac_of_community,
                r.frac_of_neighborhood,
                r.dependency_count
            )
        }),
    )?;
    manifest.output(&args.out);
    manifest.write_for(&args.out)?;
    Ok(())
}

pub fn stats(args: StatsArgs) -> Result<()> {
    let graph = load_graph(&args.input)?;
    let n = graph.node_count();
    let m = graph.edge_count();
    println!("nodes: {n}");
    println!("edges: {m}");
    if n > 0 {
        println!("avg out-degree (m/n): {}", m as f64 / n as f64);
        println!("avg total degree (2m/n): {}", 2.0 * m as f64 / n as f64);
    }
    let components = graph.weakly_connected_components();
    let lcc = components.component_sizes.iter().copied().max().unwrap_or(0);
    println!("lcc size: {lcc}");
    println!("lcc fraction: {}", components.lcc_fraction);
    let dropped = graph.dropped();
    println!(
        "dropped at build: {} self-loops, {} duplicate edges",
        dropped.self_loops, dropped.duplicates
    );
    Ok(())
}
