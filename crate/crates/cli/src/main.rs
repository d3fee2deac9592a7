//! `depnet` — dependency-network analysis from the command line.
//!
//! Exit codes: 0 on success, 1 for IO and domain failures, 2 for usage
//! errors (clap reports those itself).

use std::path::PathBuf;
use std::process::ExitCode;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};
use depnet_core::centrality::Strategy;

mod commands;

#[derive(Parser, Debug)]
#[command(name = "depnet", version, about = "Dependency-network robustness analysis toolkit")]
struct Cli {
    /// Cap worker threads for parallel sections (default: all cores).
    /// Results are identical at any thread count.
    #[arg(long, global = true, value_name = "N")]
    threads: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Parse a registry dump into the record cache.
    Ingest(IngestArgs),
    /// Extract the dependency graph as of a cutoff time from a record cache.
    Snapshot(SnapshotArgs),
    /// Generate a synthetic graph.
    Generate(GenerateArgs),
    /// Compute PageRank scores for an edge-list graph.
    Pagerank(PagerankArgs),
    /// Failure simulations.
    #[command(subcommand)]
    Attack(AttackCommand),
    /// Yearly snapshot statistics from a record cache.
    Evolution(EvolutionArgs),
    /// Louvain communities and their overlap with top-package neighborhoods.
    Communities(CommunitiesArgs),
    /// Print node, edge, degree and component statistics for an edge list.
    Stats(StatsArgs),
}

#[derive(Subcommand, Debug)]
enum AttackCommand {
    /// Remove ranked targets one at a time, each failure cascading to all
    /// transitive dependents.
    Cascade(CascadeArgs),
    /// Remove ranked nodes in batches without propagation and track the
    /// largest-component fraction.
    Connectivity(ConnectivityArgs),
}

/// Input graph files shared by the graph-consuming subcommands.
#[derive(Args, Debug)]
struct GraphInput {
    /// Edge-list file: one `source<TAB>target` pair per line, `#` comments.
    #[arg(long)]
    edges: PathBuf,
    /// Optional label sidecar (one name per line, line number = node id);
    /// required to represent isolated nodes.
    #[arg(long)]
    labels: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct IngestArgs {
    /// Registry dump: newline-delimited JSON or a `{"rows": [...]}` export,
    /// optionally gzip-compressed.
    #[arg(long)]
    dump: PathBuf,
    /// Record cache to write (line-JSON).
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args, Debug)]
struct SnapshotArgs {
    /// Record cache produced by `ingest`.
    #[arg(long)]
    cache: PathBuf,
    /// Inclusive cutoff: RFC 3339 timestamp or YYYY-MM-DD (end of day UTC).
    #[arg(long)]
    cutoff: String,
    /// Edge-list file to write.
    #[arg(long)]
    out: PathBuf,
    /// Label sidecar path (default: `<out>.labels`).
    #[arg(long)]
    labels_out: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Model {
    /// Uniform random graph with a fixed edge count.
    Gnm,
    /// Preferential attachment (scale-free in-degree tail).
    Pa,
}

#[derive(Args, Debug)]
struct GenerateArgs {
    #[arg(long, value_enum)]
    model: Model,
    /// Number of nodes.
    #[arg(long)]
    nodes: usize,
    /// Edge count (gnm model).
    #[arg(long, required_if_eq("model", "gnm"))]
    edges: Option<usize>,
    /// Out-edges per attached node (pa model).
    #[arg(long, required_if_eq("model", "pa"))]
    epn: Option<usize>,
    /// RNG seed; a random one is drawn and printed when omitted.
    #[arg(long)]
    seed: Option<u64>,
    /// Edge-list file to write (labels go to `<out>.labels`).
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args, Debug)]
struct PagerankArgs {
    #[command(flatten)]
    input: GraphInput,
    #[arg(long, default_value_t = 0.85)]
    damping: f64,
    /// L1 convergence threshold.
    #[arg(long, default_value_t = 1e-10)]
    tol: f64,
    #[arg(long, default_value_t = 200)]
    max_iter: usize,
    /// CSV to write: node_label,score (descending).
    #[arg(long)]
    out: PathBuf,
}

fn parse_strategy(s: &str) -> Result<Strategy, String> {
    Strategy::from_str(s).map_err(|e| e.to_string())
}

#[derive(Args, Debug)]
struct CascadeArgs {
    #[command(flatten)]
    input: GraphInput,
    /// Target selection: random, hub or pagerank.
    #[arg(long, value_parser = parse_strategy)]
    strategy: Strategy,
    /// Stop after targeting this fraction of the network.
    #[arg(long, default_value_t = 0.1)]
    stop_fraction: f64,
    #[arg(long)]
    seed: Option<u64>,
    /// CSV to write: step,target_label,removed_this_step,cumulative_affected_fraction.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args, Debug)]
struct ConnectivityArgs {
    #[command(flatten)]
    input: GraphInput,
    /// Target selection: random, hub or pagerank.
    #[arg(long, value_parser = parse_strategy)]
    strategy: Strategy,
    /// Fraction of the network removed per batch.
    #[arg(long, default_value_t = 0.1)]
    batch_fraction: f64,
    /// Stop once this fraction has been removed.
    #[arg(long, default_value_t = 0.5)]
    max_fraction: f64,
    /// Also run the attack on a random G(n, m) graph with matching size and
    /// emit its LCC column alongside.
    #[arg(long)]
    baseline: bool,
    #[arg(long)]
    seed: Option<u64>,
    /// CSV to write: removed_fraction,lcc_fraction[,baseline_lcc_fraction].
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args, Debug)]
struct EvolutionArgs {
    /// Record cache produced by `ingest`.
    #[arg(long)]
    cache: PathBuf,
    /// Comma-separated snapshot cutoffs, strictly increasing.
    #[arg(long, value_delimiter = ',', required = true)]
    cutoffs: Vec<String>,
    /// Restrict each snapshot to its largest weakly connected component.
    #[arg(long)]
    lwcc: bool,
    /// CSV to write: year,avg_out_degree_all,avg_out_degree_top50,avg_dependence_top100.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args, Debug)]
struct CommunitiesArgs {
    #[command(flatten)]
    input: GraphInput,
    /// How many top-PageRank packages to report.
    #[arg(long, default_value_t = 20)]
    top: usize,
    /// Neighborhood depths, each 1..=3.
    #[arg(long = "k", value_delimiter = ',', default_values_t = [1usize, 2, 3])]
    ks: Vec<usize>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, default_value_t = 1.0)]
    resolution: f64,
    /// Leave the package itself out of its neighborhood sets.
    #[arg(long)]
    exclude_root: bool,
    /// CSV to write.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args, Debug)]
struct StatsArgs {
    #[command(flatten)]
    input: GraphInput,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(threads) = cli.threads {
        if let Err(err) = rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global()
        {
            eprintln!("error: configuring {threads} threads: {err}");
            return ExitCode::FAILURE;
        }
    }
    let result = match cli.command {
        Command::Ingest(args) => commands::ingest(args),
        Command::Snapshot(args) => commands::snapshot(args),
        Command::Generate(args) => commands::generate(args),
        Command::Pagerank(args) => commands::pagerank_cmd(args),
        Command::Attack(AttackCommand::Cascade(args)) => commands::attack_cascade(args),
        Command::Attack(AttackCommand::Connectivity(args)) => commands::attack_connectivity(args),
        Command::Evolution(args) => commands::evolution(args),
        Command::Communities(args) => commands::communities(args),
        Command::Stats(args) => commands::stats(args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::FAILURE
        }
    }
}
