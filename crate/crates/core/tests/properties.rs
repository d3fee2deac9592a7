//! Randomized equivalence checks against the reference implementations in
//! `depnet-testkit`, plus structural invariants on random graphs.

use std::collections::BTreeSet;

use proptest::prelude::*;

use depnet_core::centrality::{pagerank, rank_nodes, PageRankConfig, Strategy as AttackStrategy};
use depnet_core::community::{
    intersection_report, k_step_neighborhood, louvain, modularity, to_undirected,
};
use depnet_core::evolution::avg_dependence_on_top_ranked;
use depnet_core::robustness::cascade_attack;
use depnet_core::{DependencyGraph, NodeId};
use depnet_testkit as oracle;

/// Strategy producing a small directed graph as (node_count, raw edge list).
/// The raw list may contain duplicates and self-loops; construction cleans
/// them, and oracles read the cleaned edges back off the graph.
fn small_graph(max_nodes: usize, max_extra_edges: usize) -> impl Strategy<Value = (usize, Vec<(u32, u32)>)> {
    (1..=max_nodes).prop_flat_map(move |n| {
        let edge = (0..n as u32, 0..n as u32);
        proptest::collection::vec(edge, 0..=max_extra_edges).prop_map(move |edges| (n, edges))
    })
}

fn build(n: usize, edges: &[(u32, u32)]) -> DependencyGraph {
    DependencyGraph::from_index_edges(n, edges.iter().copied()).unwrap()
}

fn edge_pairs(g: &DependencyGraph) -> Vec<(u32, u32)> {
    g.edges().map(|(u, v)| (u.0, v.0)).collect()
}

proptest! {
    #[test]
    fn adjacency_directions_are_symmetric((n, edges) in small_graph(60, 240)) {
        let g = build(n, &edges);
        for u in g.nodes() {
            for &v in g.dependencies(u).unwrap() {
                prop_assert!(g.dependents(v).unwrap().contains(&u));
            }
            for &v in g.dependents(u).unwrap() {
                prop_assert!(g.dependencies(v).unwrap().contains(&u));
            }
        }
        let out_sum: usize = g.nodes().map(|v| g.out_degree(v).unwrap()).sum();
        let in_sum: usize = g.nodes().map(|v| g.in_degree(v).unwrap()).sum();
        prop_assert_eq!(out_sum, g.edge_count());
        prop_assert_eq!(in_sum, g.edge_count());
    }

    #[test]
    fn reverse_reachability_matches_dense_closure((n, edges) in small_graph(50, 150)) {
        let g = build(n, &edges);
        let pairs = edge_pairs(&g);
        for v in g.nodes() {
            let got: BTreeSet<u32> = g
                .reverse_reachable_set(v)
                .unwrap()
                .into_iter()
                .map(|u| u.0)
                .collect();
            let want = oracle::reverse_reachable(n, &pairs, v.0);
            prop_assert_eq!(&got, &want, "node {}", v);
        }
    }

    #[test]
    fn components_match_union_find((n, edges) in small_graph(200, 500)) {
        let g = build(n, &edges);
        let pairs = edge_pairs(&g);
        let got = g.weakly_connected_components();
        let want = oracle::weak_components(n, &pairs);
        // Both sides label components in smallest-member order.
        prop_assert_eq!(&got.component_of, &want);
        let mut sizes = vec![0usize; got.component_count()];
        for &c in &got.component_of {
            sizes[c as usize] += 1;
        }
        prop_assert_eq!(&sizes, &got.component_sizes);
        prop_assert_eq!(got.component_sizes.iter().sum::<usize>(), n);
    }

    #[test]
    fn removing_in_stages_equals_removing_at_once(
        (n, edges) in small_graph(40, 120),
        picks in proptest::collection::vec(any::<u32>(), 0..20),
    ) {
        let g = build(n, &edges);
        let victims: Vec<NodeId> = picks.iter().map(|&p| NodeId(p % n as u32)).collect();
        let (first, second) = victims.split_at(victims.len() / 2);
        let staged = g
            .remove_nodes(first)
            .unwrap()
            .remove_nodes(
                // Survivors renumber; translate the second stage through the
                // retained original ids.
                &{
                    let sub = g.remove_nodes(first).unwrap();
                    let mut translated = Vec::new();
                    for v in sub.nodes() {
                        if second.iter().any(|&s| s.0 == sub.original_id(v)) {
                            translated.push(v);
                        }
                    }
                    translated
                },
            )
            .unwrap();
        let at_once = g.remove_nodes(&victims).unwrap();
        prop_assert_eq!(staged.node_count(), at_once.node_count());
        prop_assert_eq!(staged.edge_count(), at_once.edge_count());
        // Same survivors and edges in original-id space.
        let originals = |h: &DependencyGraph| -> (BTreeSet<u32>, BTreeSet<(u32, u32)>) {
            (
                h.nodes().map(|v| h.original_id(v)).collect(),
                h.edges()
                    .map(|(u, v)| (h.original_id(u), h.original_id(v)))
                    .collect(),
            )
        };
        prop_assert_eq!(originals(&staged), originals(&at_once));
        prop_assert_eq!(staged.original_node_count(), g.node_count());
    }

    #[test]
    fn pagerank_matches_dense_iteration((n, edges) in small_graph(100, 400)) {
        let g = build(n, &edges);
        let pairs = edge_pairs(&g);
        let got = pagerank(&g, &PageRankConfig::default()).unwrap();
        let want = oracle::dense_pagerank(n, &pairs, 0.85, 1e-14, 10_000);
        for (a, b) in got.scores.iter().zip(&want) {
            prop_assert!((a - b).abs() < 1e-8, "{a} vs {b}");
        }
        let sum: f64 = got.scores.iter().sum();
        prop_assert!((sum - 1.0).abs() < 1e-9);
    }

    #[test]
    fn cascade_matches_closure_recomputation(
        (n, edges) in small_graph(50, 150),
        seed in 0u64..1000,
    ) {
        let g = build(n, &edges);
        let pairs = edge_pairs(&g);
        for strategy in [AttackStrategy::Random, AttackStrategy::Hub, AttackStrategy::PageRank] {
            let trace = cascade_attack(&g, strategy, 0.4, seed).unwrap();
            let order: Vec<u32> = rank_nodes(&g, strategy, seed)
                .unwrap()
                .order
                .iter()
                .map(|v| v.0)
                .collect();
            let budget = (0.4 * n as f64).ceil() as usize;
            let expected = oracle::cascade_by_closure(n, &pairs, &order, budget);
            prop_assert_eq!(trace.steps.len(), expected.len());
            let mut cumulative = 0usize;
            for (step, (target, removed)) in trace.steps.iter().zip(&expected) {
                prop_assert_eq!(step.target.0, *target);
                prop_assert_eq!(step.removed_this_step(), removed.len());
                cumulative += removed.len();
                let frac = cumulative as f64 / n as f64;
                prop_assert!((step.cumulative_affected_fraction - frac).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn louvain_modularity_is_recomputable((n, edges) in small_graph(60, 200), seed in 0u64..100) {
        let g = build(n, &edges);
        let ug = to_undirected(&g);
        let p = louvain(&ug, 1.0, seed).unwrap();
        prop_assert_eq!(p.community_of.len(), n);
        prop_assert!(p.community_count >= 1);
        // Contiguous ids from 0.
        let distinct: BTreeSet<u32> = p.community_of.iter().copied().collect();
        prop_assert_eq!(distinct.len(), p.community_count);
        prop_assert!(distinct.iter().max().is_none_or(|&m| (m as usize) < p.community_count));

        let recomputed = modularity(&ug, &p.community_of, 1.0);
        prop_assert!((p.modularity - recomputed).abs() < 1e-9);

        // Independent route: the pair-sum oracle over the undirected edges.
        let mut und_edges = Vec::new();
        for v in 0..n {
            let (ns, ws) = ug.neighbors(NodeId(v as u32));
            for (&u, &w) in ns.iter().zip(ws) {
                if u.index() > v {
                    und_edges.push((v as u32, u.0, w));
                }
            }
        }
        let pairsum = oracle::modularity_pairsum(n, &und_edges, &p.community_of, 1.0);
        prop_assert!((p.modularity - pairsum).abs() < 1e-9, "{} vs {pairsum}", p.modularity);

        let singletons: Vec<u32> = (0..n as u32).collect();
        prop_assert!(p.modularity >= oracle::modularity_pairsum(n, &und_edges, &singletons, 1.0) - 1e-12);
    }

    #[test]
    fn neighborhoods_nest_and_match_oracle((n, edges) in small_graph(200, 500)) {
        let g = build(n, &edges);
        let pairs = edge_pairs(&g);
        let v = NodeId(0);
        let mut previous: Option<BTreeSet<u32>> = None;
        for k in 1..=3usize {
            let got: BTreeSet<u32> = k_step_neighborhood(&g, v, k)
                .unwrap()
                .into_iter()
                .map(|u| u.0)
                .collect();
            let want = oracle::in_neighborhood_within(n, &pairs, v.0, k);
            prop_assert_eq!(&got, &want, "k={}", k);
            if let Some(prev) = previous {
                prop_assert!(prev.is_subset(&got));
            }
            previous = Some(got);
        }
    }

    #[test]
    fn intersection_fractions_are_exact(
        (n, edges) in small_graph(40, 120),
        seed in 0u64..50,
    ) {
        let g = build(n, &edges);
        let p = louvain(&to_undirected(&g), 1.0, seed).unwrap();
        let v = NodeId((seed % n as u64) as u32);
        for k in 1..=3usize {
            let r = intersection_report(&g, &p, v, k).unwrap();
            prop_assert!(r.intersection_size <= r.community_size.min(r.neighborhood_size));
            prop_assert_eq!(r.frac_of_community, r.intersection_size as f64 / r.community_size as f64);
            prop_assert_eq!(
                r.frac_of_neighborhood,
                r.intersection_size as f64 / r.neighborhood_size as f64
            );
            // Root inclusion makes both sets nonempty.
            prop_assert!(r.neighborhood_size >= 1);
            prop_assert!(r.community_size >= 1);
        }
    }

    #[test]
    fn dependence_matches_dense_closure((n, edges) in small_graph(50, 150)) {
        let g = build(n, &edges);
        let pairs = edge_pairs(&g);
        let ranking = rank_nodes(&g, AttackStrategy::PageRank, 0).unwrap();
        let k = (n / 2).max(1);
        let got = avg_dependence_on_top_ranked(&g, &ranking, k).unwrap();
        let closure = oracle::transitive_closure(n, &pairs);
        let mut total = 0usize;
        for &v in &ranking.order[..k] {
            total += (0..n).filter(|&u| closure[u][v.index()]).count();
        }
        let want = total as f64 / k as f64 / n as f64;
        prop_assert!((got - want).abs() < 1e-12, "{got} vs {want}");
    }
}

/// Two star-shaped package hubs bridged by one edge; exhaustive modularity
/// search fixes the expected partition, and each hub's 2-step neighborhood
/// should overlap its own community almost entirely.
#[test]
fn planted_hubs_overlap_their_own_communities() {
    // hub0 = 0 with dependents 1, 2, 3; hub1 = 4 with dependents 5, 6, 7;
    // node 1 also depends on a package of the other camp.
    let edges = [
        (1u32, 0u32),
        (2, 0),
        (3, 0),
        (5, 4),
        (6, 4),
        (7, 4),
        (1, 5),
    ];
    let g = DependencyGraph::from_index_edges(8, edges).unwrap();
    let ug = to_undirected(&g);
    let mut und_edges = Vec::new();
    for v in 0..8 {
        let (ns, ws) = ug.neighbors(NodeId(v as u32));
        for (&u, &w) in ns.iter().zip(ws) {
            if u.index() > v {
                und_edges.push((v as u32, u.0, w));
            }
        }
    }
    let (best, best_q) = oracle::best_partition_exhaustive(8, &und_edges, 1.0);
    let p = louvain(&ug, 1.0, 0).unwrap();
    assert!(
        p.modularity >= best_q - 1e-12,
        "louvain {} vs exhaustive {best_q}",
        p.modularity
    );
    assert_eq!(
        oracle::canonical_blocks(&p.community_of),
        oracle::canonical_blocks(&best)
    );
    // Measured on the exhaustive optimum (which pairs the two bridge
    // endpoints into their own community): hub 0 overlaps 0.75 of its 2-step
    // neighborhood, hub 4 overlaps 0.6; both clear the majority bar.
    for hub in [NodeId(0), NodeId(4)] {
        let r = intersection_report(&g, &p, hub, 2).unwrap();
        assert!(
            r.frac_of_neighborhood > 0.5,
            "hub {hub}: {}",
            r.frac_of_neighborhood
        );
    }
}

#[test]
fn pagerank_scores_stay_normalized_each_iteration() {
    // Truncating at any iteration count must still give a stochastic vector.
    let g = depnet_core::generate::gnm_random(200, 700, 5).unwrap();
    for max_iterations in [1, 2, 3, 5, 10, 50] {
        let cfg = PageRankConfig {
            max_iterations,
            tolerance: 1e-300,
            ..Default::default()
        };
        let pr = pagerank(&g, &cfg).unwrap();
        let sum: f64 = pr.scores.iter().sum();
        assert!((sum - 1.0).abs() < 1e-9, "iter {max_iterations}: {sum}");
    }
}
