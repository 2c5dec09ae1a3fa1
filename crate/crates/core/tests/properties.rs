mod common;

use std::collections::{BTreeMap, BTreeSet};
use std::path::Path;

use panelnet::builders::{build_coauthorship, CoauthorshipOptions};
use panelnet::ingest::{
    parse_publications, CandidatePool, InputFormat, PanelRoster, PublicationRecord,
};
use panelnet::io_pajek::{clu_string, net_string, parse_clu, parse_net, PajekNetwork};
use panelnet::islands::{line_islands, IslandParams};
use panelnet::metrics::{
    betweenness, connected_components, degree_frequency, eigenvector_centrality,
    BetweennessOptions, EigenOptions,
};
use panelnet::stats::{
    holm_adjust, ks_two_sample_raw, null_model_sample, Indicator, KsPValue, NullModelConfig,
};
use panelnet::{NodeAttrs, Partition, ScholarId, WeightedGraph};
use proptest::prelude::*;

type EdgeSpec = Vec<(usize, usize, u8)>;

fn graph_spec(max_n: usize) -> impl Strategy<Value = (usize, EdgeSpec)> {
    (2..=max_n).prop_flat_map(|n| {
        (
            Just(n),
            prop::collection::vec((0..n, 0..n, 1u8..=5), 0..n * 2),
        )
    })
}

/// Builds the graph inserting nodes in `order`.
fn build(n: usize, edges: &EdgeSpec, order: &[usize]) -> WeightedGraph {
    let mut g = WeightedGraph::new();
    for &i in order {
        g.add_node(&format!("n{i:02}"), "", NodeAttrs::default())
            .unwrap();
    }
    assert_eq!(g.node_count(), n);
    for &(u, v, w) in edges {
        if u != v {
            g.add_edge(&format!("n{u:02}"), &format!("n{v:02}"), w as f64)
                .unwrap();
        }
    }
    g
}

fn by_id(g: &WeightedGraph, xs: &[f64]) -> BTreeMap<String, f64> {
    (0..g.node_count())
        .map(|i| (g.node(i).id.clone(), xs[i]))
        .collect()
}

fn island_ids(g: &WeightedGraph, p: IslandParams) -> BTreeSet<BTreeSet<String>> {
    line_islands(g, p)
        .unwrap()
        .islands
        .iter()
        .map(|i| i.members.iter().map(|&m| g.node(m).id.clone()).collect())
        .collect()
}

fn papers() -> impl Strategy<Value = Vec<(u8, Vec<u8>)>> {
    prop::collection::vec((0u8..30, prop::collection::vec(0u8..12, 1..5)), 1..25)
}

fn records(spec: &[(u8, Vec<u8>)]) -> Vec<PublicationRecord> {
    spec.iter()
        .enumerate()
        .map(|(k, (y, authors))| {
            let mut ids: Vec<String> = Vec::new();
            for a in authors {
                let id = format!("s{a:02}");
                if !ids.contains(&id) {
                    ids.push(id);
                }
            }
            PublicationRecord {
                paper_id: format!("p{k}"),
                year: 1995 + *y as i32,
                author_ids: ids,
                journal_id: Some(format!("J{}", y % 4)),
            }
        })
        .collect()
}

fn roster(ids: &[u8]) -> PanelRoster {
    let members = ids
        .iter()
        .map(|i| ScholarId::new(format!("s{i:02}"), "").unwrap())
        .collect();
    PanelRoster::new("p", 2024, members, None).unwrap().value
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn metrics_ignore_insertion_order((n, edges) in graph_spec(12), seed in any::<u64>()) {
        let identity: Vec<usize> = (0..n).collect();
        let mut shuffled = identity.clone();
        let mut s = seed;
        for i in (1..n).rev() {
            s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            shuffled.swap(i, (s >> 33) as usize % (i + 1));
        }
        let a = build(n, &edges, &identity);
        let b = build(n, &edges, &shuffled);
        prop_assert_eq!(degree_frequency(&a), degree_frequency(&b));
        prop_assert_eq!(connected_components(&a).count(), connected_components(&b).count());
        let opts = BetweennessOptions::default();
        let (ba, bb) = (by_id(&a, &betweenness(&a, opts)), by_id(&b, &betweenness(&b, opts)));
        for (k, v) in &ba {
            prop_assert!((v - bb[k]).abs() < 1e-12);
        }
        let p = IslandParams::new(1, n).unwrap();
        prop_assert_eq!(island_ids(&a, p), island_ids(&b, p));
        if connected_components(&a).count() == 1 {
            let ea = eigenvector_centrality(&a, &EigenOptions::default()).unwrap();
            let eb = eigenvector_centrality(&b, &EigenOptions::default()).unwrap();
            let (ea, eb) = (by_id(&a, &ea.scores), by_id(&b, &eb.scores));
            for (k, v) in &ea {
                prop_assert!((v - eb[k]).abs() < 1e-8);
            }
        }
    }

    #[test]
    fn islands_survive_monotone_reweighting((n, edges) in graph_spec(12), min in 1usize..4) {
        let g = build(n, &edges, &(0..n).collect::<Vec<_>>());
        let p = IslandParams::new(min, n.max(min)).unwrap();
        let cubed = g.map_weights(|w| w * w * w + 0.5).unwrap();
        let logged = g.map_weights(|w| (1.0 + w).ln()).unwrap();
        let base = island_ids(&g, p);
        prop_assert_eq!(&base, &island_ids(&cubed, p));
        prop_assert_eq!(&base, &island_ids(&logged, p));
    }

    #[test]
    fn coauthorship_weight_counts_author_pairs(spec in papers(), panel in prop::collection::btree_set(0u8..12, 1..5)) {
        let pubs = records(&spec);
        let panel: Vec<u8> = panel.into_iter().collect();
        let r = roster(&panel);
        let build = build_coauthorship(&r, &pubs, &CoauthorshipOptions::default()).unwrap();
        let members: BTreeSet<String> = panel.iter().map(|i| format!("s{i:02}")).collect();
        let involved: Vec<&PublicationRecord> = pubs
            .iter()
            .filter(|p| p.author_ids.iter().any(|a| members.contains(a)))
            .collect();
        let pairs: usize = involved.iter().map(|p| p.author_ids.len() * (p.author_ids.len() - 1) / 2).sum();
        let nodes: BTreeSet<&String> = involved.iter().flat_map(|p| &p.author_ids).collect();
        prop_assert_eq!(build.graph.total_weight(), pairs as f64);
        prop_assert_eq!(build.graph.node_count(), nodes.len());
        prop_assert_eq!(build.papers, involved.len());
        prop_assert_eq!(build.graph.panelist_count(), members.iter().filter(|m| nodes.contains(m)).count());
    }

    #[test]
    fn publication_parsing_is_idempotent(spec in papers(), dup in any::<bool>()) {
        let mut pubs = records(&spec);
        if dup {
            let mut again = pubs[0].clone();
            again.author_ids.reverse();
            pubs.push(again);
        }
        let csv = |recs: &[PublicationRecord]| {
            let mut s = String::from("paper_id,year,authors,journal_id\n");
            for p in recs {
                s += &format!("{},{},{},{}\n", p.paper_id, p.year, p.author_ids.join(";"), p.journal_id.clone().unwrap_or_default());
            }
            s
        };
        let once = parse_publications(&csv(&pubs), InputFormat::Csv, Path::new("a.csv")).unwrap();
        let twice = parse_publications(&csv(&once.value), InputFormat::Csv, Path::new("b.csv")).unwrap();
        prop_assert_eq!(&once.value, &twice.value);
        prop_assert!(twice.warnings.is_empty());
        prop_assert_eq!(once.warnings.len(), dup as usize);
    }

    #[test]
    fn pajek_text_round_trips((n, edges) in graph_spec(15), scale in 1u32..1000) {
        let g = build(n, &edges, &(0..n).collect::<Vec<_>>())
            .map_weights(|w| w * scale as f64 / 7.0)
            .unwrap();
        let text = net_string(&g).unwrap();
        let back = match parse_net(&text, Path::new("x.net")).unwrap() {
            PajekNetwork::OneMode(h) => h,
            PajekNetwork::TwoMode(_) => unreachable!(),
        };
        prop_assert_eq!(net_string(&back).unwrap(), text);
        prop_assert_eq!(common::edge_map(&back), common::edge_map(&g));
    }

    #[test]
    fn partitions_round_trip(assign in prop::collection::vec(0u32..6, 0..40)) {
        let p = Partition::new(assign);
        let back = parse_clu(&clu_string(&p), Path::new("x.clu")).unwrap();
        prop_assert_eq!(back, p);
    }

    #[test]
    fn ks_is_symmetric_and_bounded(
        a in prop::collection::vec(0u8..20, 1..60),
        b in prop::collection::vec(0u8..20, 1..60),
    ) {
        let fa: Vec<f64> = a.iter().map(|&x| x as f64).collect();
        let fb: Vec<f64> = b.iter().map(|&x| x as f64).collect();
        let ab = ks_two_sample_raw(&fa, &fb, KsPValue::Asymptotic).unwrap();
        let ba = ks_two_sample_raw(&fb, &fa, KsPValue::Asymptotic).unwrap();
        prop_assert_eq!(ab.d_statistic, ba.d_statistic);
        prop_assert!((0.0..=1.0).contains(&ab.d_statistic));
        prop_assert!((0.0..=1.0).contains(&ab.p_raw));
        let self_test = ks_two_sample_raw(&fa, &fa, KsPValue::Stephens).unwrap();
        prop_assert_eq!(self_test.d_statistic, 0.0);
        prop_assert_eq!(self_test.p_raw, 1.0);
    }

    #[test]
    fn holm_dominates_raw_and_keeps_order(ps in prop::collection::vec(0.0f64..=1.0, 1..12)) {
        let adj = holm_adjust(&ps).unwrap();
        for (raw, a) in ps.iter().zip(&adj) {
            prop_assert!(a >= raw && *a <= 1.0);
        }
        for i in 0..ps.len() {
            for j in 0..ps.len() {
                if ps[i] < ps[j] {
                    prop_assert!(adj[i] <= adj[j]);
                }
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn null_model_histogram_covers_every_draw(
        spec in papers(),
        size in 1usize..5,
        samples in 1usize..40,
        seed in any::<u64>(),
    ) {
        let pubs = records(&spec);
        let authors: BTreeSet<String> = pubs.iter().flat_map(|p| p.author_ids.clone()).collect();
        prop_assume!(authors.len() >= size);
        let pool = CandidatePool {
            label: "pool".into(),
            appointment_year: 2024,
            analysis_window_years: 40,
            candidates: authors.iter().map(|a| ScholarId::new(a.clone(), "").unwrap()).collect(),
        };
        let cfg = NullModelConfig::new(size, samples, seed, Indicator::FragmentationRatio);
        let run = null_model_sample(&pool, &pubs, &cfg, None).unwrap();
        prop_assert_eq!(run.values.len(), samples);
        prop_assert_eq!(run.histogram.iter().map(|b| b.count).sum::<usize>(), samples);
        prop_assert!(run.values.iter().all(|v| *v > 0.0 && *v <= 1.0));
        let again = null_model_sample(&pool, &pubs, &cfg, None).unwrap();
        prop_assert_eq!(&run.values, &again.values);
        prop_assert!(!run.exhaustive);
    }
}
