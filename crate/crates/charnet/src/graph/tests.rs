use super::*;
use crate::corpus::Character;
use crate::testkit::toy_corpus;

#[test]
fn hand_countable_weights() {
    let corpus = toy_corpus(&[&["A", "B"], &["A", "B"], &["B", "C"]]);
    let g = build_graph(&corpus, None);
    assert_eq!(g.vertex_count(), 3);
    assert_eq!(g.edge_count(), 2);
    let a = g.index_of("A").unwrap();
    let b = g.index_of("B").unwrap();
    let c = g.index_of("C").unwrap();
    assert_eq!(g.weight_between(a, b), Some(2));
    assert_eq!(g.weight_between(b, c), Some(1));
    assert_eq!(g.weight_between(a, c), None);
}

#[test]
fn solo_scene_yields_empty_graph() {
    let corpus = toy_corpus(&[&["A"]]);
    let g = build_graph(&corpus, None);
    assert!(g.is_empty());
    assert_eq!(g.edge_count(), 0);
}

#[test]
fn duplicate_participants_deduplicated() {
    let corpus = toy_corpus(&[&["A", "A", "B"]]);
    let g = build_graph(&corpus, None);
    let a = g.index_of("A").unwrap();
    let b = g.index_of("B").unwrap();
    assert_eq!(g.weight_between(a, b), Some(1));
}

#[test]
fn empty_scene_range_is_empty_graph() {
    let corpus = toy_corpus(&[&["A", "B"]]);
    let g = build_graph(&corpus, Some((10, 20)));
    assert!(g.is_empty());
}

#[test]
fn disjoint_ranges_add_weights() {
    let corpus = toy_corpus(&[&["A", "B"], &["A", "B"], &["A", "B"], &["B", "C"]]);
    let left = build_graph(&corpus, Some((1, 2)));
    let right = build_graph(&corpus, Some((3, 4)));
    let full = build_graph(&corpus, Some((1, 4)));
    let weight = |g: &CharacterGraph, u: &str, v: &str| -> u32 {
        match (g.index_of(u), g.index_of(v)) {
            (Some(ui), Some(vi)) => g.weight_between(ui, vi).unwrap_or(0),
            _ => 0,
        }
    };
    for (u, v) in [("A", "B"), ("B", "C"), ("A", "C")] {
        assert_eq!(weight(&full, u, v), weight(&left, u, v) + weight(&right, u, v));
    }
}

#[test]
fn total_weight_counts_scene_pairs() {
    let corpus = toy_corpus(&[&["A", "B", "C"], &["A", "B"], &["C", "D", "E", "A"]]);
    let g = build_graph(&corpus, None);
    // sum of C(p,2) over scenes: 3 + 1 + 6
    assert_eq!(g.total_weight(), 10);
}

#[test]
fn bipartite_degrees_match_memberships() {
    let corpus = toy_corpus(&[&["A", "B"], &["B"]]);
    let bg = build_bipartite(&corpus);
    let degrees = bg.character_degrees();
    let ids = bg.character_ids();
    let of = |id: &str| degrees[ids.iter().position(|i| i == id).unwrap()];
    assert_eq!(of("A"), 1);
    assert_eq!(of("B"), 2);
    assert_eq!(bg.scene_sizes(), &[2, 1]);
    // handshake: membership sums agree on both sides
    assert_eq!(
        bg.membership_count(),
        bg.scene_sizes().iter().map(|&s| s as u64).sum::<u64>()
    );
}

#[test]
fn projection_equals_direct_build() {
    let corpus = toy_corpus(&[
        &["A", "B", "C"],
        &["A", "B"],
        &["C", "D"],
        &["D", "E", "A"],
        &["F"],
    ]);
    let direct = build_graph(&corpus, None);
    let projected = build_bipartite(&corpus).project(&corpus);
    let edge_set = |g: &CharacterGraph| -> Vec<(String, String, u32)> {
        let mut edges: Vec<_> = g
            .edges()
            .map(|(u, v, w)| (g.id(u).to_string(), g.id(v).to_string(), w))
            .collect();
        edges.sort();
        edges
    };
    assert_eq!(edge_set(&direct), edge_set(&projected));
}

#[test]
fn filter_thresholds_and_cross_tab() {
    // A is everywhere; B appears 4 times; C and D are extras
    let corpus = toy_corpus(&[
        &["A", "B"],
        &["A", "B"],
        &["A", "B"],
        &["A", "B", "C"],
        &["A", "C"],
        &["A", "D"],
        &["A", "E"],
    ]);
    let spec = FilterSpec {
        min_occurrences: 3,
        min_degree: 2,
        keep_giant_only: true,
        sequential_degree: false,
    };
    let (g, report) = filter_graph(&corpus, &spec);
    // occurrences: A=7, B=4, C=2, D=1, E=1; degrees: A=4, B=2, C=2, D=1, E=1
    // keep occ>3 && degree>=2: A and B
    assert_eq!(report.kept_before_component, 2);
    assert_eq!(g.vertex_count(), 2);
    assert_eq!(report.cross_tab.low_degree_low_occ, 2); // D, E
    assert_eq!(report.cross_tab.low_degree_high_occ, 0);
    assert_eq!(report.cross_tab.high_degree_low_occ, 1); // C
    assert_eq!(report.cross_tab.high_degree_high_occ, 2); // A, B
}

#[test]
fn sequential_degree_prunes_orphaned_survivors() {
    // B passes both criteria on the full graph (its partners are extras),
    // but under the sequential convention the extras are removed first and
    // B then fails the degree test.
    let corpus = toy_corpus(&[
        &["A", "H"],
        &["A", "H"],
        &["H", "I"],
        &["H", "I"],
        &["A", "I"],
        &["A", "I"],
        &["B", "x1"],
        &["B", "x2"],
        &["B", "x3"],
        &["B", "x4"],
    ]);
    // occurrences: A=H=I=4, B=4, extras 1; full degrees: A=H=I=2, B=4
    let joint = FilterSpec {
        min_occurrences: 3,
        min_degree: 2,
        keep_giant_only: false,
        sequential_degree: false,
    };
    let (g_joint, _) = filter_graph(&corpus, &joint);
    assert_eq!(g_joint.vertex_count(), 4);
    assert!(g_joint.index_of("B").is_some());

    let sequential = FilterSpec {
        sequential_degree: true,
        ..joint
    };
    let (g_seq, _) = filter_graph(&corpus, &sequential);
    assert_eq!(g_seq.vertex_count(), 3);
    assert!(g_seq.index_of("B").is_none());
}

#[test]
fn filter_is_idempotent() {
    let corpus = toy_corpus(&[
        &["A", "B"],
        &["A", "B"],
        &["A", "B"],
        &["A", "B", "C"],
        &["A", "C"],
        &["B", "C"],
        &["A", "D"],
        &["C", "D"],
    ]);
    let spec = FilterSpec::default();
    let (g1, _) = filter_graph(&corpus, &spec);
    // re-apply the same thresholds directly on the filtered graph
    let occurrences = corpus.occurrence_counts(crate::corpus::OccurrenceUnit::Scene);
    let keep: Vec<usize> = (0..g1.vertex_count())
        .filter(|&v| {
            occurrences[g1.id(v)] > spec.min_occurrences as u64 && g1.degree(v) >= spec.min_degree
        })
        .collect();
    let g2 = g1.induced(&keep).giant_component();
    assert_eq!(g1.vertex_count(), g2.vertex_count());
    let edges = |g: &CharacterGraph| {
        let mut e: Vec<_> = g
            .edges()
            .map(|(u, v, w)| (g.id(u).to_string(), g.id(v).to_string(), w))
            .collect();
        e.sort();
        e
    };
    assert_eq!(edges(&g1), edges(&g2));
}

#[test]
fn empty_corpus_filters_to_empty_report() {
    let corpus = toy_corpus(&[&["A"]]);
    let (g, report) = filter_graph(&corpus, &FilterSpec::default());
    assert!(g.is_empty());
    assert_eq!(report.kept_before_component, 0);
    assert_eq!(report.giant_size, 0);
    assert_eq!(report.cross_tab.high_degree_high_occ, 0);
}

#[test]
fn induced_subgraph_keeps_isolated_matches() {
    let corpus = toy_corpus(&[&["F1", "M1"]]);
    let mut g = build_graph(&corpus, None);
    // give the vertices sexes by rebuilding attributes
    let attrs: Vec<Character> = (0..g.vertex_count())
        .map(|v| {
            let mut c = g.character(v).clone();
            c.sex = if c.id.starts_with('F') { Sex::Female } else { Sex::Male };
            c
        })
        .collect();
    let edges: Vec<_> = g
        .edges()
        .map(|(u, v, w)| (g.id(u).to_string(), g.id(v).to_string(), w))
        .collect();
    g = CharacterGraph::from_weighted_edges(attrs, edges, Provenance::default());

    let females = g.induced_subgraph(|c| c.sex == Sex::Female);
    assert_eq!(females.vertex_count(), 1);
    assert_eq!(females.edge_count(), 0);

    let all = g.induced_subgraph(|_| true);
    assert_eq!(all.vertex_count(), g.vertex_count());
    assert_eq!(all.edge_count(), g.edge_count());
}

#[test]
fn elbow_matches_bruteforce_chord_distance() {
    let mut counts = BTreeMap::new();
    let mut idx = 0;
    let mut push = |n: usize, value: u64, counts: &mut BTreeMap<String, u64>| {
        for _ in 0..n {
            counts.insert(format!("c{idx:05}"), value);
            idx += 1;
        }
    };
    push(1000, 1, &mut counts);
    push(100, 2, &mut counts);
    push(50, 3, &mut counts);
    push(10, 10, &mut counts);
    push(5, 50, &mut counts);
    let got = elbow_threshold(&counts, 99).unwrap();

    // independent oracle: recompute every chord distance from scratch
    let max = 50u64;
    let n_of = |t: u64| counts.values().filter(|&&c| c > t).count() as f64;
    let (y0, y1) = (n_of(0), n_of(max));
    let mut best = (0u64, f64::MIN);
    for t in 0..=max {
        let num = ((y1 - y0) * t as f64 - max as f64 * n_of(t) + max as f64 * y0).abs();
        let d = num / ((y1 - y0).powi(2) + (max as f64).powi(2)).sqrt();
        if d > best.1 {
            best = (t, d);
        }
    }
    assert_eq!(got as u64, best.0);
    assert!(got <= 3, "knee expected at a small threshold, got {got}");
}

#[test]
fn elbow_degenerate_returns_default() {
    let mut counts = BTreeMap::new();
    for i in 0..10 {
        counts.insert(format!("c{i}"), 7u64);
    }
    assert_eq!(elbow_threshold(&counts, 3).unwrap(), 3);
    counts.clear();
    assert!(elbow_threshold(&counts, 3).is_err());
}

#[test]
fn arc_graphs_follow_arc_volumes() {
    use crate::corpus::ArcRecord;
    let corpus = toy_corpus(&[&["A", "B"], &["B", "C"]]);
    let corpus = corpus
        .with_arcs(vec![
            ArcRecord {
                id: "arc1".into(),
                title: "Arc".into(),
                volumes: vec!["v1".into()],
                reference_type: None,
            },
            ArcRecord {
                id: "arc2".into(),
                title: "Empty".into(),
                volumes: vec![],
                reference_type: None,
            },
        ])
        .unwrap();
    let g = arc_graph(&corpus, "arc1", None).unwrap();
    assert_eq!(g.vertex_count(), 3);
    assert_eq!(g.edge_count(), 2);
    assert!(g.has_edge(g.index_of("A").unwrap(), g.index_of("B").unwrap()));
    assert!(g.has_edge(g.index_of("B").unwrap(), g.index_of("C").unwrap()));

    let empty = arc_graph(&corpus, "arc2", None).unwrap();
    assert!(empty.is_empty());

    assert!(matches!(
        arc_graph(&corpus, "nope", None),
        Err(GraphError::UnknownArc(_))
    ));
}

#[test]
fn edge_list_roundtrip() {
    let corpus = toy_corpus(&[&["A", "B"], &["A", "B"], &["B", "C"]]);
    let g = build_graph(&corpus, None);
    let tmp = tempfile::tempdir().unwrap();
    let path = tmp.path().join("edges.tsv");
    write_edge_list(&g, &path, &["test header".to_string()]).unwrap();
    let g2 = read_edge_list(&path).unwrap();
    assert_eq!(g2.vertex_count(), 3);
    assert_eq!(g2.edge_count(), 2);
    assert_eq!(
        g2.weight_between(g2.index_of("A").unwrap(), g2.index_of("B").unwrap()),
        Some(2)
    );
}

#[test]
fn unweighted_edge_list_defaults_to_one() {
    let tmp = tempfile::tempdir().unwrap();
    let path = tmp.path().join("plain.tsv");
    std::fs::write(&path, "# comment\na b\nb c\n").unwrap();
    let g = read_edge_list(&path).unwrap();
    assert_eq!(g.vertex_count(), 3);
    assert_eq!(g.edge_count(), 2);
    assert_eq!(g.total_weight(), 2);
}
