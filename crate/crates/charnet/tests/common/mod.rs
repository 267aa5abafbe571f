//! Shared builders, brute-force oracles, and check routines used by both
//! the granular test targets and the timed acceptance criteria.
#![allow(dead_code)]

use std::collections::{BTreeMap, HashSet};
use std::path::Path;

use rand::Rng;

use charnet::corpus::{Character, Corpus, OccurrenceUnit, PanelSpan, Scene, Series, Sex, Volume};
use charnet::fitting;
use charnet::gender;
use charnet::graph::{build_bipartite, build_graph, CharacterGraph};
use charnet::metrics;
use charnet::nullmodels;
use charnet::stats;

pub fn corpus_from_scenes(participants: Vec<Vec<usize>>, n_chars: usize) -> Corpus {
    let characters: Vec<Character> = (0..n_chars)
        .map(|i| Character {
            id: format!("c{i:03}"),
            name: Some(format!("c{i:03}")),
            named: true,
            sex: match i % 4 {
                0 => Sex::Female,
                1 | 2 => Sex::Male,
                _ => Sex::Unknown,
            },
            collective: false,
        })
        .collect();
    let volumes = vec![Volume {
        id: "v1".into(),
        series: Series::Main,
        title: "vol".into(),
        publication_order: 1,
        page_count: 0,
        panel_count: 0,
        arc_id: None,
    }];
    let scenes: Vec<Scene> = participants
        .into_iter()
        .enumerate()
        .map(|(i, parts)| Scene {
            id: format!("s{i:03}"),
            volume_id: "v1".into(),
            order_index: (i + 1) as u64,
            span: PanelSpan {
                start_page: 1,
                start_panel: (i + 1) as u32,
                end_page: 1,
                end_panel: (i + 1) as u32,
            },
            participants: parts.iter().map(|&p| format!("c{p:03}")).collect(),
        })
        .collect();
    Corpus::new("prop", characters, volumes, scenes, vec![]).unwrap()
}

pub fn random_scene_corpus(rng: &mut impl Rng) -> Corpus {
    let n_chars = rng.gen_range(2..10);
    let n_scenes = rng.gen_range(1..12);
    let scenes: Vec<Vec<usize>> = (0..n_scenes)
        .map(|_| {
            let size = rng.gen_range(1..5usize);
            (0..size).map(|_| rng.gen_range(0..n_chars)).collect()
        })
        .collect();
    corpus_from_scenes(scenes, n_chars)
}

/// Random simple graph over at most `max_n` vertices.
pub fn random_graph(rng: &mut impl Rng, max_n: usize) -> CharacterGraph {
    let n = rng.gen_range(2..=max_n);
    let mut edges = Vec::new();
    let p = rng.gen_range(0.15..0.7);
    for u in 0..n {
        for v in (u + 1)..n {
            if rng.gen::<f64>() < p {
                edges.push((format!("c{u:02}"), format!("c{v:02}"), 1u32));
            }
        }
    }
    let attrs: Vec<Character> = (0..n)
        .map(|i| Character {
            id: format!("c{i:02}"),
            name: None,
            named: false,
            sex: Sex::Unknown,
            collective: false,
        })
        .collect();
    CharacterGraph::from_weighted_edges(attrs, edges, Default::default())
}

pub fn edge_set(g: &CharacterGraph) -> Vec<(String, String, u32)> {
    let mut e: Vec<_> = g
        .edges()
        .map(|(u, v, w)| (g.id(u).to_string(), g.id(v).to_string(), w))
        .collect();
    e.sort();
    e
}

/// Exhaustive betweenness: enumerate all shortest paths per pair and count
/// interior crossings.
pub fn betweenness_bruteforce(g: &CharacterGraph) -> Vec<f64> {
    let n = g.vertex_count();
    let mut result = vec![0.0f64; n];
    for s in 0..n {
        for t in (s + 1)..n {
            let mut dist = vec![usize::MAX; n];
            dist[s] = 0;
            let mut queue = std::collections::VecDeque::from([s]);
            while let Some(u) = queue.pop_front() {
                for &(v, _) in g.neighbors(u) {
                    let v = v as usize;
                    if dist[v] == usize::MAX {
                        dist[v] = dist[u] + 1;
                        queue.push_back(v);
                    }
                }
            }
            if dist[t] == usize::MAX {
                continue;
            }
            let mut paths: Vec<Vec<usize>> = Vec::new();
            let mut stack = vec![vec![t]];
            while let Some(path) = stack.pop() {
                let last = *path.last().unwrap();
                if last == s {
                    paths.push(path);
                    continue;
                }
                for &(v, _) in g.neighbors(last) {
                    let v = v as usize;
                    if dist[v] + 1 == dist[last] {
                        let mut next = path.clone();
                        next.push(v);
                        stack.push(next);
                    }
                }
            }
            let sigma = paths.len() as f64;
            for path in &paths {
                for &v in &path[1..path.len() - 1] {
                    result[v] += 1.0 / sigma;
                }
            }
        }
    }
    result
}

// ---------------------------------------------------------------------------
// Check routines (panic on failure)
// ---------------------------------------------------------------------------

pub fn check_handshake_and_pair_sums(rounds: usize, seed: u64) {
    let mut rng = stats::rng_from_seed(seed);
    for _ in 0..rounds {
        let corpus = random_scene_corpus(&mut rng);
        let g = build_graph(&corpus, None);
        let degree_sum: u64 = (0..g.vertex_count()).map(|v| g.degree(v) as u64).sum();
        assert_eq!(degree_sum, 2 * g.edge_count() as u64, "handshake identity");
        let expected: u64 = corpus
            .scenes()
            .iter()
            .map(|s| {
                let p = s.distinct_participants().len() as u64;
                p * (p - 1) / 2
            })
            .sum();
        assert_eq!(g.total_weight(), expected, "weight = scene pair sum");
        let counts = corpus.occurrence_counts(OccurrenceUnit::Scene);
        let total: u64 = counts.values().sum();
        let participant_sum: u64 = corpus
            .scenes()
            .iter()
            .map(|s| s.distinct_participants().len() as u64)
            .sum();
        assert_eq!(total, participant_sum, "occurrence totals");
    }
}

pub fn check_bipartite_projection_equivalence(rounds: usize, seed: u64) {
    let mut rng = stats::rng_from_seed(seed);
    for _ in 0..rounds {
        let corpus = random_scene_corpus(&mut rng);
        let direct = build_graph(&corpus, None);
        let projected = build_bipartite(&corpus).project(&corpus);
        assert_eq!(edge_set(&direct), edge_set(&projected));
    }
}

pub fn check_betweenness_against_bruteforce(rounds: usize, max_n: usize, seed: u64) {
    let mut rng = stats::rng_from_seed(seed);
    for round in 0..rounds {
        let g = random_graph(&mut rng, max_n);
        let expected = betweenness_bruteforce(&g);
        let table = metrics::centralities(&g).unwrap();
        for (v, row) in table.rows.iter().enumerate() {
            assert!(
                (row.betweenness - expected[v]).abs() < 1e-9,
                "round {round}: vertex {} got {} expected {}",
                row.id,
                row.betweenness,
                expected[v]
            );
        }
    }
}

pub fn check_triangle_census_against_cubic_oracle(rounds: usize, seed: u64) {
    let mut rng = stats::rng_from_seed(seed);
    for _ in 0..rounds {
        let mut g = random_graph(&mut rng, 12);
        let attrs: Vec<Character> = (0..g.vertex_count())
            .map(|v| {
                let mut c = g.character(v).clone();
                c.sex = match rng.gen_range(0..4) {
                    0 => Sex::Female,
                    1 | 2 => Sex::Male,
                    3 => Sex::Mixed,
                    _ => Sex::Unknown,
                };
                c.collective = c.sex == Sex::Mixed;
                c
            })
            .collect();
        let edges: Vec<_> = g
            .edges()
            .map(|(u, v, w)| (g.id(u).to_string(), g.id(v).to_string(), w))
            .collect();
        g = CharacterGraph::from_weighted_edges(attrs, edges, Default::default());

        let census = gender::triangle_census(&g);
        let mut oracle = gender::TriangleCensus::default();
        let n = g.vertex_count();
        for u in 0..n {
            for v in (u + 1)..n {
                for w in (v + 1)..n {
                    if g.has_edge(u, v) && g.has_edge(u, w) && g.has_edge(v, w) {
                        let mut f = 0;
                        let mut m = 0;
                        for x in [u, v, w] {
                            match g.character(x).sex {
                                Sex::Female => f += 1,
                                Sex::Male => m += 1,
                                _ => {}
                            }
                        }
                        match (f, m) {
                            (3, 0) => oracle.fff += 1,
                            (2, 1) => oracle.ffm += 1,
                            (1, 2) => oracle.fmm += 1,
                            (0, 3) => oracle.mmm += 1,
                            _ => oracle.excluded += 1,
                        }
                    }
                }
            }
        }
        assert_eq!(census, oracle);
        assert_eq!(census.total(), metrics::triangle_count(&g));
    }
}

pub fn check_permutation_exactness_small_groups(seed: u64) {
    let mut rng = stats::rng_from_seed(seed);
    for na in 2..=6usize {
        for nb in 2..=6usize {
            let a: Vec<f64> = (0..na).map(|_| rng.gen_range(0..20) as f64).collect();
            let b: Vec<f64> = (0..nb).map(|_| rng.gen_range(0..20) as f64).collect();
            let out = stats::permutation_mean_diff_test(&a, &b, 1_000_000, 1);
            assert!(out.exact, "groups {na}/{nb} should enumerate");

            let pooled: Vec<f64> = a.iter().chain(b.iter()).copied().collect();
            let n = pooled.len();
            let observed =
                (a.iter().sum::<f64>() / na as f64 - b.iter().sum::<f64>() / nb as f64).abs();
            let mut extreme = 0u64;
            let mut total = 0u64;
            for mask in 0u32..(1 << n) {
                if mask.count_ones() as usize != na {
                    continue;
                }
                total += 1;
                let mut sa = 0.0;
                let mut sb = 0.0;
                for (i, &x) in pooled.iter().enumerate() {
                    if mask & (1 << i) != 0 {
                        sa += x;
                    } else {
                        sb += x;
                    }
                }
                if (sa / na as f64 - sb / nb as f64).abs() >= observed - 1e-12 {
                    extreme += 1;
                }
            }
            let expected = extreme as f64 / total as f64;
            assert!(
                (out.p_value - expected).abs() < 1e-12,
                "groups {na}/{nb}: {} vs {}",
                out.p_value,
                expected
            );
        }
    }
}

pub fn check_configuration_preserves_sequences(rounds: usize, seed: u64) {
    let mut rng = stats::rng_from_seed(seed);
    for round in 0..rounds {
        let n = rng.gen_range(4..24);
        let mut degrees = vec![0u32; n];
        for u in 0..n {
            for v in (u + 1)..n {
                if rng.gen::<f64>() < 0.3 {
                    degrees[u] += 1;
                    degrees[v] += 1;
                }
            }
        }
        let graph = match nullmodels::configuration_model(&degrees, round as u64) {
            Ok(g) => g,
            Err(e) => panic!("round {round}: sequence {degrees:?} rejected: {e}"),
        };
        let mut got = graph.degree_sequence();
        let mut want = degrees.clone();
        got.sort_unstable();
        want.sort_unstable();
        assert_eq!(got, want, "round {round}");
        let edges: HashSet<(usize, usize)> = graph.edges().map(|(u, v, _)| (u, v)).collect();
        assert_eq!(edges.len(), graph.edge_count());
    }
}

pub fn check_ccdf_roundtrip(seed: u64) {
    let mut rng = stats::rng_from_seed(seed);
    let samples: Vec<u64> = (0..500).map(|_| rng.gen_range(1..=30)).collect();
    let pairs = fitting::ccdf(&samples).unwrap();
    let n = samples.len() as f64;
    let mut histogram: BTreeMap<u64, u64> = BTreeMap::new();
    for (i, &(value, p)) in pairs.iter().enumerate() {
        let next_p = pairs.get(i + 1).map(|&(_, q)| q).unwrap_or(0.0);
        histogram.insert(value, ((p - next_p) * n).round() as u64);
    }
    let mut expected: BTreeMap<u64, u64> = BTreeMap::new();
    for &s in &samples {
        *expected.entry(s).or_insert(0) += 1;
    }
    assert_eq!(histogram, expected);
}

pub fn check_deterministic_rerun() {
    let scenes: Vec<Vec<usize>> = vec![
        vec![0, 1],
        vec![1, 2],
        vec![0, 2, 3],
        vec![3, 4],
        vec![4, 5, 0],
        vec![2, 5],
    ];
    let run = || -> String {
        let corpus = corpus_from_scenes(scenes.clone(), 6);
        let g = build_graph(&corpus, None);
        let summary = metrics::topo_summary(&g).unwrap();
        let table = metrics::centralities(&g).unwrap();
        let ensemble = nullmodels::ensemble_summary(
            &nullmodels::GeneratorSpec::ErdosRenyi {
                n: g.vertex_count(),
                m: g.edge_count(),
            },
            5,
            42,
        )
        .unwrap();
        let attack = charnet::robustness::attack(
            &g,
            charnet::robustness::AttackStrategy::Random,
            0.5,
            0.25,
            7,
            9,
            false,
        )
        .unwrap();
        format!(
            "{}|{}|{}|{}",
            serde_json::to_string(&summary).unwrap(),
            serde_json::to_string(&table.rows).unwrap(),
            serde_json::to_string(&ensemble).unwrap(),
            serde_json::to_string(&attack).unwrap(),
        )
    };
    assert_eq!(run(), run());
}

// ---------------------------------------------------------------------------
// Synthetic-oracle checks
// ---------------------------------------------------------------------------

pub fn check_power_law_recovery() {
    for (i, &alpha) in [2.1f64, 2.5, 3.0].iter().enumerate() {
        let samples = fitting::sample_power_law(alpha, 1, 10_000, 9000 + i as u64);
        let fit = fitting::fit_power_law(&samples).unwrap();
        assert!(
            (fit.alpha - alpha).abs() <= 0.1,
            "alpha {alpha}: recovered {} (xmin {}, ks {:.4})",
            fit.alpha,
            fit.xmin,
            fit.ks
        );
    }
}

/// Growing corpus where each new scene pairs a fresh character with an
/// existing one drawn uniformly at random.
pub fn uniform_attachment_corpus(steps: usize, seed: u64) -> Corpus {
    let mut rng = stats::rng_from_seed(seed);
    let mut scenes: Vec<Vec<usize>> = vec![vec![0, 1]];
    let mut present = 2usize;
    for _ in 0..steps {
        let old = rng.gen_range(0..present);
        scenes.push(vec![present, old]);
        present += 1;
    }
    corpus_from_scenes(scenes, present)
}

pub fn check_uniform_attachment_kappa() {
    use charnet::dynamics::{attachment_curve, AttachmentKind};
    let corpus = uniform_attachment_corpus(6_000, 321);
    let t1 = corpus.scenes().len();
    let t0 = t1 / 2;
    let curve = attachment_curve(&corpus, AttachmentKind::External, t0, t1).unwrap();
    let points: Vec<(f64, f64)> = curve
        .cumulative
        .iter()
        .map(|&(k, v)| (k as f64, v))
        .collect();
    let fit = fitting::fit_power_tail(&points, fitting::TailSide::LowerTail).unwrap();
    assert!(
        (fit.exponent - 1.0).abs() <= 0.1,
        "uniform attachment: cumulative-rate exponent {} (r2 {:.3}, {} points)",
        fit.exponent,
        fit.r2,
        fit.n_used
    );
}

pub fn check_log_growth_recovery() {
    let points: Vec<(f64, f64)> = (1..=200)
        .map(|n| (n as f64, -0.75 + 1.4 * (n as f64).ln()))
        .collect();
    let fit = fitting::fit_log_growth(&points).unwrap();
    assert!((fit.intercept + 0.75).abs() < 1e-9);
    assert!((fit.slope - 1.4).abs() < 1e-9);
    assert!((fit.r2 - 1.0).abs() < 1e-9);
}

// ---------------------------------------------------------------------------
// Reference dataset access
// ---------------------------------------------------------------------------

/// Environment variable pointing at the canonical corpus directory of the
/// reference annotation (see the README for how to prepare it).
pub const DATASET_ENV: &str = "CHARNET_DATASET_DIR";

/// Loads the reference dataset when the environment points at one. A set
/// but unreadable directory is an error, not a skip.
pub fn load_dataset() -> Option<Corpus> {
    let dir = std::env::var_os(DATASET_ENV)?;
    let path = Path::new(&dir);
    match charnet::corpus::parse_corpus(path) {
        Ok(corpus) => Some(corpus),
        Err(e) => panic!("{DATASET_ENV} points at {} but parsing failed: {e}", path.display()),
    }
}

pub fn skip_line(name: &str) {
    println!("[acceptance] {name}: SKIP — set {DATASET_ENV} to run against the reference dataset");
}

/// Filter settings reproducing the published filtered-network size
/// (degree evaluated after occurrence pruning).
pub fn sequential_filter() -> charnet::FilterSpec {
    charnet::FilterSpec {
        sequential_degree: true,
        ..charnet::FilterSpec::default()
    }
}

/// Bipartite degree sequences of the corpus restricted to the vertices of
/// `g`: per-character scene counts and per-scene participant counts over
/// the restricted, non-empty scenes.
pub fn bipartite_sequences(corpus: &Corpus, g: &CharacterGraph) -> (Vec<u32>, Vec<u32>) {
    let members: HashSet<&str> = (0..g.vertex_count()).map(|v| g.id(v)).collect();
    let mut char_degrees: BTreeMap<&str, u32> = members.iter().map(|&id| (id, 0)).collect();
    let mut scene_sizes = Vec::new();
    for scene in corpus.scenes() {
        let present: Vec<&str> = scene
            .distinct_participants()
            .into_iter()
            .filter(|p| members.contains(p))
            .collect();
        if present.is_empty() {
            continue;
        }
        scene_sizes.push(present.len() as u32);
        for p in present {
            *char_degrees.get_mut(p).unwrap() += 1;
        }
    }
    (char_degrees.into_values().collect(), scene_sizes)
}

/// `|x - reference|` within `rel` of the reference or `abs`, whichever is
/// looser.
pub fn within(x: f64, reference: f64, rel: f64, abs: f64) -> bool {
    (x - reference).abs() <= (rel * reference.abs()).max(abs)
}
