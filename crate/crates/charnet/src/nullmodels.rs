//! Reference random models: uniform graphs with fixed edge count, the
//! configuration model, the random bipartite collaboration model with its
//! one-mode projection, a degree-sequenced ring lattice, and
//! degree-preserving rewiring. Ensemble statistics over seeded replicates
//! support the small-world assessment.

use std::collections::{HashMap, HashSet};

use rand::seq::SliceRandom;
use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::corpus::{Character, Sex};
use crate::graph::{CharacterGraph, Provenance};
use crate::metrics::{topo_summary, TopoStats, TopoSummary};
use crate::stats;

#[derive(Debug, Error)]
pub enum ModelError {
    #[error("edge count {m} out of range for {n} vertices")]
    EdgeCountOutOfRange { n: usize, m: usize },
    #[error("degree sequence is not graphical: {0}")]
    NotGraphical(&'static str),
    #[error("edge-swap repair failed after {0} attempts")]
    RepairFailed(usize),
    #[error("stub totals differ: characters {0}, scenes {1}")]
    StubMismatch(u64, u64),
    #[error("lattice construction infeasible: {0}")]
    LatticeInfeasible(String),
    #[error("replicate {index}: {source}")]
    Replicate {
        index: usize,
        #[source]
        source: Box<ModelError>,
    },
    #[error(transparent)]
    Metrics(#[from] crate::metrics::MetricsError),
}

fn synthetic_vertices(n: usize) -> Vec<Character> {
    let width = n.saturating_sub(1).to_string().len().max(1);
    (0..n)
        .map(|i| Character {
            id: format!("n{i:0width$}"),
            name: None,
            named: false,
            sex: Sex::Unknown,
            collective: false,
        })
        .collect()
}

fn graph_from_index_edges(
    n: usize,
    edges: impl IntoIterator<Item = (usize, usize)>,
    source: &str,
) -> CharacterGraph {
    let attrs = synthetic_vertices(n);
    let named: Vec<(String, String, u32)> = edges
        .into_iter()
        .map(|(u, v)| (attrs[u].id.clone(), attrs[v].id.clone(), 1))
        .collect();
    CharacterGraph::from_weighted_edges(
        attrs,
        named,
        Provenance {
            source: source.to_string(),
            scene_range: None,
            filter: None,
        },
    )
}

/// Uniform simple graph with exactly `n` vertices and `m` edges.
pub fn erdos_renyi(n: usize, m: usize, seed: u64) -> Result<CharacterGraph, ModelError> {
    let max_edges = n.saturating_mul(n.saturating_sub(1)) / 2;
    if m > max_edges {
        return Err(ModelError::EdgeCountOutOfRange { n, m });
    }
    let mut rng = stats::rng_from_seed(seed);
    // dense requests sample the complement instead
    let sample_complement = m > max_edges / 2;
    let target = if sample_complement { max_edges - m } else { m };
    let mut chosen: HashSet<(u32, u32)> = HashSet::with_capacity(target);
    while chosen.len() < target {
        let u = rng.gen_range(0..n as u32);
        let v = rng.gen_range(0..n as u32);
        if u == v {
            continue;
        }
        chosen.insert((u.min(v), u.max(v)));
    }
    let edges: Vec<(usize, usize)> = if sample_complement {
        let mut edges = Vec::with_capacity(m);
        for u in 0..n as u32 {
            for v in (u + 1)..n as u32 {
                if !chosen.contains(&(u, v)) {
                    edges.push((u as usize, v as usize));
                }
            }
        }
        edges
    } else {
        chosen.iter().map(|&(u, v)| (u as usize, v as usize)).collect()
    };
    Ok(graph_from_index_edges(n, edges, "model:erdos-renyi"))
}

/// Erdős–Gallai graphicality test.
fn is_graphical(degrees: &[u32]) -> bool {
    let n = degrees.len();
    let mut d: Vec<u64> = degrees.iter().map(|&x| x as u64).collect();
    d.sort_unstable_by(|a, b| b.cmp(a));
    if d.iter().sum::<u64>() % 2 != 0 {
        return false;
    }
    if d.first().is_some_and(|&x| x as usize >= n) {
        return false;
    }
    let prefix: Vec<u64> = d
        .iter()
        .scan(0u64, |acc, &x| {
            *acc += x;
            Some(*acc)
        })
        .collect();
    for k in 1..=n {
        let lhs = prefix[k - 1];
        let mut rhs = (k as u64) * (k as u64 - 1);
        for &di in &d[k..] {
            rhs += di.min(k as u64);
        }
        if lhs > rhs {
            return false;
        }
    }
    true
}

const REPAIR_ATTEMPT_LIMIT: usize = 1_000_000;

/// Configuration model: random stub matching followed by double-edge-swap
/// repair of self-loops and parallel edges. The degree sequence is
/// preserved exactly.
pub fn configuration_model(degrees: &[u32], seed: u64) -> Result<CharacterGraph, ModelError> {
    let n = degrees.len();
    let total: u64 = degrees.iter().map(|&d| d as u64).sum();
    if !total.is_multiple_of(2) {
        return Err(ModelError::NotGraphical("odd degree sum"));
    }
    if !is_graphical(degrees) {
        return Err(ModelError::NotGraphical("fails the Erdos-Gallai condition"));
    }
    let mut rng = stats::rng_from_seed(seed);
    let mut stubs: Vec<u32> = Vec::with_capacity(total as usize);
    for (v, &d) in degrees.iter().enumerate() {
        stubs.extend(std::iter::repeat_n(v as u32, d as usize));
    }

    let is_defect = |e: (u32, u32), mult: &HashMap<(u32, u32), u32>| {
        e.0 == e.1 || mult.get(&e).copied().unwrap_or(0) > 1
    };

    // Attempts a double swap of edges i and j; both replacement edges must
    // be loop-free and unused, so a successful swap never adds defects.
    fn try_swap(
        edges: &mut [(u32, u32)],
        multiplicity: &mut HashMap<(u32, u32), u32>,
        i: usize,
        j: usize,
        flip: bool,
    ) -> bool {
        if i == j {
            return false;
        }
        let (a, b) = edges[i];
        let (c, d) = edges[j];
        let (p, q) = if flip { ((a, d), (c, b)) } else { ((a, c), (b, d)) };
        let p = (p.0.min(p.1), p.0.max(p.1));
        let q = (q.0.min(q.1), q.0.max(q.1));
        if p.0 == p.1 || q.0 == q.1 {
            return false;
        }
        // remove originals before testing for duplicates
        *multiplicity.get_mut(&edges[i]).unwrap() -= 1;
        *multiplicity.get_mut(&edges[j]).unwrap() -= 1;
        let p_free = multiplicity.get(&p).copied().unwrap_or(0) == 0;
        let q_free = p != q && multiplicity.get(&q).copied().unwrap_or(0) == 0;
        if p_free && q_free {
            edges[i] = p;
            edges[j] = q;
            *multiplicity.entry(p).or_insert(0) += 1;
            *multiplicity.entry(q).or_insert(0) += 1;
            true
        } else {
            *multiplicity.get_mut(&edges[i]).unwrap() += 1;
            *multiplicity.get_mut(&edges[j]).unwrap() += 1;
            false
        }
    }

    // A defect can be temporarily unfixable (every candidate partner would
    // duplicate an existing edge, which happens around near-saturated
    // hubs). When the walk stalls, shaking the clean part of the graph
    // with ordinary degree-preserving swaps reopens partners; a fresh stub
    // matching is the last resort. Successful swaps never create defects,
    // so the defect list only shrinks, with stale entries dropped lazily.
    let mut attempts = 0usize;
    while attempts <= REPAIR_ATTEMPT_LIMIT {
        stubs.shuffle(&mut rng);
        let mut edges: Vec<(u32, u32)> = stubs
            .chunks_exact(2)
            .map(|pair| (pair[0].min(pair[1]), pair[0].max(pair[1])))
            .collect();
        let mut multiplicity: HashMap<(u32, u32), u32> = HashMap::new();
        for &e in &edges {
            *multiplicity.entry(e).or_insert(0) += 1;
        }
        let mut defects: Vec<usize> = edges
            .iter()
            .enumerate()
            .filter(|&(_, &e)| is_defect(e, &multiplicity))
            .map(|(i, _)| i)
            .collect();
        let mut stalled = 0usize;
        let mut shakes = 0usize;
        while shakes <= 64 && attempts <= REPAIR_ATTEMPT_LIMIT {
            let Some(pos) = (!defects.is_empty()).then(|| rng.gen_range(0..defects.len())) else {
                return Ok(graph_from_index_edges(
                    n,
                    edges.into_iter().map(|(u, v)| (u as usize, v as usize)),
                    "model:configuration",
                ));
            };
            let i = defects[pos];
            if !is_defect(edges[i], &multiplicity) {
                defects.swap_remove(pos);
                continue;
            }
            if stalled > 2_000 {
                let mut accepted = 0usize;
                while accepted < 500 && attempts <= REPAIR_ATTEMPT_LIMIT {
                    attempts += 1;
                    let x = rng.gen_range(0..edges.len());
                    let y = rng.gen_range(0..edges.len());
                    let flip = rng.gen::<bool>();
                    if try_swap(&mut edges, &mut multiplicity, x, y, flip) {
                        accepted += 1;
                    }
                }
                stalled = 0;
                shakes += 1;
                continue;
            }
            attempts += 1;
            let j = rng.gen_range(0..edges.len());
            let flip = rng.gen::<bool>();
            if try_swap(&mut edges, &mut multiplicity, i, j, flip) {
                defects.swap_remove(pos);
                stalled = 0;
            } else {
                stalled += 1;
            }
        }
    }
    Err(ModelError::RepairFailed(attempts))
}

/// Projection of a random bipartite character–scene graph with the given
/// degree sequences onto the characters (unweighted simple graph).
pub fn bipartite_configuration(
    character_degrees: &[u32],
    scene_sizes: &[u32],
    seed: u64,
) -> Result<CharacterGraph, ModelError> {
    let char_total: u64 = character_degrees.iter().map(|&d| d as u64).sum();
    let scene_total: u64 = scene_sizes.iter().map(|&s| s as u64).sum();
    if char_total != scene_total {
        return Err(ModelError::StubMismatch(char_total, scene_total));
    }
    let mut rng = stats::rng_from_seed(seed);
    let mut char_stubs: Vec<u32> = Vec::with_capacity(char_total as usize);
    for (c, &d) in character_degrees.iter().enumerate() {
        char_stubs.extend(std::iter::repeat_n(c as u32, d as usize));
    }
    char_stubs.shuffle(&mut rng);
    let mut members: Vec<Vec<u32>> = vec![Vec::new(); scene_sizes.len()];
    let mut cursor = 0usize;
    for (s, &size) in scene_sizes.iter().enumerate() {
        for _ in 0..size {
            members[s].push(char_stubs[cursor]);
            cursor += 1;
        }
    }
    let mut pairs: HashSet<(u32, u32)> = HashSet::new();
    for scene in &mut members {
        scene.sort_unstable();
        scene.dedup(); // a character drawn twice into one scene counts once
        for i in 0..scene.len() {
            for j in (i + 1)..scene.len() {
                pairs.insert((scene[i], scene[j]));
            }
        }
    }
    Ok(graph_from_index_edges(
        character_degrees.len(),
        pairs.into_iter().map(|(u, v)| (u as usize, v as usize)),
        "model:bipartite-projection",
    ))
}

/// Expected mean degree of the bipartite projection under random stub
/// matching (collision-free approximation): the size-biased mean number of
/// co-participants, `sum_s s(s-1) / n_characters`.
pub fn bipartite_expected_mean_degree(character_count: usize, scene_sizes: &[u32]) -> f64 {
    if character_count == 0 {
        return 0.0;
    }
    let pair_slots: u64 = scene_sizes.iter().map(|&s| s as u64 * (s as u64 - 1)).sum();
    pair_slots as f64 / character_count as f64
}

/// Deterministic ring lattice following a degree sequence: a base regular
/// ring at the (even-floored) minimum degree, hub seats assigned outward
/// from position 0 by decreasing target degree, each hub then connected to
/// its spatially nearest non-neighbors until it reaches its target.
///
/// Vertices near a hub can end up above their own target; the sequence is
/// matched exactly at the top and approximately at the bottom.
pub fn ring_lattice(degrees: &[u32]) -> Result<CharacterGraph, ModelError> {
    let n = degrees.len();
    if n < 3 {
        return Err(ModelError::LatticeInfeasible(format!(
            "need at least 3 vertices, got {n}"
        )));
    }
    let min_degree = *degrees.iter().min().unwrap();
    let base = (min_degree & !1).max(2);
    if base as usize >= n {
        return Err(ModelError::LatticeInfeasible(format!(
            "base ring degree {base} needs more than {n} vertices"
        )));
    }
    let max_degree = *degrees.iter().max().unwrap();
    if max_degree as usize >= n {
        return Err(ModelError::LatticeInfeasible(format!(
            "target degree {max_degree} unreachable with {n} vertices"
        )));
    }

    // seat order: 0, +1, -1, +2, -2, ...
    let seat_of_rank = |rank: usize| -> usize {
        if rank == 0 {
            0
        } else if rank % 2 == 1 {
            rank.div_ceil(2)
        } else {
            n - rank / 2
        }
    };
    let mut targets_sorted: Vec<u32> = degrees.to_vec();
    targets_sorted.sort_unstable_by(|a, b| b.cmp(a));
    let mut target = vec![0u32; n];
    for (rank, &t) in targets_sorted.iter().enumerate() {
        target[seat_of_rank(rank)] = t;
    }

    let mut adjacency: Vec<HashSet<u32>> = vec![HashSet::new(); n];
    let mut degree = vec![0u32; n];
    fn add_edge(adjacency: &mut [HashSet<u32>], degree: &mut [u32], u: usize, v: usize) {
        if adjacency[u].insert(v as u32) {
            adjacency[v].insert(u as u32);
            degree[u] += 1;
            degree[v] += 1;
        }
    }
    for u in 0..n {
        for step in 1..=(base / 2) as usize {
            let v = (u + step) % n;
            add_edge(&mut adjacency, &mut degree, u, v);
        }
    }

    // process seats by decreasing target
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| target[b].cmp(&target[a]).then(a.cmp(&b)));
    for &u in &order {
        let mut radius = 1usize;
        while degree[u] < target[u] {
            if radius > n / 2 {
                return Err(ModelError::LatticeInfeasible(format!(
                    "vertex at seat {u} cannot reach degree {}",
                    target[u]
                )));
            }
            let right = (u + radius) % n;
            let left = (u + n - radius) % n;
            if degree[u] < target[u] && right != u {
                add_edge(&mut adjacency, &mut degree, u, right);
            }
            if degree[u] < target[u] && left != u && left != right {
                add_edge(&mut adjacency, &mut degree, u, left);
            }
            radius += 1;
        }
    }

    let mut edges = Vec::new();
    for (u, neighbors) in adjacency.iter().enumerate() {
        for &v in neighbors {
            if (v as usize) > u {
                edges.push((u, v as usize));
            }
        }
    }
    Ok(graph_from_index_edges(n, edges, "model:ring-lattice"))
}

/// Degree-preserving randomization by double edge swaps, rejecting swaps
/// that would create self-loops or parallel edges. Aims for
/// `swaps_per_edge` accepted swaps per edge with a bounded number of
/// attempts, so inputs with no legal swap (stars) come back unchanged.
pub fn degree_preserving_rewire(
    g: &CharacterGraph,
    swaps_per_edge: f64,
    seed: u64,
) -> CharacterGraph {
    let m = g.edge_count();
    if m < 2 {
        return g.clone();
    }
    let mut rng = stats::rng_from_seed(seed);
    let mut edges: Vec<(u32, u32)> = g.edges().map(|(u, v, _)| (u as u32, v as u32)).collect();
    let mut present: HashSet<(u32, u32)> = edges.iter().copied().collect();
    let target = (swaps_per_edge * m as f64).ceil() as usize;
    let attempt_limit = target.saturating_mul(100).max(1000);
    let mut accepted = 0usize;
    let mut attempts = 0usize;
    while accepted < target && attempts < attempt_limit {
        attempts += 1;
        let i = rng.gen_range(0..edges.len());
        let j = rng.gen_range(0..edges.len());
        if i == j {
            continue;
        }
        let (a, b) = edges[i];
        let (c, d) = edges[j];
        let (p, q) = if rng.gen::<bool>() {
            ((a, d), (c, b))
        } else {
            ((a, c), (b, d))
        };
        let p = (p.0.min(p.1), p.0.max(p.1));
        let q = (q.0.min(q.1), q.0.max(q.1));
        if p.0 == p.1 || q.0 == q.1 || p == q {
            continue;
        }
        if (p != edges[i] && p != edges[j] && present.contains(&p))
            || (q != edges[i] && q != edges[j] && present.contains(&q))
        {
            continue;
        }
        present.remove(&edges[i]);
        present.remove(&edges[j]);
        present.insert(p);
        present.insert(q);
        edges[i] = p;
        edges[j] = q;
        accepted += 1;
    }
    let attrs: Vec<Character> = g.characters().to_vec();
    let named: Vec<(String, String, u32)> = edges
        .iter()
        .map(|&(u, v)| (g.id(u as usize).to_string(), g.id(v as usize).to_string(), 1))
        .collect();
    CharacterGraph::from_weighted_edges(
        attrs,
        named,
        Provenance {
            source: format!("{}:rewired", g.provenance().source),
            scene_range: None,
            filter: g.provenance().filter,
        },
    )
}

/// What to generate for an ensemble.
#[derive(Debug, Clone)]
pub enum GeneratorSpec {
    ErdosRenyi {
        n: usize,
        m: usize,
    },
    Configuration {
        degrees: Vec<u32>,
    },
    BipartiteProjection {
        character_degrees: Vec<u32>,
        scene_sizes: Vec<u32>,
    },
    RingLattice {
        degrees: Vec<u32>,
    },
}

impl GeneratorSpec {
    pub fn name(&self) -> &'static str {
        match self {
            GeneratorSpec::ErdosRenyi { .. } => "erdos-renyi",
            GeneratorSpec::Configuration { .. } => "configuration",
            GeneratorSpec::BipartiteProjection { .. } => "bipartite-projection",
            GeneratorSpec::RingLattice { .. } => "ring-lattice",
        }
    }

    pub fn generate(&self, seed: u64) -> Result<CharacterGraph, ModelError> {
        match self {
            GeneratorSpec::ErdosRenyi { n, m } => erdos_renyi(*n, *m, seed),
            GeneratorSpec::Configuration { degrees } => configuration_model(degrees, seed),
            GeneratorSpec::BipartiteProjection {
                character_degrees,
                scene_sizes,
            } => bipartite_configuration(character_degrees, scene_sizes, seed),
            GeneratorSpec::RingLattice { degrees } => ring_lattice(degrees),
        }
    }
}

/// Mean and standard deviation of every summary statistic over seeded
/// replicates. Undefined values (NaN) are skipped per statistic; the
/// standard deviation is the population one, zero for a single replicate.
#[derive(Debug, Clone, Serialize)]
pub struct EnsembleSummary {
    pub model: String,
    pub replicates: usize,
    pub master_seed: u64,
    pub mean: TopoStats,
    pub std: TopoStats,
}

fn aggregate(stats_list: &[TopoStats]) -> (TopoStats, TopoStats) {
    let field = |get: fn(&TopoStats) -> f64| -> (f64, f64) {
        let values: Vec<f64> = stats_list.iter().map(get).filter(|v| v.is_finite()).collect();
        if values.is_empty() {
            (f64::NAN, f64::NAN)
        } else {
            (stats::mean(&values), stats::population_std(&values))
        }
    };
    let (mean_n, std_n) = field(|s| s.vertices);
    let (mean_m, std_m) = field(|s| s.edges);
    let (mean_density, std_density) = field(|s| s.density);
    let (mean_k, std_k) = field(|s| s.mean_degree);
    let (mean_kmax, std_kmax) = field(|s| s.max_degree);
    let (mean_rho, std_rho) = field(|s| s.degree_assortativity);
    let (mean_d, std_d) = field(|s| s.mean_distance);
    let (mean_dmax, std_dmax) = field(|s| s.diameter);
    let (mean_c, std_c) = field(|s| s.mean_transitivity);
    (
        TopoStats {
            vertices: mean_n,
            edges: mean_m,
            density: mean_density,
            mean_degree: mean_k,
            max_degree: mean_kmax,
            degree_assortativity: mean_rho,
            mean_distance: mean_d,
            diameter: mean_dmax,
            mean_transitivity: mean_c,
        },
        TopoStats {
            vertices: std_n,
            edges: std_m,
            density: std_density,
            mean_degree: std_k,
            max_degree: std_kmax,
            degree_assortativity: std_rho,
            mean_distance: std_d,
            diameter: std_dmax,
            mean_transitivity: std_c,
        },
    )
}

/// Summary statistics over `replicates` independent draws; replicate `r`
/// uses a seed derived from `(master_seed, r)`, so results do not depend
/// on scheduling.
pub fn ensemble_summary(
    spec: &GeneratorSpec,
    replicates: usize,
    master_seed: u64,
) -> Result<EnsembleSummary, ModelError> {
    let per_replicate: Vec<Result<TopoStats, ModelError>> = (0..replicates)
        .into_par_iter()
        .map(|r| {
            let graph = spec
                .generate(stats::derive_seed(master_seed, r as u64))
                .map_err(|e| ModelError::Replicate {
                    index: r,
                    source: Box::new(e),
                })?;
            let summary = topo_summary(&graph).map_err(ModelError::from)?;
            Ok(summary.to_stats())
        })
        .collect();
    let mut collected = Vec::with_capacity(replicates);
    for r in per_replicate {
        collected.push(r?);
    }
    let (mean, std) = aggregate(&collected);
    Ok(EnsembleSummary {
        model: spec.name().to_string(),
        replicates,
        master_seed,
        mean,
        std,
    })
}

/// Comparison factors for the small-world verdict; all three clauses must
/// hold.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct SmallWorldFactors {
    /// Mean distance at most this multiple of the configuration model's.
    pub distance_vs_random: f64,
    /// Transitivity at least this multiple of the configuration model's.
    pub transitivity_vs_random: f64,
    /// Lattice mean distance at least this multiple of the network's.
    pub lattice_distance_ratio: f64,
}

impl Default for SmallWorldFactors {
    fn default() -> Self {
        SmallWorldFactors {
            distance_vs_random: 2.0,
            transitivity_vs_random: 5.0,
            lattice_distance_ratio: 5.0,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct SmallWorldReport {
    pub observed: TopoSummary,
    pub erdos_renyi: EnsembleSummary,
    pub configuration: EnsembleSummary,
    pub bipartite: Option<EnsembleSummary>,
    /// Analytic expected mean degree of the bipartite projection, when the
    /// sequences were supplied.
    pub bipartite_expected_mean_degree: Option<f64>,
    pub lattice: Option<TopoSummary>,
    pub factors: SmallWorldFactors,
    pub short_distance: bool,
    pub high_transitivity: bool,
    pub far_from_lattice: bool,
    pub small_world: bool,
}

/// Builds the reference ensembles for `g` (uniform random, configuration,
/// optional bipartite projection) plus the deterministic lattice, and
/// applies the three-clause verdict: distances comparable to the
/// configuration model, transitivity far above it, and distances far below
/// the lattice's.
pub fn smallworld_verdict(
    g: &CharacterGraph,
    replicates: usize,
    seed: u64,
    bipartite: Option<(&[u32], &[u32])>,
    factors: SmallWorldFactors,
) -> Result<SmallWorldReport, ModelError> {
    let observed = topo_summary(g)?;
    let degrees = g.degree_sequence();
    let er = ensemble_summary(
        &GeneratorSpec::ErdosRenyi {
            n: g.vertex_count(),
            m: g.edge_count(),
        },
        replicates,
        stats::derive_seed(seed, 1),
    )?;
    let config = ensemble_summary(
        &GeneratorSpec::Configuration {
            degrees: degrees.clone(),
        },
        replicates,
        stats::derive_seed(seed, 2),
    )?;
    let bipartite_summary = match bipartite {
        Some((char_degrees, scene_sizes)) => Some(ensemble_summary(
            &GeneratorSpec::BipartiteProjection {
                character_degrees: char_degrees.to_vec(),
                scene_sizes: scene_sizes.to_vec(),
            },
            replicates,
            stats::derive_seed(seed, 3),
        )?),
        None => None,
    };
    let bipartite_expected = bipartite.map(|(cd, ss)| bipartite_expected_mean_degree(cd.len(), ss));
    // the lattice is deterministic; it can be infeasible for some sequences
    let lattice = ring_lattice(&degrees)
        .ok()
        .map(|l| topo_summary(&l))
        .transpose()?;

    let d_obs = observed.mean_distance.unwrap_or(f64::NAN);
    let c_obs = observed.mean_transitivity.unwrap_or(f64::NAN);
    let short_distance = d_obs <= factors.distance_vs_random * config.mean.mean_distance;
    let high_transitivity = c_obs >= factors.transitivity_vs_random * config.mean.mean_transitivity;
    let far_from_lattice = lattice
        .as_ref()
        .and_then(|l| l.mean_distance)
        .is_some_and(|ld| ld >= factors.lattice_distance_ratio * d_obs);
    let small_world = short_distance && high_transitivity && far_from_lattice;
    Ok(SmallWorldReport {
        observed,
        erdos_renyi: er,
        configuration: config,
        bipartite: bipartite_summary,
        bipartite_expected_mean_degree: bipartite_expected,
        lattice,
        factors,
        short_distance,
        high_transitivity,
        far_from_lattice,
        small_world,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    #[test]
    fn er_exact_edge_counts() {
        let g = erdos_renyi(10, 0, 1).unwrap();
        assert_eq!(g.vertex_count(), 10);
        assert_eq!(g.edge_count(), 0);
        let g = erdos_renyi(7, 21, 1).unwrap();
        assert_eq!(g.edge_count(), 21); // complete graph
        for v in 0..7 {
            assert_eq!(g.degree(v), 6);
        }
        assert!(erdos_renyi(4, 7, 1).is_err());
        for seed in 0..20 {
            let g = erdos_renyi(30, 100, seed).unwrap();
            assert_eq!(g.edge_count(), 100);
        }
    }

    #[test]
    fn configuration_preserves_degrees() {
        let degrees = vec![1, 1];
        let g = configuration_model(&degrees, 5).unwrap();
        assert_eq!(g.edge_count(), 1);

        let degrees = vec![2, 2, 2];
        let g = configuration_model(&degrees, 5).unwrap();
        assert_eq!(g.edge_count(), 3); // triangle is the only simple graph

        assert!(configuration_model(&[1, 1, 1], 0).is_err()); // odd sum
        assert!(configuration_model(&[3, 1, 1, 1, 0, 0], 0).is_ok());
        assert!(configuration_model(&[5, 1, 1, 1, 0, 0], 0).is_err()); // not graphical
    }

    #[test]
    fn bipartite_matching_projection() {
        // every scene holds 2 characters, every character plays once:
        // the projection is a perfect matching
        let char_degrees = vec![1; 8];
        let scene_sizes = vec![2; 4];
        let g = bipartite_configuration(&char_degrees, &scene_sizes, 3).unwrap();
        assert_eq!(g.edge_count(), 4);
        for v in 0..8 {
            assert_eq!(g.degree(v), 1);
        }
        assert!(close(
            bipartite_expected_mean_degree(8, &scene_sizes),
            1.0,
            1e-12
        ));
        assert!(bipartite_configuration(&[2, 1], &[2], 0).is_err());
    }

    #[test]
    fn bipartite_projection_degree_bounded_by_scene_capacity() {
        // a character in scenes of sizes s_1..s_k meets at most
        // sum (s_i - 1) distinct partners
        for seed in 0..10u64 {
            let mut rng = stats::rng_from_seed(seed);
            let scene_sizes: Vec<u32> = (0..12).map(|_| rng.gen_range(1..5)).collect();
            let total: u32 = scene_sizes.iter().sum();
            // spread the stubs over 8 characters
            let mut char_degrees = vec![0u32; 8];
            for _ in 0..total {
                let c = rng.gen_range(0..8);
                char_degrees[c] += 1;
            }
            let g = bipartite_configuration(&char_degrees, &scene_sizes, seed).unwrap();
            // an upper bound independent of the matching: the character's
            // stub count times the largest co-scene capacity
            let max_partner_slots = scene_sizes.iter().map(|&s| s.saturating_sub(1)).max().unwrap();
            for (v, &stubs) in char_degrees.iter().enumerate() {
                let bound = stubs as u64 * max_partner_slots as u64;
                assert!(
                    g.degree(v) as u64 <= bound,
                    "seed {seed}: vertex {v} degree {} exceeds capacity {bound}",
                    g.degree(v)
                );
            }
        }
    }

    #[test]
    fn bipartite_ensemble_matches_enumeration_oracle() {
        // 4 characters with one appearance each, 3 scenes of sizes 2, 1, 1:
        // exactly one character pair shares a scene whatever the matching,
        // so the projected mean degree is always 2/4 = 0.5
        let char_degrees = vec![1, 1, 1, 1];
        let scene_sizes = vec![2, 1, 1];
        let expected = bipartite_expected_mean_degree(4, &scene_sizes);
        assert!(close(expected, 0.5, 1e-12));
        let spec = GeneratorSpec::BipartiteProjection {
            character_degrees: char_degrees,
            scene_sizes,
        };
        let summary = ensemble_summary(&spec, 40, 9).unwrap();
        assert!(close(summary.mean.mean_degree, 0.5, 0.025));
    }

    #[test]
    fn ring_lattice_cycles() {
        // all degrees 2: a plain cycle
        let g = ring_lattice(&[2; 5]).unwrap();
        let s = topo_summary(&g).unwrap();
        assert_eq!(g.edge_count(), 5);
        assert!(close(s.mean_distance.unwrap(), 1.5, 1e-12));
        assert!(close(s.mean_transitivity.unwrap(), 0.0, 1e-12));

        // all degrees 4 on 10 vertices: C10(1,2), transitivity 1/2
        let g = ring_lattice(&[4; 10]).unwrap();
        let s = topo_summary(&g).unwrap();
        assert_eq!(g.edge_count(), 20);
        assert!(close(s.mean_transitivity.unwrap(), 0.5, 1e-12));

        assert!(ring_lattice(&[2, 2]).is_err());
    }

    #[test]
    fn ring_lattice_hub_assignment_matches_top_degrees() {
        let mut degrees = vec![2u32; 20];
        degrees[0] = 9;
        degrees[1] = 6;
        let g = ring_lattice(&degrees).unwrap();
        let mut got: Vec<u32> = g.degree_sequence();
        got.sort_unstable_by(|a, b| b.cmp(a));
        assert_eq!(got[0], 9);
        assert_eq!(got[1], 6);
        // low end may exceed its target but never drops below the base ring
        assert!(got.iter().all(|&d| d >= 2));
    }

    #[test]
    fn rewire_preserves_degree_sequence() {
        let corpus = crate::testkit::toy_corpus(&[
            &["A", "B"],
            &["B", "C"],
            &["C", "D"],
            &["D", "E"],
            &["E", "A"],
            &["A", "C"],
        ]);
        let g = crate::graph::build_graph(&corpus, None);
        let r = degree_preserving_rewire(&g, 10.0, 17);
        let mut before: Vec<(String, u32)> = (0..g.vertex_count())
            .map(|v| (g.id(v).to_string(), g.degree(v)))
            .collect();
        let mut after: Vec<(String, u32)> = (0..r.vertex_count())
            .map(|v| (r.id(v).to_string(), r.degree(v)))
            .collect();
        before.sort();
        after.sort();
        assert_eq!(before, after);
        assert_eq!(g.edge_count(), r.edge_count());
    }

    #[test]
    fn rewire_star_unchanged() {
        let corpus = crate::testkit::toy_corpus(&[&["H", "a"], &["H", "b"], &["H", "c"]]);
        let g = crate::graph::build_graph(&corpus, None);
        let r = degree_preserving_rewire(&g, 10.0, 4);
        let edges = |g: &CharacterGraph| {
            let mut e: Vec<_> = g
                .edges()
                .map(|(u, v, _)| (g.id(u).to_string(), g.id(v).to_string()))
                .collect();
            e.sort();
            e
        };
        assert_eq!(edges(&g), edges(&r));
    }

    #[test]
    fn ensemble_is_deterministic_and_r1_has_zero_std() {
        let spec = GeneratorSpec::ErdosRenyi { n: 40, m: 80 };
        let a = ensemble_summary(&spec, 5, 123).unwrap();
        let b = ensemble_summary(&spec, 5, 123).unwrap();
        assert_eq!(
            serde_json::to_string(&a).unwrap(),
            serde_json::to_string(&b).unwrap()
        );
        let single = ensemble_summary(&spec, 1, 7).unwrap();
        assert!(close(single.std.mean_distance, 0.0, 1e-12));
        assert!(close(single.std.mean_transitivity, 0.0, 1e-12));
    }

    #[test]
    fn er_transitivity_near_analytic_density() {
        let (n, m) = (524usize, 3702usize);
        let spec = GeneratorSpec::ErdosRenyi { n, m };
        let summary = ensemble_summary(&spec, 25, 2024).unwrap();
        let p = 2.0 * m as f64 / (n as f64 * (n - 1) as f64);
        assert!(
            (summary.mean.mean_transitivity - p).abs() <= 0.15 * p,
            "ensemble transitivity {} vs analytic {}",
            summary.mean.mean_transitivity,
            p
        );
    }

    #[test]
    fn lattice_fails_distance_clause_of_verdict() {
        let lattice = ring_lattice(&[4; 60]).unwrap();
        let report =
            smallworld_verdict(&lattice, 5, 11, None, SmallWorldFactors::default()).unwrap();
        assert!(!report.small_world);
        assert!(!report.short_distance);
    }

    #[test]
    fn er_fails_transitivity_clause_of_verdict() {
        let g = erdos_renyi(500, 3750, 31).unwrap(); // p ~ 0.03
        let report = smallworld_verdict(&g, 5, 13, None, SmallWorldFactors::default()).unwrap();
        assert!(!report.high_transitivity);
        assert!(!report.small_world);
    }
}
