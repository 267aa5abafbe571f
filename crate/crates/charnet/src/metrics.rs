//! Topological statistics, scaling functions, and centrality tables.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::corpus::Corpus;
use crate::graph::{build_graph, CharacterGraph};
use crate::stats;

#[derive(Debug, Error)]
pub enum MetricsError {
    #[error("metric undefined on an empty graph")]
    EmptyGraph,
    #[error("eigenvector power iteration did not converge within {0} steps")]
    NoConvergence(usize),
    #[error("need at least {need} values, found {got}")]
    InsufficientData { need: usize, got: usize },
    #[error("unknown character `{0}`")]
    UnknownCharacter(String),
}

/// The summary statistics reported for every network: size, density,
/// degree structure, distances, and transitivity.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct TopoSummary {
    pub vertices: usize,
    pub edges: usize,
    pub density: f64,
    pub mean_degree: f64,
    pub max_degree: u32,
    /// Pearson correlation of endpoint degrees over both edge
    /// orientations; `None` when degrees have zero variance.
    pub degree_assortativity: Option<f64>,
    /// Unweighted shortest-path length averaged over connected ordered
    /// pairs; `None` when no two vertices are connected.
    pub mean_distance: Option<f64>,
    /// Largest finite shortest-path length.
    pub diameter: Option<u32>,
    /// Mean local transitivity; see [`TransitivityMode`].
    pub mean_transitivity: Option<f64>,
}

/// Handling of vertices with fewer than two neighbors when averaging local
/// transitivity.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum TransitivityMode {
    /// Exclude them from the mean.
    #[default]
    ExcludeLowDegree,
    /// Count them as zero.
    CountAsZero,
}

/// Numeric projection of a summary for ensemble averaging; undefined
/// entries are NaN.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct TopoStats {
    pub vertices: f64,
    pub edges: f64,
    pub density: f64,
    pub mean_degree: f64,
    pub max_degree: f64,
    pub degree_assortativity: f64,
    pub mean_distance: f64,
    pub diameter: f64,
    pub mean_transitivity: f64,
}

impl TopoSummary {
    pub fn to_stats(&self) -> TopoStats {
        TopoStats {
            vertices: self.vertices as f64,
            edges: self.edges as f64,
            density: self.density,
            mean_degree: self.mean_degree,
            max_degree: self.max_degree as f64,
            degree_assortativity: self.degree_assortativity.unwrap_or(f64::NAN),
            mean_distance: self.mean_distance.unwrap_or(f64::NAN),
            diameter: self.diameter.map(|d| d as f64).unwrap_or(f64::NAN),
            mean_transitivity: self.mean_transitivity.unwrap_or(f64::NAN),
        }
    }
}

fn bfs_distances(g: &CharacterGraph, source: usize, dist: &mut [u32]) {
    dist.fill(u32::MAX);
    dist[source] = 0;
    let mut queue = std::collections::VecDeque::new();
    queue.push_back(source);
    while let Some(u) = queue.pop_front() {
        let du = dist[u];
        for &(v, _) in g.neighbors(u) {
            let v = v as usize;
            if dist[v] == u32::MAX {
                dist[v] = du + 1;
                queue.push_back(v);
            }
        }
    }
}

/// Local transitivity of one vertex: fraction of neighbor pairs that are
/// themselves connected. `None` for degree < 2.
pub fn local_transitivity(g: &CharacterGraph, v: usize) -> Option<f64> {
    let neighbors = g.neighbors(v);
    let k = neighbors.len();
    if k < 2 {
        return None;
    }
    let mut links = 0u64;
    for (i, &(ni, _)) in neighbors.iter().enumerate() {
        for &(nj, _) in &neighbors[i + 1..] {
            if g.has_edge(ni as usize, nj as usize) {
                links += 1;
            }
        }
    }
    Some(2.0 * links as f64 / (k as f64 * (k - 1) as f64))
}

/// Number of triangles in the graph.
pub fn triangle_count(g: &CharacterGraph) -> u64 {
    let mut count = 0u64;
    for u in 0..g.vertex_count() {
        for &(v, _) in g.neighbors(u) {
            let v = v as usize;
            if v <= u {
                continue;
            }
            // sorted adjacency intersection over w > v
            let (mut i, mut j) = (0usize, 0usize);
            let (a, b) = (g.neighbors(u), g.neighbors(v));
            while i < a.len() && j < b.len() {
                let (x, y) = (a[i].0, b[j].0);
                match x.cmp(&y) {
                    std::cmp::Ordering::Less => i += 1,
                    std::cmp::Ordering::Greater => j += 1,
                    std::cmp::Ordering::Equal => {
                        if x as usize > v {
                            count += 1;
                        }
                        i += 1;
                        j += 1;
                    }
                }
            }
        }
    }
    count
}

pub fn topo_summary(g: &CharacterGraph) -> Result<TopoSummary, MetricsError> {
    topo_summary_with(g, TransitivityMode::default())
}

pub fn topo_summary_with(
    g: &CharacterGraph,
    mode: TransitivityMode,
) -> Result<TopoSummary, MetricsError> {
    let n = g.vertex_count();
    if n == 0 {
        return Err(MetricsError::EmptyGraph);
    }
    let m = g.edge_count();
    let degrees: Vec<u32> = g.degree_sequence();
    let max_degree = degrees.iter().copied().max().unwrap_or(0);
    let mean_degree = 2.0 * m as f64 / n as f64;
    let density = if n >= 2 { g.density() } else { 0.0 };

    // assortativity over both orientations of every edge
    let degree_assortativity = {
        let mut sum_x = 0.0;
        let mut sum_xx = 0.0;
        let mut sum_xy = 0.0;
        let count = (2 * m) as f64;
        for (u, v, _) in g.edges() {
            let (du, dv) = (degrees[u] as f64, degrees[v] as f64);
            sum_x += du + dv;
            sum_xx += du * du + dv * dv;
            sum_xy += 2.0 * du * dv;
        }
        if m == 0 {
            None
        } else {
            let mean = sum_x / count;
            let var = sum_xx / count - mean * mean;
            let cov = sum_xy / count - mean * mean;
            if var <= 1e-12 {
                None
            } else {
                Some(cov / var)
            }
        }
    };

    // distances over connected ordered pairs
    let (pair_sum, pair_count, diameter) = (0..n)
        .into_par_iter()
        .map(|source| {
            let mut dist = vec![u32::MAX; n];
            bfs_distances(g, source, &mut dist);
            let mut sum = 0u64;
            let mut count = 0u64;
            let mut max_d = 0u32;
            for (v, &d) in dist.iter().enumerate() {
                if v != source && d != u32::MAX {
                    sum += d as u64;
                    count += 1;
                    max_d = max_d.max(d);
                }
            }
            (sum, count, max_d)
        })
        .reduce(
            || (0u64, 0u64, 0u32),
            |a, b| (a.0 + b.0, a.1 + b.1, a.2.max(b.2)),
        );
    let (mean_distance, diameter) = if pair_count == 0 {
        (None, None)
    } else {
        (Some(pair_sum as f64 / pair_count as f64), Some(diameter))
    };

    let mut transitivities = Vec::with_capacity(n);
    for v in 0..n {
        match (local_transitivity(g, v), mode) {
            (Some(c), _) => transitivities.push(c),
            (None, TransitivityMode::CountAsZero) => transitivities.push(0.0),
            (None, TransitivityMode::ExcludeLowDegree) => {}
        }
    }
    let mean_transitivity = if transitivities.is_empty() {
        None
    } else {
        Some(stats::mean(&transitivities))
    };

    Ok(TopoSummary {
        vertices: n,
        edges: m,
        density,
        mean_degree,
        max_degree,
        degree_assortativity,
        mean_distance,
        diameter,
        mean_transitivity,
    })
}

/// One row of the centrality table.
#[derive(Debug, Clone, Serialize)]
pub struct CentralityRow {
    pub id: String,
    pub degree: u32,
    pub strength: u64,
    pub eigenvector: f64,
    pub betweenness: f64,
    pub closeness: f64,
    pub degree_rank: u32,
    pub strength_rank: u32,
    pub eigenvector_rank: u32,
    pub betweenness_rank: u32,
    pub closeness_rank: u32,
}

#[derive(Debug, Clone, Serialize)]
pub struct CentralityTable {
    pub rows: Vec<CentralityRow>,
    /// False when closeness was computed within components because the
    /// graph is disconnected.
    pub connected: bool,
}

impl CentralityTable {
    pub fn row(&self, id: &str) -> Option<&CentralityRow> {
        self.rows.iter().find(|r| r.id == id)
    }
}

const EIGENVECTOR_MAX_ITER: usize = 100_000;
const EIGENVECTOR_TOL: f64 = 1e-10;

/// Principal eigenvector of the unweighted adjacency matrix by power
/// iteration (on A + I, which has the same eigenvectors and converges on
/// bipartite components too), normalized to maximum 1.
fn eigenvector_centrality(g: &CharacterGraph) -> Result<Vec<f64>, MetricsError> {
    let n = g.vertex_count();
    let mut x = vec![1.0f64; n];
    let mut next = vec![0.0f64; n];
    for _ in 0..EIGENVECTOR_MAX_ITER {
        for v in 0..n {
            let mut acc = x[v]; // the +I term
            for &(u, _) in g.neighbors(v) {
                acc += x[u as usize];
            }
            next[v] = acc;
        }
        let max = next.iter().cloned().fold(0.0f64, f64::max);
        if max <= 0.0 {
            // edgeless graph: uniform centrality
            return Ok(vec![1.0; n]);
        }
        for v in next.iter_mut() {
            *v /= max;
        }
        let delta = x
            .iter()
            .zip(next.iter())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0f64, f64::max);
        std::mem::swap(&mut x, &mut next);
        if delta < EIGENVECTOR_TOL {
            return Ok(x);
        }
    }
    Err(MetricsError::NoConvergence(EIGENVECTOR_MAX_ITER))
}

/// Brandes betweenness over unweighted shortest paths, unnormalized,
/// with each unordered pair counted once.
fn betweenness(g: &CharacterGraph) -> Vec<f64> {
    let n = g.vertex_count();
    let per_source: Vec<Vec<f64>> = (0..n)
        .into_par_iter()
        .map(|s| {
            let mut delta = vec![0.0f64; n];
            let mut sigma = vec![0.0f64; n];
            let mut dist = vec![i64::MAX; n];
            let mut order: Vec<usize> = Vec::with_capacity(n);
            let mut queue = std::collections::VecDeque::new();
            sigma[s] = 1.0;
            dist[s] = 0;
            queue.push_back(s);
            while let Some(u) = queue.pop_front() {
                order.push(u);
                for &(v, _) in g.neighbors(u) {
                    let v = v as usize;
                    if dist[v] == i64::MAX {
                        dist[v] = dist[u] + 1;
                        queue.push_back(v);
                    }
                    if dist[v] == dist[u] + 1 {
                        sigma[v] += sigma[u];
                    }
                }
            }
            let mut dep = vec![0.0f64; n];
            for &u in order.iter().rev() {
                for &(v, _) in g.neighbors(u) {
                    let v = v as usize;
                    if dist[v] == dist[u] + 1 {
                        dep[u] += sigma[u] / sigma[v] * (1.0 + dep[v]);
                    }
                }
                if u != s {
                    delta[u] += dep[u];
                }
            }
            delta
        })
        .collect();
    // deterministic reduction in source order
    let mut total = vec![0.0f64; n];
    for delta in per_source {
        for (t, d) in total.iter_mut().zip(delta) {
            *t += d;
        }
    }
    for t in total.iter_mut() {
        *t /= 2.0;
    }
    total
}

/// Closeness `(c - 1) / sum of distances` within each vertex's component
/// of size `c`; isolated vertices get 0.
fn closeness(g: &CharacterGraph) -> (Vec<f64>, bool) {
    let n = g.vertex_count();
    let components = g.components();
    let connected = components.len() <= 1;
    let mut comp_size = vec![0usize; n];
    for comp in &components {
        for &v in comp {
            comp_size[v] = comp.len();
        }
    }
    let values: Vec<f64> = (0..n)
        .into_par_iter()
        .map(|v| {
            if comp_size[v] < 2 {
                return 0.0;
            }
            let mut dist = vec![u32::MAX; n];
            bfs_distances(g, v, &mut dist);
            let sum: u64 = dist
                .iter()
                .enumerate()
                .filter(|&(u, &d)| u != v && d != u32::MAX)
                .map(|(_, &d)| d as u64)
                .sum();
            (comp_size[v] - 1) as f64 / sum as f64
        })
        .collect();
    (values, connected)
}

/// Dense 1-based ranks by descending value, ties broken by character id.
fn ranks_desc(g: &CharacterGraph, values: &[f64]) -> Vec<u32> {
    let n = values.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| {
        values[b]
            .partial_cmp(&values[a])
            .unwrap()
            .then_with(|| g.id(a).cmp(g.id(b)))
    });
    let mut ranks = vec![0u32; n];
    for (rank, &v) in order.iter().enumerate() {
        ranks[v] = rank as u32 + 1;
    }
    ranks
}

/// Degree, eigenvector, betweenness, closeness and strength for every
/// vertex, with per-measure ranks. Centralities are computed on the
/// unweighted skeleton; strength is the only weighted column.
pub fn centralities(g: &CharacterGraph) -> Result<CentralityTable, MetricsError> {
    let n = g.vertex_count();
    if n == 0 {
        return Err(MetricsError::EmptyGraph);
    }
    let degrees: Vec<f64> = (0..n).map(|v| g.degree(v) as f64).collect();
    let strengths: Vec<f64> = (0..n).map(|v| g.strength(v) as f64).collect();
    let eigen = eigenvector_centrality(g)?;
    let betw = betweenness(g);
    let (close, connected) = closeness(g);

    let degree_rank = ranks_desc(g, &degrees);
    let strength_rank = ranks_desc(g, &strengths);
    let eigen_rank = ranks_desc(g, &eigen);
    let betw_rank = ranks_desc(g, &betw);
    let close_rank = ranks_desc(g, &close);

    let rows = (0..n)
        .map(|v| CentralityRow {
            id: g.id(v).to_string(),
            degree: g.degree(v),
            strength: g.strength(v),
            eigenvector: eigen[v],
            betweenness: betw[v],
            closeness: close[v],
            degree_rank: degree_rank[v],
            strength_rank: strength_rank[v],
            eigenvector_rank: eigen_rank[v],
            betweenness_rank: betw_rank[v],
            closeness_rank: close_rank[v],
        })
        .collect();
    Ok(CentralityTable { rows, connected })
}

/// Mean neighbor degree as a function of vertex degree.
pub fn knn_function(g: &CharacterGraph) -> BTreeMap<u32, f64> {
    let mut acc: BTreeMap<u32, (f64, u64)> = BTreeMap::new();
    for v in 0..g.vertex_count() {
        let k = g.degree(v);
        if k == 0 {
            continue;
        }
        let mean_neighbor: f64 = g
            .neighbors(v)
            .iter()
            .map(|&(u, _)| g.degree(u as usize) as f64)
            .sum::<f64>()
            / k as f64;
        let entry = acc.entry(k).or_insert((0.0, 0));
        entry.0 += mean_neighbor;
        entry.1 += 1;
    }
    acc.into_iter()
        .map(|(k, (sum, count))| (k, sum / count as f64))
        .collect()
}

/// Mean local transitivity as a function of vertex degree
/// (degree < 2 excluded).
pub fn ck_function(g: &CharacterGraph) -> BTreeMap<u32, f64> {
    let mut acc: BTreeMap<u32, (f64, u64)> = BTreeMap::new();
    for v in 0..g.vertex_count() {
        if let Some(c) = local_transitivity(g, v) {
            let entry = acc.entry(g.degree(v)).or_insert((0.0, 0));
            entry.0 += c;
            entry.1 += 1;
        }
    }
    acc.into_iter()
        .map(|(k, (sum, count))| (k, sum / count as f64))
        .collect()
}

/// Spearman rank correlation over the keys shared by both maps.
pub fn rank_correlation(
    x: &BTreeMap<String, f64>,
    y: &BTreeMap<String, f64>,
) -> Result<f64, MetricsError> {
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    for (k, vx) in x {
        if let Some(vy) = y.get(k) {
            xs.push(*vx);
            ys.push(*vy);
        }
    }
    if xs.len() < 2 {
        return Err(MetricsError::InsufficientData {
            need: 2,
            got: xs.len(),
        });
    }
    stats::spearman(&xs, &ys).ok_or(MetricsError::InsufficientData {
        need: 2,
        got: xs.len(),
    })
}

/// Per-volume strength of the requested characters, computed in the graph
/// built from each volume's scenes alone. Volumes where a character has no
/// co-occurrence are omitted for that character.
pub fn strength_series(
    corpus: &Corpus,
    ids: &[&str],
) -> Result<BTreeMap<String, Vec<(String, u64)>>, MetricsError> {
    for id in ids {
        if corpus.character(id).is_none() {
            return Err(MetricsError::UnknownCharacter(id.to_string()));
        }
    }
    let mut series: BTreeMap<String, Vec<(String, u64)>> =
        ids.iter().map(|id| (id.to_string(), Vec::new())).collect();
    for volume in corpus.volumes() {
        let range: Vec<u64> = corpus
            .scenes()
            .iter()
            .filter(|s| s.volume_id == volume.id)
            .map(|s| s.order_index)
            .collect();
        if range.is_empty() {
            continue;
        }
        let (lo, hi) = (*range.iter().min().unwrap(), *range.iter().max().unwrap());
        let g = build_graph(corpus, Some((lo, hi)));
        for id in ids {
            if let Some(v) = g.index_of(id) {
                series
                    .get_mut(*id)
                    .unwrap()
                    .push((volume.id.clone(), g.strength(v)));
            }
        }
    }
    Ok(series)
}
