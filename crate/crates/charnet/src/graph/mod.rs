//! Character co-occurrence graphs: construction from a corpus, minor
//! character filtering, induced subgraphs, and the bipartite
//! character–scene graph.
//!
//! Graphs are undirected and simple; an edge weight counts the distinct
//! scenes shared by its endpoints. Once built, a graph is immutable.

mod io;

pub use io::{read_edge_list, write_edge_list, write_vertex_table};

use std::collections::{BTreeMap, HashMap, HashSet};

use serde::Serialize;
use thiserror::Error;

use crate::corpus::{Character, Corpus, OccurrenceUnit, Scene, Sex};

#[derive(Debug, Error)]
pub enum GraphError {
    #[error("unknown arc `{0}`")]
    UnknownArc(String),
    #[error("empty input: {0}")]
    EmptyInput(&'static str),
}

/// Thresholds for removing minor characters.
///
/// `min_occurrences` is strict: characters with that many scenes *or fewer*
/// are removed. `min_degree` is inclusive: vertices keep their place with
/// at least that many distinct partners. By default the degree criterion is
/// evaluated on the full co-occurrence graph jointly with the occurrence
/// criterion; with `sequential_degree` it is instead evaluated on the
/// subgraph left by the occurrence criterion, which prunes characters whose
/// partners were all removed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct FilterSpec {
    pub min_occurrences: u32,
    pub min_degree: u32,
    pub keep_giant_only: bool,
    pub sequential_degree: bool,
}

impl Default for FilterSpec {
    fn default() -> Self {
        FilterSpec {
            min_occurrences: 3,
            min_degree: 2,
            keep_giant_only: true,
            sequential_degree: false,
        }
    }
}

/// Where a graph came from; carried into report headers.
#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct Provenance {
    pub source: String,
    pub scene_range: Option<(u64, u64)>,
    pub filter: Option<FilterSpec>,
}

/// Undirected weighted simple graph over characters.
///
/// Vertices are indexed densely and sorted by character id, so identical
/// inputs produce identical layouts. Adjacency lists are sorted by
/// neighbor index.
#[derive(Debug, Clone)]
pub struct CharacterGraph {
    ids: Vec<String>,
    attrs: Vec<Character>,
    adj: Vec<Vec<(u32, u32)>>,
    edge_count: usize,
    provenance: Provenance,
}

impl CharacterGraph {
    /// Builds a graph from `(u, v, weight)` triples over the given
    /// characters. Self-loops are rejected by debug assertion; parallel
    /// edges collapse by summing weights.
    pub fn from_weighted_edges(
        mut attrs: Vec<Character>,
        edges: impl IntoIterator<Item = (String, String, u32)>,
        provenance: Provenance,
    ) -> CharacterGraph {
        attrs.sort_by(|a, b| a.id.cmp(&b.id));
        let ids: Vec<String> = attrs.iter().map(|c| c.id.clone()).collect();
        let index: HashMap<&str, u32> = ids
            .iter()
            .enumerate()
            .map(|(i, id)| (id.as_str(), i as u32))
            .collect();
        let mut weights: BTreeMap<(u32, u32), u32> = BTreeMap::new();
        for (u, v, w) in edges {
            let ui = index[u.as_str()];
            let vi = index[v.as_str()];
            debug_assert_ne!(ui, vi, "self-loop on `{u}`");
            let key = (ui.min(vi), ui.max(vi));
            *weights.entry(key).or_insert(0) += w;
        }
        let mut adj: Vec<Vec<(u32, u32)>> = vec![Vec::new(); ids.len()];
        for (&(u, v), &w) in &weights {
            adj[u as usize].push((v, w));
            adj[v as usize].push((u, w));
        }
        for list in &mut adj {
            list.sort_unstable();
        }
        CharacterGraph {
            edge_count: weights.len(),
            ids,
            attrs,
            adj,
            provenance,
        }
    }

    pub fn vertex_count(&self) -> usize {
        self.ids.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edge_count
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    pub fn id(&self, v: usize) -> &str {
        &self.ids[v]
    }

    pub fn character(&self, v: usize) -> &Character {
        &self.attrs[v]
    }

    pub fn characters(&self) -> &[Character] {
        &self.attrs
    }

    pub fn index_of(&self, id: &str) -> Option<usize> {
        self.ids.binary_search_by(|probe| probe.as_str().cmp(id)).ok()
    }

    pub fn degree(&self, v: usize) -> u32 {
        self.adj[v].len() as u32
    }

    /// Total weight incident to `v`.
    pub fn strength(&self, v: usize) -> u64 {
        self.adj[v].iter().map(|&(_, w)| w as u64).sum()
    }

    pub fn neighbors(&self, v: usize) -> &[(u32, u32)] {
        &self.adj[v]
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.adj[u].binary_search_by_key(&(v as u32), |&(n, _)| n).is_ok()
    }

    pub fn weight_between(&self, u: usize, v: usize) -> Option<u32> {
        self.adj[u]
            .binary_search_by_key(&(v as u32), |&(n, _)| n)
            .ok()
            .map(|i| self.adj[u][i].1)
    }

    /// Edges as `(u, v, weight)` with `u < v`, ordered by indices.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize, u32)> + '_ {
        self.adj.iter().enumerate().flat_map(|(u, list)| {
            list.iter()
                .filter(move |&&(v, _)| (v as usize) > u)
                .map(move |&(v, w)| (u, v as usize, w))
        })
    }

    pub fn degree_sequence(&self) -> Vec<u32> {
        (0..self.vertex_count()).map(|v| self.degree(v)).collect()
    }

    pub fn total_weight(&self) -> u64 {
        self.edges().map(|(_, _, w)| w as u64).sum()
    }

    pub fn provenance(&self) -> &Provenance {
        &self.provenance
    }

    /// Connected components as sorted vertex lists, largest first
    /// (ties by smallest contained index).
    pub fn components(&self) -> Vec<Vec<usize>> {
        let n = self.vertex_count();
        let mut seen = vec![false; n];
        let mut components = Vec::new();
        let mut queue = std::collections::VecDeque::new();
        for start in 0..n {
            if seen[start] {
                continue;
            }
            seen[start] = true;
            queue.push_back(start);
            let mut comp = vec![start];
            while let Some(u) = queue.pop_front() {
                for &(v, _) in &self.adj[u] {
                    let v = v as usize;
                    if !seen[v] {
                        seen[v] = true;
                        comp.push(v);
                        queue.push_back(v);
                    }
                }
            }
            comp.sort_unstable();
            components.push(comp);
        }
        components.sort_by(|a, b| b.len().cmp(&a.len()).then_with(|| a[0].cmp(&b[0])));
        components
    }

    /// Subgraph induced by the given vertex indices; weights preserved.
    /// Vertices stay even if they become isolated.
    pub fn induced(&self, keep: &[usize]) -> CharacterGraph {
        let keep_set: HashSet<usize> = keep.iter().copied().collect();
        let attrs: Vec<Character> = keep_set
            .iter()
            .map(|&v| self.attrs[v].clone())
            .collect();
        let edges: Vec<(String, String, u32)> = self
            .edges()
            .filter(|(u, v, _)| keep_set.contains(u) && keep_set.contains(v))
            .map(|(u, v, w)| (self.ids[u].clone(), self.ids[v].clone(), w))
            .collect();
        CharacterGraph::from_weighted_edges(attrs, edges, self.provenance.clone())
    }

    /// Subgraph induced by a predicate over character attributes.
    pub fn induced_subgraph(&self, predicate: impl Fn(&Character) -> bool) -> CharacterGraph {
        let keep: Vec<usize> = (0..self.vertex_count())
            .filter(|&v| predicate(&self.attrs[v]))
            .collect();
        self.induced(&keep)
    }

    /// Largest connected component (the input itself when empty).
    pub fn giant_component(&self) -> CharacterGraph {
        if self.is_empty() {
            return self.clone();
        }
        let components = self.components();
        self.induced(&components[0])
    }

    pub fn density(&self) -> f64 {
        let n = self.vertex_count();
        if n < 2 {
            return 0.0;
        }
        2.0 * self.edge_count as f64 / (n as f64 * (n - 1) as f64)
    }

    pub fn sex_of(&self, v: usize) -> Sex {
        self.attrs[v].sex
    }
}

fn pair_weights_from_scenes<'a>(
    corpus: &Corpus,
    scenes: impl Iterator<Item = &'a Scene>,
) -> HashMap<(usize, usize), u32> {
    let mut weights: HashMap<(usize, usize), u32> = HashMap::new();
    for scene in scenes {
        let mut parts: Vec<usize> = scene
            .distinct_participants()
            .iter()
            .map(|p| corpus.character_position(p).expect("validated corpus"))
            .collect();
        parts.sort_unstable();
        for i in 0..parts.len() {
            for j in (i + 1)..parts.len() {
                *weights.entry((parts[i], parts[j])).or_insert(0) += 1;
            }
        }
    }
    weights
}

fn graph_from_pair_weights(
    corpus: &Corpus,
    weights: HashMap<(usize, usize), u32>,
    provenance: Provenance,
) -> CharacterGraph {
    let mut present: HashSet<usize> = HashSet::new();
    for &(u, v) in weights.keys() {
        present.insert(u);
        present.insert(v);
    }
    let attrs: Vec<Character> = present
        .iter()
        .map(|&i| corpus.characters()[i].clone())
        .collect();
    let edges = weights.into_iter().map(|((u, v), w)| {
        (
            corpus.characters()[u].id.clone(),
            corpus.characters()[v].id.clone(),
            w,
        )
    });
    CharacterGraph::from_weighted_edges(attrs, edges, provenance)
}

/// Builds the co-occurrence graph over the scenes whose order index falls
/// in `scene_range` (inclusive; `None` means the whole corpus). Every
/// unordered pair of distinct participants of a scene gains one unit of
/// weight. Characters without any co-participant in range do not appear.
pub fn build_graph(corpus: &Corpus, scene_range: Option<(u64, u64)>) -> CharacterGraph {
    let scenes = corpus
        .scenes()
        .iter()
        .filter(|s| scene_range.is_none_or(|(lo, hi)| s.order_index >= lo && s.order_index <= hi));
    let weights = pair_weights_from_scenes(corpus, scenes);
    graph_from_pair_weights(
        corpus,
        weights,
        Provenance {
            source: corpus.name().to_string(),
            scene_range,
            filter: None,
        },
    )
}

/// Character–scene membership graph.
#[derive(Debug, Clone)]
pub struct BipartiteGraph {
    character_ids: Vec<String>,
    scene_ids: Vec<String>,
    /// Per character, sorted indices of the scenes it belongs to.
    memberships: Vec<Vec<u32>>,
    scene_sizes: Vec<u32>,
}

impl BipartiteGraph {
    pub fn character_ids(&self) -> &[String] {
        &self.character_ids
    }

    pub fn scene_ids(&self) -> &[String] {
        &self.scene_ids
    }

    /// Scene count per character (= bipartite degree).
    pub fn character_degrees(&self) -> Vec<u32> {
        self.memberships.iter().map(|m| m.len() as u32).collect()
    }

    /// Distinct participant count per scene (= bipartite degree).
    pub fn scene_sizes(&self) -> &[u32] {
        &self.scene_sizes
    }

    pub fn membership_count(&self) -> u64 {
        self.memberships.iter().map(|m| m.len() as u64).sum()
    }

    /// One-mode projection onto characters: an edge connects two characters
    /// that share at least one scene, weighted by the number of shared
    /// scenes.
    pub fn project(&self, corpus: &Corpus) -> CharacterGraph {
        let mut per_scene: Vec<Vec<usize>> = vec![Vec::new(); self.scene_ids.len()];
        for (c, scenes) in self.memberships.iter().enumerate() {
            for &s in scenes {
                per_scene[s as usize].push(c);
            }
        }
        let mut weights: HashMap<(usize, usize), u32> = HashMap::new();
        for members in &per_scene {
            for i in 0..members.len() {
                for j in (i + 1)..members.len() {
                    let (a, b) = (members[i].min(members[j]), members[i].max(members[j]));
                    *weights.entry((a, b)).or_insert(0) += 1;
                }
            }
        }
        let mut present: HashSet<usize> = HashSet::new();
        for &(u, v) in weights.keys() {
            present.insert(u);
            present.insert(v);
        }
        let attrs: Vec<Character> = present
            .iter()
            .map(|&i| {
                corpus
                    .character(&self.character_ids[i])
                    .expect("projection characters exist in corpus")
                    .clone()
            })
            .collect();
        let edges = weights.into_iter().map(|((u, v), w)| {
            (
                self.character_ids[u].clone(),
                self.character_ids[v].clone(),
                w,
            )
        });
        CharacterGraph::from_weighted_edges(
            attrs,
            edges,
            Provenance {
                source: format!("{}:bipartite-projection", corpus.name()),
                scene_range: None,
                filter: None,
            },
        )
    }
}

/// Builds the bipartite character–scene graph: one vertex per character
/// and per scene, an edge for each (deduplicated) participation.
pub fn build_bipartite(corpus: &Corpus) -> BipartiteGraph {
    let character_ids: Vec<String> = corpus.characters().iter().map(|c| c.id.clone()).collect();
    let scene_ids: Vec<String> = corpus.scenes().iter().map(|s| s.id.clone()).collect();
    let mut memberships: Vec<Vec<u32>> = vec![Vec::new(); character_ids.len()];
    let mut scene_sizes: Vec<u32> = Vec::with_capacity(scene_ids.len());
    for (si, scene) in corpus.scenes().iter().enumerate() {
        let parts = scene.distinct_participants();
        scene_sizes.push(parts.len() as u32);
        for p in parts {
            let ci = corpus.character_position(p).expect("validated corpus");
            memberships[ci].push(si as u32);
        }
    }
    for m in &mut memberships {
        m.sort_unstable();
    }
    BipartiteGraph {
        character_ids,
        scene_ids,
        memberships,
        scene_sizes,
    }
}

/// 2x2 cross-tabulation of the two filter criteria over all corpus
/// characters, with degree measured on the full graph.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct FilterCrossTab {
    /// degree below threshold, occurrences at or below threshold
    pub low_degree_low_occ: u64,
    /// degree below threshold, occurrences above threshold
    pub low_degree_high_occ: u64,
    /// degree at/above threshold, occurrences at or below threshold
    pub high_degree_low_occ: u64,
    /// degree at/above threshold, occurrences above threshold
    pub high_degree_high_occ: u64,
}

#[derive(Debug, Clone, Serialize)]
pub struct FilterReport {
    pub spec: FilterSpec,
    pub cross_tab: FilterCrossTab,
    /// Survivors of both criteria, before component pruning.
    pub kept_before_component: usize,
    /// Named characters among the survivors.
    pub named_kept: usize,
    /// Size of the largest component among the survivors.
    pub giant_size: usize,
    /// Vertices in the returned graph.
    pub final_vertices: usize,
    pub final_edges: usize,
}

/// Removes minor characters per `spec` and reports the criterion
/// cross-tabulation. See [`FilterSpec`] for the two degree conventions.
pub fn filter_graph(corpus: &Corpus, spec: &FilterSpec) -> (CharacterGraph, FilterReport) {
    let occurrences = corpus.occurrence_counts(OccurrenceUnit::Scene);
    let full = build_graph(corpus, None);

    let mut cross_tab = FilterCrossTab::default();
    let mut joint_keep: Vec<&str> = Vec::new();
    for c in corpus.characters() {
        let occ = occurrences[&c.id];
        let degree = full.index_of(&c.id).map_or(0, |v| full.degree(v));
        let high_occ = occ > spec.min_occurrences as u64;
        let high_degree = degree >= spec.min_degree;
        match (high_degree, high_occ) {
            (false, false) => cross_tab.low_degree_low_occ += 1,
            (false, true) => cross_tab.low_degree_high_occ += 1,
            (true, false) => cross_tab.high_degree_low_occ += 1,
            (true, true) => cross_tab.high_degree_high_occ += 1,
        }
        if high_occ && high_degree {
            joint_keep.push(&c.id);
        }
    }

    let kept: Vec<usize> = if spec.sequential_degree {
        // occurrence criterion first, degree then measured on the subgraph
        let occ_keep: Vec<usize> = (0..full.vertex_count())
            .filter(|&v| occurrences[full.id(v)] > spec.min_occurrences as u64)
            .collect();
        let sub = full.induced(&occ_keep);
        (0..sub.vertex_count())
            .filter(|&v| sub.degree(v) >= spec.min_degree)
            .map(|v| full.index_of(sub.id(v)).unwrap())
            .collect()
    } else {
        joint_keep
            .iter()
            .filter_map(|id| full.index_of(id))
            .collect()
    };
    let kept_ids: HashSet<&str> = kept.iter().map(|&v| full.id(v)).collect();
    let kept_before_component = kept.len();
    let named_kept = corpus
        .characters()
        .iter()
        .filter(|c| c.named && kept_ids.contains(c.id.as_str()))
        .count();

    let mut filtered = full.induced(&kept);
    filtered.provenance = Provenance {
        source: corpus.name().to_string(),
        scene_range: None,
        filter: Some(*spec),
    };
    let giant_size = filtered
        .components()
        .first()
        .map(|c| c.len())
        .unwrap_or(0);
    if spec.keep_giant_only && !filtered.is_empty() {
        let provenance = filtered.provenance.clone();
        filtered = filtered.giant_component();
        filtered.provenance = provenance;
    }
    let report = FilterReport {
        spec: *spec,
        cross_tab,
        kept_before_component,
        named_kept,
        giant_size,
        final_vertices: filtered.vertex_count(),
        final_edges: filtered.edge_count(),
    };
    (filtered, report)
}

/// Occurrence threshold choice by the elbow of the retention curve
/// `N(t) = |{characters with count > t}|` for `t = 0..=max`: the `t`
/// maximizing the perpendicular distance to the chord between the curve
/// endpoints. Returns `default` when the curve is affine (within 1e-9) or
/// every count is identical.
pub fn elbow_threshold(counts: &BTreeMap<String, u64>, default: u32) -> Result<u32, GraphError> {
    if counts.is_empty() {
        return Err(GraphError::EmptyInput("occurrence counts"));
    }
    let max = *counts.values().max().unwrap();
    let values: Vec<u64> = counts.values().copied().collect();
    if values.iter().all(|&v| v == values[0]) {
        return Ok(default);
    }
    let curve: Vec<f64> = (0..=max)
        .map(|t| counts.values().filter(|&&c| c > t).count() as f64)
        .collect();
    let t_max = max as f64;
    let (y0, y1) = (curve[0], curve[max as usize]);
    // distance from (t, y) to the chord (0, y0)-(t_max, y1)
    let dy = y1 - y0;
    let norm = (dy * dy + t_max * t_max).sqrt();
    let mut best_t = 0u32;
    let mut best_d = f64::MIN;
    let mut affine = true;
    for (t, &y) in curve.iter().enumerate() {
        let d = (dy * t as f64 - t_max * y + t_max * y0).abs() / norm;
        if d > 1e-9 {
            affine = false;
        }
        if d > best_d {
            best_d = d;
            best_t = t as u32;
        }
    }
    if affine {
        Ok(default)
    } else {
        Ok(best_t)
    }
}

/// Co-occurrence graph of one narrative arc: the graph over the scenes of
/// the arc's volumes. When a filter is given, the vertex set is intersected
/// with the corpus-wide filtered set (the arc itself is not re-filtered);
/// vertices isolated by the intersection are dropped.
pub fn arc_graph(
    corpus: &Corpus,
    arc_id: &str,
    spec: Option<&FilterSpec>,
) -> Result<CharacterGraph, GraphError> {
    let arc = corpus
        .arcs()
        .get(arc_id)
        .ok_or_else(|| GraphError::UnknownArc(arc_id.to_string()))?;
    let volumes: HashSet<&str> = arc.volumes.iter().map(|v| v.as_str()).collect();
    let scenes = corpus
        .scenes()
        .iter()
        .filter(|s| volumes.contains(s.volume_id.as_str()));
    let weights = pair_weights_from_scenes(corpus, scenes);
    let mut graph = graph_from_pair_weights(
        corpus,
        weights,
        Provenance {
            source: format!("{}:arc:{arc_id}", corpus.name()),
            scene_range: None,
            filter: spec.copied(),
        },
    );
    if let Some(spec) = spec {
        let (filtered, _) = filter_graph(corpus, spec);
        let allowed: HashSet<&str> = (0..filtered.vertex_count())
            .map(|v| filtered.id(v))
            .collect();
        let keep: Vec<usize> = (0..graph.vertex_count())
            .filter(|&v| allowed.contains(graph.id(v)))
            .collect();
        let provenance = graph.provenance.clone();
        graph = graph.induced(&keep);
        // drop vertices isolated by the intersection
        let connected: Vec<usize> = (0..graph.vertex_count())
            .filter(|&v| graph.degree(v) > 0)
            .collect();
        graph = graph.induced(&connected);
        graph.provenance = provenance;
    }
    Ok(graph)
}

#[cfg(test)]
mod tests;
