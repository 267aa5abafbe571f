//! Cumulative network growth over scene time and preferential-attachment
//! rate estimation.
//!
//! The attachment estimator freezes degrees at the start of an observation
//! window and attributes every edge that first appears inside the window
//! to the frozen degree of its pre-window endpoints (two-snapshot method).
//! Both the raw rate and its normalized cumulative form are exposed; the
//! cumulative curve is what gets fit downstream, and its exponent
//! convention is calibrated against synthetic attachment simulators rather
//! than any published reading.

use std::collections::{BTreeMap, HashMap, HashSet};

use serde::Serialize;
use thiserror::Error;

use crate::corpus::Corpus;

#[derive(Debug, Error)]
pub enum DynamicsError {
    #[error("sample interval must be at least 1")]
    ZeroInterval,
    #[error("corpus has no scenes")]
    NoScenes,
    #[error("window [{t0}, {t1}] out of range 1..={last}")]
    WindowOutOfRange { t0: usize, t1: usize, last: usize },
    #[error("no new {0} edges inside the window")]
    NoNewEdges(&'static str),
}

/// One sampled point of the cumulative network series.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct GrowthSample {
    /// 1-based position of the last scene included.
    pub scene_index: usize,
    pub vertices: usize,
    pub edges: usize,
    /// Mean unweighted distance within the largest component.
    pub giant_mean_distance: Option<f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct GrowthSeries {
    pub samples: Vec<GrowthSample>,
}

impl GrowthSeries {
    /// `(n, mean distance)` pairs for the logarithmic growth fit.
    pub fn distance_points(&self) -> Vec<(f64, f64)> {
        self.samples
            .iter()
            .filter_map(|s| s.giant_mean_distance.map(|d| (s.vertices as f64, d)))
            .collect()
    }
}

/// Incrementally grown unweighted adjacency over character indices.
struct Accumulator {
    adjacency: Vec<Vec<u32>>,
    edges: HashSet<(u32, u32)>,
    active: HashSet<u32>,
}

impl Accumulator {
    fn new(n: usize) -> Accumulator {
        Accumulator {
            adjacency: vec![Vec::new(); n],
            edges: HashSet::new(),
            active: HashSet::new(),
        }
    }

    fn add_scene(&mut self, participants: &[u32]) {
        for i in 0..participants.len() {
            for j in (i + 1)..participants.len() {
                let (a, b) = (
                    participants[i].min(participants[j]),
                    participants[i].max(participants[j]),
                );
                if self.edges.insert((a, b)) {
                    self.adjacency[a as usize].push(b);
                    self.adjacency[b as usize].push(a);
                    self.active.insert(a);
                    self.active.insert(b);
                }
            }
        }
    }

    /// Mean pairwise distance inside the largest component.
    fn giant_mean_distance(&self) -> Option<f64> {
        if self.active.is_empty() {
            return None;
        }
        let n = self.adjacency.len();
        let mut seen = vec![false; n];
        let mut giant: Vec<u32> = Vec::new();
        let mut sorted_active: Vec<u32> = self.active.iter().copied().collect();
        sorted_active.sort_unstable();
        let mut queue = std::collections::VecDeque::new();
        for &start in &sorted_active {
            if seen[start as usize] {
                continue;
            }
            let mut component = vec![start];
            seen[start as usize] = true;
            queue.push_back(start);
            while let Some(u) = queue.pop_front() {
                for &v in &self.adjacency[u as usize] {
                    if !seen[v as usize] {
                        seen[v as usize] = true;
                        component.push(v);
                        queue.push_back(v);
                    }
                }
            }
            if component.len() > giant.len() {
                giant = component;
            }
        }
        if giant.len() < 2 {
            return None;
        }
        // every vertex reachable from a giant member is in the giant, so
        // plain BFS needs no membership checks
        let mut sum = 0u64;
        let mut count = 0u64;
        let mut dist = vec![u32::MAX; n];
        for &source in &giant {
            for &v in &giant {
                dist[v as usize] = u32::MAX;
            }
            dist[source as usize] = 0;
            queue.push_back(source);
            while let Some(u) = queue.pop_front() {
                let du = dist[u as usize];
                for &v in &self.adjacency[u as usize] {
                    if dist[v as usize] == u32::MAX {
                        dist[v as usize] = du + 1;
                        queue.push_back(v);
                    }
                }
            }
            for &v in &giant {
                if v != source {
                    sum += dist[v as usize] as u64;
                    count += 1;
                }
            }
        }
        Some(sum as f64 / count as f64)
    }
}

fn scene_participant_indices(corpus: &Corpus) -> Vec<Vec<u32>> {
    corpus
        .scenes()
        .iter()
        .map(|s| {
            let mut p: Vec<u32> = s
                .distinct_participants()
                .iter()
                .map(|id| corpus.character_position(id).expect("validated corpus") as u32)
                .collect();
            p.sort_unstable();
            p
        })
        .collect()
}

/// Cumulative network series sampled every `sample_every` scenes (the final
/// scene is always sampled). Vertex and edge counts are monotone; the mean
/// distance is computed on the largest component only.
pub fn growth_series(corpus: &Corpus, sample_every: usize) -> Result<GrowthSeries, DynamicsError> {
    if sample_every == 0 {
        return Err(DynamicsError::ZeroInterval);
    }
    let scenes = scene_participant_indices(corpus);
    if scenes.is_empty() {
        return Err(DynamicsError::NoScenes);
    }
    let mut acc = Accumulator::new(corpus.characters().len());
    let mut samples = Vec::new();
    let last = scenes.len();
    for (pos, participants) in scenes.iter().enumerate() {
        acc.add_scene(participants);
        let index = pos + 1;
        if index % sample_every == 0 || index == last {
            samples.push(GrowthSample {
                scene_index: index,
                vertices: acc.active.len(),
                edges: acc.edges.len(),
                giant_mean_distance: acc.giant_mean_distance(),
            });
        }
    }
    Ok(GrowthSeries { samples })
}

/// Which attachment events to count.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum AttachmentKind {
    /// Every attachment of a new edge to a pre-window vertex, keyed by its
    /// frozen degree.
    All,
    /// Only edges joining a vertex introduced inside the window to a
    /// pre-window vertex, keyed by the old vertex's frozen degree.
    External,
    /// Only edges between two pre-window vertices, keyed by the product of
    /// their frozen degrees.
    Internal,
}

impl AttachmentKind {
    pub fn label(self) -> &'static str {
        match self {
            AttachmentKind::All => "all",
            AttachmentKind::External => "external",
            AttachmentKind::Internal => "internal",
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct AttachmentCurve {
    pub kind: AttachmentKind,
    /// Observation window in 1-based scene positions: degrees are frozen
    /// after scene `t0`, events counted in `(t0, t1]`.
    pub window: (usize, usize),
    /// Raw attachment rate per abscissa (degree or degree product).
    pub rates: Vec<(u64, f64)>,
    /// Normalized cumulative rate over ascending abscissa; ends at 1.
    pub cumulative: Vec<(u64, f64)>,
    /// Edges that appeared in the window and matched the kind.
    pub counted_edges: u64,
}

/// Two-snapshot preferential attachment estimate over the scene window
/// `(t0, t1]`, with vertex degrees frozen at `t0`.
pub fn attachment_curve(
    corpus: &Corpus,
    kind: AttachmentKind,
    t0: usize,
    t1: usize,
) -> Result<AttachmentCurve, DynamicsError> {
    let scenes = scene_participant_indices(corpus);
    let last = scenes.len();
    if last == 0 {
        return Err(DynamicsError::NoScenes);
    }
    if t0 < 1 || t0 >= t1 || t1 > last {
        return Err(DynamicsError::WindowOutOfRange { t0, t1, last });
    }

    // snapshot at t0
    let mut acc = Accumulator::new(corpus.characters().len());
    let mut appeared: HashSet<u32> = HashSet::new();
    for participants in &scenes[..t0] {
        for &p in participants {
            appeared.insert(p);
        }
        acc.add_scene(participants);
    }
    let frozen_degree: HashMap<u32, u64> = appeared
        .iter()
        .map(|&v| (v, acc.adjacency[v as usize].len() as u64))
        .collect();

    // per-abscissa population at t0
    let mut population: BTreeMap<u64, u64> = BTreeMap::new();
    match kind {
        AttachmentKind::All | AttachmentKind::External => {
            for &d in frozen_degree.values() {
                *population.entry(d).or_insert(0) += 1;
            }
        }
        AttachmentKind::Internal => {
            // number of vertex pairs per degree product, from the degree
            // histogram
            let mut histogram: BTreeMap<u64, u64> = BTreeMap::new();
            for &d in frozen_degree.values() {
                *histogram.entry(d).or_insert(0) += 1;
            }
            let degrees: Vec<(u64, u64)> = histogram.into_iter().collect();
            for (i, &(da, ca)) in degrees.iter().enumerate() {
                *population.entry(da * da).or_insert(0) += ca * (ca - 1) / 2;
                for &(db, cb) in &degrees[i + 1..] {
                    *population.entry(da * db).or_insert(0) += ca * cb;
                }
            }
        }
    }

    // new edges inside the window, counted at first appearance
    let mut known_edges = acc.edges.clone();
    let mut counts: BTreeMap<u64, u64> = BTreeMap::new();
    let mut counted_edges = 0u64;
    for participants in &scenes[t0..t1] {
        for i in 0..participants.len() {
            for j in (i + 1)..participants.len() {
                let (a, b) = (
                    participants[i].min(participants[j]),
                    participants[i].max(participants[j]),
                );
                if !known_edges.insert((a, b)) {
                    continue;
                }
                let old_a = frozen_degree.get(&a);
                let old_b = frozen_degree.get(&b);
                match kind {
                    AttachmentKind::All => {
                        let mut any = false;
                        if let Some(&da) = old_a {
                            *counts.entry(da).or_insert(0) += 1;
                            any = true;
                        }
                        if let Some(&db) = old_b {
                            *counts.entry(db).or_insert(0) += 1;
                            any = true;
                        }
                        if any {
                            counted_edges += 1;
                        }
                    }
                    AttachmentKind::External => {
                        if let (Some(&d), None) | (None, Some(&d)) = (old_a, old_b) {
                            *counts.entry(d).or_insert(0) += 1;
                            counted_edges += 1;
                        }
                    }
                    AttachmentKind::Internal => {
                        if let (Some(&da), Some(&db)) = (old_a, old_b) {
                            *counts.entry(da * db).or_insert(0) += 1;
                            counted_edges += 1;
                        }
                    }
                }
            }
        }
    }
    if counted_edges == 0 {
        return Err(DynamicsError::NoNewEdges(kind.label()));
    }

    let rates: Vec<(u64, f64)> = counts
        .iter()
        .filter_map(|(&k, &c)| {
            let pop = population.get(&k).copied().unwrap_or(0);
            (pop > 0).then(|| (k, c as f64 / pop as f64))
        })
        .collect();
    let total: f64 = rates.iter().map(|&(_, r)| r).sum();
    let mut running = 0.0;
    let cumulative: Vec<(u64, f64)> = rates
        .iter()
        .map(|&(k, r)| {
            running += r;
            (k, running / total)
        })
        .collect();
    Ok(AttachmentCurve {
        kind,
        window: (t0, t1),
        rates,
        cumulative,
        counted_edges,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::build_graph;
    use crate::testkit::toy_corpus;

    #[test]
    fn single_scene_sample() {
        let corpus = toy_corpus(&[&["A", "B"]]);
        let series = growth_series(&corpus, 1).unwrap();
        assert_eq!(series.samples.len(), 1);
        let s = series.samples[0];
        assert_eq!((s.vertices, s.edges), (2, 1));
        assert_eq!(s.giant_mean_distance, Some(1.0));
    }

    #[test]
    fn growth_is_monotone_and_final_matches_full_graph() {
        let corpus = toy_corpus(&[
            &["A", "B"],
            &["B", "C"],
            &["A", "B"],
            &["C", "D", "E"],
            &["E", "F"],
            &["A", "F"],
        ]);
        let series = growth_series(&corpus, 1).unwrap();
        for w in series.samples.windows(2) {
            assert!(w[1].vertices >= w[0].vertices);
            assert!(w[1].edges >= w[0].edges);
        }
        let last = series.samples.last().unwrap();
        let full = build_graph(&corpus, None);
        assert_eq!(last.vertices, full.vertex_count());
        assert_eq!(last.edges, full.edge_count());
    }

    #[test]
    fn hub_attachment_concentrates_on_max_degree() {
        // every scene pairs a brand-new character with the unique hub
        let corpus = toy_corpus(&[
            &["H", "a"],
            &["H", "b"],
            &["H", "c"],
            &["H", "d"],
            &["H", "e"],
            &["H", "f"],
        ]);
        let curve = attachment_curve(&corpus, AttachmentKind::External, 3, 6).unwrap();
        // at t0 the hub has degree 3, the three leaves degree 1
        assert_eq!(curve.counted_edges, 3);
        let rates: BTreeMap<u64, f64> = curve.rates.iter().copied().collect();
        assert_eq!(rates.len(), 1);
        assert!((rates[&3] - 3.0).abs() < 1e-12);
        // the cumulative curve is a single step at the hub degree
        assert_eq!(curve.cumulative, vec![(3, 1.0)]);
    }

    #[test]
    fn kappa_is_monotone_and_ends_at_one() {
        let corpus = toy_corpus(&[
            &["A", "B"],
            &["B", "C"],
            &["C", "D"],
            &["A", "E"],
            &["E", "F", "B"],
            &["F", "G"],
            &["G", "A", "C"],
        ]);
        for kind in [
            AttachmentKind::All,
            AttachmentKind::External,
            AttachmentKind::Internal,
        ] {
            match attachment_curve(&corpus, kind, 3, 7) {
                Ok(curve) => {
                    let mut prev = 0.0;
                    for &(_, v) in &curve.cumulative {
                        assert!(v >= prev - 1e-12);
                        prev = v;
                    }
                    assert!((prev - 1.0).abs() < 1e-12);
                }
                Err(DynamicsError::NoNewEdges(_)) => {}
                Err(e) => panic!("unexpected error {e}"),
            }
        }
    }

    #[test]
    fn rate_mass_balances_counted_edges() {
        let corpus = toy_corpus(&[
            &["A", "B"],
            &["B", "C"],
            &["A", "C"],
            &["A", "D"],
            &["B", "D"],
            &["C", "E"],
        ]);
        let curve = attachment_curve(&corpus, AttachmentKind::External, 3, 6).unwrap();
        // sum over k of rate(k) * population(k) = counted edges
        let mut acc = Accumulator::new(corpus.characters().len());
        let scenes = scene_participant_indices(&corpus);
        for participants in &scenes[..3] {
            acc.add_scene(participants);
        }
        let mut population: BTreeMap<u64, u64> = BTreeMap::new();
        for &v in &acc.active {
            *population
                .entry(acc.adjacency[v as usize].len() as u64)
                .or_insert(0) += 1;
        }
        let recovered: f64 = curve
            .rates
            .iter()
            .map(|&(k, r)| r * population[&k] as f64)
            .sum();
        assert!((recovered - curve.counted_edges as f64).abs() < 1e-9);
    }

    #[test]
    fn window_validation() {
        let corpus = toy_corpus(&[&["A", "B"], &["B", "C"]]);
        assert!(matches!(
            attachment_curve(&corpus, AttachmentKind::All, 0, 2),
            Err(DynamicsError::WindowOutOfRange { .. })
        ));
        assert!(matches!(
            attachment_curve(&corpus, AttachmentKind::All, 1, 5),
            Err(DynamicsError::WindowOutOfRange { .. })
        ));
        // window with no new internal edges errors
        let corpus = toy_corpus(&[&["A", "B"], &["C", "D"]]);
        assert!(matches!(
            attachment_curve(&corpus, AttachmentKind::Internal, 1, 2),
            Err(DynamicsError::NoNewEdges(_))
        ));
    }
}
