//! Structural typology of narrative-arc networks.
//!
//! Four qualitative shapes recur in arc networks: a dense central group
//! (kernel), a single dominating center (unicentric), several centers each
//! controlling access to their own region (polycentric), and no center at
//! all (acentric). The features and the rule cascade here are a concrete,
//! deterministic rendering of those shapes; the thresholds are
//! configuration, and reference labels are reported against, never fit.

use serde::Serialize;
use thiserror::Error;

use crate::corpus::ArcTypeLabel;
use crate::graph::CharacterGraph;
use crate::metrics::{centralities, MetricsError};

#[derive(Debug, Error)]
pub enum TypologyError {
    #[error("need at least 3 vertices, found {0}")]
    TooSmall(usize),
    #[error(transparent)]
    Metrics(#[from] MetricsError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum ArcType {
    Kernel,
    Unicentric,
    Polycentric,
    Acentric,
}

impl ArcType {
    pub fn label(self) -> &'static str {
        match self {
            ArcType::Kernel => "kernel",
            ArcType::Unicentric => "unicentric",
            ArcType::Polycentric => "polycentric",
            ArcType::Acentric => "acentric",
        }
    }

    pub fn matches_reference(self, reference: ArcTypeLabel) -> bool {
        matches!(
            (self, reference),
            (ArcType::Kernel, ArcTypeLabel::Kernel)
                | (ArcType::Unicentric, ArcTypeLabel::Unicentric)
                | (ArcType::Polycentric, ArcTypeLabel::Polycentric)
                | (ArcType::Acentric, ArcTypeLabel::Acentric)
        )
    }
}

/// Deterministic feature vector driving the classification; every feature
/// lies in [0, 1].
#[derive(Debug, Clone, Serialize)]
pub struct TypologyFeatures {
    /// Freeman degree centralization of the (largest component of the)
    /// graph: 1 for a star, 0 for a regular graph.
    pub degree_centralization: f64,
    /// Share of total betweenness held by the single most central vertex.
    pub top_betweenness_share: f64,
    /// Internal edge density of the five highest-degree vertices.
    pub top5_density: f64,
    /// Share of vertices cut off from at least 30% of the graph by the
    /// removal of some top-5 vertex.
    pub gateway_fraction: f64,
    /// Per top-5 vertex: share of other vertices that lose at least 30% of
    /// the graph when it is removed, with the vertex id.
    pub gateway_scores: Vec<(String, f64)>,
    /// Degree of the second-ranked vertex relative to the top one.
    pub second_to_top_degree: f64,
}

/// Classification thresholds; the defaults are this crate's calibration,
/// not published values.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct TypologyThresholds {
    /// Unicentric: centralization at least this high...
    pub unicentric_centralization: f64,
    /// ...and second degree below this fraction of the top degree.
    pub unicentric_second_ratio: f64,
    /// Kernel: top-5 internal density at least this high...
    pub kernel_density: f64,
    /// ...and top-5 betweenness mass at least this share.
    pub kernel_betweenness_mass: f64,
    /// Polycentric: at least `polycentric_min_gateways` vertices with a
    /// gateway score at or above this.
    pub polycentric_gateway: f64,
    pub polycentric_min_gateways: usize,
    /// Reach loss counted as "cut off": fraction of the graph.
    pub gateway_reach: f64,
}

impl Default for TypologyThresholds {
    fn default() -> Self {
        TypologyThresholds {
            unicentric_centralization: 0.6,
            unicentric_second_ratio: 0.4,
            kernel_density: 0.8,
            kernel_betweenness_mass: 0.6,
            polycentric_gateway: 0.15,
            polycentric_min_gateways: 2,
            gateway_reach: 0.30,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct TypologyReport {
    pub arc_type: ArcType,
    pub features: TypologyFeatures,
    /// Top-5 betweenness mass used by the kernel rule.
    pub top5_betweenness_mass: f64,
}

fn components_without(g: &CharacterGraph, skip: usize) -> Vec<Vec<usize>> {
    let n = g.vertex_count();
    let mut seen = vec![false; n];
    seen[skip] = true;
    let mut components = Vec::new();
    let mut queue = std::collections::VecDeque::new();
    for start in 0..n {
        if seen[start] {
            continue;
        }
        seen[start] = true;
        queue.push_back(start);
        let mut members = vec![start];
        while let Some(u) = queue.pop_front() {
            for &(v, _) in g.neighbors(u) {
                let v = v as usize;
                if !seen[v] {
                    seen[v] = true;
                    members.push(v);
                    queue.push_back(v);
                }
            }
        }
        components.push(members);
    }
    components
}

fn compute(g: &CharacterGraph, thresholds: &TypologyThresholds) -> Result<TypologyReport, TypologyError> {
    if g.vertex_count() < 3 {
        return Err(TypologyError::TooSmall(g.vertex_count()));
    }
    // work on the largest component
    let giant = g.giant_component();
    let n = giant.vertex_count();
    if n < 3 {
        return Err(TypologyError::TooSmall(n));
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| {
        giant
            .degree(b)
            .cmp(&giant.degree(a))
            .then_with(|| giant.id(a).cmp(giant.id(b)))
    });
    let top_degree = giant.degree(order[0]) as f64;
    let second_to_top_degree = if top_degree > 0.0 {
        giant.degree(order[1]) as f64 / top_degree
    } else {
        0.0
    };

    let centralization_sum: f64 = (0..n)
        .map(|v| top_degree - giant.degree(v) as f64)
        .sum();
    let degree_centralization = centralization_sum / ((n - 1) as f64 * (n - 2) as f64);

    let table = centralities(&giant)?;
    let total_betweenness: f64 = table.rows.iter().map(|r| r.betweenness).sum();
    let top_betweenness_share = if total_betweenness > 0.0 {
        table
            .rows
            .iter()
            .map(|r| r.betweenness)
            .fold(0.0f64, f64::max)
            / total_betweenness
    } else {
        0.0
    };

    let top5: Vec<usize> = order.iter().copied().take(5.min(n)).collect();
    let mut internal = 0usize;
    for (i, &u) in top5.iter().enumerate() {
        for &v in &top5[i + 1..] {
            if giant.has_edge(u, v) {
                internal += 1;
            }
        }
    }
    let top5_pairs = top5.len() * (top5.len() - 1) / 2;
    let top5_density = if top5_pairs > 0 {
        internal as f64 / top5_pairs as f64
    } else {
        0.0
    };
    let top5_betweenness_mass = if total_betweenness > 0.0 {
        top5
            .iter()
            .map(|&v| table.rows[v].betweenness)
            .sum::<f64>()
            / total_betweenness
    } else {
        0.0
    };

    // gateway scores: removing a candidate splits the component; a vertex
    // in a fragment of size c can still reach c - 1 others, so it has lost
    // n - 1 - c vertices besides the removed hub
    let reach_cut = thresholds.gateway_reach * n as f64;
    let mut gateway_scores = Vec::with_capacity(top5.len());
    let mut dependent = vec![false; n];
    for &hub in &top5 {
        let mut dependents = 0usize;
        for members in components_without(&giant, hub) {
            let lost = (n - 1 - members.len()) as f64;
            if lost >= reach_cut {
                dependents += members.len();
                for &m in &members {
                    dependent[m] = true;
                }
            }
        }
        gateway_scores.push((
            giant.id(hub).to_string(),
            dependents as f64 / (n - 1) as f64,
        ));
    }
    let gateway_fraction = dependent.iter().filter(|&&d| d).count() as f64 / n as f64;

    let features = TypologyFeatures {
        degree_centralization,
        top_betweenness_share,
        top5_density,
        gateway_fraction,
        gateway_scores,
        second_to_top_degree,
    };

    let arc_type = if features.degree_centralization >= thresholds.unicentric_centralization
        && features.second_to_top_degree < thresholds.unicentric_second_ratio
    {
        ArcType::Unicentric
    } else if features.top5_density >= thresholds.kernel_density
        && top5_betweenness_mass >= thresholds.kernel_betweenness_mass
    {
        ArcType::Kernel
    } else if features
        .gateway_scores
        .iter()
        .filter(|(_, s)| *s >= thresholds.polycentric_gateway)
        .count()
        >= thresholds.polycentric_min_gateways
    {
        ArcType::Polycentric
    } else {
        ArcType::Acentric
    };

    Ok(TypologyReport {
        arc_type,
        features,
        top5_betweenness_mass,
    })
}

/// Feature vector for a graph (largest component, at least 3 vertices).
pub fn typology_features(g: &CharacterGraph) -> Result<TypologyFeatures, TypologyError> {
    compute(g, &TypologyThresholds::default()).map(|r| r.features)
}

/// Classifies a graph into one of the four structural types under the
/// given thresholds, with the full feature report.
pub fn classify_arc(
    g: &CharacterGraph,
    thresholds: &TypologyThresholds,
) -> Result<TypologyReport, TypologyError> {
    compute(g, thresholds)
}
