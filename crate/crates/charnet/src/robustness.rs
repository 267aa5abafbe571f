//! Vertex-removal attacks: random removals averaged over trials, and
//! targeted removals in centrality order, tracking the decay of the
//! largest component.

use rand::seq::SliceRandom;
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::graph::CharacterGraph;
use crate::metrics::{centralities, MetricsError};
use crate::stats;

#[derive(Debug, Error)]
pub enum AttackError {
    #[error("cannot attack an empty graph")]
    EmptyGraph,
    #[error("invalid attack grid: step {step}, max fraction {max_fraction}")]
    InvalidGrid { step: f64, max_fraction: f64 },
    #[error(transparent)]
    Metrics(#[from] MetricsError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum AttackStrategy {
    Random,
    Degree,
    Eigenvector,
    Betweenness,
    Closeness,
}

impl AttackStrategy {
    pub fn label(self) -> &'static str {
        match self {
            AttackStrategy::Random => "random",
            AttackStrategy::Degree => "degree",
            AttackStrategy::Eigenvector => "eigenvector",
            AttackStrategy::Betweenness => "betweenness",
            AttackStrategy::Closeness => "closeness",
        }
    }

    pub fn parse(s: &str) -> Option<AttackStrategy> {
        match s {
            "random" => Some(AttackStrategy::Random),
            "degree" => Some(AttackStrategy::Degree),
            "eigenvector" => Some(AttackStrategy::Eigenvector),
            "betweenness" => Some(AttackStrategy::Betweenness),
            "closeness" => Some(AttackStrategy::Closeness),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct AttackResult {
    pub strategy: AttackStrategy,
    /// `(fraction removed, |giant| / |remaining|)`, starting at 0.
    pub curve: Vec<(f64, f64)>,
    /// Averaging trials (random strategy only, 1 otherwise).
    pub trials: u32,
    pub seed: u64,
    /// Whether the targeted ranking was recomputed after each removal.
    pub recomputed: bool,
}

/// Largest-component size over the vertices of `g` not marked removed.
fn giant_size(g: &CharacterGraph, removed: &[bool]) -> usize {
    let n = g.vertex_count();
    let mut seen = vec![false; n];
    let mut best = 0usize;
    let mut queue = std::collections::VecDeque::new();
    for start in 0..n {
        if removed[start] || seen[start] {
            continue;
        }
        seen[start] = true;
        queue.push_back(start);
        let mut size = 0usize;
        while let Some(u) = queue.pop_front() {
            size += 1;
            for &(v, _) in g.neighbors(u) {
                let v = v as usize;
                if !removed[v] && !seen[v] {
                    seen[v] = true;
                    queue.push_back(v);
                }
            }
        }
        best = best.max(size);
    }
    best
}

fn removal_grid(n: usize, max_fraction: f64, step: f64) -> Vec<(f64, usize)> {
    let mut grid = vec![(0.0, 0usize)];
    let mut k = 1usize;
    loop {
        let f = step * k as f64;
        if f > max_fraction + 1e-12 {
            break;
        }
        let count = ((f * n as f64) + 0.5).floor() as usize;
        grid.push((f, count.min(n.saturating_sub(1))));
        k += 1;
    }
    grid
}

/// Ranking of all vertices by decreasing centrality (ties by id).
fn ranking(g: &CharacterGraph, strategy: AttackStrategy) -> Result<Vec<usize>, AttackError> {
    let table = centralities(g)?;
    let score = |v: usize| -> f64 {
        let row = &table.rows[v];
        match strategy {
            AttackStrategy::Degree => row.degree as f64,
            AttackStrategy::Eigenvector => row.eigenvector,
            AttackStrategy::Betweenness => row.betweenness,
            AttackStrategy::Closeness => row.closeness,
            AttackStrategy::Random => unreachable!("random has no ranking"),
        }
    };
    let mut order: Vec<usize> = (0..g.vertex_count()).collect();
    order.sort_by(|&a, &b| {
        score(b)
            .partial_cmp(&score(a))
            .unwrap()
            .then_with(|| g.id(a).cmp(g.id(b)))
    });
    Ok(order)
}

fn targeted_curve(
    g: &CharacterGraph,
    strategy: AttackStrategy,
    grid: &[(f64, usize)],
    recompute: bool,
) -> Result<Vec<(f64, f64)>, AttackError> {
    let n = g.vertex_count();
    let mut removed = vec![false; n];
    let mut curve = Vec::with_capacity(grid.len());
    if !recompute {
        let order = ranking(g, strategy)?;
        for &(fraction, count) in grid {
            for &v in &order[..count] {
                removed[v] = true;
            }
            let remaining = n - count;
            curve.push((fraction, giant_size(g, &removed) as f64 / remaining as f64));
        }
        return Ok(curve);
    }
    // adaptive variant: re-rank the surviving subgraph before each batch
    let mut current = g.clone();
    let mut removed_total = 0usize;
    for &(fraction, count) in grid {
        while removed_total < count && current.vertex_count() > 1 {
            let order = ranking(&current, strategy)?;
            let victim = current.id(order[0]).to_string();
            let keep: Vec<usize> = (0..current.vertex_count())
                .filter(|&v| current.id(v) != victim)
                .collect();
            current = current.induced(&keep);
            removed_total += 1;
        }
        let remaining = n - removed_total;
        let parts = current.components();
        let giant = parts.first().map(|c| c.len()).unwrap_or(0);
        curve.push((fraction, giant as f64 / remaining as f64));
    }
    Ok(curve)
}

/// Removes vertices up to `max_fraction` of the graph in increments of
/// `step`. Targeted strategies rank once on the intact graph and remove in
/// that order (set `recompute` for adaptive re-ranking); the random
/// strategy averages the giant fraction over `trials` seeded removal
/// orders. The curve reports the giant component as a fraction of the
/// vertices remaining at each grid point.
pub fn attack(
    g: &CharacterGraph,
    strategy: AttackStrategy,
    max_fraction: f64,
    step: f64,
    trials: u32,
    seed: u64,
    recompute: bool,
) -> Result<AttackResult, AttackError> {
    if g.is_empty() {
        return Err(AttackError::EmptyGraph);
    }
    if !(step > 0.0 && step <= max_fraction && max_fraction <= 0.99) {
        return Err(AttackError::InvalidGrid { step, max_fraction });
    }
    let n = g.vertex_count();
    let grid = removal_grid(n, max_fraction, step);

    let curve = match strategy {
        AttackStrategy::Random => {
            let trials = trials.max(1);
            let per_trial: Vec<Vec<f64>> = (0..trials)
                .into_par_iter()
                .map(|t| {
                    let mut rng = stats::rng_from_seed(stats::derive_seed(seed, t as u64));
                    let mut order: Vec<usize> = (0..n).collect();
                    order.shuffle(&mut rng);
                    let mut removed = vec![false; n];
                    let mut values = Vec::with_capacity(grid.len());
                    for &(_, count) in &grid {
                        for &v in &order[..count] {
                            removed[v] = true;
                        }
                        let remaining = n - count;
                        values.push(giant_size(g, &removed) as f64 / remaining as f64);
                    }
                    values
                })
                .collect();
            grid.iter()
                .enumerate()
                .map(|(i, &(fraction, _))| {
                    let mean = per_trial.iter().map(|t| t[i]).sum::<f64>() / trials as f64;
                    (fraction, mean)
                })
                .collect()
        }
        _ => targeted_curve(g, strategy, &grid, recompute)?,
    };

    Ok(AttackResult {
        strategy,
        curve,
        trials: if strategy == AttackStrategy::Random {
            trials.max(1)
        } else {
            1
        },
        seed,
        recomputed: recompute,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::build_graph;
    use crate::testkit::toy_corpus;

    fn path3() -> CharacterGraph {
        build_graph(&toy_corpus(&[&["A", "B"], &["B", "C"]]), None)
    }

    #[test]
    fn degree_attack_on_path_halves_giant() {
        let g = path3();
        // remove exactly one vertex (the center B)
        let result = attack(&g, AttackStrategy::Degree, 1.0 / 3.0, 1.0 / 3.0, 1, 0, false).unwrap();
        assert_eq!(result.curve.len(), 2);
        assert!((result.curve[0].1 - 1.0).abs() < 1e-12);
        assert!((result.curve[1].1 - 0.5).abs() < 1e-12);
    }

    #[test]
    fn zero_fraction_matches_input_giant() {
        let corpus = toy_corpus(&[&["A", "B"], &["C", "D"], &["D", "E"]]);
        let g = build_graph(&corpus, None);
        let result = attack(&g, AttackStrategy::Random, 0.2, 0.2, 5, 1, false).unwrap();
        // input giant: {C, D, E} of 5 vertices
        assert!((result.curve[0].1 - 3.0 / 5.0).abs() < 1e-12);
    }

    #[test]
    fn same_seed_same_curve() {
        let corpus = toy_corpus(&[
            &["A", "B"],
            &["B", "C"],
            &["C", "D"],
            &["D", "E"],
            &["E", "F"],
            &["F", "A"],
            &["A", "C"],
            &["B", "E"],
        ]);
        let g = build_graph(&corpus, None);
        let a = attack(&g, AttackStrategy::Random, 0.5, 0.1, 8, 99, false).unwrap();
        let b = attack(&g, AttackStrategy::Random, 0.5, 0.1, 8, 99, false).unwrap();
        assert_eq!(
            serde_json::to_string(&a).unwrap(),
            serde_json::to_string(&b).unwrap()
        );
    }

    #[test]
    fn absolute_giant_size_never_grows_along_removal() {
        let corpus = toy_corpus(&[
            &["A", "B", "C"],
            &["C", "D"],
            &["D", "E", "F"],
            &["F", "G"],
            &["G", "H", "A"],
        ]);
        let g = build_graph(&corpus, None);
        for strategy in [
            AttackStrategy::Degree,
            AttackStrategy::Eigenvector,
            AttackStrategy::Betweenness,
            AttackStrategy::Closeness,
        ] {
            let result = attack(&g, strategy, 0.8, 0.1, 1, 0, false).unwrap();
            let n = g.vertex_count() as f64;
            let mut prev = f64::INFINITY;
            for (i, &(fraction, giant_frac)) in result.curve.iter().enumerate() {
                let removed = ((fraction * n) + 0.5).floor().min(n - 1.0);
                let absolute = giant_frac * (n - removed);
                assert!(
                    absolute <= prev + 1e-9,
                    "{strategy:?} grid point {i}: |giant| grew from {prev} to {absolute}"
                );
                prev = absolute;
            }
        }
    }

    #[test]
    fn recompute_matches_static_on_star() {
        // removing the hub disconnects everything either way
        let corpus = toy_corpus(&[&["H", "a"], &["H", "b"], &["H", "c"], &["H", "d"]]);
        let g = build_graph(&corpus, None);
        let fixed = attack(&g, AttackStrategy::Degree, 0.2, 0.2, 1, 0, false).unwrap();
        let adaptive = attack(&g, AttackStrategy::Degree, 0.2, 0.2, 1, 0, true).unwrap();
        assert_eq!(fixed.curve, adaptive.curve);
    }

    #[test]
    fn grid_validation() {
        let g = path3();
        assert!(attack(&g, AttackStrategy::Degree, 0.5, 0.0, 1, 0, false).is_err());
        assert!(attack(&g, AttackStrategy::Degree, 1.0, 0.1, 1, 0, false).is_err());
        assert!(attack(&g, AttackStrategy::Degree, 0.05, 0.1, 1, 0, false).is_err());
    }
}
