//! Gender composition of the network: sex proportions, edge and triangle
//! censuses with random baselines, degree/strength volume ratios, scene
//! candidates for fair-representation screening, and centrality
//! significance tests by sex.
//!
//! Mixed (collective) and unknown-sex characters are excluded from every
//! female/male statistic rather than apportioned.

use serde::Serialize;
use thiserror::Error;

use crate::corpus::{Corpus, Sex};
use crate::graph::CharacterGraph;
use crate::metrics::{centralities, MetricsError};
use crate::stats;

#[derive(Debug, Error)]
pub enum GenderError {
    #[error("no {0} characters in the graph")]
    EmptyGroup(&'static str),
    #[error("no edges between sex-identified characters")]
    NoEligibleEdges,
    #[error(transparent)]
    Metrics(#[from] MetricsError),
}

/// Vertex counts and proportions by sex.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct SexProportions {
    pub female: usize,
    pub male: usize,
    pub mixed: usize,
    pub unknown: usize,
    /// Shares over all four classes.
    pub four_way: [f64; 4],
    /// Female and male shares among sex-identified, non-collective
    /// characters; `None` when there are none.
    pub fm_split: Option<(f64, f64)>,
}

fn proportions_from_counts(
    female: usize,
    male: usize,
    mixed: usize,
    unknown: usize,
) -> SexProportions {
    let total = (female + male + mixed + unknown).max(1) as f64;
    let fm = female + male;
    SexProportions {
        female,
        male,
        mixed,
        unknown,
        four_way: [
            female as f64 / total,
            male as f64 / total,
            mixed as f64 / total,
            unknown as f64 / total,
        ],
        fm_split: (fm > 0).then(|| (female as f64 / fm as f64, male as f64 / fm as f64)),
    }
}

/// Sex proportions over the graph's vertices.
pub fn sex_proportions(g: &CharacterGraph) -> SexProportions {
    let mut counts = [0usize; 4];
    for v in 0..g.vertex_count() {
        match g.sex_of(v) {
            Sex::Female => counts[0] += 1,
            Sex::Male => counts[1] += 1,
            Sex::Mixed => counts[2] += 1,
            Sex::Unknown => counts[3] += 1,
        }
    }
    proportions_from_counts(counts[0], counts[1], counts[2], counts[3])
}

/// Sex proportions over every character of the corpus, including those
/// that never share a scene.
pub fn corpus_sex_proportions(corpus: &Corpus) -> SexProportions {
    let mut counts = [0usize; 4];
    for c in corpus.characters() {
        match c.sex {
            Sex::Female => counts[0] += 1,
            Sex::Male => counts[1] += 1,
            Sex::Mixed => counts[2] += 1,
            Sex::Unknown => counts[3] += 1,
        }
    }
    proportions_from_counts(counts[0], counts[1], counts[2], counts[3])
}

/// Observed edge composition among sex-identified endpoints, with the
/// proportions expected if edges were placed uniformly at random over the
/// same vertices.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct EdgeSexCensus {
    pub female_vertices: usize,
    pub male_vertices: usize,
    pub included_edges: usize,
    /// Edges with a mixed or unknown endpoint, excluded throughout.
    pub excluded_edges: usize,
    /// Observed shares of female–female, male–male, and mixed-sex edges.
    pub observed: [f64; 3],
    /// Uniform-placement baseline over the included vertices.
    pub baseline: [f64; 3],
}

pub fn edge_sex_census(g: &CharacterGraph) -> EdgeSexCensus {
    let mut nf = 0usize;
    let mut nm = 0usize;
    for v in 0..g.vertex_count() {
        match g.sex_of(v) {
            Sex::Female => nf += 1,
            Sex::Male => nm += 1,
            _ => {}
        }
    }
    let (mut ff, mut mm, mut fm, mut excluded) = (0usize, 0usize, 0usize, 0usize);
    for (u, v, _) in g.edges() {
        match (g.sex_of(u), g.sex_of(v)) {
            (Sex::Female, Sex::Female) => ff += 1,
            (Sex::Male, Sex::Male) => mm += 1,
            (Sex::Female, Sex::Male) | (Sex::Male, Sex::Female) => fm += 1,
            _ => excluded += 1,
        }
    }
    let included = ff + mm + fm;
    let observed = if included == 0 {
        [0.0; 3]
    } else {
        [
            ff as f64 / included as f64,
            mm as f64 / included as f64,
            fm as f64 / included as f64,
        ]
    };
    let n = nf + nm;
    let pairs = n.saturating_mul(n.saturating_sub(1)) / 2;
    let baseline = if pairs == 0 {
        [0.0; 3]
    } else {
        [
            (nf * nf.saturating_sub(1) / 2) as f64 / pairs as f64,
            (nm * nm.saturating_sub(1) / 2) as f64 / pairs as f64,
            (nf * nm) as f64 / pairs as f64,
        ]
    };
    EdgeSexCensus {
        female_vertices: nf,
        male_vertices: nm,
        included_edges: included,
        excluded_edges: excluded,
        observed,
        baseline,
    }
}

/// Triangle composition by endpoint sexes.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct TriangleCensus {
    pub fff: u64,
    pub ffm: u64,
    pub fmm: u64,
    pub mmm: u64,
    /// Triangles touching a mixed or unknown endpoint.
    pub excluded: u64,
}

impl TriangleCensus {
    pub fn total(&self) -> u64 {
        self.fff + self.ffm + self.fmm + self.mmm + self.excluded
    }

    /// Shares of the four classified types among classified triangles.
    pub fn shares(&self) -> Option<[f64; 4]> {
        let classified = self.fff + self.ffm + self.fmm + self.mmm;
        (classified > 0).then(|| {
            [
                self.fff as f64 / classified as f64,
                self.ffm as f64 / classified as f64,
                self.fmm as f64 / classified as f64,
                self.mmm as f64 / classified as f64,
            ]
        })
    }
}

/// Exact triangle enumeration via sorted neighbor intersection,
/// classifying each triangle by its endpoint sexes.
pub fn triangle_census(g: &CharacterGraph) -> TriangleCensus {
    let mut census = TriangleCensus::default();
    for u in 0..g.vertex_count() {
        for &(v, _) in g.neighbors(u) {
            let v = v as usize;
            if v <= u {
                continue;
            }
            let (a, b) = (g.neighbors(u), g.neighbors(v));
            let (mut i, mut j) = (0usize, 0usize);
            while i < a.len() && j < b.len() {
                match a[i].0.cmp(&b[j].0) {
                    std::cmp::Ordering::Less => i += 1,
                    std::cmp::Ordering::Greater => j += 1,
                    std::cmp::Ordering::Equal => {
                        let w = a[i].0 as usize;
                        if w > v {
                            let mut females = 0u8;
                            let mut males = 0u8;
                            for x in [u, v, w] {
                                match g.sex_of(x) {
                                    Sex::Female => females += 1,
                                    Sex::Male => males += 1,
                                    _ => {}
                                }
                            }
                            match (females, males) {
                                (3, 0) => census.fff += 1,
                                (2, 1) => census.ffm += 1,
                                (1, 2) => census.fmm += 1,
                                (0, 3) => census.mmm += 1,
                                _ => census.excluded += 1,
                            }
                        }
                        i += 1;
                        j += 1;
                    }
                }
            }
        }
    }
    census
}

/// Female-to-male volume ratios; a ratio inside the band counts as parity.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct GenderRatioReport {
    /// Sum of degrees over female vertices / same over male vertices.
    pub degree_ratio: f64,
    /// Same with vertex strengths.
    pub strength_ratio: f64,
    pub pass_band: (f64, f64),
    pub degree_pass: bool,
    pub strength_pass: bool,
}

pub fn gender_ratio(g: &CharacterGraph) -> GenderRatioReport {
    let mut female = (0u64, 0u64); // (degree volume, strength volume)
    let mut male = (0u64, 0u64);
    for v in 0..g.vertex_count() {
        let acc = match g.sex_of(v) {
            Sex::Female => &mut female,
            Sex::Male => &mut male,
            _ => continue,
        };
        acc.0 += g.degree(v) as u64;
        acc.1 += g.strength(v);
    }
    let band = (0.8, 1.2);
    let ratio_of = |f: u64, m: u64| -> (f64, bool) {
        if m == 0 {
            if f == 0 {
                // no volume on either side: vacuous parity
                (f64::NAN, true)
            } else {
                (f64::INFINITY, false)
            }
        } else {
            let r = f as f64 / m as f64;
            (r, r >= band.0 && r <= band.1)
        }
    };
    let (degree_ratio, degree_pass) = ratio_of(female.0, male.0);
    let (strength_ratio, strength_pass) = ratio_of(female.1, male.1);
    GenderRatioReport {
        degree_ratio,
        strength_ratio,
        pass_band: band,
        degree_pass,
        strength_pass,
    }
}

/// Staged counts of scenes that could satisfy a fair-representation test:
/// all-female scenes, those with at least two women, and those with at
/// least two *named* women (the machine-checkable proxy for them talking
/// to each other). What they talk about is left to manual review via the
/// scene worklist.
#[derive(Debug, Clone, Serialize)]
pub struct BechdelReport {
    /// Scenes whose participants are all female.
    pub stage1: u64,
    /// Stage 1 scenes with at least two distinct female participants.
    pub stage2: u64,
    /// Stage 2 scenes where at least two of the women are named.
    pub stage3: u64,
    /// Scene ids passing stage 3, for manual topic review.
    pub worklist: Vec<String>,
}

pub fn bechdel_candidates(corpus: &Corpus) -> BechdelReport {
    let mut report = BechdelReport {
        stage1: 0,
        stage2: 0,
        stage3: 0,
        worklist: Vec::new(),
    };
    for scene in corpus.scenes() {
        let parts = scene.distinct_participants();
        let all_female = parts
            .iter()
            .all(|p| corpus.character(p).is_some_and(|c| c.sex == Sex::Female));
        if !all_female {
            continue;
        }
        report.stage1 += 1;
        if parts.len() < 2 {
            continue;
        }
        report.stage2 += 1;
        let named = parts
            .iter()
            .filter(|p| corpus.character(p).is_some_and(|c| c.named))
            .count();
        if named >= 2 {
            report.stage3 += 1;
            report.worklist.push(scene.id.clone());
        }
    }
    report
}

/// Per-measure p-values for sex differences in centrality: permutation
/// tests on the difference of means for the discrete measures (degree,
/// betweenness), two-sample Kolmogorov–Smirnov with asymptotic p for the
/// continuous ones (eigenvector, closeness).
#[derive(Debug, Clone, Copy, Serialize)]
pub struct SexSignificance {
    pub degree_p: f64,
    pub betweenness_p: f64,
    pub eigenvector_p: f64,
    pub closeness_p: f64,
    /// Whether the permutation tests enumerated all assignments.
    pub degree_exact: bool,
    pub betweenness_exact: bool,
    pub permutations: usize,
    pub seed: u64,
}

pub fn centrality_sex_tests(
    g: &CharacterGraph,
    permutations: usize,
    seed: u64,
) -> Result<SexSignificance, GenderError> {
    let table = centralities(g)?;
    let mut female: Vec<usize> = Vec::new();
    let mut male: Vec<usize> = Vec::new();
    for v in 0..g.vertex_count() {
        match g.sex_of(v) {
            Sex::Female => female.push(v),
            Sex::Male => male.push(v),
            _ => {}
        }
    }
    if female.is_empty() {
        return Err(GenderError::EmptyGroup("female"));
    }
    if male.is_empty() {
        return Err(GenderError::EmptyGroup("male"));
    }
    let collect = |vs: &[usize], get: fn(&crate::metrics::CentralityRow) -> f64| -> Vec<f64> {
        vs.iter().map(|&v| get(&table.rows[v])).collect()
    };

    let deg_f = collect(&female, |r| r.degree as f64);
    let deg_m = collect(&male, |r| r.degree as f64);
    let deg = stats::permutation_mean_diff_test(&deg_f, &deg_m, permutations, stats::derive_seed(seed, 1));

    let betw_f = collect(&female, |r| r.betweenness);
    let betw_m = collect(&male, |r| r.betweenness);
    let betw =
        stats::permutation_mean_diff_test(&betw_f, &betw_m, permutations, stats::derive_seed(seed, 2));

    let eig_f = collect(&female, |r| r.eigenvector);
    let eig_m = collect(&male, |r| r.eigenvector);
    let (_, eig_p) = stats::ks_two_sample(&eig_f, &eig_m);

    let close_f = collect(&female, |r| r.closeness);
    let close_m = collect(&male, |r| r.closeness);
    let (_, close_p) = stats::ks_two_sample(&close_f, &close_m);

    Ok(SexSignificance {
        degree_p: deg.p_value,
        betweenness_p: betw.p_value,
        eigenvector_p: eig_p,
        closeness_p: close_p,
        degree_exact: deg.exact,
        betweenness_exact: betw.exact,
        permutations,
        seed,
    })
}

/// Newman nominal assortativity over the female/male labels; edges with a
/// mixed or unknown endpoint are excluded.
pub fn sex_assortativity(g: &CharacterGraph) -> Result<f64, GenderError> {
    // 2x2 mixing matrix over included edge endpoints
    let mut e = [[0.0f64; 2]; 2];
    let mut total = 0.0;
    let class = |s: Sex| -> Option<usize> {
        match s {
            Sex::Female => Some(0),
            Sex::Male => Some(1),
            _ => None,
        }
    };
    for (u, v, _) in g.edges() {
        if let (Some(a), Some(b)) = (class(g.sex_of(u)), class(g.sex_of(v))) {
            e[a][b] += 1.0;
            e[b][a] += 1.0;
            total += 2.0;
        }
    }
    if total == 0.0 {
        return Err(GenderError::NoEligibleEdges);
    }
    for row in e.iter_mut() {
        for cell in row.iter_mut() {
            *cell /= total;
        }
    }
    let trace = e[0][0] + e[1][1];
    let a0 = e[0][0] + e[0][1];
    let a1 = e[1][0] + e[1][1];
    let squares = a0 * a0 + a1 * a1;
    if (1.0 - squares).abs() < 1e-15 {
        // all edges inside one class
        return Ok(1.0);
    }
    Ok((trace - squares) / (1.0 - squares))
}
