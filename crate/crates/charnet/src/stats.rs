//! Shared numerical routines: special functions, correlation measures,
//! rank transforms, two-sample tests, and deterministic seed derivation.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// SplitMix64 step; used to derive independent per-replicate seeds.
pub fn splitmix64(mut state: u64) -> u64 {
    state = state.wrapping_add(0x9E37_79B9_7F4A_7C15);
    let mut z = state;
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Deterministic seed for replicate `index` of a run with `master` seed.
/// Independent of execution order, stable across platforms.
pub fn derive_seed(master: u64, index: u64) -> u64 {
    splitmix64(master ^ index.wrapping_mul(0xA076_1D64_78BD_642F))
}

pub fn rng_from_seed(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

// ---------------------------------------------------------------------------
// Special functions
// ---------------------------------------------------------------------------

const BERNOULLI_2J: [f64; 6] = [
    1.0 / 6.0,
    -1.0 / 30.0,
    1.0 / 42.0,
    -1.0 / 30.0,
    5.0 / 66.0,
    -691.0 / 2730.0,
];

/// Hurwitz zeta function `zeta(s, a) = sum_{k>=0} (a+k)^-s` for `s > 1`, `a > 0`.
///
/// Euler–Maclaurin summation: direct terms until the argument is large,
/// then integral and Bernoulli corrections. Relative error is far below
/// the 1e-8 tolerance required by the likelihood maximization.
pub fn hurwitz_zeta(s: f64, a: f64) -> f64 {
    assert!(s > 1.0, "hurwitz_zeta requires s > 1");
    assert!(a > 0.0, "hurwitz_zeta requires a > 0");
    let cut = 16.0;
    let n = if a >= cut { 0 } else { (cut - a).ceil() as usize };
    let mut sum = 0.0;
    for k in 0..n {
        sum += (a + k as f64).powf(-s);
    }
    let b = a + n as f64;
    sum += b.powf(1.0 - s) / (s - 1.0);
    sum += 0.5 * b.powf(-s);
    // Correction terms B_{2j}/(2j)! * s(s+1)...(s+2j-2) * b^{-s-2j+1}
    let mut rising = s;
    let mut factorial = 2.0f64;
    let mut power = b.powf(-s - 1.0);
    let inv_b2 = 1.0 / (b * b);
    for (j, b2j) in BERNOULLI_2J.iter().enumerate() {
        sum += b2j / factorial * rising * power;
        let two_j = 2.0 * (j + 1) as f64;
        rising *= (s + two_j - 1.0) * (s + two_j);
        factorial *= (two_j + 1.0) * (two_j + 2.0);
        power *= inv_b2;
    }
    sum
}

/// Error function, Abramowitz–Stegun 7.1.26 rational approximation
/// (absolute error below 1.5e-7, ample for the KS comparisons here).
pub fn erf(x: f64) -> f64 {
    let sign = if x < 0.0 { -1.0 } else { 1.0 };
    let x = x.abs();
    let t = 1.0 / (1.0 + 0.3275911 * x);
    let poly = t
        * (0.254829592 + t * (-0.284496736 + t * (1.421413741 + t * (-1.453152027 + t * 1.061405429))));
    sign * (1.0 - poly * (-x * x).exp())
}

/// Standard normal CDF.
pub fn normal_cdf(x: f64, mu: f64, sigma: f64) -> f64 {
    0.5 * (1.0 + erf((x - mu) / (sigma * std::f64::consts::SQRT_2)))
}

/// Survival function of the Kolmogorov distribution,
/// `Q(lambda) = 2 sum_{j>=1} (-1)^{j-1} exp(-2 j^2 lambda^2)`.
pub fn kolmogorov_q(lambda: f64) -> f64 {
    if lambda < 1e-10 {
        return 1.0;
    }
    let mut sum = 0.0;
    let mut sign = 1.0;
    for j in 1..=100 {
        let t = (-2.0 * (j as f64) * (j as f64) * lambda * lambda).exp();
        sum += sign * t;
        sign = -sign;
        if t < 1e-16 {
            break;
        }
    }
    (2.0 * sum).clamp(0.0, 1.0)
}

// ---------------------------------------------------------------------------
// Correlation and ranking
// ---------------------------------------------------------------------------

/// Pearson correlation; `None` when either variable has zero variance
/// or fewer than two observations.
pub fn pearson(x: &[f64], y: &[f64]) -> Option<f64> {
    assert_eq!(x.len(), y.len());
    let n = x.len();
    if n < 2 {
        return None;
    }
    let nf = n as f64;
    let mx = x.iter().sum::<f64>() / nf;
    let my = y.iter().sum::<f64>() / nf;
    let mut sxx = 0.0;
    let mut syy = 0.0;
    let mut sxy = 0.0;
    for i in 0..n {
        let dx = x[i] - mx;
        let dy = y[i] - my;
        sxx += dx * dx;
        syy += dy * dy;
        sxy += dx * dy;
    }
    if sxx <= 0.0 || syy <= 0.0 {
        return None;
    }
    Some(sxy / (sxx * syy).sqrt())
}

/// 1-based ranks with ties assigned their average rank.
pub fn average_ranks(values: &[f64]) -> Vec<f64> {
    let n = values.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| values[a].partial_cmp(&values[b]).unwrap());
    let mut ranks = vec![0.0; n];
    let mut i = 0;
    while i < n {
        let mut j = i;
        while j + 1 < n && values[order[j + 1]] == values[order[i]] {
            j += 1;
        }
        let rank = (i + 1 + j + 1) as f64 / 2.0;
        for k in i..=j {
            ranks[order[k]] = rank;
        }
        i = j + 1;
    }
    ranks
}

/// Spearman rank correlation with average ranks for ties.
pub fn spearman(x: &[f64], y: &[f64]) -> Option<f64> {
    pearson(&average_ranks(x), &average_ranks(y))
}

/// Kendall rank correlation coefficient (tau-b, tie-corrected).
/// Plain O(n^2) pair counting; the inputs here are at most a few thousand.
pub fn kendall_tau_b(x: &[f64], y: &[f64]) -> Option<f64> {
    assert_eq!(x.len(), y.len());
    let n = x.len();
    if n < 2 {
        return None;
    }
    let mut concordant = 0i64;
    let mut discordant = 0i64;
    let mut ties_x = 0i64;
    let mut ties_y = 0i64;
    for i in 0..n {
        for j in (i + 1)..n {
            let dx = x[i] - x[j];
            let dy = y[i] - y[j];
            if dx == 0.0 && dy == 0.0 {
                ties_x += 1;
                ties_y += 1;
            } else if dx == 0.0 {
                ties_x += 1;
            } else if dy == 0.0 {
                ties_y += 1;
            } else if dx * dy > 0.0 {
                concordant += 1;
            } else {
                discordant += 1;
            }
        }
    }
    let n0 = (n as i64) * (n as i64 - 1) / 2;
    let denom = (((n0 - ties_x) as f64) * ((n0 - ties_y) as f64)).sqrt();
    if denom <= 0.0 {
        return None;
    }
    Some((concordant - discordant) as f64 / denom)
}

/// Ordinary least squares of `y` on `x`; returns (intercept, slope, r2).
/// `None` when `x` has zero variance. A perfect fit of constant data
/// reports r2 = 1.
pub fn linear_fit(x: &[f64], y: &[f64]) -> Option<(f64, f64, f64)> {
    assert_eq!(x.len(), y.len());
    let n = x.len();
    if n < 2 {
        return None;
    }
    let nf = n as f64;
    let mx = x.iter().sum::<f64>() / nf;
    let my = y.iter().sum::<f64>() / nf;
    let mut sxx = 0.0;
    let mut sxy = 0.0;
    let mut syy = 0.0;
    for i in 0..n {
        let dx = x[i] - mx;
        let dy = y[i] - my;
        sxx += dx * dx;
        sxy += dx * dy;
        syy += dy * dy;
    }
    if sxx <= 0.0 {
        return None;
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ss_res = syy - slope * sxy;
    let r2 = if syy <= 0.0 {
        1.0
    } else {
        1.0 - (ss_res / syy).max(0.0)
    };
    Some((intercept, slope, r2))
}

// ---------------------------------------------------------------------------
// Two-sample tests
// ---------------------------------------------------------------------------

/// Two-sample Kolmogorov–Smirnov statistic and asymptotic p-value
/// (with the usual small-sample correction of the effective size).
pub fn ks_two_sample(a: &[f64], b: &[f64]) -> (f64, f64) {
    assert!(!a.is_empty() && !b.is_empty());
    let mut sa = a.to_vec();
    let mut sb = b.to_vec();
    sa.sort_by(|p, q| p.partial_cmp(q).unwrap());
    sb.sort_by(|p, q| p.partial_cmp(q).unwrap());
    let (na, nb) = (sa.len(), sb.len());
    let mut i = 0;
    let mut j = 0;
    let mut d: f64 = 0.0;
    while i < na && j < nb {
        let x = sa[i].min(sb[j]);
        while i < na && sa[i] <= x {
            i += 1;
        }
        while j < nb && sb[j] <= x {
            j += 1;
        }
        let fa = i as f64 / na as f64;
        let fb = j as f64 / nb as f64;
        d = d.max((fa - fb).abs());
    }
    let ne = (na as f64 * nb as f64) / (na + nb) as f64;
    let sqrt_ne = ne.sqrt();
    let lambda = (sqrt_ne + 0.12 + 0.11 / sqrt_ne) * d;
    (d, kolmogorov_q(lambda))
}

/// Outcome of a two-sided permutation test on the difference of means.
#[derive(Debug, Clone, Copy)]
pub struct PermutationOutcome {
    pub p_value: f64,
    /// Whether all label assignments were enumerated instead of sampled.
    pub exact: bool,
    pub observed_diff: f64,
}

fn binomial_at_most(n: usize, k: usize, limit: u128) -> Option<u128> {
    let k = k.min(n - k);
    let mut c: u128 = 1;
    for i in 0..k {
        c = c.checked_mul((n - i) as u128)?;
        c /= (i + 1) as u128;
        if c > limit {
            return None;
        }
    }
    Some(c)
}

/// Two-sided permutation test for a difference in means between groups
/// `a` and `b`. When the number of label assignments does not exceed
/// `resamples`, all assignments are enumerated and the p-value is exact;
/// otherwise `resamples` random assignments are drawn (seeded) and the
/// add-one estimator is used.
pub fn permutation_mean_diff_test(
    a: &[f64],
    b: &[f64],
    resamples: usize,
    seed: u64,
) -> PermutationOutcome {
    assert!(!a.is_empty() && !b.is_empty());
    let pooled: Vec<f64> = a.iter().chain(b.iter()).copied().collect();
    let n = pooled.len();
    let na = a.len();
    let observed = mean(a) - mean(b);
    let threshold = observed.abs() - 1e-12;

    if let Some(total) = binomial_at_most(n, na, resamples as u128) {
        // Exact enumeration over all C(n, na) assignments of labels.
        let mut extreme: u128 = 0;
        let mut combo: Vec<usize> = (0..na).collect();
        loop {
            let mut sum_a = 0.0;
            for &i in &combo {
                sum_a += pooled[i];
            }
            let total_sum: f64 = pooled.iter().sum();
            let mean_a = sum_a / na as f64;
            let mean_b = (total_sum - sum_a) / (n - na) as f64;
            if (mean_a - mean_b).abs() >= threshold {
                extreme += 1;
            }
            // next combination in lexicographic order
            let mut i = na;
            loop {
                if i == 0 {
                    return PermutationOutcome {
                        p_value: extreme as f64 / total as f64,
                        exact: true,
                        observed_diff: observed,
                    };
                }
                i -= 1;
                if combo[i] != i + n - na {
                    break;
                }
            }
            combo[i] += 1;
            for j in (i + 1)..na {
                combo[j] = combo[j - 1] + 1;
            }
        }
    }

    let mut rng = rng_from_seed(seed);
    let mut indices: Vec<usize> = (0..n).collect();
    let mut extreme = 0usize;
    for _ in 0..resamples {
        indices.shuffle(&mut rng);
        let mut sum_a = 0.0;
        for &i in &indices[..na] {
            sum_a += pooled[i];
        }
        let mut sum_b = 0.0;
        for &i in &indices[na..] {
            sum_b += pooled[i];
        }
        let diff = sum_a / na as f64 - sum_b / (n - na) as f64;
        if diff.abs() >= threshold {
            extreme += 1;
        }
    }
    PermutationOutcome {
        p_value: (1 + extreme) as f64 / (1 + resamples) as f64,
        exact: false,
        observed_diff: observed,
    }
}

pub fn mean(values: &[f64]) -> f64 {
    values.iter().sum::<f64>() / values.len() as f64
}

/// Population standard deviation (zero for a single observation).
pub fn population_std(values: &[f64]) -> f64 {
    let m = mean(values);
    (values.iter().map(|v| (v - m) * (v - m)).sum::<f64>() / values.len() as f64).sqrt()
}
