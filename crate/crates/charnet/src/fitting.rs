//! Heavy-tailed distribution fitting and scaling-relation estimation.
//!
//! Degree and occurrence counts are integers, so the power law is fit in
//! its discrete (zeta-normalized) form: for a candidate cutoff the
//! exponent maximizes the zeta-based log-likelihood, and the cutoff
//! minimizing the Kolmogorov–Smirnov distance between the empirical and
//! fitted tail distributions wins. Scaling functions such as the mean
//! neighbor degree are estimates, not samples, and are fit by log–log
//! least squares instead.

use rand::Rng;
use serde::Serialize;
use thiserror::Error;

use crate::stats;

#[derive(Debug, Error)]
pub enum FitError {
    #[error("need at least {need} samples, found {got}")]
    TooFewSamples { need: usize, got: usize },
    #[error("degenerate sample: {0}")]
    Degenerate(&'static str),
    #[error("samples must be positive integers")]
    NonPositive,
    #[error("need at least {need} points, found {got}")]
    TooFewPoints { need: usize, got: usize },
}

/// Discrete power-law fit `p(x) ~ x^-alpha` for `x >= xmin`.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct PowerLawFit {
    pub alpha: f64,
    pub xmin: u64,
    /// KS distance between empirical and fitted tail CDFs.
    pub ks: f64,
    pub n_tail: usize,
}

const ALPHA_TOL: f64 = 1e-8;
const ALPHA_LO: f64 = 1.000_001;
const ALPHA_HI: f64 = 64.0;

/// Log-likelihood of the tail under a discrete power law.
fn log_likelihood(alpha: f64, xmin: f64, n: f64, sum_log: f64) -> f64 {
    -n * stats::hurwitz_zeta(alpha, xmin).ln() - alpha * sum_log
}

/// Maximum-likelihood exponent for a fixed cutoff by golden-section search
/// (the likelihood is unimodal in the exponent).
fn mle_alpha(xmin: u64, tail: &[u64]) -> f64 {
    let n = tail.len() as f64;
    let sum_log: f64 = tail.iter().map(|&x| (x as f64).ln()).sum();
    let xm = xmin as f64;
    let phi = (5.0f64.sqrt() - 1.0) / 2.0;
    let (mut lo, mut hi) = (ALPHA_LO, ALPHA_HI);
    let mut x1 = hi - phi * (hi - lo);
    let mut x2 = lo + phi * (hi - lo);
    let mut f1 = log_likelihood(x1, xm, n, sum_log);
    let mut f2 = log_likelihood(x2, xm, n, sum_log);
    while hi - lo > ALPHA_TOL {
        if f1 < f2 {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + phi * (hi - lo);
            f2 = log_likelihood(x2, xm, n, sum_log);
        } else {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - phi * (hi - lo);
            f1 = log_likelihood(x1, xm, n, sum_log);
        }
    }
    (lo + hi) / 2.0
}

/// Fitted tail CDF `P(X <= x | X >= xmin)` of the discrete power law.
fn model_cdf(alpha: f64, xmin: u64, x: u64) -> f64 {
    1.0 - stats::hurwitz_zeta(alpha, (x + 1) as f64) / stats::hurwitz_zeta(alpha, xmin as f64)
}

/// KS distance between the empirical tail CDF and the fitted one,
/// evaluated at every distinct tail value. Both distributions are step
/// functions jumping at the same atoms, so comparing right limits at the
/// data points is exact there. `tail` must be sorted.
fn ks_distance(alpha: f64, xmin: u64, tail: &[u64]) -> f64 {
    let n = tail.len() as f64;
    let mut d: f64 = 0.0;
    let mut i = 0;
    while i < tail.len() {
        let x = tail[i];
        let mut j = i;
        while j + 1 < tail.len() && tail[j + 1] == x {
            j += 1;
        }
        let ecdf = (j + 1) as f64 / n;
        let model = model_cdf(alpha, xmin, x);
        d = d.max((ecdf - model).abs());
        i = j + 1;
    }
    d
}

/// Fits a discrete power law with automatic cutoff selection: for every
/// candidate cutoff among the distinct sample values the exponent is fit
/// by maximum likelihood, and the cutoff minimizing the KS distance on the
/// tail is returned (ties to the smaller cutoff).
pub fn fit_power_law(samples: &[u64]) -> Result<PowerLawFit, FitError> {
    if samples.len() < 10 {
        return Err(FitError::TooFewSamples {
            need: 10,
            got: samples.len(),
        });
    }
    if samples.contains(&0) {
        return Err(FitError::NonPositive);
    }
    let mut sorted = samples.to_vec();
    sorted.sort_unstable();
    if sorted.first() == sorted.last() {
        return Err(FitError::Degenerate("all samples equal"));
    }
    let mut distinct = sorted.clone();
    distinct.dedup();

    let mut best: Option<PowerLawFit> = None;
    for &xmin in &distinct {
        let start = sorted.partition_point(|&x| x < xmin);
        let tail = &sorted[start..];
        if tail.len() < 2 || tail.first() == tail.last() {
            continue;
        }
        let alpha = mle_alpha(xmin, tail);
        let ks = ks_distance(alpha, xmin, tail);
        let better = match &best {
            None => true,
            Some(b) => ks < b.ks,
        };
        if better {
            best = Some(PowerLawFit {
                alpha,
                xmin,
                ks,
                n_tail: tail.len(),
            });
        }
    }
    best.ok_or(FitError::Degenerate("no admissible cutoff"))
}

/// Log-normal fit of the tail at a fixed cutoff.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct LogNormalTailFit {
    pub mu: f64,
    pub sigma: f64,
    /// KS distance against the log-normal truncated at the cutoff.
    pub ks: f64,
    pub n_tail: usize,
}

/// Maximum-likelihood log-normal on the tail `x >= xmin`: `mu` and `sigma`
/// are the mean and (population) standard deviation of the log-values. The
/// KS distance against the truncated log-normal CDF is reported for
/// comparison with the power-law fit.
pub fn fit_lognormal_tail(samples: &[u64], xmin: u64) -> Result<LogNormalTailFit, FitError> {
    if samples.contains(&0) {
        return Err(FitError::NonPositive);
    }
    let mut tail: Vec<u64> = samples.iter().copied().filter(|&x| x >= xmin).collect();
    tail.sort_unstable();
    if tail.len() < 10 {
        return Err(FitError::TooFewSamples {
            need: 10,
            got: tail.len(),
        });
    }
    if tail.first() == tail.last() {
        return Err(FitError::Degenerate("constant tail"));
    }
    let logs: Vec<f64> = tail.iter().map(|&x| (x as f64).ln()).collect();
    let mu = stats::mean(&logs);
    let sigma = stats::population_std(&logs);
    if sigma <= 0.0 {
        return Err(FitError::Degenerate("zero variance on the tail"));
    }

    let lower = stats::normal_cdf((xmin as f64).ln(), mu, sigma);
    let tail_mass = 1.0 - lower;
    let n = tail.len() as f64;
    let mut ks: f64 = 0.0;
    let mut i = 0;
    while i < tail.len() {
        let x = tail[i];
        let mut j = i;
        while j + 1 < tail.len() && tail[j + 1] == x {
            j += 1;
        }
        let ecdf = (j + 1) as f64 / n;
        let ecdf_before = i as f64 / n;
        let model = (stats::normal_cdf((x as f64).ln(), mu, sigma) - lower) / tail_mass;
        ks = ks.max((ecdf - model).abs()).max((ecdf_before - model).abs());
        i = j + 1;
    }
    Ok(LogNormalTailFit {
        mu,
        sigma,
        ks,
        n_tail: tail.len(),
    })
}

/// Complementary cumulative distribution: sorted `(value, P(X >= value))`
/// pairs, strictly decreasing in probability, starting at 1.
pub fn ccdf(samples: &[u64]) -> Result<Vec<(u64, f64)>, FitError> {
    if samples.is_empty() {
        return Err(FitError::TooFewSamples { need: 1, got: 0 });
    }
    let mut sorted = samples.to_vec();
    sorted.sort_unstable();
    let n = sorted.len() as f64;
    let mut out = Vec::new();
    let mut i = 0;
    while i < sorted.len() {
        let v = sorted[i];
        out.push((v, (sorted.len() - i) as f64 / n));
        while i < sorted.len() && sorted[i] == v {
            i += 1;
        }
    }
    Ok(out)
}

/// Least-squares fit of `y = a + b ln n`.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct LogGrowthFit {
    pub intercept: f64,
    pub slope: f64,
    pub r2: f64,
}

pub fn fit_log_growth(points: &[(f64, f64)]) -> Result<LogGrowthFit, FitError> {
    if points.len() < 3 {
        return Err(FitError::TooFewPoints {
            need: 3,
            got: points.len(),
        });
    }
    if points.iter().any(|&(n, _)| n < 1.0) {
        return Err(FitError::NonPositive);
    }
    let x: Vec<f64> = points.iter().map(|&(n, _)| n.ln()).collect();
    let y: Vec<f64> = points.iter().map(|&(_, v)| v).collect();
    let (intercept, slope, r2) =
        stats::linear_fit(&x, &y).ok_or(FitError::Degenerate("all abscissae equal"))?;
    Ok(LogGrowthFit {
        intercept,
        slope,
        r2,
    })
}

/// Which side of a curve to fit.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TailSide {
    /// Keep points with `x >= cut`.
    UpperTail,
    /// Keep points with `x <= cut`.
    LowerTail,
}

/// Power-law fit of one tail of a function estimate.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct PowerTailFit {
    /// Absolute slope in log–log coordinates.
    pub exponent: f64,
    /// Selected cut abscissa (inclusive).
    pub cut: f64,
    pub r2: f64,
    pub n_used: usize,
}

/// Log–log least squares on the selected tail, scanning the cut over the
/// data abscissae for the best coefficient of determination with at least
/// five points. Non-positive coordinates cannot be log-transformed and are
/// ignored.
pub fn fit_power_tail(points: &[(f64, f64)], side: TailSide) -> Result<PowerTailFit, FitError> {
    let mut usable: Vec<(f64, f64)> = points
        .iter()
        .copied()
        .filter(|&(x, y)| x > 0.0 && y > 0.0)
        .collect();
    usable.sort_by(|a, b| a.partial_cmp(b).unwrap());
    if usable.len() < 5 {
        return Err(FitError::TooFewPoints {
            need: 5,
            got: usable.len(),
        });
    }
    let logx: Vec<f64> = usable.iter().map(|&(x, _)| x.ln()).collect();
    let logy: Vec<f64> = usable.iter().map(|&(_, y)| y.ln()).collect();
    let n = usable.len();
    let mut best: Option<PowerTailFit> = None;
    for cut_idx in 0..n {
        let (xs, ys, cut, used) = match side {
            TailSide::UpperTail => {
                let used = n - cut_idx;
                (&logx[cut_idx..], &logy[cut_idx..], usable[cut_idx].0, used)
            }
            TailSide::LowerTail => {
                let used = cut_idx + 1;
                (&logx[..=cut_idx], &logy[..=cut_idx], usable[cut_idx].0, used)
            }
        };
        if used < 5 {
            continue;
        }
        if let Some((_, slope, r2)) = stats::linear_fit(xs, ys) {
            let better = match &best {
                None => true,
                Some(b) => r2 > b.r2 + 1e-12 || (r2 > b.r2 - 1e-12 && used > b.n_used),
            };
            if better {
                best = Some(PowerTailFit {
                    exponent: slope.abs(),
                    cut,
                    r2,
                    n_used: used,
                });
            }
        }
    }
    best.ok_or(FitError::Degenerate("no admissible cut"))
}

/// Draws from a discrete power law `p(x) ~ x^-alpha`, `x >= xmin`, by
/// exact inverse-transform over the zeta-distribution CDF.
pub fn sample_power_law(alpha: f64, xmin: u64, count: usize, seed: u64) -> Vec<u64> {
    let mut rng = stats::rng_from_seed(seed);
    let z_min = stats::hurwitz_zeta(alpha, xmin as f64);
    let ccdf_at = |x: u64| stats::hurwitz_zeta(alpha, x as f64) / z_min; // P(X >= x)
    (0..count)
        .map(|_| {
            let u: f64 = rng.gen();
            // smallest x with P(X >= x + 1) <= u, by doubling then bisection
            let mut hi = xmin;
            while ccdf_at(hi + 1) > u {
                hi = hi * 2 + 1;
            }
            let mut lo = xmin;
            while lo < hi {
                let mid = lo + (hi - lo) / 2;
                if ccdf_at(mid + 1) > u {
                    lo = mid + 1;
                } else {
                    hi = mid;
                }
            }
            lo
        })
        .collect()
}

/// Semi-parametric bootstrap p-value for a power-law fit: each replicate
/// resamples the body uniformly and the tail from the fitted model, refits
/// from scratch, and the p-value is the share of replicates whose KS
/// distance reaches the observed one.
pub fn bootstrap_p_value(
    samples: &[u64],
    fit: &PowerLawFit,
    replicates: usize,
    seed: u64,
) -> Result<f64, FitError> {
    let body: Vec<u64> = samples.iter().copied().filter(|&x| x < fit.xmin).collect();
    let n = samples.len();
    let p_tail = fit.n_tail as f64 / n as f64;
    let mut worse = 0usize;
    for r in 0..replicates {
        let rep_seed = stats::derive_seed(seed, r as u64);
        let mut rng = stats::rng_from_seed(rep_seed);
        let mut synthetic = Vec::with_capacity(n);
        let mut tail_needed = 0usize;
        for _ in 0..n {
            if body.is_empty() || rng.gen::<f64>() < p_tail {
                tail_needed += 1;
            } else {
                synthetic.push(body[rng.gen_range(0..body.len())]);
            }
        }
        synthetic.extend(sample_power_law(
            fit.alpha,
            fit.xmin,
            tail_needed,
            stats::derive_seed(rep_seed, 1),
        ));
        if let Ok(refit) = fit_power_law(&synthetic) {
            if refit.ks >= fit.ks {
                worse += 1;
            }
        }
    }
    Ok(worse as f64 / replicates as f64)
}
