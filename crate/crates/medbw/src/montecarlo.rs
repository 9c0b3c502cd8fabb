//! Replicated simulations behind the limit theorems.
//!
//! Every replicate draws from its own ChaCha stream, `(slot << 32) |
//! replicate`, and results are collected in replicate order, so a record
//! depends only on its configuration and seed, never on the thread count.

use medbw_core::median::{median_sq_dist, PairwiseSummary};
use medbw_core::sampling::{draw_split_sample_stream, replicate_stream, stream_rng};
use medbw_core::target::{gap_threshold, GapBound};
use medbw_core::ustat::indicator_variance;
use medbw_core::{Scenario, TargetDistribution};
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{LabError, Result};
use crate::stats::{mean_sd, moments, normal_ks_distance};

pub use medbw_core::ustat::sigma_sq_indicator;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExperimentKind {
    CltHn,
    CltUstat,
    Ecdf,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub kind: ExperimentKind,
    pub scenario: Scenario,
    pub ns: Vec<usize>,
    pub replicates: usize,
    pub seed: u64,
    /// Indicator threshold (`CltUstat`).
    pub threshold: Option<f64>,
    /// Evaluation points (`Ecdf`).
    pub grid: Vec<f64>,
    pub keep_values: bool,
}

/// Diagnostics of the standardized statistic at one sample size.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PerNStats {
    pub n: usize,
    pub mean: f64,
    pub variance: f64,
    pub skewness: f64,
    pub excess_kurtosis: f64,
    /// Distance between the standardized empirical CDF and `Φ`.
    pub normal_ks: f64,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub values: Option<Vec<f64>>,
}

/// Theory values the replicates are compared against.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Theory {
    /// Median `m` of `T` (`CltHn`) or the indicator threshold (`CltUstat`).
    pub m: f64,
    /// `f_T(m)`; 1 for `CltUstat`.
    pub density: f64,
    /// `θ = F_T(m)`.
    pub theta: f64,
    /// `σ²` exactly as displayed: `Var g_P(X) + Var g_Q(Y)`.
    pub sigma_sq: f64,
    /// `σ² / f_T(m)²`.
    pub predicted_variance: f64,
    /// Variance of the Hájek projection over `f_T(m)²`,
    /// `4 (α Var g_P + (1-α) Var g_Q) / f_T(m)²`; `2 σ²/f_T(m)²` at `α = 1/2`.
    pub projection_variance: f64,
}

/// Replicate mean and spread of `F̂_n(t)` at one grid point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EcdfPoint {
    pub t: f64,
    pub mean: f64,
    pub sd: f64,
    pub reference: f64,
    /// `|mean - reference|`.
    pub deviation: f64,
    /// `deviation <= 3 sd`.
    pub within: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentRecord {
    pub config: ExperimentConfig,
    pub per_n: Vec<PerNStats>,
    pub theory: Option<Theory>,
    #[serde(skip_serializing_if = "Vec::is_empty", default)]
    pub ecdf: Vec<EcdfPoint>,
    /// Set when the statistic is identically zero (threshold below the support).
    pub degenerate: bool,
}

impl ExperimentRecord {
    /// Observed variance over `σ²/f²` for each `n`.
    pub fn displayed_ratios(&self) -> Vec<f64> {
        let t = self.theory.expect("CLT records carry theory values");
        self.per_n.iter().map(|p| p.variance / t.predicted_variance).collect()
    }

    /// Observed variance over the projection variance for each `n`.
    pub fn projection_ratios(&self) -> Vec<f64> {
        let t = self.theory.expect("CLT records carry theory values");
        self.per_n.iter().map(|p| p.variance / t.projection_variance).collect()
    }
}

fn check_replicates(ns: &[usize], replicates: usize, min_n: usize) -> Result<()> {
    if replicates < 2 {
        return Err(LabError::config(format!("replicates must be at least 2, got {replicates}")));
    }
    if ns.is_empty() {
        return Err(LabError::config("at least one sample size is required"));
    }
    if let Some(&n) = ns.iter().find(|&&n| n < min_n) {
        return Err(LabError::config(format!("sample sizes must be at least {min_n}, got {n}")));
    }
    Ok(())
}

fn per_n_stats(n: usize, values: Vec<f64>, keep: bool) -> PerNStats {
    let m = moments(&values);
    PerNStats {
        n,
        mean: m.mean,
        variance: m.variance,
        skewness: m.skewness,
        excess_kurtosis: m.excess_kurtosis,
        normal_ks: normal_ks_distance(&values),
        values: keep.then_some(values),
    }
}

/// Runs `stat` on `replicates` independent split samples of size `n`.
pub fn replicate_statistic<F>(
    scenario: &Scenario,
    n: usize,
    replicates: usize,
    seed: u64,
    slot: u32,
    stat: F,
) -> Result<Vec<f64>>
where
    F: Fn(&medbw_core::SplitSample) -> Result<f64> + Sync,
{
    (0..replicates as u32)
        .into_par_iter()
        .map(|r| {
            let sample = draw_split_sample_stream(scenario, n, seed, replicate_stream(slot, r))?;
            stat(&sample)
        })
        .collect()
}

fn indicator_theory(scenario: &Scenario, m: f64, density: f64) -> Result<Theory> {
    let target = TargetDistribution::new(*scenario)?;
    let v = indicator_variance(scenario, m)?;
    let f2 = density * density;
    Ok(Theory {
        m,
        density,
        theta: target.cdf(m),
        sigma_sq: v.sigma_sq(),
        predicted_variance: v.sigma_sq() / f2,
        projection_variance: v.projection_variance() / f2,
    })
}

/// Replicates of `√n (H_n - m)` for each `n` in `ns`.
pub fn clt_hn_experiment(scenario: &Scenario, ns: &[usize], replicates: usize, seed: u64) -> Result<ExperimentRecord> {
    clt_hn_experiment_with(scenario, ns, replicates, seed, false)
}

pub fn clt_hn_experiment_with(
    scenario: &Scenario,
    ns: &[usize],
    replicates: usize,
    seed: u64,
    keep_values: bool,
) -> Result<ExperimentRecord> {
    check_replicates(ns, replicates, 20)?;
    let target = TargetDistribution::new(*scenario)?;
    let m = target.median()?;
    let theory = indicator_theory(scenario, m, target.pdf(m)?)?;
    let mut per_n = Vec::with_capacity(ns.len());
    for (slot, &n) in ns.iter().enumerate() {
        let root_n = (n as f64).sqrt();
        let values = replicate_statistic(scenario, n, replicates, seed, slot as u32, |s| {
            Ok(root_n * (median_sq_dist(s.coords(), s.dim())? - m))
        })?;
        per_n.push(per_n_stats(n, values, keep_values));
    }
    Ok(ExperimentRecord {
        config: ExperimentConfig {
            kind: ExperimentKind::CltHn,
            scenario: *scenario,
            ns: ns.to_vec(),
            replicates,
            seed,
            threshold: None,
            grid: Vec::new(),
            keep_values,
        },
        per_n,
        theory: Some(theory),
        ecdf: Vec::new(),
        degenerate: false,
    })
}

/// Fraction of pairs with squared distance `<= t`.
fn indicator_u_statistic(sample: &medbw_core::SplitSample, t: f64) -> f64 {
    let n = sample.len();
    let mut count = 0usize;
    for i in 0..n {
        let xi = sample.point(i);
        for j in i + 1..n {
            if medbw_core::median::sq_dist(xi, sample.point(j)) <= t {
                count += 1;
            }
        }
    }
    count as f64 / (n * (n - 1) / 2) as f64
}

/// Replicates of `√n (U_n - θ)` for `h(x, y) = 1{‖x-y‖² <= t}` and
/// `θ = F_T(t)`.
pub fn clt_ustat_experiment(
    scenario: &Scenario,
    threshold: f64,
    ns: &[usize],
    replicates: usize,
    seed: u64,
) -> Result<ExperimentRecord> {
    check_replicates(ns, replicates, 20)?;
    if !threshold.is_finite() {
        return Err(LabError::config(format!("threshold must be finite, got {threshold}")));
    }
    let config = ExperimentConfig {
        kind: ExperimentKind::CltUstat,
        scenario: *scenario,
        ns: ns.to_vec(),
        replicates,
        seed,
        threshold: Some(threshold),
        grid: Vec::new(),
        keep_values: false,
    };
    if threshold <= 0.0 {
        // Squared distances of continuous data are almost surely positive.
        let per_n = ns.iter().map(|&n| per_n_stats(n, vec![0.0; replicates], false)).collect();
        return Ok(ExperimentRecord {
            config,
            per_n,
            theory: None,
            ecdf: Vec::new(),
            degenerate: true,
        });
    }
    let theory = indicator_theory(scenario, threshold, 1.0)?;
    let mut per_n = Vec::with_capacity(ns.len());
    for (slot, &n) in ns.iter().enumerate() {
        let root_n = (n as f64).sqrt();
        let values = replicate_statistic(scenario, n, replicates, seed, slot as u32, |s| {
            Ok(root_n * (indicator_u_statistic(s, threshold) - theory.theta))
        })?;
        per_n.push(per_n_stats(n, values, false));
    }
    Ok(ExperimentRecord {
        config,
        per_n,
        theory: Some(theory),
        ecdf: Vec::new(),
        degenerate: false,
    })
}

/// Replicate mean and spread of `F̂_n(t)` against `F_T(t)` on a grid.
pub fn ecdf_convergence_check(
    scenario: &Scenario,
    n: usize,
    grid: &[f64],
    replicates: usize,
    seed: u64,
) -> Result<ExperimentRecord> {
    check_replicates(&[n], replicates, 2)?;
    let target = TargetDistribution::new(*scenario)?;
    let curves = replicate_statistic_vec(scenario, n, replicates, seed, |s| {
        let summary = PairwiseSummary::from_sample(s);
        grid.iter().map(|&t| summary.empirical_cdf(t)).collect()
    })?;
    let ecdf = grid
        .iter()
        .enumerate()
        .map(|(g, &t)| {
            let column: Vec<f64> = curves.iter().map(|c| c[g]).collect();
            let (mean, sd) = mean_sd(&column);
            let reference = target.cdf(t);
            let deviation = (mean - reference).abs();
            EcdfPoint {
                t,
                mean,
                sd,
                reference,
                deviation,
                within: deviation <= 3.0 * sd,
            }
        })
        .collect();
    Ok(ExperimentRecord {
        config: ExperimentConfig {
            kind: ExperimentKind::Ecdf,
            scenario: *scenario,
            ns: vec![n],
            replicates,
            seed,
            threshold: None,
            grid: grid.to_vec(),
            keep_values: false,
        },
        per_n: Vec::new(),
        theory: None,
        ecdf,
        degenerate: false,
    })
}

fn replicate_statistic_vec<F>(scenario: &Scenario, n: usize, replicates: usize, seed: u64, stat: F) -> Result<Vec<Vec<f64>>>
where
    F: Fn(&medbw_core::SplitSample) -> Vec<f64> + Sync,
{
    (0..replicates as u32)
        .into_par_iter()
        .map(|r| Ok(stat(&draw_split_sample_stream(scenario, n, seed, replicate_stream(0, r))?)))
        .collect()
}

/// Outcome of the gap-event simulation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GapRecord {
    pub lambda: f64,
    pub replicates: usize,
    pub seed: u64,
    /// Fraction of draws with `max(T_XX, T_YY) + gap < T_XY`.
    pub frequency: f64,
    /// `1 - 75/λ`.
    pub probability_bound: f64,
    pub gap: f64,
    /// Binomial standard error of the bound, `√(b(1-b)/R)`.
    pub standard_error: f64,
    /// `frequency >= bound - 3 SE`.
    pub passed: bool,
}

/// Draws `replicates` quadruples `(X, X', Y, Y')` with independent
/// coordinates of the given means and variances and counts the gap event.
pub fn gap_lemma_experiment(
    mu_x: &[f64],
    mu_y: &[f64],
    var_x: &[f64],
    var_y: &[f64],
    lambda: f64,
    replicates: usize,
    seed: u64,
) -> Result<GapRecord> {
    let d = mu_x.len();
    if var_x.len() != d || var_y.len() != d {
        return Err(LabError::config("mean and variance vectors must share one dimension"));
    }
    if var_x.iter().chain(var_y).any(|v| !(*v >= 0.0)) {
        return Err(LabError::config("variances must be nonnegative"));
    }
    if replicates < 1 {
        return Err(LabError::config("replicates must be positive"));
    }
    let GapBound { probability_bound, gap } =
        gap_threshold(mu_x, mu_y, var_x.iter().sum(), var_y.iter().sum(), lambda)?;
    let sd_x: Vec<f64> = var_x.iter().map(|v| v.sqrt()).collect();
    let sd_y: Vec<f64> = var_y.iter().map(|v| v.sqrt()).collect();
    const CHUNK: usize = 4096;
    let chunks = replicates.div_ceil(CHUNK);
    let hits: usize = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut rng = stream_rng(seed, c as u64);
            let mut z = || -> f64 { StandardNormal.sample(&mut rng) };
            let count = CHUNK.min(replicates - c * CHUNK);
            let mut hits = 0;
            let (mut x1, mut x2, mut y1, mut y2) = (vec![0.0; d], vec![0.0; d], vec![0.0; d], vec![0.0; d]);
            for _ in 0..count {
                for k in 0..d {
                    x1[k] = mu_x[k] + sd_x[k] * z();
                    x2[k] = mu_x[k] + sd_x[k] * z();
                    y1[k] = mu_y[k] + sd_y[k] * z();
                    y2[k] = mu_y[k] + sd_y[k] * z();
                }
                let dist = medbw_core::median::sq_dist;
                if dist(&x1, &x2).max(dist(&y1, &y2)) + gap < dist(&x1, &y1) {
                    hits += 1;
                }
            }
            hits
        })
        .collect::<Vec<_>>()
        .into_iter()
        .sum();
    let frequency = hits as f64 / replicates as f64;
    let standard_error = (probability_bound * (1.0 - probability_bound) / replicates as f64).sqrt();
    Ok(GapRecord {
        lambda,
        replicates,
        seed,
        frequency,
        probability_bound,
        gap,
        standard_error,
        passed: frequency >= probability_bound - 3.0 * standard_error,
    })
}

/// One-dimensional unit-variance gap experiment with `‖μ_X - μ_Y‖² = 2λ`,
/// which meets the separation condition with equality.
pub fn gap_lemma_unit(lambda: f64, replicates: usize, seed: u64) -> Result<GapRecord> {
    gap_lemma_experiment(&[0.0], &[(2.0 * lambda).sqrt()], &[1.0], &[1.0], lambda, replicates, seed)
}

/// Convergence-trend check: in how many of `metas` independent repetitions
/// is the variance at `n_large` closer to `limit` than at `n_small`?
pub fn variance_trend(
    scenario: &Scenario,
    n_small: usize,
    n_large: usize,
    replicates: usize,
    metas: usize,
    seed: u64,
    limit: f64,
) -> Result<usize> {
    let mut closer = 0;
    for meta in 0..metas {
        let rec = clt_hn_experiment(scenario, &[n_small, n_large], replicates, seed.wrapping_add(1 + meta as u64))?;
        let small = (rec.per_n[0].variance - limit).abs();
        let large = (rec.per_n[1].variance - limit).abs();
        if large < small {
            closer += 1;
        }
    }
    Ok(closer)
}
