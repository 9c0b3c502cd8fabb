//! Result tables behind each subcommand.

use medbw_core::bahadur::{abs_linear, abs_quadratic, estimate_lambda1_stream};
use medbw_core::median::{pairwise_sq_distances, median_heuristic_from_summary, sq_dist, NuConvention};
use medbw_core::power::{maximize_power_ratio, population_mmd_sq, power_ratio, sigma_lin_sq};
use medbw_core::sampling::{draw_split_sample_stream, replicate_stream};
use medbw_core::{Error, PowerOptimum, Scenario, ScenarioKind, SplitSample, StatisticKind, TargetDistribution};
use rayon::prelude::*;

use crate::config::{Command, RunConfig, ScenarioChoice};
use crate::error::{LabError, Result};
use crate::montecarlo::{
    clt_hn_experiment, clt_ustat_experiment, ecdf_convergence_check, gap_lemma_unit, ExperimentRecord, GapRecord,
};
use crate::output::{Cell, Report, Table};
use crate::stats::mean_sd;

/// Panels a command covers, in output order.
pub fn panels(cfg: &RunConfig) -> Result<Vec<ScenarioChoice>> {
    let fixed = match cfg.command {
        Command::Figure4 => Some(ScenarioChoice::Mean),
        Command::Figure5 => Some(ScenarioChoice::Var),
        _ => None,
    };
    match (fixed, cfg.scenario) {
        (Some(f), Some(s)) if f != s => Err(LabError::config(format!(
            "`scenario`: {} only covers the {} scenario",
            cfg.command.name(),
            panel_name(f)
        ))),
        (Some(f), _) => Ok(vec![f]),
        (None, Some(s)) => Ok(vec![s]),
        (None, None) => match cfg.command {
            Command::CltSuite | Command::Bandwidth => Ok(vec![ScenarioChoice::Mean]),
            _ => Ok(vec![ScenarioChoice::Mean, ScenarioChoice::Var]),
        },
    }
}

pub fn panel_name(choice: ScenarioChoice) -> &'static str {
    match choice {
        ScenarioChoice::Mean => "mean",
        ScenarioChoice::Var => "var",
    }
}

/// Parameter values of a panel (`μ` or `σ²`) with their one-dimensional scenarios.
fn parameter_sweep(cfg: &RunConfig, choice: ScenarioChoice) -> Result<Vec<(f64, Scenario)>> {
    match choice {
        ScenarioChoice::Mean => cfg
            .grid_mu
            .iter()
            .map(|&mu| Ok((mu, Scenario::mean_shift(mu, cfg.alpha)?)))
            .collect(),
        ScenarioChoice::Var => cfg
            .grid_sigma2
            .iter()
            .map(|&s2| Ok((s2, Scenario::variance_scale(s2.sqrt(), cfg.alpha)?)))
            .collect(),
    }
}

// ---------------------------------------------------------------- figure 1

/// Histogram of pairwise squared distances on edges shared by all replicates.
#[derive(Debug, Clone, PartialEq)]
pub struct Histogram {
    pub edges: Vec<f64>,
    pub mean_counts: Vec<f64>,
    pub sd_counts: Vec<f64>,
    pub pairs: usize,
}

fn all_sq_dists(sample: &SplitSample) -> Vec<f64> {
    let n = sample.len();
    let mut d = Vec::with_capacity(n * (n - 1) / 2);
    for i in 0..n {
        for j in i + 1..n {
            d.push(sq_dist(sample.point(i), sample.point(j)));
        }
    }
    d
}

/// Histograms `replicates` samples of size `n` into `bins` equal-width bins
/// spanning the smallest and largest distance over all replicates.
pub fn distance_histogram(scenario: &Scenario, n: usize, bins: usize, replicates: usize, seed: u64) -> Result<Histogram> {
    if bins == 0 || replicates == 0 {
        return Err(LabError::config("bins and replicates must be positive"));
    }
    let dists: Vec<Vec<f64>> = (0..replicates as u32)
        .into_par_iter()
        .map(|r| Ok(all_sq_dists(&draw_split_sample_stream(scenario, n, seed, replicate_stream(0, r))?)))
        .collect::<Result<_>>()?;
    let lo = dists.iter().flatten().copied().fold(f64::INFINITY, f64::min);
    let hi = dists.iter().flatten().copied().fold(f64::NEG_INFINITY, f64::max);
    let width = if hi > lo { (hi - lo) / bins as f64 } else { 1.0 };
    let edges: Vec<f64> = (0..=bins).map(|i| lo + width * i as f64).collect();
    let counts: Vec<Vec<f64>> = dists
        .iter()
        .map(|ds| {
            let mut c = vec![0.0; bins];
            for &d in ds {
                let k = (((d - lo) / width) as usize).min(bins - 1);
                c[k] += 1.0;
            }
            c
        })
        .collect();
    let (mean_counts, sd_counts) = (0..bins)
        .map(|k| {
            let col: Vec<f64> = counts.iter().map(|c| c[k]).collect();
            let (m, s) = mean_sd(&col);
            (m, if replicates > 1 { s } else { 0.0 })
        })
        .unzip();
    Ok(Histogram {
        edges,
        mean_counts,
        sd_counts,
        pairs: dists[0].len(),
    })
}

impl Histogram {
    /// Share of the mass below the first empty bin, if there is one.
    pub fn left_cluster_mass(&self) -> Option<f64> {
        let gap = self.mean_counts.iter().position(|&c| c == 0.0)?;
        let total: f64 = self.mean_counts.iter().sum();
        Some(self.mean_counts[..gap].iter().sum::<f64>() / total)
    }

    /// Local maxima holding at least 5% of the tallest bin.
    pub fn modes(&self) -> Vec<usize> {
        let c = &self.mean_counts;
        let peak = c.iter().copied().fold(0.0, f64::max);
        (0..c.len())
            .filter(|&k| {
                let left = if k == 0 { 0.0 } else { c[k - 1] };
                let right = if k + 1 == c.len() { 0.0 } else { c[k + 1] };
                c[k] >= 0.05 * peak && c[k] >= left && c[k] > right
            })
            .collect()
    }

    /// Empty bins strictly between the first and last mode.
    pub fn empty_bins_between_modes(&self) -> usize {
        let modes = self.modes();
        match (modes.first(), modes.last()) {
            (Some(&a), Some(&b)) => self.mean_counts[a..=b].iter().filter(|&&c| c == 0.0).count(),
            _ => 0,
        }
    }
}

/// The two `figure1` scenarios in dimension `cfg.dim`.
pub fn figure1_scenario(cfg: &RunConfig, choice: ScenarioChoice) -> Result<Scenario> {
    cfg.scenario_for(choice)
}

pub fn figure1(cfg: &RunConfig) -> Result<Report> {
    let mut tables = Vec::new();
    let mut warnings = Vec::new();
    for choice in panels(cfg)? {
        let scenario = figure1_scenario(cfg, choice)?;
        let h = distance_histogram(&scenario, cfg.n, cfg.bins, cfg.replicates, cfg.seed)?;
        let mut t = Table::new(panel_name(choice), &["bin", "lower", "upper", "mean_count", "sd_count"]);
        for k in 0..cfg.bins {
            t.push(vec![k.into(), h.edges[k].into(), h.edges[k + 1].into(), h.mean_counts[k].into(), h.sd_counts[k].into()]);
        }
        match h.left_cluster_mass() {
            Some(m) => warnings.push(format!("{}: left-cluster mass {m:.5}", panel_name(choice))),
            None => warnings.push(format!("{}: no empty bin separates the distances", panel_name(choice))),
        }
        tables.push(t);
    }
    Ok(Report { config: cfg.clone(), tables, warnings })
}

// ---------------------------------------------------------------- figure 2

/// Bandwidths for one parameter value.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BandwidthRow {
    pub nu_med: f64,
    pub quad: Option<PowerOptimum>,
    pub lin: Option<PowerOptimum>,
}

/// Median-heuristic limit and both power-maximizing bandwidths. The
/// optimizers are skipped for a null scenario.
pub fn bandwidth_row(scenario: &Scenario, convention: NuConvention) -> Result<BandwidthRow> {
    let nu_med = TargetDistribution::new(*scenario)?.median_bandwidth_with(convention)?.nu;
    let optimum = |kind| match maximize_power_ratio(scenario, kind) {
        Ok(o) => Ok(Some(o)),
        Err(Error::NullScenario(_)) => Ok(None),
        Err(e) => Err(e),
    };
    Ok(BandwidthRow {
        nu_med,
        quad: optimum(StatisticKind::Quadratic)?,
        lin: optimum(StatisticKind::Linear)?,
    })
}

fn nu_or_nan(o: Option<PowerOptimum>) -> f64 {
    o.map_or(f64::NAN, |o| o.selection.nu)
}

fn ratio_or_zero(o: Option<PowerOptimum>) -> f64 {
    o.map_or(0.0, |o| o.ratio)
}

fn flat(o: Option<PowerOptimum>) -> bool {
    o.is_none_or(|o| o.flat)
}

pub fn figure2(cfg: &RunConfig) -> Result<Report> {
    let mut tables = Vec::new();
    let mut warnings = Vec::new();
    for choice in panels(cfg)? {
        let sweep = parameter_sweep(cfg, choice)?;
        let rows: Vec<BandwidthRow> = sweep
            .par_iter()
            .map(|(_, s)| bandwidth_row(s, cfg.nu_convention))
            .collect::<std::result::Result<_, _>>()?;
        let param = if choice == ScenarioChoice::Mean { "mu" } else { "sigma2" };
        let mut t = Table::new(
            panel_name(choice),
            &[param, "nu_med", "nu_u", "nu_lin", "ratio_u", "ratio_lin", "flat_u", "flat_lin"],
        );
        for ((p, _), r) in sweep.iter().zip(&rows) {
            if flat(r.quad) || flat(r.lin) {
                warnings.push(format!("{param} = {p}: power criterion is flat; maximizer not meaningful"));
            }
            t.push(vec![
                (*p).into(),
                r.nu_med.into(),
                nu_or_nan(r.quad).into(),
                nu_or_nan(r.lin).into(),
                ratio_or_zero(r.quad).into(),
                ratio_or_zero(r.lin).into(),
                flat(r.quad).into(),
                flat(r.lin).into(),
            ]);
        }
        tables.push(t);
    }
    Ok(Report { config: cfg.clone(), tables, warnings })
}

// ---------------------------------------------------------------- figure 3

/// Slope summary over repetitions.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SlopeStats {
    pub mean: f64,
    pub sd: f64,
}

/// Approximate Bahadur slopes for one parameter value.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AbsRow {
    pub quad_med: SlopeStats,
    pub quad_pow: SlopeStats,
    pub lin_med: SlopeStats,
    pub lin_pow: SlopeStats,
}

const ZERO_SLOPE: SlopeStats = SlopeStats { mean: 0.0, sd: 0.0 };

/// Quadratic slopes at bandwidth `nu` over `reps` independent `λ₁` estimates.
/// Stream `replicate_stream(slot, r)` of `seed` feeds repetition `r`.
pub fn quadratic_slopes(scenario: &Scenario, nu: f64, points: usize, reps: usize, seed: u64, slot: u32) -> Result<SlopeStats> {
    let mmd = population_mmd_sq(scenario, nu)?;
    if scenario.is_null() {
        return Ok(ZERO_SLOPE);
    }
    let slopes: Vec<f64> = (0..reps as u32)
        .into_par_iter()
        .map(|r| {
            let l1 = estimate_lambda1_stream(points, scenario, nu, seed, replicate_stream(slot, r))?;
            Ok(abs_quadratic(mmd, l1)?.slope)
        })
        .collect::<Result<_>>()?;
    let (mean, sd) = mean_sd(&slopes);
    Ok(SlopeStats { mean, sd })
}

/// Linear slope at bandwidth `nu`; deterministic, so the spread is zero.
pub fn linear_slope(scenario: &Scenario, nu: f64) -> Result<SlopeStats> {
    if scenario.is_null() {
        return Ok(ZERO_SLOPE);
    }
    let mmd = population_mmd_sq(scenario, nu)?;
    Ok(SlopeStats {
        mean: abs_linear(mmd, sigma_lin_sq(scenario, nu)?)?.slope,
        sd: 0.0,
    })
}

/// All four slopes for `scenario`, with `slot` selecting disjoint streams.
pub fn abs_row(scenario: &Scenario, bw: &BandwidthRow, points: usize, reps: usize, seed: u64, slot: u32) -> Result<AbsRow> {
    if scenario.is_null() {
        return Ok(AbsRow { quad_med: ZERO_SLOPE, quad_pow: ZERO_SLOPE, lin_med: ZERO_SLOPE, lin_pow: ZERO_SLOPE });
    }
    let quad_nu = nu_or_nan(bw.quad);
    let lin_nu = nu_or_nan(bw.lin);
    Ok(AbsRow {
        quad_med: quadratic_slopes(scenario, bw.nu_med, points, reps, seed, 2 * slot)?,
        quad_pow: quadratic_slopes(scenario, quad_nu, points, reps, seed, 2 * slot + 1)?,
        lin_med: linear_slope(scenario, bw.nu_med)?,
        lin_pow: linear_slope(scenario, lin_nu)?,
    })
}

pub fn figure3(cfg: &RunConfig) -> Result<Report> {
    let mut tables = Vec::new();
    for (panel, choice) in panels(cfg)?.into_iter().enumerate() {
        let param = if choice == ScenarioChoice::Mean { "mu" } else { "sigma2" };
        let mut t = Table::new(
            panel_name(choice),
            &[
                param,
                "nu_med",
                "nu_u",
                "nu_lin",
                "abs_quad_med_mean",
                "abs_quad_med_sd",
                "abs_quad_pow_mean",
                "abs_quad_pow_sd",
                "abs_lin_med",
                "abs_lin_pow",
            ],
        );
        for (i, (p, s)) in parameter_sweep(cfg, choice)?.into_iter().enumerate() {
            let bw = bandwidth_row(&s, cfg.nu_convention)?;
            let slot = (panel * 1024 + i) as u32;
            let a = abs_row(&s, &bw, cfg.lambda1_points, cfg.lambda1_reps, cfg.seed, slot)?;
            t.push(vec![
                p.into(),
                bw.nu_med.into(),
                nu_or_nan(bw.quad).into(),
                nu_or_nan(bw.lin).into(),
                a.quad_med.mean.into(),
                a.quad_med.sd.into(),
                a.quad_pow.mean.into(),
                a.quad_pow.sd.into(),
                a.lin_med.mean.into(),
                a.lin_pow.mean.into(),
            ]);
        }
        tables.push(t);
    }
    Ok(Report { config: cfg.clone(), tables, warnings: Vec::new() })
}

// ------------------------------------------------------------ figures 4, 5

fn criterion_curves(cfg: &RunConfig, choice: ScenarioChoice) -> Result<(Vec<Table>, Vec<String>)> {
    let param = if choice == ScenarioChoice::Mean { "mu" } else { "sigma2" };
    let sweep = parameter_sweep(cfg, choice)?;
    let mut cdf = Table::new("cdf", &[param, "t", "cdf"]);
    let mut rlin = Table::new("rlin", &[param, "nu", "mmd_sq", "sigma_lin_sq", "ratio"]);
    let mut rquad = Table::new("rquad", &[param, "nu", "mmd_sq", "sigma_u_sq", "ratio"]);
    let mut warnings = Vec::new();
    for (p, s) in &sweep {
        let target = TargetDistribution::new(*s)?;
        let values: Vec<f64> = cfg.grid_t.par_iter().map(|&t| target.cdf(t)).collect();
        for (&t, v) in cfg.grid_t.iter().zip(values) {
            cdf.push(vec![(*p).into(), t.into(), v.into()]);
        }
        for (kind, table) in [(StatisticKind::Linear, &mut rlin), (StatisticKind::Quadratic, &mut rquad)] {
            let curve: Vec<_> = cfg.grid_nu.par_iter().map(|&nu| power_ratio(s, nu, kind)).collect();
            let mut failed = 0;
            for (&nu, v) in cfg.grid_nu.iter().zip(curve) {
                let (mmd, var, ratio) = match v {
                    Ok(v) => (v.mmd_sq, v.variance, v.ratio),
                    Err(Error::Numerical(_)) => {
                        failed += 1;
                        (population_mmd_sq(s, nu)?, f64::NAN, f64::NAN)
                    }
                    Err(e) => return Err(e.into()),
                };
                table.push(vec![(*p).into(), nu.into(), mmd.into(), var.into(), ratio.into()]);
            }
            if failed > 0 {
                warnings.push(format!("{param} = {p}: {kind:?} variance lost to cancellation at {failed} bandwidths (written as nan)"));
            }
        }
    }
    Ok((vec![cdf, rlin, rquad], warnings))
}

pub fn figure4_5(cfg: &RunConfig) -> Result<Report> {
    let choice = panels(cfg)?[0];
    let (tables, warnings) = criterion_curves(cfg, choice)?;
    Ok(Report { config: cfg.clone(), tables, warnings })
}

// --------------------------------------------------------------- clt suite

fn clt_table(name: &str, rec: &ExperimentRecord) -> Table {
    let mut t = Table::new(
        name,
        &[
            "n",
            "mean",
            "variance",
            "skewness",
            "excess_kurtosis",
            "normal_ks",
            "predicted_variance",
            "projection_variance",
            "ratio_displayed",
            "ratio_projection",
        ],
    );
    let (pred, proj) = rec.theory.map_or((f64::NAN, f64::NAN), |t| (t.predicted_variance, t.projection_variance));
    for p in &rec.per_n {
        t.push(vec![
            p.n.into(),
            p.mean.into(),
            p.variance.into(),
            p.skewness.into(),
            p.excess_kurtosis.into(),
            p.normal_ks.into(),
            pred.into(),
            proj.into(),
            (p.variance / pred).into(),
            (p.variance / proj).into(),
        ]);
    }
    t
}

fn gap_table(records: &[GapRecord]) -> Table {
    let mut t = Table::new("gap", &["lambda", "replicates", "frequency", "probability_bound", "standard_error", "gap", "passed"]);
    for r in records {
        t.push(vec![
            r.lambda.into(),
            r.replicates.into(),
            r.frequency.into(),
            r.probability_bound.into(),
            r.standard_error.into(),
            r.gap.into(),
            r.passed.into(),
        ]);
    }
    t
}

/// Gap-event frequencies at every `λ` of `grid-lambda`.
pub fn gap_records(cfg: &RunConfig, replicates: usize) -> Result<Vec<GapRecord>> {
    cfg.grid_lambda
        .iter()
        .enumerate()
        .map(|(i, &l)| gap_lemma_unit(l, replicates, cfg.seed.wrapping_add(i as u64)))
        .collect()
}

pub fn gap_check(cfg: &RunConfig) -> Result<Report> {
    let records = gap_records(cfg, cfg.replicates)?;
    let warnings = records
        .iter()
        .filter(|r| !r.passed)
        .map(|r| format!("lambda = {}: frequency {} below bound {} - 3 SE", r.lambda, r.frequency, r.probability_bound))
        .collect();
    Ok(Report { config: cfg.clone(), tables: vec![gap_table(&records)], warnings })
}

pub fn clt_suite(cfg: &RunConfig) -> Result<Report> {
    let choice = panels(cfg)?[0];
    let scenario = cfg.scenario_for(choice)?;
    let hn = clt_hn_experiment(&scenario, &cfg.ns, cfg.replicates, cfg.seed)?;
    let threshold = match cfg.threshold {
        Some(t) => t,
        None => hn.theory.expect("CLT records carry theory values").m,
    };
    let ustat = clt_ustat_experiment(&scenario, threshold, &cfg.ns, cfg.replicates, cfg.seed.wrapping_add(1))?;
    let null = Scenario::new(ScenarioKind::MeanShift { mu: 0.0 }, cfg.alpha, 1)?;
    let ecdf = ecdf_convergence_check(&null, cfg.ecdf_n, &cfg.grid_t, cfg.ecdf_replicates, cfg.seed.wrapping_add(2))?;
    let gaps = gap_records(cfg, cfg.gap_replicates)?;

    let mut ecdf_table = Table::new("ecdf", &["t", "mean", "sd", "reference", "deviation", "within"]);
    for p in &ecdf.ecdf {
        ecdf_table.push(vec![p.t.into(), p.mean.into(), p.sd.into(), p.reference.into(), p.deviation.into(), p.within.into()]);
    }

    let mut summary = Table::new("summary", &["check", "value", "limit", "passed"]);
    let last = hn.per_n.last().expect("at least one sample size");
    let ratio = *hn.projection_ratios().last().expect("at least one sample size");
    summary.push(vec!["hn_variance_ratio".into(), ratio.into(), 0.15.into(), ((ratio - 1.0).abs() <= 0.15).into()]);
    summary.push(vec!["hn_skewness".into(), last.skewness.into(), 0.15.into(), (last.skewness.abs() < 0.15).into()]);
    summary.push(vec![
        "hn_excess_kurtosis".into(),
        last.excess_kurtosis.into(),
        0.3.into(),
        (last.excess_kurtosis.abs() < 0.3).into(),
    ]);
    if !ustat.degenerate {
        let r = *ustat.projection_ratios().last().expect("at least one sample size");
        summary.push(vec!["ustat_variance_ratio".into(), r.into(), 0.15.into(), ((r - 1.0).abs() <= 0.15).into()]);
    }
    let worst = ecdf
        .ecdf
        .iter()
        .map(|p| if p.sd > 0.0 { p.deviation / p.sd } else if p.deviation == 0.0 { 0.0 } else { f64::INFINITY })
        .fold(0.0, f64::max);
    summary.push(vec!["ecdf_max_deviation_sd".into(), worst.into(), 3.0.into(), ecdf.ecdf.iter().all(|p| p.within).into()]);
    for g in &gaps {
        summary.push(vec![
            format!("gap_lambda_{}", g.lambda).into(),
            g.frequency.into(),
            (g.probability_bound - 3.0 * g.standard_error).into(),
            g.passed.into(),
        ]);
    }
    let warnings = summary
        .rows
        .iter()
        .filter(|r| r[3] == Cell::Bool(false))
        .map(|r| format!("check {:?} failed", r[0]))
        .collect();
    Ok(Report {
        config: cfg.clone(),
        tables: vec![clt_table("hn", &hn), clt_table("ustat", &ustat), ecdf_table, gap_table(&gaps), summary],
        warnings,
    })
}

// --------------------------------------------------------------- bandwidth

/// Reads points from a CSV file with a header row; every column is a coordinate.
pub fn read_points(path: &std::path::Path) -> Result<(Vec<f64>, usize)> {
    let csv_err = |source| LabError::Csv { path: path.to_path_buf(), source };
    let mut reader = csv::ReaderBuilder::new().comment(Some(b'#')).from_path(path).map_err(csv_err)?;
    let dim = reader.headers().map_err(csv_err)?.len();
    let mut coords = Vec::new();
    for (line, rec) in reader.records().enumerate() {
        let rec = rec.map_err(csv_err)?;
        for field in rec.iter() {
            let v: f64 = field.trim().parse().map_err(|_| {
                LabError::config(format!("`input`: row {} has non-numeric value `{field}`", line + 1))
            })?;
            coords.push(v);
        }
    }
    if dim == 0 || coords.len() < 2 * dim {
        return Err(LabError::config("`input`: need at least two points"));
    }
    Ok((coords, dim))
}

pub fn bandwidth(cfg: &RunConfig) -> Result<Report> {
    let mut t = Table::new("bandwidth", &["source", "method", "n", "dim", "h_value", "nu"]);
    let mut push = |source: &str, method: &str, n: usize, dim: usize, h: f64, nu: f64| {
        t.push(vec![source.into(), method.into(), n.into(), dim.into(), h.into(), nu.into()]);
    };
    let convention = match cfg.nu_convention {
        NuConvention::HalfMedian => "median_heuristic",
        NuConvention::Median => "median_heuristic_sqrt",
    };
    if let Some(path) = &cfg.input {
        let (coords, dim) = read_points(path)?;
        let n = coords.len() / dim;
        let summary = medbw_core::PairwiseSummary::from_coords(&coords, dim)?;
        let b = median_heuristic_from_summary(&summary, cfg.nu_convention)?;
        push("input", convention, n, dim, b.h_value, b.nu);
    } else {
        let scenario = cfg.scenario_for(panels(cfg)?[0])?;
        let sample = draw_split_sample_stream(&scenario, cfg.n, cfg.seed, 0)?;
        let b = median_heuristic_from_summary(&pairwise_sq_distances(&sample), cfg.nu_convention)?;
        push("sample", convention, cfg.n, scenario.dim, b.h_value, b.nu);
        if scenario.dim == 1 {
            let target = TargetDistribution::new(scenario)?;
            let m = target.median()?;
            let row = bandwidth_row(&scenario, cfg.nu_convention)?;
            push("population", convention, 0, 1, m, row.nu_med);
            push("population", "power_quadratic", 0, 1, f64::NAN, nu_or_nan(row.quad));
            push("population", "power_linear", 0, 1, f64::NAN, nu_or_nan(row.lin));
        }
    }
    Ok(Report { config: cfg.clone(), tables: vec![t], warnings: Vec::new() })
}

/// Runs `cfg.command`.
pub fn run(cfg: &RunConfig) -> Result<Report> {
    match cfg.command {
        Command::Figure1 => figure1(cfg),
        Command::Figure2 => figure2(cfg),
        Command::Figure3 => figure3(cfg),
        Command::Figure4 | Command::Figure5 => figure4_5(cfg),
        Command::CltSuite => clt_suite(cfg),
        Command::GapCheck => gap_check(cfg),
        Command::Bandwidth => bandwidth(cfg),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn histogram_single_replicate_has_zero_spread() {
        let s = Scenario::mean_shift(5.0, 0.5).unwrap();
        let h = distance_histogram(&s, 40, 10, 1, 3).unwrap();
        assert!(h.sd_counts.iter().all(|&v| v == 0.0));
        assert_eq!(h.mean_counts.iter().sum::<f64>(), 780.0);
        assert_eq!(h.edges.len(), 11);
    }

    #[test]
    fn modes_and_gaps() {
        let h = Histogram {
            edges: (0..=6).map(f64::from).collect(),
            mean_counts: vec![5.0, 1.0, 0.0, 0.0, 2.0, 4.0],
            sd_counts: vec![0.0; 6],
            pairs: 12,
        };
        assert_eq!(h.modes(), vec![0, 5]);
        assert_eq!(h.empty_bins_between_modes(), 2);
        assert_eq!(h.left_cluster_mass(), Some(0.5));
    }

    #[test]
    fn null_row_has_zero_slopes() {
        let s = Scenario::mean_shift(0.0, 0.5).unwrap();
        let bw = bandwidth_row(&s, NuConvention::HalfMedian).unwrap();
        assert!(bw.quad.is_none() && bw.lin.is_none());
        let a = abs_row(&s, &bw, 20, 2, 1, 0).unwrap();
        assert_eq!(a.quad_med, ZERO_SLOPE);
        assert_eq!(a.lin_pow, ZERO_SLOPE);
    }

    #[test]
    fn fixed_panels() {
        let mut cfg = RunConfig::defaults(Command::Figure4);
        assert_eq!(panels(&cfg).unwrap(), vec![ScenarioChoice::Mean]);
        cfg.scenario = Some(ScenarioChoice::Var);
        assert_eq!(panels(&cfg).unwrap_err().exit_code(), 2);
    }
}
