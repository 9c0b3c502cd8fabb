//! Closed-form population MMD², asymptotic variances and power ratios for
//! the one-dimensional Gaussian scenarios, and bandwidth maximization.
//!
//! With `z = (x, y)`, `x ~ P`, `y ~ Q` and
//! `h(z, z') = k(x,x') + k(y,y') - k(x,y') - k(x',y)`:
//!
//! * `MMD² = E h`
//! * `σ_ℓ² = 2 (E h² - (E h)²)` for the linear-time statistic
//! * `σ_u² = 4 (E_z (E_{z'} h)² - (E h)²)` for the quadratic-time statistic
//!
//! The power ratios are `R_ℓ = MMD²/σ_ℓ` and `R_u = MMD²/σ_u`.
//!
//! For wide kernels the second moments agree with `(E h)²` to twenty or
//! more digits, so every expression is evaluated in double-double and
//! rounded once.

use alloc::format;

use crate::dd::Dd;
use crate::error::{domain, Error, Result};
use crate::median::{BandwidthMethod, BandwidthSelection};
use crate::optimize::golden_section_max;
use crate::scenario::{Scenario, ScenarioKind};

/// Which MMD² estimator a criterion refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum StatisticKind {
    Quadratic,
    Linear,
}

/// Value of a power ratio criterion at one bandwidth.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct PowerCriterionValue {
    pub mmd_sq: f64,
    /// `σ_ℓ²` or `σ_u²`. Zero only for the quadratic statistic in a null scenario.
    pub variance: f64,
    pub ratio: f64,
    pub statistic_kind: StatisticKind,
}

/// The three moments every criterion is assembled from.
#[derive(Debug, Clone, Copy)]
struct Moments {
    mean_h: Dd,
    mean_h_sq: Dd,
    mean_cond_sq: Dd,
}

fn check_nu(nu: f64) -> Result<()> {
    if !(nu > 0.0) || !nu.is_finite() {
        return Err(domain("nu", nu, "0 < nu < inf"));
    }
    Ok(())
}

fn mean_shift_moments(mu: f64, nu: f64) -> Moments {
    let nu_dd = Dd::from(nu);
    let n2 = nu_dd * nu_dd;
    let mu2 = Dd::from(mu) * Dd::from(mu);
    let two = Dd::from(2.0);
    let n2p1 = n2 + 1.0;
    let n2p2 = n2 + 2.0;
    let n2p3 = n2 + 3.0;
    let n2p4 = n2 + 4.0;
    let root13 = (n2p1 * n2p3).sqrt();
    let e = |x: Dd| (-x).exp();

    let mean_h = two * nu_dd / n2p2.sqrt() * (Dd::ONE - e(mu2 / (two * n2p2)));

    let shared = e(n2p2 * mu2 / (two * n2p1 * n2p3));
    let mean_h_sq = two * nu_dd / n2p4.sqrt() * (Dd::ONE + e(mu2 / n2p4))
        + two * n2 / n2p2 * (Dd::ONE + e(mu2 / n2p2))
        - Dd::from(8.0) * n2 / root13 * shared;

    let mean_cond_sq = two * n2 / root13 * (Dd::ONE + e(mu2 / n2p3))
        + two * n2 / n2p2 * (Dd::ONE + e(mu2 / n2p2))
        - Dd::from(4.0) * n2 / root13 * shared
        - Dd::from(4.0) * n2 / n2p2 * e(mu2 / (two * n2p2));

    Moments {
        mean_h,
        mean_h_sq,
        mean_cond_sq,
    }
}

fn variance_scale_moments(sigma: f64, nu: f64) -> Moments {
    let nu_dd = Dd::from(nu);
    let n2 = nu_dd * nu_dd;
    let s2 = Dd::from(sigma) * Dd::from(sigma);
    let two = Dd::from(2.0);
    let four = Dd::from(4.0);
    let inv_sqrt = |x: Dd| x.sqrt().recip();

    // Recurring radicands.
    let a = n2 + 2.0; // ν²+2
    let b = n2 + two * s2; // ν²+2σ²
    let c = n2 + s2 + 1.0; // ν²+σ²+1
    let mixed_p = (n2 + 1.0) * (n2 + s2) + two * n2 + s2 + 1.0;
    let mixed_q = (n2 + 1.0) * (n2 + s2) + s2 * (two * n2 + s2 + 1.0);

    let mean_h = nu_dd * (inv_sqrt(a) + inv_sqrt(b) - two * inv_sqrt(c));

    let mean_h_sq = nu_dd * inv_sqrt(n2 + 4.0)
        + nu_dd * inv_sqrt(n2 + four * s2)
        + two * nu_dd * inv_sqrt(n2 + two * s2 + 2.0)
        + two * n2 * inv_sqrt(a * b)
        - four * n2 * inv_sqrt(mixed_p)
        - four * n2 * inv_sqrt(mixed_q)
        + two * n2 / c;

    let braces = inv_sqrt((n2 + 1.0) * (n2 + 3.0))
        + inv_sqrt((n2 + s2) * (n2 + Dd::from(3.0) * s2))
        + inv_sqrt((n2 + s2) * (n2 + s2 + 2.0))
        + inv_sqrt((n2 + 1.0) * (n2 + two * s2 + 1.0))
        + two * inv_sqrt(b * a)
        - two * inv_sqrt(mixed_p)
        - two * inv_sqrt(a * c)
        - two * inv_sqrt(c * b)
        - two * inv_sqrt(mixed_q)
        + two / c;
    let mean_cond_sq = n2 * braces;

    Moments {
        mean_h,
        mean_h_sq,
        mean_cond_sq,
    }
}

fn moments(scenario: &Scenario, nu: f64) -> Result<Moments> {
    scenario.require_scalar()?;
    check_nu(nu)?;
    Ok(match scenario.kind {
        ScenarioKind::MeanShift { mu } => mean_shift_moments(mu, nu),
        ScenarioKind::VarianceScale { sigma } => variance_scale_moments(sigma, nu),
    })
}

/// Population MMD² between `P` and `Q` under a Gaussian kernel of bandwidth `nu`.
pub fn population_mmd_sq(scenario: &Scenario, nu: f64) -> Result<f64> {
    Ok(moments(scenario, nu)?.mean_h.to_f64().max(0.0))
}

/// `E h(z,z')²`.
pub fn expected_h_sq(scenario: &Scenario, nu: f64) -> Result<f64> {
    Ok(moments(scenario, nu)?.mean_h_sq.to_f64())
}

/// `E_z (E_{z'} h(z,z'))²`.
pub fn expected_conditional_h_sq(scenario: &Scenario, nu: f64) -> Result<f64> {
    Ok(moments(scenario, nu)?.mean_cond_sq.to_f64())
}

/// Asymptotic variance `σ_ℓ²` of the linear-time statistic.
pub fn sigma_lin_sq(scenario: &Scenario, nu: f64) -> Result<f64> {
    let m = moments(scenario, nu)?;
    let v = (Dd::from(2.0) * (m.mean_h_sq - m.mean_h * m.mean_h)).to_f64();
    if !(v > 0.0) {
        return Err(Error::Numerical(format!(
            "sigma_lin_sq = {v:e} is not positive at nu = {nu}"
        )));
    }
    Ok(v)
}

/// Asymptotic variance `σ_u²` of the quadratic-time statistic.
///
/// Identically zero in a null scenario, where `E_{z'} h` vanishes.
pub fn sigma_u_sq(scenario: &Scenario, nu: f64) -> Result<f64> {
    let m = moments(scenario, nu)?;
    if scenario.is_null() {
        return Ok(0.0);
    }
    let v = (Dd::from(4.0) * (m.mean_cond_sq - m.mean_h * m.mean_h)).to_f64();
    if !(v > 0.0) {
        return Err(Error::Numerical(format!(
            "sigma_u_sq = {v:e} is not positive at nu = {nu}"
        )));
    }
    Ok(v)
}

/// Power ratio `MMD² / σ` for the chosen statistic. Null scenarios give 0.
pub fn power_ratio(scenario: &Scenario, nu: f64, kind: StatisticKind) -> Result<PowerCriterionValue> {
    let mmd_sq = population_mmd_sq(scenario, nu)?;
    let variance = match kind {
        StatisticKind::Quadratic => sigma_u_sq(scenario, nu)?,
        StatisticKind::Linear => sigma_lin_sq(scenario, nu)?,
    };
    let ratio = if scenario.is_null() || mmd_sq == 0.0 {
        0.0
    } else {
        mmd_sq / libm::sqrt(variance)
    };
    Ok(PowerCriterionValue {
        mmd_sq,
        variance,
        ratio,
        statistic_kind: kind,
    })
}

/// Grid and refinement settings for [`maximize_power_ratio_with`].
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct BandwidthSearch {
    pub nu_min: f64,
    pub nu_max: f64,
    /// Number of logarithmically spaced grid points.
    pub grid_points: usize,
    /// Relative bracket width at which golden-section refinement stops.
    pub rel_tol: f64,
}

impl Default for BandwidthSearch {
    fn default() -> Self {
        BandwidthSearch {
            nu_min: 1e-3,
            nu_max: 1e3,
            grid_points: 200,
            rel_tol: 1e-6,
        }
    }
}

impl BandwidthSearch {
    pub fn grid(&self) -> impl Iterator<Item = f64> + '_ {
        let (lo, hi) = (libm::log(self.nu_min), libm::log(self.nu_max));
        let step = (hi - lo) / (self.grid_points - 1) as f64;
        (0..self.grid_points).map(move |i| libm::exp(lo + step * i as f64))
    }
}

/// Ratios below this are treated as numerically flat.
pub const FLAT_CRITERION: f64 = 1e-10;

/// Result of maximizing a power ratio over the bandwidth.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct PowerOptimum {
    pub selection: BandwidthSelection,
    pub ratio: f64,
    /// The maximal ratio is below [`FLAT_CRITERION`]; the maximizer is not meaningful.
    pub flat: bool,
}

/// Maximizes `R_u` or `R_ℓ` over `ν ∈ [1e-3, 1e3]`.
pub fn maximize_power_ratio(scenario: &Scenario, kind: StatisticKind) -> Result<PowerOptimum> {
    maximize_power_ratio_with(scenario, kind, &BandwidthSearch::default())
}

/// Grid scan followed by golden-section refinement inside the two grid
/// cells around the best grid point.
pub fn maximize_power_ratio_with(
    scenario: &Scenario,
    kind: StatisticKind,
    search: &BandwidthSearch,
) -> Result<PowerOptimum> {
    scenario.require_scalar()?;
    if scenario.is_null() {
        return Err(Error::NullScenario(
            "the power ratio is identically zero when P = Q",
        ));
    }
    if search.grid_points < 3 || !(search.nu_min > 0.0 && search.nu_min < search.nu_max) {
        return Err(Error::InvalidArgument(format!(
            "bad bandwidth search {search:?}"
        )));
    }
    let criterion = |nu: f64| {
        power_ratio(scenario, nu, kind)
            .map(|v| v.ratio)
            .unwrap_or(f64::NEG_INFINITY)
    };
    let grid: alloc::vec::Vec<f64> = search.grid().collect();
    let mut best = 0;
    let mut best_val = f64::NEG_INFINITY;
    for (i, &nu) in grid.iter().enumerate() {
        let v = criterion(nu);
        if v > best_val {
            best = i;
            best_val = v;
        }
    }
    if !best_val.is_finite() {
        return Err(Error::Numerical(
            "power ratio could not be evaluated anywhere on the grid".into(),
        ));
    }
    let lo = grid[best.saturating_sub(1)];
    let hi = grid[(best + 1).min(grid.len() - 1)];
    let (nu, ratio) = golden_section_max(criterion, lo, hi, search.rel_tol);
    let (nu, ratio) = if ratio >= best_val {
        (nu, ratio)
    } else {
        (grid[best], best_val)
    };
    Ok(PowerOptimum {
        selection: BandwidthSelection {
            nu,
            method: match kind {
                StatisticKind::Quadratic => BandwidthMethod::PowerQuad,
                StatisticKind::Linear => BandwidthMethod::PowerLin,
            },
            h_value: 0.0,
        },
        ratio,
        flat: ratio < FLAT_CRITERION,
    })
}
