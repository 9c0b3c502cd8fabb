//! Limit law of the pairwise squared distances.
//!
//! Under a split sample, a squared distance between two points is
//! distributed as `‖X-X'‖²`, `‖Y-Y'‖²` or `‖X-Y‖²` with limiting
//! proportions `α²`, `(1-α)²` and `2α(1-α)`. The mixture of those three
//! laws is the target `T`; its median is the limit of the empirical
//! median heuristic. Closed forms exist for the one-dimensional Gaussian
//! scenarios.

use alloc::format;
use core::f64::consts::PI;

use crate::error::{domain, Error, Result};
use crate::median::{BandwidthSelection, NuConvention};
use crate::optimize::{solve_increasing, RootOptions};
use crate::scenario::{Scenario, ScenarioKind};
use crate::special::{marcum_q, regularized_lower_gamma};

/// The three-component mixture `T` for a one-dimensional scenario.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TargetDistribution {
    scenario: Scenario,
}

/// Mixture weights `(w_XX, w_YY, w_XY)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MixtureWeights {
    pub within_p: f64,
    pub within_q: f64,
    pub cross: f64,
}

/// Largest admissible quantile error `|F_T(m_p) - p|`.
pub const QUANTILE_TOLERANCE: f64 = 1e-10;

impl TargetDistribution {
    pub fn new(scenario: Scenario) -> Result<Self> {
        scenario.require_scalar()?;
        Ok(TargetDistribution { scenario })
    }

    pub fn scenario(&self) -> &Scenario {
        &self.scenario
    }

    pub fn weights(&self) -> MixtureWeights {
        let a = self.scenario.alpha;
        MixtureWeights {
            within_p: a * a,
            within_q: (1.0 - a) * (1.0 - a),
            cross: 2.0 * a * (1.0 - a),
        }
    }

    /// `F_T(t)`; zero for `t <= 0`.
    pub fn cdf(&self, t: f64) -> f64 {
        if !(t > 0.0) {
            return 0.0;
        }
        if t.is_infinite() {
            return 1.0;
        }
        let w = self.weights();
        // P(1/2, x) = γ(1/2, x)/Γ(1/2); arguments are finite and positive.
        let chi1 = |x: f64| regularized_lower_gamma(0.5, x).expect("valid gamma arguments");
        match self.scenario.kind {
            ScenarioKind::MeanShift { mu } => {
                let b = libm::sqrt(0.5 * t);
                let q = marcum_q(0.5, mu.abs() / core::f64::consts::SQRT_2, b)
                    .expect("valid Marcum arguments");
                (w.within_p + w.within_q) * chi1(0.25 * t) + w.cross * (1.0 - q)
            }
            ScenarioKind::VarianceScale { sigma } => {
                let s2 = sigma * sigma;
                w.within_p * chi1(0.25 * t)
                    + w.within_q * chi1(t / (4.0 * s2))
                    + w.cross * chi1(t / (2.0 * (s2 + 1.0)))
            }
        }
    }

    /// Density `f_T(t)` for `t > 0`.
    pub fn pdf(&self, t: f64) -> Result<f64> {
        if !(t > 0.0) || !t.is_finite() {
            return Err(domain("t", t, "0 < t < inf"));
        }
        Ok(self.density(t))
    }

    fn density(&self, t: f64) -> f64 {
        let w = self.weights();
        let root_pi_t = libm::sqrt(PI * t);
        match self.scenario.kind {
            ScenarioKind::MeanShift { mu } => {
                // e^{-(μ²+t)/4} cosh(μ√t/2) = (e^{-(μ-√t)²/4} + e^{-(μ+√t)²/4}) / 2
                let r = libm::sqrt(t);
                let mu = mu.abs();
                let cross = 0.5
                    * (libm::exp(-0.25 * (mu - r) * (mu - r))
                        + libm::exp(-0.25 * (mu + r) * (mu + r)));
                ((w.within_p + w.within_q) * libm::exp(-0.25 * t) + w.cross * cross)
                    / (2.0 * root_pi_t)
            }
            ScenarioKind::VarianceScale { sigma } => {
                let s2 = sigma * sigma;
                w.within_p * libm::exp(-0.25 * t) / (2.0 * root_pi_t)
                    + w.within_q * libm::exp(-t / (4.0 * s2)) / (2.0 * sigma * root_pi_t)
                    + w.cross * libm::exp(-t / (2.0 * (s2 + 1.0)))
                        / libm::sqrt(2.0 * (s2 + 1.0) * PI * t)
            }
        }
    }

    fn initial_upper_bracket(&self) -> f64 {
        match self.scenario.kind {
            ScenarioKind::MeanShift { mu } => (2.0 * mu * mu + 16.0).max(4.0),
            ScenarioKind::VarianceScale { sigma } => (8.0 * sigma * sigma).max(4.0),
        }
    }

    /// Solves `F_T(t) = p` to `|F_T(t) - p| <= 1e-10`.
    pub fn quantile(&self, p: f64) -> Result<f64> {
        if !(p > 0.0 && p < 1.0) {
            return Err(domain("p", p, "0 < p < 1"));
        }
        let mut hi = self.initial_upper_bracket();
        let mut expansions = 0;
        while self.cdf(hi) < p {
            hi *= 2.0;
            expansions += 1;
            if expansions > 60 || !hi.is_finite() {
                return Err(Error::ConvergenceFailure(format!(
                    "could not bracket the {p}-quantile (F_T({hi}) < {p})"
                )));
            }
        }
        let t = solve_increasing(
            |t| self.cdf(t),
            |t| self.density(t),
            p,
            0.0,
            hi,
            RootOptions::default(),
        )?;
        let residual = (self.cdf(t) - p).abs();
        if residual > QUANTILE_TOLERANCE {
            return Err(Error::ConvergenceFailure(format!(
                "quantile residual {residual:e} exceeds {QUANTILE_TOLERANCE:e}"
            )));
        }
        Ok(t)
    }

    /// Population median `m` of `T`.
    pub fn median(&self) -> Result<f64> {
        self.quantile(0.5)
    }

    /// Limit of the median-heuristic bandwidth, `√(m/2)`.
    pub fn median_bandwidth_theoretical(&self) -> Result<BandwidthSelection> {
        self.median_bandwidth_with(NuConvention::HalfMedian)
    }

    pub fn median_bandwidth_with(&self, convention: NuConvention) -> Result<BandwidthSelection> {
        BandwidthSelection::from_median(self.median()?, convention)
    }
}

/// Outcome of the separation check for well-separated distributions.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GapBound {
    /// Lower bound `1 - 75/λ` on the probability of the gap event.
    pub probability_bound: f64,
    /// Gap `‖μ_X - μ_Y‖²/25` between intra- and inter-segment distances.
    pub gap: f64,
}

/// Guarantee that `max(T_XX, T_YY) + ‖μ_X-μ_Y‖²/25 < T_XY` holds with
/// probability at least `1 - 75/λ`, valid when
/// `‖μ_X-μ_Y‖² >= λ (tr Σ_X + tr Σ_Y)` and `λ > 75`.
pub fn gap_threshold(
    mu_x: &[f64],
    mu_y: &[f64],
    trace_x: f64,
    trace_y: f64,
    lambda: f64,
) -> Result<GapBound> {
    if mu_x.len() != mu_y.len() {
        return Err(Error::InvalidShape(format!(
            "mean vectors have lengths {} and {}",
            mu_x.len(),
            mu_y.len()
        )));
    }
    if !(trace_x >= 0.0 && trace_y >= 0.0) {
        return Err(Error::PreconditionViolation(format!(
            "covariance traces must be nonnegative ({trace_x}, {trace_y})"
        )));
    }
    if !(lambda > 75.0) {
        return Err(Error::PreconditionViolation(format!(
            "lambda must exceed 75, got {lambda}"
        )));
    }
    let separation: f64 = mu_x.iter().zip(mu_y).map(|(a, b)| (a - b) * (a - b)).sum();
    if separation < lambda * (trace_x + trace_y) {
        return Err(Error::PreconditionViolation(format!(
            "squared mean separation {separation} is below lambda * (tr Σ_X + tr Σ_Y) = {}",
            lambda * (trace_x + trace_y)
        )));
    }
    Ok(GapBound {
        probability_bound: 1.0 - 75.0 / lambda,
        gap: separation / 25.0,
    })
}
