//! Asymptotic variance of indicator-kernel U-statistics under a split
//! sample.
//!
//! For `h(x, y) = 1{‖x-y‖² <= m}` put `g_P(x) = α P(‖x-X'‖² <= m) +
//! (1-α) P(‖x-Y‖² <= m)` and `g_Q(y) = α P(‖X-y‖² <= m) + (1-α)
//! P(‖y-Y'‖² <= m)`. [`IndicatorVariance`] carries `Var g_P(X)` and
//! `Var g_Q(Y)`; the projection variance of `√n (U_n - θ)` is
//! `4 (α Var g_P(X) + (1-α) Var g_Q(Y))`.

use crate::error::{domain, Result};
use crate::quadrature::GaussHermite;
use crate::sampling::{standard_normal, stream_rng};
use crate::scenario::{Scenario, ScenarioKind};
use crate::special::normal_cdf;

/// Number of Gauss–Hermite nodes used for the outer variances.
pub const HERMITE_NODES: usize = 96;

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct IndicatorVariance {
    /// `Var_X(α g₁(X) + (1-α) g₂(X))`.
    pub var_p: f64,
    /// `Var_Y(α g₃(Y) + (1-α) g₄(Y))`.
    pub var_q: f64,
    pub alpha: f64,
}

impl IndicatorVariance {
    /// Sum of the two segment variances.
    pub fn sigma_sq(&self) -> f64 {
        self.var_p + self.var_q
    }

    /// Variance of the Hájek projection of `√n (U_n - θ)`, weighting each
    /// segment by its share of the sample. Equals `2 σ²` at `α = 1/2`.
    pub fn projection_variance(&self) -> f64 {
        4.0 * (self.alpha * self.var_p + (1.0 - self.alpha) * self.var_q)
    }
}

/// `P(|x - W|² <= m)` for `W ~ N(loc, scale²)`.
fn ball_probability(x: f64, root_m: f64, loc: f64, scale: f64) -> f64 {
    normal_cdf((x + root_m - loc) / scale) - normal_cdf((x - root_m - loc) / scale)
}

/// Closed-form inner probabilities with Gauss–Hermite outer variances.
/// One-dimensional scenarios only.
pub fn indicator_variance(scenario: &Scenario, m: f64) -> Result<IndicatorVariance> {
    scenario.require_scalar()?;
    if !(m >= 0.0) || !m.is_finite() {
        return Err(domain("m", m, "0 <= m < inf"));
    }
    let alpha = scenario.alpha;
    if m == 0.0 {
        return Ok(IndicatorVariance {
            var_p: 0.0,
            var_q: 0.0,
            alpha,
        });
    }
    let root_m = libm::sqrt(m);
    let (q_loc, q_scale) = scenario.q_location_scale();
    let g = |x: f64| {
        alpha * ball_probability(x, root_m, 0.0, 1.0)
            + (1.0 - alpha) * ball_probability(x, root_m, q_loc, q_scale)
    };
    let gh = GaussHermite::new(HERMITE_NODES);
    Ok(IndicatorVariance {
        var_p: gh.variance(0.0, 1.0, g),
        var_q: gh.variance(q_loc, q_scale, g),
        alpha,
    })
}

/// `σ² = Var g_P(X) + Var g_Q(Y)` for a one-dimensional scenario.
pub fn sigma_sq_indicator(scenario: &Scenario, m: f64) -> Result<f64> {
    Ok(indicator_variance(scenario, m)?.sigma_sq())
}

/// Monte Carlo version for any dimension: `outer` draws per segment, each
/// inner probability estimated from `inner` fresh draws. The binomial
/// noise of the inner estimates is subtracted so the result is unbiased.
pub fn indicator_variance_monte_carlo(
    scenario: &Scenario,
    m: f64,
    outer: usize,
    inner: usize,
    seed: u64,
) -> Result<IndicatorVariance> {
    if !(m >= 0.0) || !m.is_finite() {
        return Err(domain("m", m, "0 <= m < inf"));
    }
    if outer < 2 || inner < 2 {
        return Err(crate::error::Error::InvalidArgument(alloc::format!(
            "need at least 2 outer and inner draws, got {outer} and {inner}"
        )));
    }
    let d = scenario.dim;
    let alpha = scenario.alpha;
    let mut rng = stream_rng(seed, 0);
    let mut point = alloc::vec![0.0; d];
    let mut other = alloc::vec![0.0; d];
    let draw = |rng: &mut rand_chacha::ChaCha12Rng, out: &mut [f64], from_q: bool| {
        for c in out.iter_mut() {
            let z = standard_normal(rng);
            *c = match (from_q, scenario.kind) {
                (false, _) => z,
                (true, ScenarioKind::MeanShift { mu }) => mu + z,
                (true, ScenarioKind::VarianceScale { sigma }) => sigma * z,
            };
        }
    };
    let kf = inner as f64;
    let mut segment_variance = |from_q: bool| {
        let mut values = alloc::vec::Vec::with_capacity(outer);
        let mut noise = 0.0;
        for _ in 0..outer {
            draw(&mut rng, &mut point, from_q);
            let mut hits = [0usize; 2];
            for (slot, partner_q) in [(0, false), (1, true)] {
                for _ in 0..inner {
                    draw(&mut rng, &mut other, partner_q);
                    if crate::median::sq_dist(&point, &other) <= m {
                        hits[slot] += 1;
                    }
                }
            }
            let gp = hits[0] as f64 / kf;
            let gq = hits[1] as f64 / kf;
            values.push(alpha * gp + (1.0 - alpha) * gq);
            noise += alpha * alpha * gp * (1.0 - gp) / (kf - 1.0)
                + (1.0 - alpha) * (1.0 - alpha) * gq * (1.0 - gq) / (kf - 1.0);
        }
        let of = outer as f64;
        let mean = values.iter().sum::<f64>() / of;
        let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (of - 1.0);
        (var - noise / of).max(0.0)
    };
    let var_p = segment_variance(false);
    let var_q = segment_variance(true);
    Ok(IndicatorVariance {
        var_p,
        var_q,
        alpha,
    })
}
