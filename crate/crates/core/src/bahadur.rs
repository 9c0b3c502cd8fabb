//! Approximate Bahadur slopes of the quadratic- and linear-time tests.
//!
//! The quadratic-time slope needs the top eigenvalue `λ₁` of the centred
//! kernel integral operator, estimated as the largest eigenvalue of the
//! double-centred Gram matrix divided by the number of points.

use alloc::format;

use nalgebra::DMatrix;

use crate::error::{domain, Error, Result};
use crate::mmd::GaussianKernel;
use crate::power::StatisticKind;
use crate::sampling::draw_split_sample_stream;
use crate::scenario::Scenario;

/// Default number of points behind one `λ₁` estimate.
pub const LAMBDA1_SAMPLE_SIZE: usize = 1000;
/// Default number of independent `λ₁` estimates per setting.
pub const LAMBDA1_REPETITIONS: usize = 5;

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct AbsResult {
    pub slope: f64,
    pub statistic_kind: StatisticKind,
    /// Set for the quadratic statistic.
    pub lambda1: Option<f64>,
    /// Set for the linear statistic.
    pub sigma_lin_sq: Option<f64>,
}

/// Largest eigenvalue of `H K H` over `n`, where `H` is the centring matrix.
/// Returns 0 when the centred matrix vanishes.
pub fn centered_gram_top_eigenvalue(coords: &[f64], dim: usize, kernel: &GaussianKernel) -> Result<f64> {
    if dim == 0 || !coords.len().is_multiple_of(dim) || coords.len() < dim {
        return Err(Error::InvalidShape(format!(
            "{} coordinates do not form points of dimension {dim}",
            coords.len()
        )));
    }
    let n = coords.len() / dim;
    let point = |i: usize| &coords[i * dim..(i + 1) * dim];
    let mut gram = DMatrix::<f64>::zeros(n, n);
    for i in 0..n {
        gram[(i, i)] = 1.0;
        for j in i + 1..n {
            let k = kernel.eval(point(i), point(j));
            gram[(i, j)] = k;
            gram[(j, i)] = k;
        }
    }
    let nf = n as f64;
    let row_means: alloc::vec::Vec<f64> = (0..n).map(|i| gram.row(i).sum() / nf).collect();
    let grand = row_means.iter().sum::<f64>() / nf;
    for i in 0..n {
        for j in 0..n {
            gram[(i, j)] += grand - row_means[i] - row_means[j];
        }
    }
    let top = gram.symmetric_eigenvalues().max();
    if !top.is_finite() {
        return Err(Error::Numerical("eigenvalue solver returned a non-finite value".into()));
    }
    Ok((top / nf).max(0.0))
}

/// `λ̂₁` from `sample_size` points of the split sample, on stream 0 of `seed`.
pub fn estimate_lambda1(sample_size: usize, scenario: &Scenario, nu: f64, seed: u64) -> Result<f64> {
    estimate_lambda1_stream(sample_size, scenario, nu, seed, 0)
}

/// `λ̂₁` on an explicit random stream. The points are a split sample, so
/// the pool holds `floor(α n)` draws from `P` and the rest from `Q`.
pub fn estimate_lambda1_stream(
    sample_size: usize,
    scenario: &Scenario,
    nu: f64,
    seed: u64,
    stream: u64,
) -> Result<f64> {
    if sample_size < 10 {
        return Err(Error::InvalidArgument(format!(
            "lambda1 estimation needs at least 10 points, got {sample_size}"
        )));
    }
    let kernel = GaussianKernel::new(nu)?;
    let sample = draw_split_sample_stream(scenario, sample_size, seed, stream)?;
    let lambda = centered_gram_top_eigenvalue(sample.coords(), sample.dim(), &kernel)?;
    if !(lambda > 1e-14) {
        return Err(Error::DegenerateSample(
            "centred Gram matrix vanishes; lambda1 estimate is zero",
        ));
    }
    Ok(lambda)
}

/// Slope `MMD² / (4 λ₁)` of `n MMD_u²`.
pub fn abs_quadratic(mmd_sq: f64, lambda1: f64) -> Result<AbsResult> {
    if !(lambda1 > 0.0) || !lambda1.is_finite() {
        return Err(domain("lambda1", lambda1, "0 < lambda1 < inf"));
    }
    if !(mmd_sq >= 0.0) {
        return Err(domain("mmd_sq", mmd_sq, "mmd_sq >= 0"));
    }
    Ok(AbsResult {
        slope: mmd_sq / (4.0 * lambda1),
        statistic_kind: StatisticKind::Quadratic,
        lambda1: Some(lambda1),
        sigma_lin_sq: None,
    })
}

/// Slope `MMD⁴ / (8 σ_ℓ²)` of `√n linMMD²`.
pub fn abs_linear(mmd_sq: f64, sigma_lin_sq: f64) -> Result<AbsResult> {
    if !(sigma_lin_sq > 0.0) || !sigma_lin_sq.is_finite() {
        return Err(domain("sigma_lin_sq", sigma_lin_sq, "0 < sigma_lin_sq < inf"));
    }
    if !(mmd_sq >= 0.0) {
        return Err(domain("mmd_sq", mmd_sq, "mmd_sq >= 0"));
    }
    Ok(AbsResult {
        slope: mmd_sq * mmd_sq / (8.0 * sigma_lin_sq),
        statistic_kind: StatisticKind::Linear,
        lambda1: None,
        sigma_lin_sq: Some(sigma_lin_sq),
    })
}
