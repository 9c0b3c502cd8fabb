//! Gaussian kernel and the quadratic- and linear-time MMD² estimators.

use alloc::format;

use crate::error::{domain, Error, Result};
use crate::median::sq_dist;
use crate::sampling::SplitSample;

/// `k(x, y) = exp(-‖x-y‖² / (2ν²))`.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct GaussianKernel {
    nu: f64,
}

impl GaussianKernel {
    pub fn new(nu: f64) -> Result<Self> {
        if !(nu > 0.0) || !nu.is_finite() {
            return Err(domain("nu", nu, "0 < nu < inf"));
        }
        Ok(GaussianKernel { nu })
    }

    pub fn nu(&self) -> f64 {
        self.nu
    }

    /// Kernel value from a squared distance.
    #[inline]
    pub fn from_sq_dist(&self, d2: f64) -> f64 {
        libm::exp(-d2 / (2.0 * self.nu * self.nu))
    }

    #[inline]
    pub fn eval(&self, x: &[f64], y: &[f64]) -> f64 {
        self.from_sq_dist(sq_dist(x, y))
    }
}

/// Sum of `k(a_i, a_j)` over `i < j`, rows in ascending order.
fn within_sum(coords: &[f64], dim: usize, kernel: &GaussianKernel) -> f64 {
    let n = coords.len() / dim;
    let mut acc = 0.0;
    for i in 0..n {
        let xi = &coords[i * dim..(i + 1) * dim];
        for j in i + 1..n {
            acc += kernel.eval(xi, &coords[j * dim..(j + 1) * dim]);
        }
    }
    acc
}

/// Sum of `k(a_i, b_j)` over all pairs, rows of `a` outermost.
fn cross_sum(a: &[f64], b: &[f64], dim: usize, kernel: &GaussianKernel) -> f64 {
    let mut acc = 0.0;
    for x in a.chunks_exact(dim) {
        for y in b.chunks_exact(dim) {
            acc += kernel.eval(x, y);
        }
    }
    acc
}

/// Unbiased quadratic-time estimate of MMD² between the two segments.
///
/// Within-segment averages run over ordered distinct pairs (twice the sum
/// over `i < j`), the cross average over all `M·N` pairs. The result can be
/// negative.
pub fn mmd_u_squared(sample: &SplitSample, kernel: &GaussianKernel) -> Result<f64> {
    let m = sample.boundary();
    let n = sample.len() - m;
    if m < 2 || n < 2 {
        return Err(Error::TooFewSamples {
            p_len: m,
            q_len: n,
            min: 2,
        });
    }
    let d = sample.dim();
    let (mf, nf) = (m as f64, n as f64);
    let xx = 2.0 * within_sum(sample.p_segment(), d, kernel) / (mf * (mf - 1.0));
    let yy = 2.0 * within_sum(sample.q_segment(), d, kernel) / (nf * (nf - 1.0));
    let xy = 2.0 * cross_sum(sample.p_segment(), sample.q_segment(), d, kernel) / (mf * nf);
    Ok(xx + yy - xy)
}

/// Linear-time MMD² estimate for equal, even segment sizes.
///
/// Averages `h = k(x₁,x₂) + k(y₁,y₂) - k(x₁,y₂) - k(x₂,y₁)` over the `M/2`
/// disjoint consecutive blocks.
pub fn mmd_lin_squared(sample: &SplitSample, kernel: &GaussianKernel) -> Result<f64> {
    let m = sample.boundary();
    let n = sample.len() - m;
    if m != n || !m.is_multiple_of(2) {
        return Err(Error::InvalidShape(format!(
            "linear-time statistic needs equal even segments, got {m} and {n}"
        )));
    }
    let d = sample.dim();
    let xs = sample.p_segment();
    let ys = sample.q_segment();
    let blocks = m / 2;
    let mut acc = 0.0;
    for b in 0..blocks {
        let x1 = &xs[2 * b * d..(2 * b + 1) * d];
        let x2 = &xs[(2 * b + 1) * d..(2 * b + 2) * d];
        let y1 = &ys[2 * b * d..(2 * b + 1) * d];
        let y2 = &ys[(2 * b + 1) * d..(2 * b + 2) * d];
        acc += kernel.eval(x1, x2) + kernel.eval(y1, y2) - kernel.eval(x1, y2) - kernel.eval(x2, y1);
    }
    Ok(acc / blocks as f64)
}
