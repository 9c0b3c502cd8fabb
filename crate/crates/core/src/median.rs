//! Pairwise squared distances, their empirical CDF and quantiles, and the
//! median-heuristic bandwidth.

use alloc::{format, vec::Vec};

use crate::error::{domain, Error, Result};
use crate::sampling::SplitSample;

/// Sorted squared Euclidean distances over all unordered pairs of a sample.
#[derive(Debug, Clone, PartialEq)]
pub struct PairwiseSummary {
    sq_dists: Vec<f64>,
    n: usize,
}

/// Squared Euclidean distance.
#[inline]
pub fn sq_dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

impl PairwiseSummary {
    /// Builds the summary from row-major coordinates.
    pub fn from_coords(coords: &[f64], dim: usize) -> Result<Self> {
        if dim == 0 || !coords.len().is_multiple_of(dim) {
            return Err(Error::InvalidShape(format!(
                "{} coordinates do not split into points of dimension {dim}",
                coords.len()
            )));
        }
        let n = coords.len() / dim;
        if n < 2 {
            return Err(Error::InvalidShape(format!("need at least 2 points, got {n}")));
        }
        let mut sq_dists = Vec::with_capacity(n * (n - 1) / 2);
        for i in 0..n {
            let xi = &coords[i * dim..(i + 1) * dim];
            for j in i + 1..n {
                sq_dists.push(sq_dist(xi, &coords[j * dim..(j + 1) * dim]));
            }
        }
        sq_dists.sort_unstable_by(f64::total_cmp);
        Ok(PairwiseSummary { sq_dists, n })
    }

    pub fn from_sample(sample: &SplitSample) -> Self {
        // A SplitSample always has n >= 2 and a valid shape.
        Self::from_coords(sample.coords(), sample.dim()).expect("split samples are well formed")
    }

    /// Ascending squared distances.
    pub fn sq_dists(&self) -> &[f64] {
        &self.sq_dists
    }

    /// Sample size the distances came from.
    pub fn n(&self) -> usize {
        self.n
    }

    /// Number of pairs, `n(n-1)/2`.
    pub fn len(&self) -> usize {
        self.sq_dists.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sq_dists.is_empty()
    }

    /// Fraction of squared distances `<= t`.
    pub fn empirical_cdf(&self, t: f64) -> f64 {
        let count = self.sq_dists.partition_point(|&d| d <= t);
        count as f64 / self.len() as f64
    }

    /// Generalized inverse `inf { t : F̂(t) >= p }`, except at `p = 1/2`
    /// where an even number of pairs takes the mean of the two central
    /// order statistics.
    pub fn empirical_quantile(&self, p: f64) -> Result<f64> {
        if !(p > 0.0 && p < 1.0) {
            return Err(domain("p", p, "0 < p < 1"));
        }
        let len = self.len();
        if p == 0.5 {
            return Ok(if len.is_multiple_of(2) {
                0.5 * (self.sq_dists[len / 2 - 1] + self.sq_dists[len / 2])
            } else {
                self.sq_dists[len / 2]
            });
        }
        Ok(self.sq_dists[lower_order_index(len, p)])
    }

    /// Plain generalized inverse with no midpoint rule at the median.
    pub fn generalized_inverse(&self, p: f64) -> Result<f64> {
        if !(p > 0.0 && p < 1.0) {
            return Err(domain("p", p, "0 < p < 1"));
        }
        Ok(self.sq_dists[lower_order_index(self.len(), p)])
    }
}

/// Zero-based index of the smallest order statistic whose empirical CDF
/// reaches `p`, using the same `count / len >= p` comparison as the CDF.
fn lower_order_index(len: usize, p: f64) -> usize {
    let lenf = len as f64;
    let mut k = (libm::ceil(p * lenf) as usize).clamp(1, len);
    while k > 1 && (k - 1) as f64 / lenf >= p {
        k -= 1;
    }
    while k < len && (k as f64 / lenf) < p {
        k += 1;
    }
    k - 1
}

/// `H_n` by selection instead of a full sort; equals
/// `PairwiseSummary::from_coords(coords, dim)?.empirical_quantile(0.5)`.
pub fn median_sq_dist(coords: &[f64], dim: usize) -> Result<f64> {
    if dim == 0 || !coords.len().is_multiple_of(dim) || coords.len() < 2 * dim {
        return Err(Error::InvalidShape(format!(
            "{} coordinates do not form at least 2 points of dimension {dim}",
            coords.len()
        )));
    }
    let n = coords.len() / dim;
    let mut d = Vec::with_capacity(n * (n - 1) / 2);
    for i in 0..n {
        let xi = &coords[i * dim..(i + 1) * dim];
        for j in i + 1..n {
            d.push(sq_dist(xi, &coords[j * dim..(j + 1) * dim]));
        }
    }
    let len = d.len();
    let (below, &mut upper, _) = d.select_nth_unstable_by(len / 2, f64::total_cmp);
    if len.is_multiple_of(2) {
        let lower = below.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        Ok(0.5 * (lower + upper))
    } else {
        Ok(upper)
    }
}

/// Sorted pairwise squared distances of a split sample.
pub fn pairwise_sq_distances(sample: &SplitSample) -> PairwiseSummary {
    PairwiseSummary::from_sample(sample)
}

/// How a bandwidth is derived from the squared-distance median `H`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum NuConvention {
    /// `ν = √(H/2)`, which makes `exp(-d²/(2ν²)) = exp(-d²/H)`.
    #[default]
    HalfMedian,
    /// `ν = √H`.
    Median,
}

impl NuConvention {
    pub fn bandwidth(self, h: f64) -> f64 {
        match self {
            NuConvention::HalfMedian => libm::sqrt(0.5 * h),
            NuConvention::Median => libm::sqrt(h),
        }
    }
}

/// How a bandwidth was chosen.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum BandwidthMethod {
    MedianHeuristic(NuConvention),
    /// Maximizer of the quadratic-time power ratio.
    PowerQuad,
    /// Maximizer of the linear-time power ratio.
    PowerLin,
}

/// A selected Gaussian-kernel bandwidth.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct BandwidthSelection {
    pub nu: f64,
    pub method: BandwidthMethod,
    /// The squared-distance quantile the bandwidth came from (median
    /// heuristic only; 0 otherwise).
    pub h_value: f64,
}

impl BandwidthSelection {
    /// Median-heuristic selection from a squared-distance median `h`.
    pub fn from_median(h: f64, convention: NuConvention) -> Result<Self> {
        if !(h > 0.0) || !h.is_finite() {
            return Err(Error::DegenerateSample(
                "median squared distance is zero; bandwidth would be zero",
            ));
        }
        Ok(BandwidthSelection {
            nu: convention.bandwidth(h),
            method: BandwidthMethod::MedianHeuristic(convention),
            h_value: h,
        })
    }
}

/// `ν = √(H_n/2)` with `H_n` the sample median of the pairwise squared distances.
pub fn median_heuristic_bandwidth(sample: &SplitSample) -> Result<BandwidthSelection> {
    median_heuristic_from_summary(&pairwise_sq_distances(sample), NuConvention::HalfMedian)
}

pub fn median_heuristic_from_summary(
    summary: &PairwiseSummary,
    convention: NuConvention,
) -> Result<BandwidthSelection> {
    BandwidthSelection::from_median(summary.empirical_quantile(0.5)?, convention)
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn summary_1d(points: &[f64]) -> PairwiseSummary {
        PairwiseSummary::from_coords(points, 1).unwrap()
    }

    #[test]
    fn enumerates_pairs() {
        assert_eq!(summary_1d(&[0.0, 3.0]).sq_dists(), &[9.0]);
        assert_eq!(summary_1d(&[0.0, 1.0, 2.0]).sq_dists(), &[1.0, 1.0, 4.0]);
        assert_eq!(
            summary_1d(&[0.0, 1.0, 2.0, 3.0]).sq_dists(),
            &[1.0, 1.0, 1.0, 4.0, 4.0, 9.0]
        );
        assert!(PairwiseSummary::from_coords(&[1.0], 1).is_err());
        assert!(PairwiseSummary::from_coords(&[1.0, 2.0, 3.0], 2).is_err());
    }

    #[test]
    fn cdf_steps() {
        let s = summary_1d(&[0.0, 1.0, 2.0]);
        assert_eq!(s.empirical_cdf(0.5), 0.0);
        assert_eq!(s.empirical_cdf(1.0), 2.0 / 3.0);
        assert_eq!(s.empirical_cdf(100.0), 1.0);
    }

    #[test]
    fn quantiles() {
        let s = summary_1d(&[0.0, 1.0, 2.0]);
        assert_eq!(s.empirical_quantile(0.5).unwrap(), 1.0);
        assert_eq!(s.empirical_quantile(0.9).unwrap(), 4.0);
        assert_eq!(s.empirical_quantile(2.0 / 3.0).unwrap(), 1.0);
        assert!(s.empirical_quantile(0.0).is_err());
        assert!(s.empirical_quantile(1.0).is_err());
        let even = summary_1d(&[0.0, 1.0, 2.0, 3.0]);
        assert_eq!(even.empirical_quantile(0.5).unwrap(), 2.5);
        assert_eq!(even.generalized_inverse(0.5).unwrap(), 1.0);
    }

    #[test]
    fn bandwidths() {
        let two = SplitSample::from_coords(vec![0.0, 3.0], 1, 1).unwrap();
        let b = median_heuristic_bandwidth(&two).unwrap();
        assert_eq!(b.h_value, 9.0);
        assert!((b.nu - libm::sqrt(4.5)).abs() < 1e-15);
        assert_eq!(b.method, BandwidthMethod::MedianHeuristic(NuConvention::HalfMedian));

        let three = SplitSample::from_coords(vec![0.0, 1.0, 2.0], 1, 1).unwrap();
        let b = median_heuristic_bandwidth(&three).unwrap();
        assert_eq!(b.h_value, 1.0);
        assert!((b.nu - libm::sqrt(0.5)).abs() < 1e-15);

        let b = median_heuristic_from_summary(&pairwise_sq_distances(&three), NuConvention::Median)
            .unwrap();
        assert_eq!(b.nu, 1.0);
    }

    #[test]
    fn selection_median_matches_sorted() {
        for pts in [&[0.0, 3.0][..], &[0.0, 1.0, 2.0], &[0.0, 1.0, 2.0, 3.0], &[5.0, -1.0, 0.5, 2.0, 7.0]] {
            assert_eq!(
                median_sq_dist(pts, 1).unwrap(),
                summary_1d(pts).empirical_quantile(0.5).unwrap()
            );
        }
        assert!(median_sq_dist(&[1.0], 1).is_err());
    }

    #[test]
    fn degenerate_sample_is_rejected() {
        let same = SplitSample::from_coords(vec![2.0; 6], 2, 1).unwrap();
        assert!(matches!(
            median_heuristic_bandwidth(&same),
            Err(Error::DegenerateSample(_))
        ));
    }
}
