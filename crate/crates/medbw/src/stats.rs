//! Moment summaries and a normality distance for replicate sets.

use medbw_core::special::normal_cdf;
use serde::{Deserialize, Serialize};

/// Moments of a replicate set. `variance` uses the `n - 1` divisor;
/// skewness and excess kurtosis are the plain moment ratios.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Moments {
    pub mean: f64,
    pub variance: f64,
    pub skewness: f64,
    pub excess_kurtosis: f64,
}

pub fn moments(values: &[f64]) -> Moments {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let (mut m2, mut m3, mut m4) = (0.0, 0.0, 0.0);
    for v in values {
        let d = v - mean;
        let d2 = d * d;
        m2 += d2;
        m3 += d2 * d;
        m4 += d2 * d2;
    }
    m2 /= n;
    m3 /= n;
    m4 /= n;
    let (skewness, excess_kurtosis) = if m2 > 0.0 {
        (m3 / m2.powf(1.5), m4 / (m2 * m2) - 3.0)
    } else {
        (0.0, 0.0)
    };
    Moments {
        mean,
        variance: if values.len() > 1 { m2 * n / (n - 1.0) } else { 0.0 },
        skewness,
        excess_kurtosis,
    }
}

/// Mean and standard deviation (`n - 1` divisor; 0 for a single value).
pub fn mean_sd(values: &[f64]) -> (f64, f64) {
    let m = moments(values);
    (m.mean, m.variance.sqrt())
}

/// Largest gap between the empirical CDF of the standardized values and
/// the standard normal CDF.
pub fn normal_ks_distance(values: &[f64]) -> f64 {
    let m = moments(values);
    let sd = m.variance.sqrt();
    if !(sd > 0.0) {
        return 1.0;
    }
    let mut z: Vec<f64> = values.iter().map(|v| (v - m.mean) / sd).collect();
    z.sort_by(f64::total_cmp);
    let n = z.len() as f64;
    z.iter()
        .enumerate()
        .map(|(i, &x)| {
            let f = normal_cdf(x);
            (f - i as f64 / n).abs().max(((i + 1) as f64 / n - f).abs())
        })
        .fold(0.0, f64::max)
}
