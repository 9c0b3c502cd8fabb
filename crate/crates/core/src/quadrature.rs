//! Gauss–Hermite rules for expectations under a normal law.

use alloc::vec::Vec;

/// Nodes and weights for `E f(Z)`, `Z ~ N(0, 1)`; weights sum to 1.
#[derive(Debug, Clone)]
pub struct GaussHermite {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl GaussHermite {
    /// `n`-point rule, exact for polynomials of degree `2n - 1`.
    pub fn new(n: usize) -> Self {
        assert!(n >= 1, "need at least one node");
        // Physicists' rule by Newton iteration on normalized Hermite
        // polynomials, then rescaled to the standard normal.
        const PIM4: f64 = 0.751_125_544_464_942_5; // π^{-1/4}
        let nf = n as f64;
        let mut x = alloc::vec![0.0; n];
        let mut w = alloc::vec![0.0; n];
        let half = n.div_ceil(2);
        let mut z = 0.0_f64;
        for i in 0..half {
            z = match i {
                0 => libm::sqrt(2.0 * nf + 1.0) - 1.855_75 * libm::pow(2.0 * nf + 1.0, -0.166_67),
                1 => z - 1.14 * libm::pow(nf, 0.426) / z,
                2 => 1.86 * z - 0.86 * x[0],
                3 => 1.91 * z - 0.91 * x[1],
                _ => 2.0 * z - x[i - 2],
            };
            let mut pp = 0.0;
            for _ in 0..100 {
                let mut p1 = PIM4;
                let mut p2 = 0.0;
                for j in 1..=n {
                    let p3 = p2;
                    p2 = p1;
                    let jf = j as f64;
                    p1 = z * libm::sqrt(2.0 / jf) * p2 - libm::sqrt((jf - 1.0) / jf) * p3;
                }
                pp = libm::sqrt(2.0 * nf) * p2;
                let z1 = z;
                z = z1 - p1 / pp;
                if (z - z1).abs() <= 1e-15 * z.abs().max(1.0) {
                    break;
                }
            }
            x[i] = z;
            x[n - 1 - i] = -z;
            w[i] = 2.0 / (pp * pp);
            w[n - 1 - i] = w[i];
        }
        let inv_sqrt_pi = 1.0 / libm::sqrt(core::f64::consts::PI);
        GaussHermite {
            nodes: x.iter().map(|t| core::f64::consts::SQRT_2 * t).collect(),
            weights: w.iter().map(|v| v * inv_sqrt_pi).collect(),
        }
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// `E f(loc + scale Z)`.
    pub fn expectation<F: Fn(f64) -> f64>(&self, loc: f64, scale: f64, f: F) -> f64 {
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(z, w)| w * f(loc + scale * z))
            .sum()
    }

    /// `Var f(loc + scale Z)`, centred before squaring.
    pub fn variance<F: Fn(f64) -> f64>(&self, loc: f64, scale: f64, f: F) -> f64 {
        let values: Vec<f64> = self.nodes.iter().map(|z| f(loc + scale * z)).collect();
        let mean: f64 = values.iter().zip(&self.weights).map(|(v, w)| v * w).sum();
        values
            .iter()
            .zip(&self.weights)
            .map(|(v, w)| w * (v - mean) * (v - mean))
            .sum()
    }
}
