//! Reference computations that avoid the library's own numerical routes.
//! Shared by the core integration tests and the acceptance suite.

#![allow(dead_code)]

use medbw_core::quadrature::GaussHermite;
use medbw_core::{Scenario, ScenarioKind, SplitSample};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

fn simpson_step<F: Fn(f64) -> f64>(
    f: &F,
    (a, b): (f64, f64),
    (fa, fm, fb): (f64, f64, f64),
    whole: f64,
    tol: f64,
    depth: u32,
) -> f64 {
    let m = 0.5 * (a + b);
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let flm = f(lm);
    let frm = f(rm);
    let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    let diff = left + right - whole;
    if depth == 0 || diff.abs() <= 15.0 * tol {
        return left + right + diff / 15.0;
    }
    simpson_step(f, (a, m), (fa, flm, fm), left, 0.5 * tol, depth - 1)
        + simpson_step(f, (m, b), (fm, frm, fb), right, 0.5 * tol, depth - 1)
}

/// Interval, endpoint and midpoint values, Simpson estimate.
type Panel = ((f64, f64), (f64, f64, f64), f64);

/// Adaptive Simpson quadrature with Richardson correction, to relative
/// accuracy `rel` of the integral.
pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, rel: f64) -> f64 {
    // Split first so narrow peaks are not missed by the initial samples.
    let pieces = 256;
    let h = (b - a) / pieces as f64;
    let panels: Vec<Panel> = (0..pieces)
        .map(|i| {
            let lo = a + h * i as f64;
            let hi = if i + 1 == pieces { b } else { lo + h };
            let (fa, fm, fb) = (f(lo), f(0.5 * (lo + hi)), f(hi));
            ((lo, hi), (fa, fm, fb), (hi - lo) / 6.0 * (fa + 4.0 * fm + fb))
        })
        .collect();
    let rough: f64 = panels.iter().map(|p| p.2.abs()).sum();
    let tol = rel * rough / pieces as f64;
    panels
        .into_iter()
        .map(|(ends, values, whole)| simpson_step(&f, ends, values, whole, tol, 40))
        .sum()
}

/// `γ(a, x)` by quadrature; for `a < 1` the substitution `t = u^{1/a}`
/// removes the endpoint singularity.
pub fn lower_gamma_quadrature(a: f64, x: f64) -> f64 {
    if x == 0.0 {
        return 0.0;
    }
    if a < 1.0 {
        integrate(|u| (-u.powf(1.0 / a)).exp() / a, 0.0, x.powf(a), 1e-13)
    } else {
        integrate(|t| t.powf(a - 1.0) * (-t).exp(), 0.0, x, 1e-13)
    }
}

/// `Γ(z)` for `z > 0` from the Lanczos approximation (g = 7, n = 9).
pub fn gamma_lanczos(z: f64) -> f64 {
    const G: f64 = 7.0;
    const C: [f64; 9] = [
        0.999_999_999_999_809_9,
        676.520_368_121_885_1,
        -1_259.139_216_722_402_8,
        771.323_428_777_653_1,
        -176.615_029_162_140_6,
        12.507_343_278_686_905,
        -0.138_571_095_265_720_12,
        9.984_369_578_019_572e-6,
        1.505_632_735_149_311_6e-7,
    ];
    if z < 0.5 {
        return std::f64::consts::PI / ((std::f64::consts::PI * z).sin() * gamma_lanczos(1.0 - z));
    }
    let z = z - 1.0;
    let mut x = C[0];
    for (i, c) in C.iter().enumerate().skip(1) {
        x += c / (z + i as f64);
    }
    let t = z + G + 0.5;
    (2.0 * std::f64::consts::PI).sqrt() * t.powf(z + 0.5) * (-t).exp() * x
}

/// `I_ν(x)` from its power series, summed until terms stop mattering.
pub fn bessel_i_series(order: f64, x: f64) -> f64 {
    let q = 0.25 * x * x;
    let mut term = (0.5 * x).powf(order) / gamma_lanczos(order + 1.0);
    let mut sum = term;
    let mut k = 0.0;
    loop {
        k += 1.0;
        term *= q / (k * (k + order));
        sum += term;
        if term.abs() <= 1e-18 * sum.abs() && k > q.sqrt() {
            return sum;
        }
    }
}

/// `Q_M(a, b)` by quadrature of its defining integral. Pass a tiny `a`
/// for the `a → 0` limit.
pub fn marcum_q_quadrature(m: f64, a: f64, b: f64) -> f64 {
    let integrand = |x: f64| {
        if x == 0.0 {
            return 0.0;
        }
        x * (x / a).powf(m - 1.0) * (-(x * x + a * a) / 2.0).exp() * bessel_i_series(m - 1.0, a * x)
    };
    let upper = b.max(a) + 40.0;
    integrate(integrand, b, upper, 1e-13)
}

/// `inf { t : F(t) >= p }` over the enumerated pairwise squared distances,
/// with the midpoint rule at `p = 1/2` for an even pair count.
pub fn brute_force_quantile(coords: &[f64], dim: usize, p: f64) -> f64 {
    let n = coords.len() / dim;
    let mut d = Vec::new();
    for i in 0..n {
        for j in 0..n {
            if i < j {
                let mut s = 0.0;
                for c in 0..dim {
                    let diff = coords[i * dim + c] - coords[j * dim + c];
                    s += diff * diff;
                }
                d.push(s);
            }
        }
    }
    d.sort_by(f64::total_cmp);
    let len = d.len();
    if p == 0.5 {
        return if len % 2 == 0 {
            0.5 * (d[len / 2 - 1] + d[len / 2])
        } else {
            d[len / 2]
        };
    }
    for &t in &d {
        let count = d.iter().filter(|&&v| v <= t).count();
        if count as f64 / len as f64 >= p {
            return t;
        }
    }
    unreachable!("the largest distance always reaches p < 1")
}

fn naive_kernel(a: &[f64], b: &[f64], nu: f64) -> f64 {
    let mut s = 0.0;
    for c in 0..a.len() {
        s += (a[c] - b[c]) * (a[c] - b[c]);
    }
    // Same elementary exp as the library, so only the summation is under test.
    libm::exp(-s / (2.0 * nu * nu))
}

/// Three-term MMD_u² written as explicit loops in ascending index order.
pub fn naive_mmd_u(sample: &SplitSample, nu: f64) -> f64 {
    let m = sample.boundary();
    let n = sample.len() - m;
    let x = |i: usize| sample.point(i);
    let y = |j: usize| sample.point(m + j);
    let mut xx = 0.0;
    for i in 0..m {
        for j in 0..m {
            if i < j {
                xx += naive_kernel(x(i), x(j), nu);
            }
        }
    }
    let mut yy = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i < j {
                yy += naive_kernel(y(i), y(j), nu);
            }
        }
    }
    let mut xy = 0.0;
    for i in 0..m {
        for j in 0..n {
            xy += naive_kernel(x(i), y(j), nu);
        }
    }
    let (mf, nf) = (m as f64, n as f64);
    2.0 * xx / (mf * (mf - 1.0)) + 2.0 * yy / (nf * (nf - 1.0)) - 2.0 * xy / (mf * nf)
}

/// Estimate with its Monte Carlo standard error.
#[derive(Debug, Clone, Copy)]
pub struct Estimate {
    pub value: f64,
    pub se: f64,
}

impl Estimate {
    pub fn agrees(&self, x: f64, k: f64) -> bool {
        (self.value - x).abs() <= k * self.se
    }
}

fn mean_and_variance(values: &[f64]) -> (Estimate, Estimate) {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let m2 = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n;
    let m4 = values.iter().map(|v| (v - mean).powi(4)).sum::<f64>() / n;
    let var = m2 * n / (n - 1.0);
    (
        Estimate {
            value: mean,
            se: (var / n).sqrt(),
        },
        Estimate {
            value: var,
            se: ((m4 - m2 * m2) / n).max(0.0).sqrt(),
        },
    )
}

fn draw_q(kind: ScenarioKind, z: f64) -> f64 {
    match kind {
        ScenarioKind::MeanShift { mu } => mu + z,
        ScenarioKind::VarianceScale { sigma } => sigma * z,
    }
}

/// Monte Carlo `E h` and `2 Var h` from `draws` independent `(z, z')` pairs.
pub fn mc_linear_moments(scenario: &Scenario, nu: f64, draws: usize, seed: u64) -> (Estimate, Estimate) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut normal = || -> f64 { StandardNormal.sample(&mut rng) };
    let mut hs = Vec::with_capacity(draws);
    for _ in 0..draws {
        let x1 = normal();
        let x2 = normal();
        let y1 = draw_q(scenario.kind, normal());
        let y2 = draw_q(scenario.kind, normal());
        let k = |a: f64, b: f64| (-(a - b) * (a - b) / (2.0 * nu * nu)).exp();
        hs.push(k(x1, x2) + k(y1, y2) - k(x1, y2) - k(x2, y1));
    }
    let (mean, var) = mean_and_variance(&hs);
    (
        mean,
        Estimate {
            value: 2.0 * var.value,
            se: 2.0 * var.se,
        },
    )
}

/// Monte Carlo `4 Var_z E_{z'} h(z, z')` with the inner expectation done
/// by Gauss–Hermite quadrature.
pub fn mc_sigma_u_sq(scenario: &Scenario, nu: f64, outer: usize, seed: u64) -> Estimate {
    let gh = GaussHermite::new(60);
    let (q_loc, q_scale) = scenario.q_location_scale();
    let k = |a: f64, b: f64| (-(a - b) * (a - b) / (2.0 * nu * nu)).exp();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut values = Vec::with_capacity(outer);
    for _ in 0..outer {
        let x: f64 = StandardNormal.sample(&mut rng);
        let z: f64 = StandardNormal.sample(&mut rng);
        let y = draw_q(scenario.kind, z);
        let g = gh.expectation(0.0, 1.0, |xp| k(x, xp))
            + gh.expectation(q_loc, q_scale, |yp| k(y, yp))
            - gh.expectation(q_loc, q_scale, |yp| k(x, yp))
            - gh.expectation(0.0, 1.0, |xp| k(xp, y));
        values.push(g);
    }
    let (_, var) = mean_and_variance(&values);
    Estimate {
        value: 4.0 * var.value,
        se: 4.0 * var.se,
    }
}

/// Largest eigenvalue of a symmetric 3×3 matrix by the trigonometric
/// solution of the characteristic cubic.
pub fn symmetric_3x3_top_eigenvalue(a: [[f64; 3]; 3]) -> f64 {
    let p1 = a[0][1].powi(2) + a[0][2].powi(2) + a[1][2].powi(2);
    let q = (a[0][0] + a[1][1] + a[2][2]) / 3.0;
    let p2 = (a[0][0] - q).powi(2) + (a[1][1] - q).powi(2) + (a[2][2] - q).powi(2) + 2.0 * p1;
    let p = (p2 / 6.0).sqrt();
    if p == 0.0 {
        return q;
    }
    let mut b = [[0.0; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            b[i][j] = (a[i][j] - if i == j { q } else { 0.0 }) / p;
        }
    }
    let det = b[0][0] * (b[1][1] * b[2][2] - b[1][2] * b[2][1])
        - b[0][1] * (b[1][0] * b[2][2] - b[1][2] * b[2][0])
        + b[0][2] * (b[1][0] * b[2][1] - b[1][1] * b[2][0]);
    let r = (det / 2.0).clamp(-1.0, 1.0);
    q + 2.0 * p * (r.acos() / 3.0).cos()
}

/// Smallest `t` with `erf(√(t/2)) >= p`, i.e. the χ²₁ quantile, by bisection.
pub fn chi_sq_1_quantile(p: f64) -> f64 {
    let (mut lo, mut hi) = (0.0_f64, 100.0_f64);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if libm::erf((mid / 2.0).sqrt()) < p {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}
