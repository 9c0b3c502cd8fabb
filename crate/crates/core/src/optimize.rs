//! One-dimensional search routines.

use alloc::format;

use crate::error::{Error, Result};

const INV_PHI: f64 = 0.618_033_988_749_894_9;

/// Golden-section search for a maximum of `f` on `[lo, hi]`.
///
/// Stops once the bracket is narrower than `rel_tol * |midpoint|`.
/// Returns `(argmax, max)`.
pub fn golden_section_max<F: FnMut(f64) -> f64>(
    mut f: F,
    mut lo: f64,
    mut hi: f64,
    rel_tol: f64,
) -> (f64, f64) {
    let mut x1 = hi - INV_PHI * (hi - lo);
    let mut x2 = lo + INV_PHI * (hi - lo);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    for _ in 0..500 {
        if (hi - lo) <= rel_tol * (0.5 * (lo + hi)).abs() {
            break;
        }
        if f1 >= f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - INV_PHI * (hi - lo);
            f1 = f(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + INV_PHI * (hi - lo);
            f2 = f(x2);
        }
    }
    if f1 >= f2 {
        (x1, f1)
    } else {
        (x2, f2)
    }
}

/// Settings for [`solve_increasing`].
#[derive(Debug, Clone, Copy)]
pub struct RootOptions {
    /// Bisect until the bracket is this narrow relative to its upper end.
    pub coarse_rel_width: f64,
    /// Accept `t` once `|f(t) - target| <= value_tol`.
    pub value_tol: f64,
    /// Switch to bisection when the derivative falls below this.
    pub min_slope: f64,
    pub max_iter: usize,
}

impl Default for RootOptions {
    fn default() -> Self {
        RootOptions {
            coarse_rel_width: 1e-3,
            value_tol: 1e-12,
            min_slope: 1e-12,
            max_iter: 1000,
        }
    }
}

/// Solves `f(t) = target` for a nondecreasing `f` on `[lo, hi]`, where
/// `f(lo) <= target <= f(hi)`: bisection down to a coarse bracket, then
/// Newton steps with `df`, falling back to bisection whenever the slope
/// vanishes or a step leaves the bracket.
pub fn solve_increasing<F, D>(
    f: F,
    df: D,
    target: f64,
    mut lo: f64,
    mut hi: f64,
    opts: RootOptions,
) -> Result<f64>
where
    F: Fn(f64) -> f64,
    D: Fn(f64) -> f64,
{
    let mut iter = 0;
    while hi - lo > opts.coarse_rel_width * hi {
        let mid = 0.5 * (lo + hi);
        if f(mid) < target {
            lo = mid;
        } else {
            hi = mid;
        }
        iter += 1;
        if iter > opts.max_iter {
            return Err(Error::ConvergenceFailure(format!(
                "bisection stalled in [{lo}, {hi}]"
            )));
        }
    }
    let mut t = 0.5 * (lo + hi);
    loop {
        let g = f(t) - target;
        if g.abs() <= opts.value_tol {
            return Ok(t);
        }
        if g < 0.0 {
            lo = t;
        } else {
            hi = t;
        }
        if hi - lo <= 4.0 * f64::EPSILON * hi.abs() {
            return Ok(t);
        }
        let slope = df(t);
        let newton = t - g / slope;
        t = if slope.is_finite() && slope >= opts.min_slope && newton > lo && newton < hi {
            newton
        } else {
            0.5 * (lo + hi)
        };
        iter += 1;
        if iter > opts.max_iter {
            return Err(Error::ConvergenceFailure(format!(
                "no root to tolerance {} after {} iterations (bracket [{lo}, {hi}])",
                opts.value_tol, opts.max_iter
            )));
        }
    }
}
