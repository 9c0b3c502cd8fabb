//! Double-double arithmetic.
//!
//! The closed-form power criteria are differences of O(1) terms whose
//! result can be as small as 1e-22 for wide kernels, so they are evaluated
//! with roughly 32 significant digits and rounded once at the end.

use core::ops::{Add, Div, Mul, Neg, Sub};

#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct Dd {
    hi: f64,
    lo: f64,
}

const LN2: Dd = Dd {
    hi: core::f64::consts::LN_2,
    lo: 2.319_046_813_846_299_6e-17,
};

#[inline]
fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    (s, (a - (s - bb)) + (b - bb))
}

#[inline]
fn quick_two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    (s, b - (s - a))
}

#[inline]
fn two_prod(a: f64, b: f64) -> (f64, f64) {
    let p = a * b;
    (p, libm::fma(a, b, -p))
}

impl Dd {
    pub(crate) const ZERO: Dd = Dd { hi: 0.0, lo: 0.0 };
    pub(crate) const ONE: Dd = Dd { hi: 1.0, lo: 0.0 };

    #[inline]
    pub(crate) const fn from_f64(x: f64) -> Self {
        Dd { hi: x, lo: 0.0 }
    }

    #[inline]
    pub(crate) fn to_f64(self) -> f64 {
        self.hi + self.lo
    }

    pub(crate) fn sqrt(self) -> Self {
        if self.hi <= 0.0 {
            return Dd::from_f64(libm::sqrt(self.hi));
        }
        // One Newton step from the f64 root doubles the precision.
        let x = libm::sqrt(self.hi);
        let (p, e) = two_prod(x, x);
        let diff = (self - Dd { hi: p, lo: e }).to_f64();
        let (hi, lo) = quick_two_sum(x, diff / (2.0 * x));
        Dd { hi, lo }
    }

    pub(crate) fn recip(self) -> Self {
        Dd::ONE / self
    }

    fn scale_pow2(self, k: i32) -> Self {
        Dd {
            hi: libm::scalbn(self.hi, k),
            lo: libm::scalbn(self.lo, k),
        }
    }

    pub(crate) fn exp(self) -> Self {
        if self.hi < -745.0 {
            return Dd::ZERO;
        }
        if self.hi > 709.0 {
            return Dd::from_f64(f64::INFINITY);
        }
        if self.hi == 0.0 && self.lo == 0.0 {
            return Dd::ONE;
        }
        let k = libm::round(self.hi / LN2.hi);
        let r = (self - LN2 * Dd::from_f64(k)).scale_pow2(-9);
        // expm1(r) by Taylor series; |r| < 7e-4 so 11 terms exceed dd precision.
        let mut term = r;
        let mut sum = r;
        for i in 2..=11 {
            term = term * r / Dd::from_f64(i as f64);
            sum = sum + term;
        }
        // (1 + s)^2 - 1 = s (2 + s), applied nine times undoes the 2^-9 scaling.
        for _ in 0..9 {
            sum = sum * (sum + Dd::from_f64(2.0));
        }
        (sum + Dd::ONE).scale_pow2(k as i32)
    }
}

impl From<f64> for Dd {
    fn from(x: f64) -> Self {
        Dd::from_f64(x)
    }
}

impl Add for Dd {
    type Output = Dd;
    #[inline]
    fn add(self, rhs: Dd) -> Dd {
        let (s, e) = two_sum(self.hi, rhs.hi);
        let (t, f) = two_sum(self.lo, rhs.lo);
        let (s, e) = quick_two_sum(s, e + t);
        let (hi, lo) = quick_two_sum(s, e + f);
        Dd { hi, lo }
    }
}

impl Neg for Dd {
    type Output = Dd;
    #[inline]
    fn neg(self) -> Dd {
        Dd {
            hi: -self.hi,
            lo: -self.lo,
        }
    }
}

impl Sub for Dd {
    type Output = Dd;
    #[inline]
    fn sub(self, rhs: Dd) -> Dd {
        self + (-rhs)
    }
}

impl Mul for Dd {
    type Output = Dd;
    #[inline]
    fn mul(self, rhs: Dd) -> Dd {
        let (p, e) = two_prod(self.hi, rhs.hi);
        let e = e + (self.hi * rhs.lo + self.lo * rhs.hi);
        let (hi, lo) = quick_two_sum(p, e);
        Dd { hi, lo }
    }
}

impl Div for Dd {
    type Output = Dd;
    fn div(self, rhs: Dd) -> Dd {
        let q1 = self.hi / rhs.hi;
        let r = self - rhs * Dd::from_f64(q1);
        let q2 = r.hi / rhs.hi;
        let r = r - rhs * Dd::from_f64(q2);
        let q3 = r.hi / rhs.hi;
        let (hi, lo) = quick_two_sum(q1, q2);
        Dd { hi, lo } + Dd::from_f64(q3)
    }
}

impl Mul<f64> for Dd {
    type Output = Dd;
    #[inline]
    fn mul(self, rhs: f64) -> Dd {
        self * Dd::from_f64(rhs)
    }
}

impl Add<f64> for Dd {
    type Output = Dd;
    #[inline]
    fn add(self, rhs: f64) -> Dd {
        self + Dd::from_f64(rhs)
    }
}
