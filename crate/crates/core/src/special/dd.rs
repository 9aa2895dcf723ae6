//! Double-double arithmetic (an unevaluated sum `hi + lo` of two doubles,
//! roughly 106 bits of significand).
//!
//! Only what the Mittag-Leffler series needs is provided: the four basic
//! operations, `exp`, `ln` and the reciprocal Gamma function.

use std::cmp::Ordering;
use std::ops::{Add, Div, Mul, Neg, Sub};

#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub(crate) struct Dd {
    pub hi: f64,
    pub lo: f64,
}

#[inline]
fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    let e = (a - (s - bb)) + (b - bb);
    (s, e)
}

#[inline]
fn quick_two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    (s, b - (s - a))
}

#[inline]
fn two_prod(a: f64, b: f64) -> (f64, f64) {
    let p = a * b;
    (p, a.mul_add(b, -p))
}

pub(crate) const LN2: Dd = Dd::new(std::f64::consts::LN_2, 2.3190468138462996e-17);
const HALF_LN_2PI: Dd = Dd::new(0.9189385332046728, -3.8782941580672414e-17);

/// `B_{2k} / (2k (2k - 1))`, k = 1..=20.
const STIRLING: [Dd; 20] = [
    Dd::new(0.08333333333333333, 4.625929269271485e-18),
    Dd::new(-0.002777777777777778, 1.0601087908747154e-19),
    Dd::new(0.0007936507936507937, 6.883823317368282e-22),
    Dd::new(-0.0005952380952380953, 5.36938218754726e-20),
    Dd::new(0.0008417508417508417, 3.6870174889237694e-20),
    Dd::new(-0.0019175269175269176, 1.0675702776872475e-19),
    Dd::new(0.00641025641025641, 2.2240044563805217e-19),
    Dd::new(-0.029550653594771242, 4.861760957508855e-19),
    Dd::new(0.17964437236883057, -6.401600482710946e-19),
    Dd::new(-1.3924322169059011, 1.5837056989230303e-17),
    Dd::new(13.402864044168393, -6.154114101993966e-16),
    Dd::new(-156.84828462600203, 9.391823141715389e-15),
    Dd::new(2193.1033333333335, -1.3339255626002948e-13),
    Dd::new(-36108.77125372499, 5.897583353514365e-13),
    Dd::new(691472.268851313, 2.5585296305158e-11),
    Dd::new(-15238221.539407415, -8.76774522490625e-10),
    Dd::new(382900751.39141417, -2.4082684757733585e-08),
    Dd::new(-10882266035.784391, 3.141830930219749e-07),
    Dd::new(347320283765.00226, -6.048528997747748e-06),
    Dd::new(-12369602142269.275, 0.0009363732896507286),
];

/// Below this argument the Stirling series is entered through upward recurrence.
const STIRLING_MIN_ARG: f64 = 24.0;

impl Dd {
    pub const ZERO: Dd = Dd { hi: 0.0, lo: 0.0 };
    pub const ONE: Dd = Dd { hi: 1.0, lo: 0.0 };

    pub const fn new(hi: f64, lo: f64) -> Self {
        Dd { hi, lo }
    }

    pub fn from_f64(x: f64) -> Self {
        Dd { hi: x, lo: 0.0 }
    }

    /// Exact product of two doubles.
    pub fn prod(a: f64, b: f64) -> Self {
        let (hi, lo) = two_prod(a, b);
        Dd { hi, lo }
    }

    pub fn to_f64(self) -> f64 {
        self.hi + self.lo
    }

    pub fn abs(self) -> Self {
        if self.hi < 0.0 {
            -self
        } else {
            self
        }
    }

    pub fn is_zero(self) -> bool {
        self.hi == 0.0
    }

    pub fn mul_f64(self, b: f64) -> Self {
        let (p, e) = two_prod(self.hi, b);
        let e = e + self.lo * b;
        let (hi, lo) = quick_two_sum(p, e);
        Dd { hi, lo }
    }

    pub fn add_f64(self, b: f64) -> Self {
        let (s, e) = two_sum(self.hi, b);
        let e = e + self.lo;
        let (hi, lo) = quick_two_sum(s, e);
        Dd { hi, lo }
    }

    pub fn recip(self) -> Self {
        Dd::ONE / self
    }

    /// Nearest integer to `self`, as a double-double.
    pub fn round(self) -> Self {
        let hi = self.hi.round();
        if hi == self.hi {
            let (hi, lo) = quick_two_sum(hi, self.lo.round());
            Dd { hi, lo }
        } else if (hi - self.hi).abs() == 0.5 && self.lo != 0.0 {
            // exact half in `hi`; `lo` decides the direction
            let r = if (self.lo > 0.0) == (hi > self.hi) {
                hi
            } else {
                self.hi.trunc()
            };
            Dd::from_f64(r)
        } else {
            Dd::from_f64(hi)
        }
    }

    pub fn exp(self) -> Self {
        if self.hi > 709.78 {
            return Dd::from_f64(f64::INFINITY);
        }
        if self.hi < -745.2 {
            return Dd::ZERO;
        }
        const SQUARINGS: i32 = 5;
        const TAYLOR_TERMS: usize = 16;
        let m = (self.hi / LN2.hi).round();
        let r = self - LN2.mul_f64(m);
        let r = r.mul_f64(1.0 / f64::from(1 << SQUARINGS));
        // exp(r) - 1 = r (1 + r/2 (1 + r/3 (1 + ...)))
        let mut acc = Dd::ONE;
        for k in (2..=TAYLOR_TERMS).rev() {
            acc = (acc * r / Dd::from_f64(k as f64)).add_f64(1.0);
        }
        let mut acc = acc * r;
        // (1 + e)^2 - 1 = e (2 + e) keeps the small quantity accurate
        for _ in 0..SQUARINGS {
            acc = acc * acc.add_f64(2.0);
        }
        let v = acc.add_f64(1.0);
        let scale = 2f64.powi(m as i32);
        Dd {
            hi: v.hi * scale,
            lo: v.lo * scale,
        }
    }

    pub fn ln(self) -> Self {
        debug_assert!(self.hi > 0.0);
        let y0 = Dd::from_f64(self.hi.ln());
        // one Newton step doubles the number of correct bits
        y0 + self * (-y0).exp() - Dd::ONE
    }
}

impl Neg for Dd {
    type Output = Dd;
    fn neg(self) -> Dd {
        Dd {
            hi: -self.hi,
            lo: -self.lo,
        }
    }
}

impl Add for Dd {
    type Output = Dd;
    fn add(self, b: Dd) -> Dd {
        let (s1, s2) = two_sum(self.hi, b.hi);
        let (t1, t2) = two_sum(self.lo, b.lo);
        let s2 = s2 + t1;
        let (s1, s2) = quick_two_sum(s1, s2);
        let s2 = s2 + t2;
        let (hi, lo) = quick_two_sum(s1, s2);
        Dd { hi, lo }
    }
}

impl Sub for Dd {
    type Output = Dd;
    fn sub(self, b: Dd) -> Dd {
        self + (-b)
    }
}

impl Mul for Dd {
    type Output = Dd;
    fn mul(self, b: Dd) -> Dd {
        let (p, e) = two_prod(self.hi, b.hi);
        let e = e + (self.hi * b.lo + self.lo * b.hi);
        let (hi, lo) = quick_two_sum(p, e);
        Dd { hi, lo }
    }
}

impl Div for Dd {
    type Output = Dd;
    fn div(self, b: Dd) -> Dd {
        let q1 = self.hi / b.hi;
        let r = self - b.mul_f64(q1);
        let q2 = r.hi / b.hi;
        let r = r - b.mul_f64(q2);
        let q3 = r.hi / b.hi;
        let (hi, lo) = quick_two_sum(q1, q2);
        Dd { hi, lo }.add_f64(q3)
    }
}

impl PartialOrd for Dd {
    fn partial_cmp(&self, other: &Dd) -> Option<Ordering> {
        match self.hi.partial_cmp(&other.hi) {
            Some(Ordering::Equal) => self.lo.partial_cmp(&other.lo),
            ord => ord,
        }
    }
}

/// `ln Γ(x)` for `x ≥ 24` by the Stirling series.
fn ln_gamma_large(x: Dd) -> Dd {
    let inv = x.recip();
    let inv2 = inv * inv;
    let mut series = Dd::ZERO;
    let mut p = inv;
    for c in STIRLING.iter() {
        series = series + *c * p;
        p = p * inv2;
    }
    (x.add_f64(-0.5)) * x.ln() - x + HALF_LN_2PI + series
}

/// Sign and natural log of `|1/Γ(x)|`; `None` when `x` is a pole of Γ
/// (so the reciprocal is exactly zero).
pub(crate) fn ln_gamma_recip(x: Dd) -> Option<(f64, Dd)> {
    if x.hi <= 0.0 && x.round() == x {
        return None;
    }
    // 1/Γ(x) = x (x+1) ... (x+m-1) / Γ(x+m)
    let mut shifted = x;
    let mut prod = Dd::ONE;
    let mut log_prod = Dd::ZERO;
    while shifted.hi < STIRLING_MIN_ARG {
        prod = prod * shifted;
        shifted = shifted.add_f64(1.0);
        if prod.hi.abs() > 1e250 || (prod.hi != 0.0 && prod.hi.abs() < 1e-250) {
            log_prod = log_prod + prod.abs().ln();
            prod = Dd::from_f64(prod.hi.signum());
        }
    }
    let sign = prod.hi.signum();
    let log_abs = log_prod + prod.abs().ln() - ln_gamma_large(shifted);
    Some((sign, log_abs))
}

/// `1/Γ(x)` in double-double precision; exactly zero at the poles of Γ.
#[cfg(test)]
pub(crate) fn gamma_recip_dd(x: Dd) -> Dd {
    match ln_gamma_recip(x) {
        None => Dd::ZERO,
        Some((sign, l)) => l.exp().mul_f64(sign),
    }
}
