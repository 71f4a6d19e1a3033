//! Extended-precision helpers for the alternating binomial sums.
//!
//! The outage and success-count laws are finite differences of the joint
//! success sequence, `sum_i C(n, i) (-1)^i suc(k + i)`. The terms grow like
//! `C(n, n/2)` while the result stays in `[0, 1]`, so plain `f64` loses up to
//! `log10(C(n, n/2))` digits. Terms are therefore produced and accumulated in
//! double-double arithmetic (about 106 significant bits) with an explicit
//! error bound that the callers compare against their accuracy target.

use std::cmp::Ordering;
use std::ops::{Add, Mul, Neg, Sub};

/// Unit roundoff of double-double arithmetic, with slack for the few
/// operations chained per term.
pub const DD_EPS: f64 = 4.0 * 4.930_380_657_631_324e-32; // 4 * 2^-104

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

/// An unevaluated sum `hi + lo` with `|lo| <= ulp(hi) / 2`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct DoubleDouble {
    pub hi: f64,
    pub lo: f64,
}

const LN2: DoubleDouble = DoubleDouble {
    hi: std::f64::consts::LN_2,
    lo: 2.319_046_813_846_299_6e-17,
};

impl DoubleDouble {
    pub const ZERO: Self = Self { hi: 0.0, lo: 0.0 };
    pub const ONE: Self = Self { hi: 1.0, lo: 0.0 };

    pub fn from_f64(x: f64) -> Self {
        Self { hi: x, lo: 0.0 }
    }

    /// Exact conversion of integers below 2^106.
    pub fn from_u128(x: u128) -> Self {
        let hi = x as f64;
        // hi is x rounded to 53 bits; the remainder fits in i128 exactly
        let rem = x as i128 - hi as i128;
        let (hi, lo) = quick_two_sum(hi, rem as f64);
        Self { hi, lo }
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

    pub fn is_finite(self) -> bool {
        self.hi.is_finite() && self.lo.is_finite()
    }

    pub fn mul_f64(self, b: f64) -> Self {
        let (p, e) = two_prod(self.hi, b);
        let e = e + self.lo * b;
        let (hi, lo) = quick_two_sum(p, e);
        Self { hi, lo }
    }

    pub fn div_f64(self, b: f64) -> Self {
        let q1 = self.hi / b;
        let r = self - DoubleDouble::from_f64(q1).mul_f64(b);
        let q2 = r.hi / b;
        let r = r - DoubleDouble::from_f64(q2).mul_f64(b);
        let q3 = r.hi / b;
        let (hi, lo) = quick_two_sum(q1, q2);
        DoubleDouble { hi, lo } + DoubleDouble::from_f64(q3)
    }

    pub fn div_dd(self, b: Self) -> Self {
        let q1 = self.hi / b.hi;
        let r = self - b.mul_f64(q1);
        let q2 = r.hi / b.hi;
        let r = r - b.mul_f64(q2);
        let q3 = r.hi / b.hi;
        let (hi, lo) = quick_two_sum(q1, q2);
        DoubleDouble { hi, lo } + DoubleDouble::from_f64(q3)
    }

    /// Multiplication by `2^k`, exact barring underflow.
    pub fn ldexp(self, k: i32) -> Self {
        // split the scale so that neither factor overflows on its own
        let half = k / 2;
        let f1 = 2f64.powi(half);
        let f2 = 2f64.powi(k - half);
        Self {
            hi: self.hi * f1 * f2,
            lo: self.lo * f1 * f2,
        }
    }

    /// `exp(x)` to roughly double-double accuracy.
    pub fn exp(self) -> Self {
        if self.hi > 709.0 {
            return Self::from_f64(f64::INFINITY);
        }
        if self.hi < -745.2 {
            return Self::ZERO;
        }
        if self.hi == 0.0 {
            return Self::ONE;
        }
        const SQUARINGS: i32 = 10;
        let k = (self.hi / LN2.hi).round();
        let r = (self - LN2.mul_f64(k)).ldexp(-SQUARINGS);

        // expm1(r) by Taylor series; |r| < 3.4e-4 so 12 terms are plenty
        let mut term = r;
        let mut sum = r;
        for i in 2..=12 {
            term = (term * r).div_f64(i as f64);
            sum = sum + term;
            if term.hi.abs() < 1e-36 {
                break;
            }
        }
        // (1 + s)^2 - 1 = 2s + s^2
        for _ in 0..SQUARINGS {
            sum = sum.mul_f64(2.0) + sum * sum;
        }
        (sum + Self::ONE).ldexp(k as i32)
    }
}

impl Add for DoubleDouble {
    type Output = Self;
    fn add(self, b: Self) -> Self {
        let (s, e) = two_sum(self.hi, b.hi);
        let (t, f) = two_sum(self.lo, b.lo);
        let (s, e) = quick_two_sum(s, e + t);
        let (hi, lo) = quick_two_sum(s, e + f);
        Self { hi, lo }
    }
}

impl Sub for DoubleDouble {
    type Output = Self;
    fn sub(self, b: Self) -> Self {
        self + (-b)
    }
}

impl Neg for DoubleDouble {
    type Output = Self;
    fn neg(self) -> Self {
        Self {
            hi: -self.hi,
            lo: -self.lo,
        }
    }
}

impl Mul for DoubleDouble {
    type Output = Self;
    fn mul(self, b: Self) -> Self {
        let (p, e) = two_prod(self.hi, b.hi);
        let e = e + (self.hi * b.lo + self.lo * b.hi);
        let (hi, lo) = quick_two_sum(p, e);
        Self { hi, lo }
    }
}

impl PartialOrd for DoubleDouble {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        match self.hi.partial_cmp(&other.hi) {
            Some(Ordering::Equal) => self.lo.partial_cmp(&other.lo),
            ord => ord,
        }
    }
}

/// Result of a compensated sum together with a bound on its absolute error.
#[derive(Debug, Clone, Copy)]
pub struct CompensatedValue {
    pub value: DoubleDouble,
    pub abs_error: f64,
}

impl CompensatedValue {
    pub fn rel_error(&self) -> f64 {
        let v = self.value.to_f64().abs();
        if v == 0.0 {
            if self.abs_error == 0.0 {
                0.0
            } else {
                f64::INFINITY
            }
        } else {
            self.abs_error / v
        }
    }
}

/// Sums signed double-double terms in order of descending magnitude.
///
/// `term_rel_error` is the relative error already carried by each term; the
/// returned bound is `sum |t_i| * (term_rel_error + m * DD_EPS)` for `m`
/// terms.
pub fn compensated_sum(mut terms: Vec<DoubleDouble>, term_rel_error: f64) -> CompensatedValue {
    terms.sort_by(|a, b| {
        b.abs()
            .partial_cmp(&a.abs())
            .unwrap_or(Ordering::Equal)
    });
    let mut acc = DoubleDouble::ZERO;
    let mut magnitude = 0.0;
    for t in &terms {
        acc = acc + *t;
        magnitude += t.abs().to_f64();
    }
    CompensatedValue {
        value: acc,
        abs_error: magnitude * (term_rel_error + terms.len() as f64 * DD_EPS),
    }
}

/// Kahan-Babuska-Neumaier running sum for plain `f64` series.
#[derive(Debug, Clone, Copy, Default)]
pub struct NeumaierSum {
    sum: f64,
    compensation: f64,
}

impl NeumaierSum {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.compensation += (self.sum - t) + x;
        } else {
            self.compensation += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.compensation
    }
}

impl Extend<f64> for NeumaierSum {
    fn extend<I: IntoIterator<Item = f64>>(&mut self, iter: I) {
        for x in iter {
            self.add(x);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exp_matches_libm_to_double_precision() {
        for &x in &[-700.0, -30.5, -1.0, -1e-3, 1e-9, 0.5, 1.0, 7.25, 300.0] {
            let got = DoubleDouble::from_f64(x).exp().to_f64();
            let want = x.exp();
            assert!(((got - want) / want).abs() < 4e-16, "x={x}: {got} vs {want}");
        }
        assert_eq!(DoubleDouble::from_f64(-800.0).exp().to_f64(), 0.0);
    }

    #[test]
    fn exp_is_extended_precision() {
        // exp(1) = 2.718281828459045 + 1.4456468917292502e-16
        let e = DoubleDouble::ONE.exp();
        assert_eq!(e.hi, std::f64::consts::E);
        assert!((e.lo - 1.445_646_891_729_250_2e-16).abs() < 1e-31);
        // exp(a) * exp(-a) = 1 to ~1e-30
        let a = DoubleDouble::from_f64(3.7).div_f64(3.0);
        let prod = a.exp() * (-a).exp();
        assert!((prod - DoubleDouble::ONE).to_f64().abs() < 1e-29);
    }

    #[test]
    fn division_and_u128() {
        let third = DoubleDouble::ONE.div_f64(3.0);
        let back = third.mul_f64(3.0) - DoubleDouble::ONE;
        assert!(back.to_f64().abs() < 1e-31);
        let big: u128 = (1 << 80) + 12345;
        let d = DoubleDouble::from_u128(big);
        assert_eq!(d.hi as u128 + d.lo as i128 as u128, big);
    }

    #[test]
    fn alternating_cancellation_is_recovered() {
        // sum_i C(40, i) (-1)^i = 0 exactly
        let terms: Vec<_> = (0..=40u32)
            .map(|i| {
                let c = DoubleDouble::from_u128(crate::special::binomial_exact(40, i).unwrap());
                if i % 2 == 0 {
                    c
                } else {
                    -c
                }
            })
            .collect();
        let r = compensated_sum(terms, 0.0);
        assert_eq!(r.value.to_f64(), 0.0);
        assert!(r.abs_error < 1e-15);
    }

    #[test]
    fn neumaier_beats_naive() {
        let mut s = NeumaierSum::new();
        s.extend([1.0, 1e100, 1.0, -1e100]);
        assert_eq!(s.value(), 2.0);
    }
}
