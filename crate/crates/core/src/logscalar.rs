//! Sign plus natural-log magnitude, for constants far outside `f64` range.
//!
//! `α(6) = 6^{-10¹¹ ln 6}` has natural log ≈ −3.2×10¹¹; every threshold that
//! involves it is compared here rather than in linear space.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Div, Mul, Neg};

use serde::{Deserialize, Serialize};

/// Relative tolerance of [`LogScalar::count_meets`] and [`LogScalar::count_within`].
pub const COUNT_REL_TOL: f64 = 1e-11;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LogScalar {
    sign: i8,
    ln_mag: f64,
}

impl LogScalar {
    pub const ZERO: LogScalar = LogScalar { sign: 0, ln_mag: f64::NEG_INFINITY };
    pub const ONE: LogScalar = LogScalar { sign: 1, ln_mag: 0.0 };

    pub fn from_f64(x: f64) -> Self {
        assert!(!x.is_nan(), "LogScalar::from_f64(NaN)");
        if x == 0.0 {
            Self::ZERO
        } else {
            Self { sign: if x > 0.0 { 1 } else { -1 }, ln_mag: x.abs().ln() }
        }
    }

    /// Positive value `e^ln`.
    pub fn from_ln(ln: f64) -> Self {
        assert!(!ln.is_nan(), "LogScalar::from_ln(NaN)");
        if ln == f64::NEG_INFINITY {
            Self::ZERO
        } else {
            Self { sign: 1, ln_mag: ln }
        }
    }

    pub fn from_parts(sign: i8, ln_mag: f64) -> Self {
        match sign {
            0 => Self::ZERO,
            1 | -1 => {
                if ln_mag == f64::NEG_INFINITY {
                    Self::ZERO
                } else {
                    Self { sign, ln_mag }
                }
            }
            _ => panic!("sign must be -1, 0 or 1"),
        }
    }

    pub fn sign(&self) -> i8 {
        self.sign
    }

    /// Natural log of |x|; `-inf` for zero.
    pub fn ln_abs(&self) -> f64 {
        self.ln_mag
    }

    pub fn log10_abs(&self) -> f64 {
        self.ln_mag / std::f64::consts::LN_10
    }

    pub fn is_zero(&self) -> bool {
        self.sign == 0
    }

    pub fn is_positive(&self) -> bool {
        self.sign > 0
    }

    /// Nearest `f64`; saturates to 0 or ±inf outside the representable range.
    pub fn to_f64(&self) -> f64 {
        f64::from(self.sign) * self.ln_mag.exp()
    }

    pub fn abs(self) -> Self {
        Self::from_parts(self.sign.abs(), self.ln_mag)
    }

    pub fn recip(self) -> Self {
        assert!(self.sign != 0, "reciprocal of zero");
        Self { sign: self.sign, ln_mag: -self.ln_mag }
    }

    /// `x^p` for real `p`. Negative bases are allowed only for integral `p`.
    pub fn powf(self, p: f64) -> Self {
        if p == 0.0 {
            return Self::ONE;
        }
        match self.sign {
            0 => {
                assert!(p > 0.0, "0 raised to a negative power");
                Self::ZERO
            }
            1 => Self::from_ln(self.ln_mag * p),
            _ => {
                assert!(p.fract() == 0.0, "negative base with non-integral exponent");
                let sign = if (p as i64) % 2 == 0 { 1 } else { -1 };
                Self::from_parts(sign, self.ln_mag * p)
            }
        }
    }

    pub fn powi(self, p: i64) -> Self {
        self.powf(p as f64)
    }

    /// Signed addition via a stable log-sum-exp.
    pub fn add(self, other: Self) -> Self {
        if self.sign == 0 {
            return other;
        }
        if other.sign == 0 {
            return self;
        }
        let (big, small) = if self.ln_mag >= other.ln_mag { (self, other) } else { (other, self) };
        let t = (small.ln_mag - big.ln_mag).exp();
        if big.sign == small.sign {
            Self::from_parts(big.sign, big.ln_mag + t.ln_1p())
        } else if t == 1.0 {
            Self::ZERO
        } else {
            Self::from_parts(big.sign, big.ln_mag + (-t).ln_1p())
        }
    }

    pub fn sub(self, other: Self) -> Self {
        self.add(-other)
    }

    pub fn max(self, other: Self) -> Self {
        if self >= other {
            self
        } else {
            other
        }
    }

    pub fn min(self, other: Self) -> Self {
        if self <= other {
            self
        } else {
            other
        }
    }

    /// `count >= self`, with `count` an exact nonnegative integer.
    pub fn le_count(&self, count: usize) -> bool {
        LogScalar::from(count) >= *self
    }

    /// `count <= self`.
    pub fn ge_count(&self, count: usize) -> bool {
        LogScalar::from(count) <= *self
    }

    /// `count >= self` up to relative slack [`COUNT_REL_TOL`], so that a
    /// threshold rebuilt from logs of integers still admits equality.
    pub fn count_meets(&self, count: usize) -> bool {
        match self.sign {
            1 => count > 0 && (count as f64).ln() >= self.ln_mag - COUNT_REL_TOL,
            _ => true,
        }
    }

    /// `count <= self` up to relative slack [`COUNT_REL_TOL`].
    pub fn count_within(&self, count: usize) -> bool {
        match self.sign {
            1 => count == 0 || (count as f64).ln() <= self.ln_mag + COUNT_REL_TOL,
            _ => count == 0 && self.sign == 0,
        }
    }

    pub fn total_cmp(&self, other: &Self) -> Ordering {
        match self.sign.cmp(&other.sign) {
            Ordering::Equal => match self.sign {
                0 => Ordering::Equal,
                1 => self.ln_mag.total_cmp(&other.ln_mag),
                _ => other.ln_mag.total_cmp(&self.ln_mag),
            },
            o => o,
        }
    }
}

impl From<f64> for LogScalar {
    fn from(x: f64) -> Self {
        Self::from_f64(x)
    }
}

impl From<usize> for LogScalar {
    fn from(x: usize) -> Self {
        Self::from_f64(x as f64)
    }
}

impl PartialOrd for LogScalar {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.total_cmp(other))
    }
}

impl Mul for LogScalar {
    type Output = LogScalar;
    fn mul(self, rhs: Self) -> Self {
        if self.sign == 0 || rhs.sign == 0 {
            return Self::ZERO;
        }
        Self::from_parts(self.sign * rhs.sign, self.ln_mag + rhs.ln_mag)
    }
}

impl Div for LogScalar {
    type Output = LogScalar;
    fn div(self, rhs: Self) -> Self {
        self * rhs.recip()
    }
}

impl Neg for LogScalar {
    type Output = LogScalar;
    fn neg(self) -> Self {
        Self::from_parts(-self.sign, self.ln_mag)
    }
}

impl fmt::Display for LogScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.sign {
            0 => write!(f, "0"),
            s => {
                let l10 = self.log10_abs();
                if l10.abs() < 15.0 {
                    write!(f, "{}", self.to_f64())
                } else {
                    let e = l10.floor();
                    let m = 10f64.powf(l10 - e);
                    write!(f, "{}{:.6}e{}", if s < 0 { "-" } else { "" }, m, e)
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn extreme_magnitudes_compare() {
        let tiny = LogScalar::from_ln(-3.2e11);
        assert!(tiny > LogScalar::ZERO);
        assert!(tiny < LogScalar::from_f64(1e-300));
        assert_eq!(tiny.to_f64(), 0.0);
        assert!((-tiny) < LogScalar::ZERO);
        assert!(LogScalar::from_f64(-3.0) < LogScalar::from_f64(-2.0));
    }

    #[test]
    fn add_cancels_exactly() {
        let a = LogScalar::from_f64(2.5);
        assert!(a.sub(a).is_zero());
        let s = LogScalar::from_f64(2.0).add(LogScalar::from_f64(-5.0));
        assert!((s.to_f64() + 3.0).abs() < 1e-12);
    }

    #[test]
    fn powers() {
        let x = LogScalar::from_f64(-2.0);
        assert!((x.powi(3).to_f64() + 8.0).abs() < 1e-12);
        assert!((x.powi(2).to_f64() - 4.0).abs() < 1e-12);
        assert_eq!(LogScalar::from_f64(7.0).powf(0.0), LogScalar::ONE);
    }

    #[test]
    fn count_comparisons() {
        let t = LogScalar::from_f64(2.0);
        assert!(t.le_count(2));
        assert!(!t.le_count(1));
        assert!(t.ge_count(2));
        assert!(LogScalar::from_ln(-1e12).le_count(1));
        let three = LogScalar::from(1.5) * LogScalar::from(2.0);
        assert!(three.count_meets(3) && three.count_within(3));
        assert!(!three.count_meets(2) && !three.count_within(4));
        assert!(LogScalar::ZERO.count_within(0) && !LogScalar::ZERO.count_within(1));
        assert!(LogScalar::from_f64(-1.0).count_meets(0));
    }

    proptest! {
        #[test]
        fn mul_div_roundtrip(a in -1e6f64..1e6, b in 1e-6f64..1e6) {
            let (la, lb) = (LogScalar::from_f64(a), LogScalar::from_f64(b));
            let back = (la * lb) / lb;
            prop_assert_eq!(back.sign(), la.sign());
            if a != 0.0 {
                prop_assert!((back.ln_abs() - la.ln_abs()).abs() <= 1e-12 * (1.0 + la.ln_abs().abs()));
            }
        }

        #[test]
        fn add_commutes_and_matches_f64(a in -1e6f64..1e6, b in -1e6f64..1e6) {
            let (la, lb) = (LogScalar::from_f64(a), LogScalar::from_f64(b));
            let s1 = la.add(lb);
            let s2 = lb.add(la);
            prop_assert_eq!(s1, s2);
            prop_assert!((s1.to_f64() - (a + b)).abs() <= 1e-9 * (a.abs() + b.abs() + 1.0));
        }

        #[test]
        fn add_is_monotone(a in -1e3f64..1e3, b in -1e3f64..1e3, c in 0f64..1e3) {
            let (la, lb, lc) = (LogScalar::from_f64(a), LogScalar::from_f64(b), LogScalar::from_f64(c));
            prop_assert!(la.add(lb).add(lc) >= la.add(lb));
        }
    }
}
