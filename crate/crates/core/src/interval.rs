//! Closed real intervals and the handful of interval operations needed to
//! extend a kriging predictor: sum, scaling, integer power, absolute value,
//! power of the absolute value and the (monotone) exponential.
//!
//! Endpoints are plain `f64` with round-to-nearest; no outward rounding is
//! applied. Callers that need bit-level enclosure of a point evaluation must
//! evaluate the point expression with the same operation order as the
//! interval expression (every operation here is monotone in its endpoints,
//! so this is enough for IEEE-754 arithmetic).

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::IntervalError;

/// A closed interval `[lo, hi]` with finite endpoints and `lo <= hi`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "(f64, f64)", into = "(f64, f64)")]
pub struct Interval {
    lo: f64,
    hi: f64,
}

impl TryFrom<(f64, f64)> for Interval {
    type Error = IntervalError;

    fn try_from((lo, hi): (f64, f64)) -> Result<Self, Self::Error> {
        Interval::new(lo, hi)
    }
}

impl From<Interval> for (f64, f64) {
    fn from(x: Interval) -> Self {
        (x.lo, x.hi)
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {}]", self.lo, self.hi)
    }
}

impl Interval {
    pub fn new(lo: f64, hi: f64) -> Result<Self, IntervalError> {
        if !lo.is_finite() || !hi.is_finite() {
            return Err(IntervalError::NonFinite { lo, hi });
        }
        if lo > hi {
            return Err(IntervalError::Unordered { lo, hi });
        }
        Ok(Interval { lo, hi })
    }

    /// The degenerate interval `[v, v]`.
    pub fn point(v: f64) -> Result<Self, IntervalError> {
        Interval::new(v, v)
    }

    /// Builds an interval from two endpoints in either order.
    pub fn hull(a: f64, b: f64) -> Result<Self, IntervalError> {
        Interval::new(a.min(b), a.max(b))
    }

    #[inline]
    pub fn lo(&self) -> f64 {
        self.lo
    }

    #[inline]
    pub fn hi(&self) -> f64 {
        self.hi
    }

    #[inline]
    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }

    #[inline]
    pub fn midpoint(&self) -> f64 {
        0.5 * (self.lo + self.hi)
    }

    #[inline]
    pub fn is_degenerate(&self) -> bool {
        self.lo == self.hi
    }

    #[inline]
    pub fn contains(&self, v: f64) -> bool {
        self.lo <= v && v <= self.hi
    }

    /// `true` when `self ⊆ other`.
    #[inline]
    pub fn is_subset_of(&self, other: &Interval) -> bool {
        other.lo <= self.lo && self.hi <= other.hi
    }

    /// Endpoint sum `[a.lo + b.lo, a.hi + b.hi]`.
    #[allow(clippy::should_implement_trait)]
    pub fn add(self, other: Interval) -> Result<Interval, IntervalError> {
        Interval::new(self.lo + other.lo, self.hi + other.hi)
    }

    /// Multiplication by a crisp scalar; endpoints swap for `c < 0`.
    pub fn scale(self, c: f64) -> Result<Interval, IntervalError> {
        if c >= 0.0 {
            Interval::new(self.lo * c, self.hi * c)
        } else {
            Interval::new(self.hi * c, self.lo * c)
        }
    }

    /// `c - x` for a crisp `c`: `[c - hi, c - lo]`.
    pub fn sub_from(self, c: f64) -> Result<Interval, IntervalError> {
        Interval::new(c - self.hi, c - self.lo)
    }

    /// Integer power. Odd powers and strictly positive intervals map
    /// endpoint-wise; even powers of negative intervals swap; even powers
    /// of zero-straddling intervals start at zero.
    pub fn pow(self, alpha: u32) -> Result<Interval, IntervalError> {
        if alpha == 0 {
            return Err(IntervalError::NonPositiveExponent(0.0));
        }
        let e = alpha as i32;
        let (lo_p, hi_p) = (self.lo.powi(e), self.hi.powi(e));
        if self.lo > 0.0 || alpha % 2 == 1 {
            Interval::new(lo_p, hi_p)
        } else if self.hi < 0.0 {
            Interval::new(hi_p, lo_p)
        } else {
            Interval::new(0.0, lo_p.max(hi_p))
        }
    }

    /// Image of `|x|` over the interval.
    pub fn abs(self) -> Interval {
        if self.lo > 0.0 {
            self
        } else if self.hi < 0.0 {
            Interval { lo: -self.hi, hi: -self.lo }
        } else {
            Interval { lo: 0.0, hi: (-self.lo).max(self.hi) }
        }
    }

    /// `|x|^alpha` for real `alpha > 0`. The result is always inside `[0, ∞)`.
    pub fn pow_abs(self, alpha: f64) -> Result<Interval, IntervalError> {
        if !(alpha > 0.0) || !alpha.is_finite() {
            return Err(IntervalError::NonPositiveExponent(alpha));
        }
        if self.lo > 0.0 {
            Interval::new(self.lo.powf(alpha), self.hi.powf(alpha))
        } else if self.hi < 0.0 {
            Interval::new((-self.hi).powf(alpha), (-self.lo).powf(alpha))
        } else {
            Interval::new(0.0, (-self.lo).powf(alpha).max(self.hi.powf(alpha)))
        }
    }

    /// Monotone extension of `exp`.
    pub fn exp(self) -> Result<Interval, IntervalError> {
        Interval::new(self.lo.exp(), self.hi.exp())
    }

    /// Smallest interval containing both operands.
    pub fn union(self, other: Interval) -> Interval {
        Interval { lo: self.lo.min(other.lo), hi: self.hi.max(other.hi) }
    }

    /// Raises the lower endpoint to `floor` when it falls below it.
    pub(crate) fn clamp_lo(self, floor: f64) -> Interval {
        Interval { lo: self.lo.max(floor).min(self.hi), hi: self.hi }
    }
}

/// An ordered box of `N` parameter intervals.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct IntervalVector(Vec<Interval>);

impl IntervalVector {
    pub fn new(entries: Vec<Interval>) -> Self {
        IntervalVector(entries)
    }

    /// Degenerate box at a crisp point.
    pub fn from_point(p: &[f64]) -> Result<Self, IntervalError> {
        p.iter().map(|&v| Interval::point(v)).collect::<Result<Vec<_>, _>>().map(IntervalVector)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[Interval] {
        &self.0
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Interval> {
        self.0.iter()
    }

    pub fn contains(&self, p: &[f64]) -> bool {
        p.len() == self.0.len() && self.0.iter().zip(p).all(|(x, &v)| x.contains(v))
    }

    pub fn is_degenerate(&self) -> bool {
        self.0.iter().all(Interval::is_degenerate)
    }

    pub fn is_subset_of(&self, other: &IntervalVector) -> bool {
        self.len() == other.len() && self.iter().zip(other.iter()).all(|(a, b)| a.is_subset_of(b))
    }

    pub fn midpoint(&self) -> Vec<f64> {
        self.0.iter().map(Interval::midpoint).collect()
    }
}

impl std::ops::Index<usize> for IntervalVector {
    type Output = Interval;

    fn index(&self, i: usize) -> &Interval {
        &self.0[i]
    }
}

impl<'a> IntoIterator for &'a IntervalVector {
    type Item = &'a Interval;
    type IntoIter = std::slice::Iter<'a, Interval>;

    fn into_iter(self) -> Self::IntoIter {
        self.0.iter()
    }
}

impl FromIterator<Interval> for IntervalVector {
    fn from_iter<I: IntoIterator<Item = Interval>>(iter: I) -> Self {
        IntervalVector(iter.into_iter().collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn iv(lo: f64, hi: f64) -> Interval {
        Interval::new(lo, hi).unwrap()
    }

    /// Dense-grid image of a unary map over `x`, the reference for the
    /// derived examples below.
    fn grid_image(x: Interval, f: impl Fn(f64) -> f64) -> (f64, f64) {
        let n = 300_001;
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for i in 0..n {
            let v = x.lo() + x.width() * i as f64 / (n - 1) as f64;
            let y = f(v);
            lo = lo.min(y);
            hi = hi.max(y);
        }
        (lo, hi)
    }

    #[test]
    fn construction_rejects_bad_endpoints() {
        assert!(matches!(Interval::new(2.0, 1.0), Err(IntervalError::Unordered { .. })));
        assert!(matches!(Interval::new(f64::NAN, 1.0), Err(IntervalError::NonFinite { .. })));
        assert!(matches!(Interval::new(0.0, f64::INFINITY), Err(IntervalError::NonFinite { .. })));
        assert!(Interval::point(3.0).unwrap().is_degenerate());
    }

    #[test]
    fn add_examples() {
        assert_eq!(iv(1.0, 2.0).add(iv(3.0, 4.0)).unwrap(), iv(4.0, 6.0));
        assert_eq!(iv(-0.5, 7.0).add(iv(0.0, 0.0)).unwrap(), iv(-0.5, 7.0));
        assert_eq!(iv(-1.0, 1.0).add(iv(-2.0, 2.0)).unwrap(), iv(-3.0, 3.0));
    }

    #[test]
    fn add_overflow_is_an_error() {
        let big = iv(f64::MAX, f64::MAX);
        assert!(matches!(big.add(big), Err(IntervalError::NonFinite { .. })));
    }

    #[test]
    fn pow_branches() {
        assert_eq!(iv(2.0, 3.0).pow(2).unwrap(), iv(4.0, 9.0));
        assert_eq!(iv(-3.0, -1.0).pow(2).unwrap(), iv(1.0, 9.0));
        assert_eq!(iv(-2.0, 1.0).pow(2).unwrap(), iv(0.0, 4.0));
        // odd power is monotone even across zero
        assert_eq!(iv(-2.0, 1.0).pow(3).unwrap(), iv(-8.0, 1.0));
        assert!(iv(1.0, 2.0).pow(0).is_err());
    }

    #[test]
    fn abs_examples() {
        assert_eq!(iv(1.0, 2.0).abs(), iv(1.0, 2.0));
        let (lo, hi) = grid_image(iv(-3.0, -1.0), f64::abs);
        assert_eq!(iv(-3.0, -1.0).abs(), iv(lo, hi));
        assert_eq!(iv(-3.0, -1.0).abs(), iv(1.0, 3.0));
        let (lo, hi) = grid_image(iv(-2.0, 1.0), f64::abs);
        assert!((lo - 0.0).abs() < 1e-12 && (hi - 2.0).abs() < 1e-12);
        assert_eq!(iv(-2.0, 1.0).abs(), iv(0.0, 2.0));
    }

    #[test]
    fn pow_abs_examples() {
        assert_eq!(iv(1.0, 2.0).pow_abs(2.0).unwrap(), iv(1.0, 4.0));
        let x = iv(-3.0, -1.0);
        let (lo, hi) = grid_image(x, |v| v.abs().powi(2));
        let got = x.pow_abs(2.0).unwrap();
        assert!((got.lo() - lo).abs() < 1e-12 && (got.hi() - hi).abs() < 1e-12);
        assert_eq!(got, iv(1.0, 9.0));
        let x = iv(-2.0, 1.0);
        let (lo, hi) = grid_image(x, |v| v.abs().powi(2));
        let got = x.pow_abs(2.0).unwrap();
        assert!((got.lo() - lo).abs() < 1e-9 && (got.hi() - hi).abs() < 1e-12);
        assert_eq!(got, iv(0.0, 4.0));
        assert!(x.pow_abs(0.0).is_err());
        assert!(x.pow_abs(-1.0).is_err());
    }

    #[test]
    fn exp_examples() {
        assert_eq!(iv(0.0, 0.0).exp().unwrap(), iv(1.0, 1.0));
        let x = iv(2f64.ln(), 3f64.ln()).exp().unwrap();
        assert!((x.lo() - 2.0).abs() < 1e-15 && (x.hi() - 3.0).abs() < 1e-15);
        let x = iv(-1.0, 1.0).exp().unwrap();
        assert_eq!(x, iv((-1f64).exp(), 1f64.exp()));
        assert!(iv(0.0, 1000.0).exp().is_err());
    }

    #[test]
    fn scale_contains_width() {
        assert_eq!(iv(1.0, 2.0).scale(-1.0).unwrap(), iv(-2.0, -1.0));
        assert!(iv(0.8, 1.2).contains(1.0));
        assert!(!iv(0.8, 1.2).contains(1.3));
        assert!((iv(0.8, 1.2).width() - 0.4).abs() < 1e-15);
        assert_eq!(iv(1.0, 2.0).sub_from(3.0).unwrap(), iv(1.0, 2.0));
    }

    #[test]
    fn serde_round_trip_validates() {
        let x = iv(-1.5, 2.25);
        let s = serde_json::to_string(&x).unwrap();
        assert_eq!(s, "[-1.5,2.25]");
        assert_eq!(serde_json::from_str::<Interval>(&s).unwrap(), x);
        assert!(serde_json::from_str::<Interval>("[2.0,1.0]").is_err());
    }
}
