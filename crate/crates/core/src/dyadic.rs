//! Dyadic rationals `m * 2^e` and closed intervals with dyadic endpoints.
//!
//! Addition, subtraction and multiplication of dyadics are exact. Anything
//! that cannot be exact (division, roots) takes an explicit grid exponent and
//! rounds in a stated direction; interval operations always round outward.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

/// Exact `mantissa * 2^exponent`, with the mantissa odd or zero.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct DyadicRational {
    mantissa: BigInt,
    exponent: i64,
}

impl DyadicRational {
    pub fn new(mantissa: impl Into<BigInt>, exponent: i64) -> Self {
        let mut mantissa = mantissa.into();
        if mantissa.is_zero() {
            return Self::zero();
        }
        let tz = mantissa.trailing_zeros().unwrap_or(0);
        if tz > 0 {
            mantissa >>= tz;
        }
        DyadicRational {
            mantissa,
            exponent: exponent + tz as i64,
        }
    }

    pub fn zero() -> Self {
        DyadicRational {
            mantissa: BigInt::zero(),
            exponent: 0,
        }
    }

    pub fn one() -> Self {
        Self::from_int(1)
    }

    pub fn from_int(v: impl Into<BigInt>) -> Self {
        Self::new(v, 0)
    }

    pub fn mantissa(&self) -> &BigInt {
        &self.mantissa
    }

    pub fn exponent(&self) -> i64 {
        self.exponent
    }

    pub fn is_zero(&self) -> bool {
        self.mantissa.is_zero()
    }

    pub fn is_negative(&self) -> bool {
        self.mantissa.is_negative()
    }

    pub fn is_positive(&self) -> bool {
        self.mantissa.is_positive()
    }

    pub fn abs(&self) -> Self {
        DyadicRational {
            mantissa: self.mantissa.abs(),
            exponent: self.exponent,
        }
    }

    /// `self * 2^k`, exact.
    pub fn mul_pow2(&self, k: i64) -> Self {
        if self.is_zero() {
            return Self::zero();
        }
        DyadicRational {
            mantissa: self.mantissa.clone(),
            exponent: self.exponent + k,
        }
    }

    /// Integer `N` with `self = N * 2^exp`, or `None` if `self` is off that grid.
    pub fn scaled_to(&self, exp: i64) -> Option<BigInt> {
        if self.is_zero() {
            return Some(BigInt::zero());
        }
        let shift = self.exponent - exp;
        (shift >= 0).then(|| &self.mantissa << shift as u64)
    }

    /// Largest multiple of `2^exp` that is `<= self`.
    pub fn floor_to(&self, exp: i64) -> Self {
        if self.is_zero() || self.exponent >= exp {
            return self.clone();
        }
        let shift = (exp - self.exponent) as u64;
        // Arithmetic shift on BigInt floors toward negative infinity.
        Self::new(&self.mantissa >> shift, exp)
    }

    /// Smallest multiple of `2^exp` that is `>= self`.
    pub fn ceil_to(&self, exp: i64) -> Self {
        self.neg().floor_to(exp).neg()
    }

    /// `floor(self)` as an integer.
    pub fn floor_int(&self) -> BigInt {
        if self.exponent >= 0 {
            &self.mantissa << self.exponent as u64
        } else {
            &self.mantissa >> (-self.exponent) as u64
        }
    }

    fn aligned(&self, other: &Self) -> (BigInt, BigInt, i64) {
        let e = self.exponent.min(other.exponent);
        let a = &self.mantissa << (self.exponent - e) as u64;
        let b = &other.mantissa << (other.exponent - e) as u64;
        (a, b, e)
    }

    /// Quotient rounded down onto the grid `2^exp`. Panics on a zero divisor.
    pub fn div_floor(&self, other: &Self, exp: i64) -> Self {
        let (num, den) = self.quotient_parts(other, exp);
        Self::new(num.div_floor(&den), exp)
    }

    /// Quotient rounded up onto the grid `2^exp`. Panics on a zero divisor.
    pub fn div_ceil(&self, other: &Self, exp: i64) -> Self {
        let (num, den) = self.quotient_parts(other, exp);
        Self::new(-((-num).div_floor(&den)), exp)
    }

    // self / other * 2^-exp as num / den with den > 0.
    fn quotient_parts(&self, other: &Self, exp: i64) -> (BigInt, BigInt) {
        assert!(!other.is_zero(), "dyadic division by zero");
        let shift = self.exponent - other.exponent - exp;
        let (mut num, mut den) = (self.mantissa.clone(), other.mantissa.clone());
        if shift >= 0 {
            num <<= shift as u64;
        } else {
            den <<= (-shift) as u64;
        }
        if den.is_negative() {
            (-num, -den)
        } else {
            (num, den)
        }
    }

    /// Lower and upper grid neighbours of `p / q` for positive `q`.
    pub fn rational_bounds(p: &BigInt, q: &BigInt, exp: i64) -> (Self, Self) {
        let num = Self::from_int(p.clone());
        let den = Self::from_int(q.clone());
        (num.div_floor(&den, exp), num.div_ceil(&den, exp))
    }

    /// `floor(self^(1/n))` onto the grid `2^exp`. Requires `self >= 0`.
    pub fn root_floor(&self, n: u32, exp: i64) -> Self {
        assert!(!self.is_negative(), "root of a negative dyadic");
        if self.is_zero() {
            return Self::zero();
        }
        // self * 2^(-n*exp) rounded down, then integer root.
        let scaled = self.mul_pow2(-(n as i64) * exp).floor_int();
        let r = scaled.to_biguint().expect("non-negative").nth_root(n);
        Self::new(BigInt::from(r), exp)
    }

    /// `ceil(self^(1/n))` onto the grid `2^exp`. Requires `self >= 0`.
    pub fn root_ceil(&self, n: u32, exp: i64) -> Self {
        let lo = self.root_floor(n, exp);
        let lo_int = lo.scaled_to(exp).expect("on grid");
        let exact = {
            let mut p = BigInt::one();
            for _ in 0..n {
                p *= &lo_int;
            }
            DyadicRational::new(p, exp * n as i64) == *self
        };
        if exact {
            lo
        } else {
            Self::new(lo_int + 1, exp)
        }
    }

    /// Exact decimal expansion (every dyadic has a finite one).
    pub fn to_decimal_string(&self) -> String {
        if self.exponent >= 0 {
            return (&self.mantissa << self.exponent as u64).to_string();
        }
        let digits = (-self.exponent) as usize;
        let scaled = self.mantissa.abs() * BigInt::from(5u8).pow(digits as u32);
        let mut s = scaled.to_string();
        if s.len() <= digits {
            s = "0".repeat(digits - s.len() + 1) + &s;
        }
        let (int, frac) = s.split_at(s.len() - digits);
        let frac = frac.trim_end_matches('0');
        let sign = if self.is_negative() { "-" } else { "" };
        if frac.is_empty() {
            format!("{sign}{int}")
        } else {
            format!("{sign}{int}.{frac}")
        }
    }

    /// Decimal string with `digits` fractional digits, rounded down (`up = false`) or up.
    pub fn to_decimal_rounded(&self, digits: u32, up: bool) -> String {
        let v = &self.mantissa * BigInt::from(10u8).pow(digits);
        let scaled = if self.exponent >= 0 {
            v << self.exponent as u64
        } else {
            let den = BigInt::one() << (-self.exponent) as u64;
            if up {
                -((-v).div_floor(&den))
            } else {
                v.div_floor(&den)
            }
        };
        let neg = scaled.is_negative();
        let mut s = scaled.abs().to_string();
        let d = digits as usize;
        if s.len() <= d {
            s = "0".repeat(d - s.len() + 1) + &s;
        }
        let (int, frac) = s.split_at(s.len() - d);
        let sign = if neg { "-" } else { "" };
        if d == 0 {
            format!("{sign}{int}")
        } else {
            format!("{sign}{int}.{frac}")
        }
    }

    pub fn to_rational(&self) -> BigRational {
        if self.exponent >= 0 {
            BigRational::from_integer(&self.mantissa << self.exponent as u64)
        } else {
            BigRational::new(
                self.mantissa.clone(),
                BigInt::one() << (-self.exponent) as u64,
            )
        }
    }

    /// Nearest-ish double, for display and plotting only.
    pub fn to_f64(&self) -> f64 {
        let bits = self.mantissa.bits() as i64;
        let keep = 60i64;
        let (m, e) = if bits > keep {
            (
                &self.mantissa >> (bits - keep) as u64,
                self.exponent + bits - keep,
            )
        } else {
            (self.mantissa.clone(), self.exponent)
        };
        let m: i64 = m.try_into().expect("fits after truncation");
        (m as f64) * 2f64.powi(e.clamp(-2000, 2000) as i32)
    }
}

impl From<i64> for DyadicRational {
    fn from(v: i64) -> Self {
        Self::from_int(v)
    }
}

impl From<&BigUint> for DyadicRational {
    fn from(v: &BigUint) -> Self {
        Self::from_int(BigInt::from_biguint(Sign::Plus, v.clone()))
    }
}

impl Ord for DyadicRational {
    fn cmp(&self, other: &Self) -> Ordering {
        let (a, b, _) = self.aligned(other);
        a.cmp(&b)
    }
}

impl PartialOrd for DyadicRational {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Add for &DyadicRational {
    type Output = DyadicRational;
    fn add(self, rhs: &DyadicRational) -> DyadicRational {
        if self.is_zero() {
            return rhs.clone();
        }
        if rhs.is_zero() {
            return self.clone();
        }
        let (a, b, e) = self.aligned(rhs);
        DyadicRational::new(a + b, e)
    }
}

impl Sub for &DyadicRational {
    type Output = DyadicRational;
    fn sub(self, rhs: &DyadicRational) -> DyadicRational {
        self + &(-rhs)
    }
}

impl Mul for &DyadicRational {
    type Output = DyadicRational;
    fn mul(self, rhs: &DyadicRational) -> DyadicRational {
        DyadicRational::new(&self.mantissa * &rhs.mantissa, self.exponent + rhs.exponent)
    }
}

impl Neg for &DyadicRational {
    type Output = DyadicRational;
    fn neg(self) -> DyadicRational {
        DyadicRational {
            mantissa: -&self.mantissa,
            exponent: self.exponent,
        }
    }
}

impl Neg for DyadicRational {
    type Output = DyadicRational;
    fn neg(self) -> DyadicRational {
        -&self
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr for DyadicRational {
            type Output = DyadicRational;
            fn $m(self, rhs: DyadicRational) -> DyadicRational {
                (&self).$m(&rhs)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

impl fmt::Display for DyadicRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_decimal_string())
    }
}

/// Closed interval `[lo, hi]` with `lo <= hi`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct DyadicInterval {
    lo: DyadicRational,
    hi: DyadicRational,
}

impl DyadicInterval {
    /// Panics if `lo > hi`.
    pub fn new(lo: DyadicRational, hi: DyadicRational) -> Self {
        assert!(lo <= hi, "interval endpoints out of order: {lo} > {hi}");
        DyadicInterval { lo, hi }
    }

    pub fn point(v: DyadicRational) -> Self {
        DyadicInterval {
            lo: v.clone(),
            hi: v,
        }
    }

    pub fn from_int(v: impl Into<BigInt>) -> Self {
        Self::point(DyadicRational::from_int(v))
    }

    pub fn zero() -> Self {
        Self::point(DyadicRational::zero())
    }

    /// Tightest grid-`2^exp` enclosure of the rational `p / q`, `q > 0`.
    pub fn from_ratio(p: &BigInt, q: &BigInt, exp: i64) -> Self {
        let (lo, hi) = DyadicRational::rational_bounds(p, q, exp);
        DyadicInterval { lo, hi }
    }

    pub fn lo(&self) -> &DyadicRational {
        &self.lo
    }

    pub fn hi(&self) -> &DyadicRational {
        &self.hi
    }

    pub fn width(&self) -> DyadicRational {
        &self.hi - &self.lo
    }

    pub fn is_point(&self) -> bool {
        self.lo == self.hi
    }

    /// `width <= 2^-bits`.
    pub fn width_within(&self, bits: i64) -> bool {
        self.width() <= DyadicRational::new(1, -bits)
    }

    pub fn contains(&self, v: &DyadicRational) -> bool {
        self.lo <= *v && *v <= self.hi
    }

    pub fn contains_int(&self, v: i64) -> bool {
        self.contains(&DyadicRational::from(v))
    }

    /// Integers inside the interval (inclusive). Assumes a narrow interval.
    pub fn integers_inside(&self) -> Vec<BigInt> {
        let first = self.lo.ceil_to(0).floor_int();
        let last = self.hi.floor_int();
        let mut out = Vec::new();
        let mut k = first;
        while k <= last {
            out.push(k.clone());
            k += 1;
        }
        out
    }

    pub fn intersects(&self, other: &Self) -> bool {
        self.lo <= other.hi && other.lo <= self.hi
    }

    /// `self` is contained in `outer`.
    pub fn is_within(&self, outer: &Self) -> bool {
        outer.lo <= self.lo && self.hi <= outer.hi
    }

    /// Every point of `self` is strictly below every point of `other`.
    pub fn strictly_below(&self, other: &Self) -> bool {
        self.hi < other.lo
    }

    pub fn is_positive(&self) -> bool {
        self.lo.is_positive()
    }

    pub fn is_negative(&self) -> bool {
        self.hi.is_negative()
    }

    pub fn contains_zero(&self) -> bool {
        !self.is_positive() && !self.is_negative()
    }

    /// Outward rounding of both endpoints onto the grid `2^exp`.
    pub fn round_out(&self, exp: i64) -> Self {
        DyadicInterval {
            lo: self.lo.floor_to(exp),
            hi: self.hi.ceil_to(exp),
        }
    }

    /// Widen by `delta` on each side.
    pub fn pad(&self, delta: &DyadicRational) -> Self {
        DyadicInterval {
            lo: &self.lo - delta,
            hi: &self.hi + delta,
        }
    }

    /// Intersect with `[lo, hi]`; `None` if disjoint.
    pub fn clamp(&self, lo: &DyadicRational, hi: &DyadicRational) -> Option<Self> {
        let l = if self.lo < *lo {
            lo.clone()
        } else {
            self.lo.clone()
        };
        let h = if self.hi > *hi {
            hi.clone()
        } else {
            self.hi.clone()
        };
        (l <= h).then_some(DyadicInterval { lo: l, hi: h })
    }

    pub fn scale_int(&self, k: i64) -> Self {
        let k = DyadicRational::from(k);
        let a = &self.lo * &k;
        let b = &self.hi * &k;
        if a <= b {
            DyadicInterval { lo: a, hi: b }
        } else {
            DyadicInterval { lo: b, hi: a }
        }
    }

    pub fn mul_pow2(&self, k: i64) -> Self {
        DyadicInterval {
            lo: self.lo.mul_pow2(k),
            hi: self.hi.mul_pow2(k),
        }
    }

    /// Exact product.
    pub fn mul(&self, other: &Self) -> Self {
        let c = [
            &self.lo * &other.lo,
            &self.lo * &other.hi,
            &self.hi * &other.lo,
            &self.hi * &other.hi,
        ];
        let lo = c.iter().min().expect("four candidates").clone();
        let hi = c.iter().max().expect("four candidates").clone();
        DyadicInterval { lo, hi }
    }

    /// Product rounded outward onto the grid `2^exp`.
    pub fn mul_round(&self, other: &Self, exp: i64) -> Self {
        self.mul(other).round_out(exp)
    }

    /// Quotient rounded outward onto the grid `2^exp`; `None` if `other` contains zero.
    pub fn div_round(&self, other: &Self, exp: i64) -> Option<Self> {
        if other.contains_zero() {
            return None;
        }
        let mut lo: Option<DyadicRational> = None;
        let mut hi: Option<DyadicRational> = None;
        for a in [&self.lo, &self.hi] {
            for b in [&other.lo, &other.hi] {
                let l = a.div_floor(b, exp);
                let h = a.div_ceil(b, exp);
                if lo.as_ref().is_none_or(|x| l < *x) {
                    lo = Some(l);
                }
                if hi.as_ref().is_none_or(|x| h > *x) {
                    hi = Some(h);
                }
            }
        }
        Some(DyadicInterval {
            lo: lo.expect("set"),
            hi: hi.expect("set"),
        })
    }

    /// Outward enclosure of the real `n`-th root. Requires `lo >= 0`.
    pub fn root_round(&self, n: u32, exp: i64) -> Self {
        DyadicInterval {
            lo: self.lo.root_floor(n, exp),
            hi: self.hi.root_ceil(n, exp),
        }
    }

    pub fn midpoint_f64(&self) -> f64 {
        (&self.lo + &self.hi).mul_pow2(-1).to_f64()
    }
}

impl Add for &DyadicInterval {
    type Output = DyadicInterval;
    fn add(self, rhs: &DyadicInterval) -> DyadicInterval {
        DyadicInterval {
            lo: &self.lo + &rhs.lo,
            hi: &self.hi + &rhs.hi,
        }
    }
}

impl Sub for &DyadicInterval {
    type Output = DyadicInterval;
    fn sub(self, rhs: &DyadicInterval) -> DyadicInterval {
        DyadicInterval {
            lo: &self.lo - &rhs.hi,
            hi: &self.hi - &rhs.lo,
        }
    }
}

impl Neg for &DyadicInterval {
    type Output = DyadicInterval;
    fn neg(self) -> DyadicInterval {
        DyadicInterval {
            lo: -&self.hi,
            hi: -&self.lo,
        }
    }
}

impl fmt::Display for DyadicInterval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {}]", self.lo, self.hi)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn d(m: i64, e: i64) -> DyadicRational {
        DyadicRational::new(m, e)
    }

    #[test]
    fn normalizes_to_odd_mantissa() {
        let x = d(12, 0);
        assert_eq!(x.mantissa(), &BigInt::from(3));
        assert_eq!(x.exponent(), 2);
        assert_eq!(d(0, 17), DyadicRational::zero());
        assert_eq!(d(6, -1), d(3, 0));
    }

    #[test]
    fn floor_and_ceil_on_grid() {
        // 7/4 = 1.75
        let x = d(7, -2);
        assert_eq!(x.floor_to(0), d(1, 0));
        assert_eq!(x.ceil_to(0), d(2, 0));
        assert_eq!(x.floor_to(-1), d(3, -1));
        assert_eq!((-&x).floor_to(0), d(-2, 0));
        assert_eq!((-&x).ceil_to(0), d(-1, 0));
        assert_eq!(x.floor_to(-5), x);
        assert_eq!((-&x).floor_int(), BigInt::from(-2));
    }

    #[test]
    fn division_brackets_quotient() {
        let one = d(1, 0);
        let three = d(3, 0);
        let lo = one.div_floor(&three, -10);
        let hi = one.div_ceil(&three, -10);
        assert_eq!(lo, d(341, -10));
        assert_eq!(hi, d(342, -10));
        let neg = (-&one).div_floor(&three, -10);
        assert_eq!(neg, d(-342, -10));
        assert_eq!(d(6, 0).div_floor(&d(3, 0), -4), d(2, 0));
        assert_eq!(d(6, 0).div_ceil(&d(-3, 0), -4), d(-2, 0));
    }

    #[test]
    fn roots_bracket() {
        let two = d(2, 0);
        let lo = two.root_floor(2, -20);
        let hi = two.root_ceil(2, -20);
        assert!(&lo * &lo <= two && two <= &hi * &hi);
        assert_eq!(&hi - &lo, d(1, -20));
        let nine = d(9, 0);
        assert_eq!(nine.root_floor(2, -8), d(3, 0));
        assert_eq!(nine.root_ceil(2, -8), d(3, 0));
    }

    #[test]
    fn decimal_rendering() {
        assert_eq!(d(3, -2).to_decimal_string(), "0.75");
        assert_eq!(d(-5, -1).to_decimal_string(), "-2.5");
        assert_eq!(d(3, 4).to_decimal_string(), "48");
        assert_eq!(d(1, -3).to_decimal_rounded(2, false), "0.12");
        assert_eq!(d(1, -3).to_decimal_rounded(2, true), "0.13");
        assert_eq!(d(-1, -3).to_decimal_rounded(2, false), "-0.13");
        assert_eq!(d(-1, -3).to_decimal_rounded(2, true), "-0.12");
    }

    #[test]
    fn interval_ops() {
        let a = DyadicInterval::new(d(-1, 0), d(2, 0));
        let b = DyadicInterval::new(d(3, 0), d(4, 0));
        assert_eq!(a.mul(&b), DyadicInterval::new(d(-4, 0), d(8, 0)));
        assert_eq!(&a - &b, DyadicInterval::new(d(-5, 0), d(-1, 0)));
        assert!(a.div_round(&a, -4).is_none());
        let q = a.div_round(&b, -4).unwrap();
        assert!(q.contains(&d(-1, -2)) && q.contains(&d(1, -1)));
        assert!(DyadicInterval::from_int(1).strictly_below(&b));
        assert!(!a.strictly_below(&b.scale_int(-1)));
    }
}
