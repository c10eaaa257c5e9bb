//! Test-only oracles that share no code path with the library's series.
#![allow(dead_code)]

use fraclog::{DyadicInterval, DyadicRational};
use num_bigint::{BigInt, BigUint};
use num_traits::One;

/// Bits of `log2(a/j)` by repeated squaring: with `y = a / (j 2^k)` in `[1, 2)`,
/// squaring `y` and halving whenever it reaches 2 emits one fractional bit.
/// `y` is carried as a fixed-point interval at `2^-scale` so every emitted bit
/// is certified; returns `None` if the interval ever straddles 2.
pub fn log2_by_squaring(a: u64, j: u64, bits: u32, scale: u32) -> Option<DyadicInterval> {
    assert!(j >= 1 && j <= a);
    let mut k = 0u32;
    while j << (k + 1) <= a {
        k += 1;
    }
    let one = BigUint::one() << scale;
    let two = &one << 1u32;
    let den = BigUint::from(j) << k;
    let num = BigUint::from(a) << scale;
    let mut lo = &num / &den;
    let mut hi = (&num + &den - 1u32) / &den;
    let mut frac = BigUint::from(0u32);
    for _ in 0..bits {
        lo = (&lo * &lo) >> scale;
        hi = (&hi * &hi + &one - 1u32) >> scale;
        hi += 1u32;
        frac <<= 1u32;
        if lo >= two {
            frac += 1u32;
            lo >>= 1u32;
            hi = (hi + 1u32) >> 1u32;
        } else if hi >= two {
            return None;
        }
    }
    let base = (BigInt::from(k) << bits) + BigInt::from(frac);
    Some(DyadicInterval::new(
        DyadicRational::new(base.clone(), -(bits as i64)),
        DyadicRational::new(base + 1, -(bits as i64)),
    ))
}

/// [`log2_by_squaring`] with enough fixed-point headroom for `bits` steps.
pub fn log2_oracle(a: u64, j: u64, bits: u32) -> DyadicInterval {
    let mut scale = 2 * bits + 64;
    loop {
        if let Some(iv) = log2_by_squaring(a, j, bits, scale) {
            return iv;
        }
        scale += 64;
    }
}

/// Parses a decimal literal into an exact rational-valued dyadic enclosure
/// `[v - ulp, v + ulp]` where `ulp` is one unit in the last printed digit.
pub fn decimal_band(s: &str) -> (num_rational::BigRational, num_rational::BigRational) {
    let (int, frac) = s.split_once('.').unwrap_or((s, ""));
    let neg = int.starts_with('-');
    let digits: BigInt = format!("{}{}", int.trim_start_matches('-'), frac)
        .parse()
        .unwrap();
    let den = BigInt::from(10u8).pow(frac.len() as u32);
    let v = num_rational::BigRational::new(if neg { -digits } else { digits }, den.clone());
    let ulp = num_rational::BigRational::new(BigInt::one(), den);
    (&v - &ulp, &v + &ulp)
}

/// The interval meets the one-ulp band around the printed decimal.
pub fn near_decimal(iv: &DyadicInterval, s: &str) -> bool {
    let (lo, hi) = decimal_band(s);
    iv.lo().to_rational() <= hi && lo <= iv.hi().to_rational()
}
