//! Exact integer kernels for `floor(log2(a/j))` style counts.
//!
//! Nothing in this module touches floating point. Every quantity is defined
//! operationally through doubling: `floor(log2(a/j))` is the largest `k` with
//! `j * 2^k <= a`.

use num_bigint::BigUint;
use num_traits::{One, Zero};
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ExactError {
    #[error("argument must be positive")]
    ZeroArgument,
    #[error("denominator {j} exceeds numerator {a}")]
    RatioBelowOne { a: String, j: String },
    #[error("{0} is even; the odd-index identity needs an odd bound")]
    EvenArgument(u64),
    #[error("odd-index floor sum for a = {a} is {value}, expected {expected}")]
    IdentityViolation { a: u64, value: u64, expected: u64 },
    #[error("count overflowed u64")]
    Overflow,
}

/// How a [`FloorLogCount`] was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum CountMethod {
    /// Sum of `floor(log2(a/j))` terms.
    FloorFormula,
    /// Direct enumeration of even integers below `a`.
    EvenEnumeration,
    /// Enumeration of pairs `(m odd, alpha >= 1)` with `m * 2^alpha <= a`.
    PairEnumeration,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct FloorLogCount {
    pub a: u64,
    pub value: u64,
    pub method: CountMethod,
}

fn check_ratio(a: u64, j: u64) -> Result<(), ExactError> {
    if a == 0 || j == 0 {
        return Err(ExactError::ZeroArgument);
    }
    if j > a {
        return Err(ExactError::RatioBelowOne {
            a: a.to_string(),
            j: j.to_string(),
        });
    }
    Ok(())
}

/// Largest `k >= 0` with `j * 2^k <= a`.
pub fn floor_log2_ratio(a: u64, j: u64) -> Result<u32, ExactError> {
    check_ratio(a, j)?;
    Ok(floor_log2_ratio_unchecked(a, j))
}

#[inline]
fn floor_log2_ratio_unchecked(a: u64, j: u64) -> u32 {
    // j << k has the same bit length as a, so the shift cannot overflow.
    let k = j.leading_zeros() - a.leading_zeros();
    if (j << k) > a {
        k - 1
    } else {
        k
    }
}

/// Arbitrary-precision form of [`floor_log2_ratio`].
pub fn floor_log2_ratio_big(a: &BigUint, j: &BigUint) -> Result<u64, ExactError> {
    if a.is_zero() || j.is_zero() {
        return Err(ExactError::ZeroArgument);
    }
    if j > a {
        return Err(ExactError::RatioBelowOne {
            a: a.to_string(),
            j: j.to_string(),
        });
    }
    let k = a.bits() - j.bits();
    if (j << k) > *a {
        Ok(k - 1)
    } else {
        Ok(k)
    }
}

/// `Some(k)` exactly when `a = j * 2^k`.
pub fn power_of_two_ratio(a: u64, j: u64) -> Result<Option<u32>, ExactError> {
    check_ratio(a, j)?;
    let k = floor_log2_ratio_unchecked(a, j);
    Ok(((j << k) == a).then_some(k))
}

pub fn power_of_two_ratio_big(a: &BigUint, j: &BigUint) -> Result<Option<u64>, ExactError> {
    let k = floor_log2_ratio_big(a, j)?;
    Ok(((j << k) == *a).then_some(k))
}

pub fn binary_digit_sum(a: u64) -> u32 {
    a.count_ones()
}

pub fn binary_digit_sum_big(a: &BigUint) -> u64 {
    a.count_ones()
}

/// Sum of `floor(log2(a/j))` over odd `j <= a`. Errors unless it equals `(a-1)/2`.
pub fn odd_floor_sum(a: u64) -> Result<FloorLogCount, ExactError> {
    if a == 0 {
        return Err(ExactError::ZeroArgument);
    }
    if a.is_multiple_of(2) {
        return Err(ExactError::EvenArgument(a));
    }
    let value = raw_odd_floor_sum(a)?;
    let expected = (a - 1) / 2;
    if value != expected {
        return Err(ExactError::IdentityViolation { a, value, expected });
    }
    Ok(FloorLogCount {
        a,
        value,
        method: CountMethod::FloorFormula,
    })
}

/// The odd-index sum without the identity check, for reporting.
pub fn raw_odd_floor_sum(a: u64) -> Result<u64, ExactError> {
    if a == 0 {
        return Err(ExactError::ZeroArgument);
    }
    (1..=a)
        .step_by(2)
        .try_fold(0u64, |acc, j| {
            acc.checked_add(u64::from(floor_log2_ratio_unchecked(a, j)))
        })
        .ok_or(ExactError::Overflow)
}

/// Counts even `m` with `1 <= m < a` one at a time.
pub fn even_count_oracle(a: u64) -> Result<u64, ExactError> {
    if a == 0 {
        return Err(ExactError::ZeroArgument);
    }
    if a.is_multiple_of(2) {
        return Err(ExactError::EvenArgument(a));
    }
    let mut count = 0u64;
    for m in 1..a {
        if m % 2 == 0 {
            count += 1;
        }
    }
    Ok(count)
}

/// Counts pairs `(m, alpha)` with `m` odd, `alpha >= 1` and `m * 2^alpha <= a`.
pub fn pair_enumeration_oracle(a: u64) -> Result<u64, ExactError> {
    if a == 0 {
        return Err(ExactError::ZeroArgument);
    }
    let mut count = 0u64;
    let mut m = 1u64;
    while m <= a / 2 {
        let mut even = m * 2;
        loop {
            count += 1;
            match even.checked_mul(2) {
                Some(next) if next <= a => even = next,
                _ => break,
            }
        }
        m += 2;
    }
    Ok(count)
}

/// Sum of `floor(log2(a/j))` over every `j <= a`.
pub fn all_floor_sum(a: u64) -> Result<FloorLogCount, ExactError> {
    if a == 0 {
        return Err(ExactError::ZeroArgument);
    }
    let value = (1..=a)
        .try_fold(0u64, |acc, j| {
            acc.checked_add(u64::from(floor_log2_ratio_unchecked(a, j)))
        })
        .ok_or(ExactError::Overflow)?;
    Ok(FloorLogCount {
        a,
        value,
        method: CountMethod::FloorFormula,
    })
}

/// The three counts the identity compares, for one odd `a`.
pub fn theorem_counts(a: u64) -> Result<[FloorLogCount; 3], ExactError> {
    if a.is_multiple_of(2) {
        return Err(ExactError::EvenArgument(a));
    }
    Ok([
        FloorLogCount {
            a,
            value: raw_odd_floor_sum(a)?,
            method: CountMethod::FloorFormula,
        },
        FloorLogCount {
            a,
            value: even_count_oracle(a)?,
            method: CountMethod::EvenEnumeration,
        },
        FloorLogCount {
            a,
            value: pair_enumeration_oracle(a)?,
            method: CountMethod::PairEnumeration,
        },
    ])
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TheoremFailure {
    pub a: u64,
    pub expected: u64,
    pub floor_formula: u64,
    pub even_enumeration: u64,
    pub pair_enumeration: u64,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct TheoremReport {
    pub checked: u64,
    pub failures: Vec<TheoremFailure>,
}

/// Size of the fixed work blocks used by [`verify_theorem_range`].
pub const VERIFY_BLOCK: u64 = 1 << 10;

/// Three-way check of the odd-index identity over every odd `a` in `[lo, hi]`.
///
/// The range is cut into fixed blocks of [`VERIFY_BLOCK`] integers and the
/// per-block findings are concatenated in ascending order, so the report is
/// identical however many threads the ambient rayon pool has.
pub fn verify_theorem_range(lo: u64, hi: u64) -> Result<TheoremReport, ExactError> {
    if lo == 0 {
        return Err(ExactError::ZeroArgument);
    }
    if lo > hi {
        return Ok(TheoremReport::default());
    }
    let blocks = (hi - lo) / VERIFY_BLOCK + 1;
    let parts: Vec<Result<TheoremReport, ExactError>> = (0..blocks)
        .into_par_iter()
        .map(|b| {
            let start = lo + b * VERIFY_BLOCK;
            let end = start.saturating_add(VERIFY_BLOCK - 1).min(hi);
            let mut report = TheoremReport::default();
            let first_odd = start | 1;
            for a in (first_odd..=end).step_by(2) {
                report.checked += 1;
                let [f, e, p] = theorem_counts(a)?;
                let expected = (a - 1) / 2;
                if f.value != expected || e.value != expected || p.value != expected {
                    report.failures.push(TheoremFailure {
                        a,
                        expected,
                        floor_formula: f.value,
                        even_enumeration: e.value,
                        pair_enumeration: p.value,
                    });
                }
            }
            Ok(report)
        })
        .collect();
    let mut total = TheoremReport::default();
    for part in parts {
        let part = part?;
        total.checked += part.checked;
        total.failures.extend(part.failures);
    }
    Ok(total)
}

/// `n!` as an exact big integer, by a balanced product tree.
pub fn factorial(n: u64) -> BigUint {
    fn product(lo: u64, hi: u64) -> BigUint {
        if hi < lo {
            return BigUint::one();
        }
        if hi - lo < 16 {
            return (lo..=hi).fold(BigUint::one(), |acc, m| acc * m);
        }
        let mid = lo + (hi - lo) / 2;
        product(lo, mid) * product(mid + 1, hi)
    }
    product(2, n)
}
