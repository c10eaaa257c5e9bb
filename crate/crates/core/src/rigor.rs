//! Certified base-2 logarithms as dyadic intervals.
//!
//! All transcendental values come from two odd power series evaluated in
//! interval arithmetic with outward rounding:
//!
//! * `atanh(z) = z + z^3/3 + z^5/5 + ...` gives `ln y = 2 atanh((y-1)/(y+1))`;
//! * `atan(z)` gives pi through Machin's formula.
//!
//! The tail after the last summed term is bounded by twice the magnitude of
//! the next odd power (valid for `|z| <= 1/2`) and folded into the interval.
//!
//! Every public enclosure at precision `p` is computed to width `2^-(p+3)`,
//! padded by `2^-(p+3)` on both sides and rounded outward onto the grid
//! `2^-(p+3)`. The result has width below `2^-p`, is a pure function of its
//! inputs, and contains any recomputation at a higher precision.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use num_bigint::{BigInt, BigUint, Sign};
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::Serialize;
use thiserror::Error;

use crate::dyadic::{DyadicInterval, DyadicRational};
use crate::exact::{self, ExactError};

/// Highest precision any configuration may request.
pub const HARD_PRECISION_CEILING: u32 = 8192;

/// Bits carried by the cached constants; every request rounds these outward.
const CONSTANT_BITS: i64 = HARD_PRECISION_CEILING as i64 + 160;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RigorError {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("precision {0} is below the minimum of 4 bits")]
    PrecisionTooLow(u32),
    #[error("precision {requested} exceeds the configured ceiling {ceiling}")]
    PrecisionCeiling { requested: u32, ceiling: u32 },
    #[error("work estimate {work} exceeds the configured ceiling {ceiling}")]
    WorkCeiling { work: u64, ceiling: u64 },
    #[error(transparent)]
    Exact(#[from] ExactError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RigorConfig {
    /// Largest `p` accepted by any operation.
    pub max_precision: u32,
    /// Ceiling on `n * (p + log2 n)` for n-term sums.
    pub max_work: u64,
    /// Largest `n` for which `log2 n!` goes through the exact factorial.
    pub factorial_threshold: u64,
}

impl Default for RigorConfig {
    fn default() -> Self {
        RigorConfig {
            max_precision: 4096,
            max_work: 1 << 34,
            factorial_threshold: 20_000,
        }
    }
}

/// Which route produced a factorial enclosure.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum FactorialMethod {
    ExactFactorial,
    SummedLogs,
}

/// Fractional part `{log2(n/m)}` with its integer part.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FracTerm {
    pub n: u64,
    pub m: u64,
    pub k: u32,
    pub frac: DyadicInterval,
    pub exact_zero: bool,
}

struct Constants {
    ln2: DyadicInterval,
    pi: DyadicInterval,
    e: DyadicInterval,
}

fn constants() -> &'static Constants {
    static CONSTANTS: OnceLock<Constants> = OnceLock::new();
    CONSTANTS.get_or_init(|| Constants {
        ln2: ln2_series(CONSTANT_BITS),
        pi: pi_machin(CONSTANT_BITS),
        e: e_series(CONSTANT_BITS),
    })
}

/// `ln 2` on the grid `2^-bits`.
pub fn ln2(bits: i64) -> DyadicInterval {
    constants().ln2.round_out(-bits.min(CONSTANT_BITS))
}

pub fn pi(bits: i64) -> DyadicInterval {
    constants().pi.round_out(-bits.min(CONSTANT_BITS))
}

pub fn euler_e(bits: i64) -> DyadicInterval {
    constants().e.round_out(-bits.min(CONSTANT_BITS))
}

/// Odd power series `sum s_k z^(2k+1)/(2k+1)` with `s_k = 1` or `(-1)^k`.
/// Requires `|z| <= 1/2`. Arithmetic on the grid `2^-w`.
fn odd_series(z: &DyadicInterval, w: i64, alternating: bool) -> DyadicInterval {
    let half = DyadicRational::new(1, -1);
    assert!(
        z.lo().abs() <= half && z.hi().abs() <= half,
        "series argument outside [-1/2, 1/2]"
    );
    let grid = -w;
    let eps = DyadicRational::new(1, -w);
    let z2 = z.mul_round(z, grid);
    let mut power = z.round_out(grid);
    let mut sum = DyadicInterval::zero();
    let mut k: i64 = 0;
    loop {
        let mag = power.lo().abs().max(power.hi().abs());
        if mag <= eps {
            // |sum_{i>=k} z^(2i+1)/(2i+1)| <= mag / (1 - z^2) <= 2 mag
            return sum.pad(&mag.mul_pow2(1));
        }
        let divisor = DyadicInterval::from_int(2 * k + 1);
        let mut term = power.div_round(&divisor, grid).expect("positive divisor");
        if alternating && k % 2 == 1 {
            term = -&term;
        }
        sum = &sum + &term;
        power = power.mul_round(&z2, grid);
        k += 1;
    }
}

fn ln2_series(bits: i64) -> DyadicInterval {
    // ln 2 = 2 atanh(1/3)
    let w = bits + 32;
    let z = DyadicInterval::from_ratio(&BigInt::one(), &BigInt::from(3), -w);
    odd_series(&z, w, false).mul_pow2(1).round_out(-bits)
}

fn pi_machin(bits: i64) -> DyadicInterval {
    // pi = 16 atan(1/5) - 4 atan(1/239)
    let w = bits + 32;
    let a = odd_series(
        &DyadicInterval::from_ratio(&BigInt::one(), &BigInt::from(5), -w),
        w,
        true,
    );
    let b = odd_series(
        &DyadicInterval::from_ratio(&BigInt::one(), &BigInt::from(239), -w),
        w,
        true,
    );
    (&a.mul_pow2(4) - &b.mul_pow2(2)).round_out(-bits)
}

fn e_series(bits: i64) -> DyadicInterval {
    // e = sum 1/k!, tail after the term 1/k! bounded by 2/(k+1)!
    let w = bits + 32;
    let grid = -w;
    let eps = DyadicRational::new(1, -w);
    let mut term = DyadicInterval::from_int(1);
    let mut sum = DyadicInterval::zero();
    let mut k = 1i64;
    loop {
        sum = &sum + &term;
        term = term
            .div_round(&DyadicInterval::from_int(k), grid)
            .expect("positive divisor");
        if term.hi() <= &eps {
            return sum.pad(&term.hi().mul_pow2(1)).round_out(-bits);
        }
        k += 1;
    }
}

fn to_bigint(v: &BigUint) -> BigInt {
    BigInt::from_biguint(Sign::Plus, v.clone())
}

/// Enclosure of `log2(num/den)` with width at most `2^-prec`. No padding.
fn log2_positive_ratio(num: &BigUint, den: &BigUint, prec: i64) -> DyadicInterval {
    assert!(
        !num.is_zero() && !den.is_zero(),
        "log2 of a non-positive ratio"
    );
    // k = floor(log2(num/den)) from bit lengths.
    let mut k = num.bits() as i64 - den.bits() as i64;
    let scale = |k: i64| -> (BigInt, BigInt) {
        if k >= 0 {
            (to_bigint(num), to_bigint(den) << k as u64)
        } else {
            (to_bigint(num) << (-k) as u64, to_bigint(den))
        }
    };
    let (mut a, mut b) = scale(k);
    if a < b {
        k -= 1;
        (a, b) = scale(k);
    }
    if a == b {
        return DyadicInterval::from_int(k);
    }
    // a/b in (1, 2); move into [1/sqrt 2, sqrt 2) so |z| <= 0.172.
    if &a * &a >= (&b * &b) << 1u32 {
        k += 1;
        b <<= 1u32;
    }
    let u = &a - &b;
    let v = &a + &b;
    let mut guard = 24 + 2 * (64 - (prec.max(1) as u64).leading_zeros() as i64);
    loop {
        let w = prec + guard;
        let z = DyadicInterval::from_ratio(&u, &v, -w);
        let ln_y = odd_series(&z, w, false).mul_pow2(1);
        let log2_y = ln_y.div_round(&ln2(w + 4), -w).expect("ln 2 is positive");
        let out = &log2_y + &DyadicInterval::from_int(k);
        if out.width_within(prec) {
            return out;
        }
        guard += 16;
    }
}

/// `log2` of a positive exact rational, width at most `2^-prec`, no padding.
pub fn log2_rational_raw(x: &BigRational, prec: i64) -> Result<DyadicInterval, RigorError> {
    if !x.is_positive() {
        return Err(RigorError::Domain(format!("log2 of non-positive {x}")));
    }
    let num = x.numer().to_biguint().expect("positive");
    let den = x.denom().to_biguint().expect("positive");
    Ok(log2_positive_ratio(&num, &den, prec))
}

/// `log2` of a positive dyadic, width at most `2^-prec`, no padding.
pub fn log2_dyadic_raw(x: &DyadicRational, prec: i64) -> Result<DyadicInterval, RigorError> {
    if !x.is_positive() {
        return Err(RigorError::Domain(format!("log2 of non-positive {x}")));
    }
    let m = x.mantissa().to_biguint().expect("positive");
    let e = x.exponent();
    let one = BigUint::one();
    Ok(if e >= 0 {
        log2_positive_ratio(&(m << e as u64), &one, prec)
    } else {
        log2_positive_ratio(&m, &(one << (-e) as u64), prec)
    })
}

/// Enclosure of `log2(x)` for every `x` in a positive interval.
pub fn log2_interval_raw(x: &DyadicInterval, prec: i64) -> Result<DyadicInterval, RigorError> {
    if !x.is_positive() {
        return Err(RigorError::Domain(format!(
            "log2 of interval {x} reaching 0"
        )));
    }
    let lo = log2_dyadic_raw(x.lo(), prec)?;
    if x.is_point() {
        return Ok(lo);
    }
    let hi = log2_dyadic_raw(x.hi(), prec)?;
    Ok(DyadicInterval::new(lo.lo().clone(), hi.hi().clone()))
}

/// Pads and rounds a raw enclosure of width `<= 2^-(p+3)` into the public form.
fn finish(raw: DyadicInterval, p: u32) -> DyadicInterval {
    if raw.is_point() {
        return raw;
    }
    let e = -(i64::from(p) + 3);
    debug_assert!(raw.width_within(-e), "raw enclosure too wide");
    raw.pad(&DyadicRational::new(1, e)).round_out(e)
}

/// `ceil(log2 n)` for `n >= 1`.
pub fn ceil_log2(n: u64) -> u32 {
    if n <= 1 {
        0
    } else {
        64 - (n - 1).leading_zeros()
    }
}

/// Cached enclosures of `log2 m` for `m = 1..=len`, all on the grid `2^-(q+2)`
/// with width at most `2^-q`, stored as scaled integers.
struct Log2Table {
    lo: Vec<BigInt>,
    hi: Vec<BigInt>,
}

impl Log2Table {
    fn entry(m: u64, q: i64) -> (BigInt, BigInt) {
        let grid = -(q + 2);
        let iv = log2_positive_ratio(&BigUint::from(m), &BigUint::one(), q + 1).round_out(grid);
        (
            iv.lo().scaled_to(grid).expect("on grid"),
            iv.hi().scaled_to(grid).expect("on grid"),
        )
    }
}

fn log2_table(q: i64, len: u64) -> Arc<Log2Table> {
    static TABLES: OnceLock<Mutex<HashMap<i64, Arc<Log2Table>>>> = OnceLock::new();
    let tables = TABLES.get_or_init(|| Mutex::new(HashMap::new()));
    let mut guard = tables.lock().expect("log2 table lock");
    if let Some(t) = guard.get(&q) {
        if t.lo.len() as u64 >= len {
            return Arc::clone(t);
        }
    }
    // Grow to the next power of two so sweeps extend the table rarely.
    let target = len.next_power_of_two();
    let (mut lo, mut hi) = match guard.get(&q) {
        Some(t) => (t.lo.clone(), t.hi.clone()),
        None => (Vec::new(), Vec::new()),
    };
    for m in lo.len() as u64 + 1..=target {
        let (l, h) = Log2Table::entry(m, q);
        lo.push(l);
        hi.push(h);
    }
    let table = Arc::new(Log2Table { lo, hi });
    guard.insert(q, Arc::clone(&table));
    table
}

/// Entry point for certified evaluation under a given [`RigorConfig`].
#[derive(Debug, Clone, Copy, Default)]
pub struct Rigor {
    pub config: RigorConfig,
}

impl Rigor {
    pub fn new(config: RigorConfig) -> Self {
        Rigor { config }
    }

    pub fn check_precision(&self, p: u32) -> Result<(), RigorError> {
        if p < 4 {
            return Err(RigorError::PrecisionTooLow(p));
        }
        let ceiling = self.config.max_precision.min(HARD_PRECISION_CEILING + 64);
        if p > ceiling {
            return Err(RigorError::PrecisionCeiling {
                requested: p,
                ceiling,
            });
        }
        Ok(())
    }

    fn check_work(&self, n: u64, p: u32) -> Result<(), RigorError> {
        let work = n.saturating_mul(u64::from(p) + u64::from(ceil_log2(n)));
        if work > self.config.max_work {
            return Err(RigorError::WorkCeiling {
                work,
                ceiling: self.config.max_work,
            });
        }
        Ok(())
    }

    /// `log2(a/j)` for `1 <= j <= a`, width at most `2^-p`.
    pub fn log2_ratio_enclosure(
        &self,
        a: u64,
        j: u64,
        p: u32,
    ) -> Result<DyadicInterval, RigorError> {
        self.log2_ratio_enclosure_big(&BigUint::from(a), &BigUint::from(j), p)
    }

    pub fn log2_ratio_enclosure_big(
        &self,
        a: &BigUint,
        j: &BigUint,
        p: u32,
    ) -> Result<DyadicInterval, RigorError> {
        self.check_precision(p)?;
        if let Some(k) = exact::power_of_two_ratio_big(a, j)? {
            return Ok(DyadicInterval::from_int(k as i64));
        }
        Ok(finish(log2_positive_ratio(a, j, i64::from(p) + 3), p))
    }

    /// Fractional part of `log2(a/j)`; the integer part comes from exact counting.
    pub fn frac_log2_enclosure(&self, a: u64, j: u64, p: u32) -> Result<FracTerm, RigorError> {
        let k = exact::floor_log2_ratio(a, j)?;
        self.check_precision(p)?;
        if exact::power_of_two_ratio(a, j)?.is_some() {
            return Ok(FracTerm {
                n: a,
                m: j,
                k,
                frac: DyadicInterval::zero(),
                exact_zero: true,
            });
        }
        let log = self.log2_ratio_enclosure(a, j, p)?;
        let shifted = &log - &DyadicInterval::from_int(k);
        let frac = shifted
            .clamp(&DyadicRational::zero(), &DyadicRational::one())
            .expect("floor from exact counting lies inside the enclosure");
        Ok(FracTerm {
            n: a,
            m: j,
            k,
            frac,
            exact_zero: false,
        })
    }

    /// `G(n) = sum_{m <= n} {log2(n/m)}`, width at most `2^-p`.
    pub fn g_enclosure(&self, n: u64, p: u32) -> Result<DyadicInterval, RigorError> {
        if n == 0 {
            return Err(ExactError::ZeroArgument.into());
        }
        self.check_precision(p)?;
        self.check_work(n, p)?;
        // Per-term width <= 2^-(p + ceil_log2 n + 3), so n terms stay below 2^-(p+3).
        let q = i64::from(p) + i64::from(ceil_log2(n)) + 4;
        let grid = -(q + 2);
        let table = log2_table(q, n);
        let one = BigInt::one() << (q + 2) as u64;
        let top = (n - 1) as usize;
        let (mut acc_lo, mut acc_hi) = (BigInt::zero(), BigInt::zero());
        for m in 1..=n {
            if exact::power_of_two_ratio(n, m)?.is_some() {
                continue;
            }
            let k = BigInt::from(exact::floor_log2_ratio(n, m)?) * &one;
            let idx = (m - 1) as usize;
            let mut lo = &table.lo[top] - &table.hi[idx] - &k;
            let mut hi = &table.hi[top] - &table.lo[idx] - &k;
            if lo.is_negative() {
                lo = BigInt::zero();
            }
            if hi > one {
                hi = one.clone();
            }
            acc_lo += lo;
            acc_hi += hi;
        }
        let raw = DyadicInterval::new(
            DyadicRational::new(acc_lo, grid),
            DyadicRational::new(acc_hi, grid),
        );
        Ok(finish(raw, p))
    }

    /// `log2 n!`, choosing the exact-factorial route up to the configured threshold.
    pub fn log2_factorial_enclosure(&self, n: u64, p: u32) -> Result<DyadicInterval, RigorError> {
        Ok(self.log2_factorial_with_method(n, p)?.0)
    }

    pub fn log2_factorial_with_method(
        &self,
        n: u64,
        p: u32,
    ) -> Result<(DyadicInterval, FactorialMethod), RigorError> {
        if n <= self.config.factorial_threshold {
            Ok((
                self.log2_factorial_exact(n, p)?,
                FactorialMethod::ExactFactorial,
            ))
        } else {
            Ok((
                self.log2_factorial_summed(n, p)?,
                FactorialMethod::SummedLogs,
            ))
        }
    }

    /// Exact `n!` followed by one certified logarithm of its leading bits.
    pub fn log2_factorial_exact(&self, n: u64, p: u32) -> Result<DyadicInterval, RigorError> {
        if n == 0 {
            return Err(ExactError::ZeroArgument.into());
        }
        self.check_precision(p)?;
        let f = exact::factorial(n);
        if f.count_ones() == 1 {
            return Ok(DyadicInterval::from_int(f.bits() as i64 - 1));
        }
        let p64 = i64::from(p);
        let keep = p64 as u64 + 72;
        let one = BigUint::one();
        let raw = if f.bits() <= keep {
            log2_positive_ratio(&f, &one, p64 + 3)
        } else {
            // f lies in [t, t+1] * 2^s
            let s = f.bits() - keep;
            let t = &f >> s;
            let shift = DyadicInterval::from_int(s as i64);
            let lo = log2_positive_ratio(&t, &one, p64 + 5);
            let hi = if (&t << s) == f {
                lo.clone()
            } else {
                log2_positive_ratio(&(&t + 1u32), &one, p64 + 5)
            };
            &DyadicInterval::new(lo.lo().clone(), hi.hi().clone()) + &shift
        };
        Ok(finish(raw, p))
    }

    /// Certified sum of `log2 m` over `m <= n`.
    pub fn log2_factorial_summed(&self, n: u64, p: u32) -> Result<DyadicInterval, RigorError> {
        if n == 0 {
            return Err(ExactError::ZeroArgument.into());
        }
        self.check_precision(p)?;
        self.check_work(n, p)?;
        if n <= 2 {
            return Ok(DyadicInterval::from_int(n as i64 - 1));
        }
        let q = i64::from(p) + i64::from(ceil_log2(n)) + 4;
        let table = log2_table(q, n);
        let (mut lo, mut hi) = (BigInt::zero(), BigInt::zero());
        for idx in 0..n as usize {
            lo += &table.lo[idx];
            hi += &table.hi[idx];
        }
        let grid = -(q + 2);
        let raw = DyadicInterval::new(DyadicRational::new(lo, grid), DyadicRational::new(hi, grid));
        Ok(finish(raw, p))
    }

    /// `n * log2 n` with width at most `2^-p`, unpadded (exact for powers of two).
    pub fn n_log2_n(&self, n: u64, p: u32) -> Result<DyadicInterval, RigorError> {
        if n == 0 {
            return Err(ExactError::ZeroArgument.into());
        }
        if n.is_power_of_two() {
            return Ok(DyadicInterval::from_int(
                (n * u64::from(n.trailing_zeros())) as i64,
            ));
        }
        let bits = 64 - i64::from(n.leading_zeros());
        let l = log2_positive_ratio(&BigUint::from(n), &BigUint::one(), i64::from(p) + bits);
        Ok(l.mul(&DyadicInterval::from_int(n as i64)))
    }
}

/// Free-function forms using the default configuration.
pub fn log2_ratio_enclosure(a: u64, j: u64, p: u32) -> Result<DyadicInterval, RigorError> {
    Rigor::default().log2_ratio_enclosure(a, j, p)
}

pub fn frac_log2_enclosure(a: u64, j: u64, p: u32) -> Result<FracTerm, RigorError> {
    Rigor::default().frac_log2_enclosure(a, j, p)
}

pub fn g_enclosure(n: u64, p: u32) -> Result<DyadicInterval, RigorError> {
    Rigor::default().g_enclosure(n, p)
}

pub fn log2_factorial_enclosure(n: u64, p: u32) -> Result<DyadicInterval, RigorError> {
    Rigor::default().log2_factorial_enclosure(n, p)
}
