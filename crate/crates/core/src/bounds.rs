//! Interval comparison of factorial bounds against certified `log2 n!`.
//!
//! Every bound is evaluated in the log2 domain. A verdict is issued only
//! from strictly separated intervals; overlapping certificates stay
//! `Inconclusive` unless exact counting proves equality.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::Serialize;

use crate::dyadic::{DyadicInterval, DyadicRational};
use crate::exact;
use crate::rigor::{self, FactorialMethod, Rigor, RigorError};

/// Extra bits carried by row components so exact combinations of three of
/// them still fit inside the `2^-p` width budget.
const COMPONENT_GUARD: u32 = 4;

/// Bits used for the closed-form enclosure of the Ramanujan `b` constant.
pub const CLOSED_FORM_B_BITS: i64 = 1200;

/// The decimal printed for `b`, truncated after these digits.
pub const PRINTED_B: &str = "0.35499112666";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum BSource {
    Printed,
    ClosedForm,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RamanujanParams {
    /// Offset in the lower correction factor, kept as the exact rational 39/54.
    pub a_const: BigRational,
    /// Enclosure of the offset in the upper correction factor.
    pub b_const: DyadicInterval,
    pub b_source: BSource,
}

impl RamanujanParams {
    pub fn new(source: BSource) -> Self {
        let b_const = match source {
            BSource::Printed => printed_b(),
            BSource::ClosedForm => closed_form_b(CLOSED_FORM_B_BITS),
        };
        RamanujanParams {
            a_const: BigRational::new(BigInt::from(39), BigInt::from(54)),
            b_const,
            b_source: source,
        }
    }
}

impl Default for RamanujanParams {
    fn default() -> Self {
        Self::new(BSource::Printed)
    }
}

/// `[d, d + 10^-k]` for the printed `k`-digit truncation `d`, rounded outward.
pub fn printed_b() -> DyadicInterval {
    let (_, frac) = PRINTED_B.split_once('.').expect("decimal point");
    let num: BigInt = frac.parse().expect("digits");
    let den = BigInt::from(10u8).pow(frac.len() as u32);
    let lo = DyadicInterval::from_ratio(&num, &den, -64);
    let hi = DyadicInterval::from_ratio(&(num + 1), &den, -64);
    DyadicInterval::new(lo.lo().clone(), hi.hi().clone())
}

/// `b = (11 / (11520 (1 - (30 e^6 / (391 pi^3))^(1/6))))^(1/4) - 1`.
pub fn closed_form_b(bits: i64) -> DyadicInterval {
    let mut w = bits + 64;
    loop {
        let g = -w;
        let e = rigor::euler_e(w + 8);
        let pi = rigor::pi(w + 8);
        let e2 = e.mul_round(&e, g);
        let e6 = e2.mul_round(&e2, g).mul_round(&e2, g);
        let pi3 = pi.mul_round(&pi, g).mul_round(&pi, g);
        let ratio = e6
            .scale_int(30)
            .div_round(&pi3.scale_int(391), g)
            .expect("pi^3 > 0");
        let root6 = ratio.root_round(6, g);
        let gap = &DyadicInterval::from_int(1) - &root6;
        let inner = DyadicInterval::from_int(11)
            .div_round(&gap.scale_int(11520), g)
            .expect("gap is positive");
        let b = &inner.root_round(4, g) - &DyadicInterval::from_int(1);
        let b = b.round_out(-bits);
        if b.width_within(bits - 2) {
            return b;
        }
        w += 32;
    }
}

/// Comparison of the printed `b` with its closed form.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BAgreement {
    pub printed: String,
    /// Closed form truncated to the printed number of digits, when both
    /// endpoints agree on those digits.
    pub closed_form_digits: Option<String>,
    pub closed_form_lo: String,
    pub closed_form_hi: String,
    pub agrees: bool,
}

pub fn check_b_agreement() -> BAgreement {
    let closed = closed_form_b(CLOSED_FORM_B_BITS);
    let digits = PRINTED_B.split_once('.').map_or(0, |(_, f)| f.len()) as u32;
    let lo = closed.lo().to_decimal_rounded(digits, false);
    let hi = closed.hi().to_decimal_rounded(digits, false);
    let closed_form_digits = (lo == hi).then_some(lo);
    BAgreement {
        printed: PRINTED_B.to_string(),
        agrees: closed_form_digits.as_deref() == Some(PRINTED_B),
        closed_form_digits,
        closed_form_lo: closed.lo().to_decimal_rounded(30, false),
        closed_form_hi: closed.hi().to_decimal_rounded(30, true),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum VerdictStatus {
    Holds,
    Violated,
    Inconclusive,
}

impl fmt::Display for VerdictStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            VerdictStatus::Holds => "Holds",
            VerdictStatus::Violated => "Violated",
            VerdictStatus::Inconclusive => "Inconclusive",
        })
    }
}

/// Where the bound's certificate sits relative to `log2 n!`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Separation {
    BoundBelow,
    BoundAbove,
    Overlap,
}

/// Which side of `n!` a bound claims to be on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Side {
    Lower,
    Upper,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Verdict {
    pub status: VerdictStatus,
    pub separation: Separation,
    /// Equality proved by exact counting rather than by intervals.
    pub equality: bool,
    /// `(bound, log2 n!)`.
    pub certificate: (DyadicInterval, DyadicInterval),
    pub precision_used: u32,
}

impl Verdict {
    pub fn judge(
        side: Side,
        bound: &DyadicInterval,
        fact: &DyadicInterval,
        precision: u32,
    ) -> Self {
        let separation = if bound.strictly_below(fact) {
            Separation::BoundBelow
        } else if fact.strictly_below(bound) {
            Separation::BoundAbove
        } else {
            Separation::Overlap
        };
        let status = match (side, separation) {
            (_, Separation::Overlap) => VerdictStatus::Inconclusive,
            (Side::Lower, Separation::BoundBelow) | (Side::Upper, Separation::BoundAbove) => {
                VerdictStatus::Holds
            }
            _ => VerdictStatus::Violated,
        };
        Verdict {
            status,
            separation,
            equality: false,
            certificate: (bound.clone(), fact.clone()),
            precision_used: precision,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum BoundName {
    Paper,
    RobbinsLower,
    RobbinsUpper,
    RamanujanLower,
    RamanujanUpper,
}

impl BoundName {
    pub const ALL: [BoundName; 5] = [
        BoundName::Paper,
        BoundName::RobbinsLower,
        BoundName::RobbinsUpper,
        BoundName::RamanujanLower,
        BoundName::RamanujanUpper,
    ];

    pub fn family(self) -> Family {
        match self {
            BoundName::Paper => Family::Paper,
            BoundName::RobbinsLower | BoundName::RobbinsUpper => Family::Robbins,
            BoundName::RamanujanLower | BoundName::RamanujanUpper => Family::Ramanujan,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            BoundName::Paper => "paper",
            BoundName::RobbinsLower => "robbins_lower",
            BoundName::RobbinsUpper => "robbins_upper",
            BoundName::RamanujanLower => "ramanujan_lower",
            BoundName::RamanujanUpper => "ramanujan_upper",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum Family {
    Paper,
    Robbins,
    Ramanujan,
}

impl Family {
    pub const ALL: [Family; 3] = [Family::Paper, Family::Robbins, Family::Ramanujan];

    pub fn as_str(self) -> &'static str {
        match self {
            Family::Paper => "paper",
            Family::Robbins => "robbins",
            Family::Ramanujan => "ramanujan",
        }
    }
}

/// One fully evaluated `n`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BoundRow {
    pub n: u64,
    pub precision_bits: u32,
    pub factorial_method: FactorialMethod,
    pub log2_fact: DyadicInterval,
    pub g: DyadicInterval,
    pub n_log2_n: DyadicInterval,
    pub paper_lb_log2: DyadicInterval,
    pub robbins_lo: DyadicInterval,
    pub robbins_hi: DyadicInterval,
    pub ramanujan_lo: DyadicInterval,
    pub ramanujan_hi: DyadicInterval,
    pub c_log2: DyadicInterval,
    pub e2: DyadicInterval,
    pub s2: u32,
    pub verdicts: BTreeMap<BoundName, Verdict>,
}

impl BoundRow {
    /// Both sides of a family hold, any side violated, or otherwise inconclusive.
    pub fn family_status(&self, family: Family) -> VerdictStatus {
        let statuses: Vec<VerdictStatus> = self
            .verdicts
            .iter()
            .filter(|(name, _)| name.family() == family)
            .map(|(_, v)| v.status)
            .collect();
        if statuses.contains(&VerdictStatus::Violated) {
            VerdictStatus::Violated
        } else if statuses.contains(&VerdictStatus::Inconclusive) {
            VerdictStatus::Inconclusive
        } else {
            VerdictStatus::Holds
        }
    }

    pub fn equality_flag(&self) -> bool {
        self.verdicts.values().any(|v| v.equality)
    }

    pub fn has_inconclusive(&self) -> bool {
        self.verdicts
            .values()
            .any(|v| v.status == VerdictStatus::Inconclusive)
    }

    /// Recomputes `c_log2` and `e2` from the row's own components.
    pub fn is_self_consistent(&self) -> bool {
        let (c, e2) = combine(self.n, &self.log2_fact, &self.g, &self.n_log2_n);
        c == self.c_log2
            && e2 == self.e2
            && paper_lb(self.n, &self.g, &self.n_log2_n) == self.paper_lb_log2
    }
}

fn paper_lb(n: u64, g: &DyadicInterval, nl: &DyadicInterval) -> DyadicInterval {
    let shift = DyadicInterval::from_int(n as i64 - 1);
    &(nl - &shift) - g
}

// (c_log2, e2) as exact interval combinations.
fn combine(
    n: u64,
    fact: &DyadicInterval,
    g: &DyadicInterval,
    nl: &DyadicInterval,
) -> (DyadicInterval, DyadicInterval) {
    let shift = DyadicInterval::from_int(n as i64 - 1);
    let c = &(&(fact - nl) + &shift) + g;
    let e2 = fact - &(&(nl - &shift) - g);
    (c, e2)
}

/// Evaluates the bound families for one configuration.
#[derive(Debug, Clone)]
pub struct BoundsLab {
    rigor: Rigor,
    params: RamanujanParams,
}

impl BoundsLab {
    pub fn new(rigor: Rigor, params: RamanujanParams) -> Self {
        BoundsLab { rigor, params }
    }

    pub fn params(&self) -> &RamanujanParams {
        &self.params
    }

    pub fn rigor(&self) -> &Rigor {
        &self.rigor
    }

    // Components run a few bits above the caller's ceiling.
    fn inner(&self) -> Rigor {
        let mut cfg = self.rigor.config;
        cfg.max_precision = cfg.max_precision.saturating_add(COMPONENT_GUARD);
        Rigor::new(cfg)
    }

    fn check(&self, n: u64, p: u32) -> Result<(), RigorError> {
        if n == 0 {
            return Err(exact::ExactError::ZeroArgument.into());
        }
        self.rigor.check_precision(p)
    }

    /// `(log2 n!, G(n), n log2 n)` each of width at most `2^-(p+4)`.
    fn components(
        &self,
        n: u64,
        p: u32,
    ) -> Result<
        (
            DyadicInterval,
            FactorialMethod,
            DyadicInterval,
            DyadicInterval,
        ),
        RigorError,
    > {
        let inner = self.inner();
        let pc = p + COMPONENT_GUARD;
        let (fact, method) = inner.log2_factorial_with_method(n, pc)?;
        let g = inner.g_enclosure(n, pc)?;
        let nl = inner.n_log2_n(n, pc)?;
        Ok((fact, method, g, nl))
    }

    /// `log2` of `n^n / 2^(n - 1 + G(n))`.
    pub fn paper_lower_bound_log2(&self, n: u64, p: u32) -> Result<DyadicInterval, RigorError> {
        self.check(n, p)?;
        let inner = self.inner();
        let pc = p + COMPONENT_GUARD;
        Ok(paper_lb(
            n,
            &inner.g_enclosure(n, pc)?,
            &inner.n_log2_n(n, pc)?,
        ))
    }

    /// `log2 C(n) = log2 n! - n log2 n + (n - 1 + G(n))`.
    pub fn c_of_n(&self, n: u64, p: u32) -> Result<DyadicInterval, RigorError> {
        self.check(n, p)?;
        let (fact, _, g, nl) = self.components(n, p)?;
        Ok(combine(n, &fact, &g, &nl).0)
    }

    /// `e2(n) = log2 n! - (n log2 n - n + 1 - G(n))`.
    pub fn error_term_e2(&self, n: u64, p: u32) -> Result<DyadicInterval, RigorError> {
        self.check(n, p)?;
        let (fact, _, g, nl) = self.components(n, p)?;
        Ok(combine(n, &fact, &g, &nl).1)
    }

    /// Repeats `eval` with more working bits until the first result fits `2^-p`.
    fn refine<T>(
        &self,
        n: u64,
        p: u32,
        eval: impl Fn(i64) -> Result<(DyadicInterval, T), RigorError>,
    ) -> Result<(DyadicInterval, T), RigorError> {
        let bits = 64 - i64::from(n.leading_zeros());
        let mut w = i64::from(p) + bits + 8;
        loop {
            let (first, rest) = eval(w)?;
            let first = first.round_out(-(i64::from(p) + 2));
            if first.width_within(i64::from(p)) {
                return Ok((first, rest));
            }
            w += 16;
        }
    }

    /// log2 of `sqrt(2 pi) n^(n+1/2) e^-n` and of the same times `e^(1/(12n))`.
    pub fn robbins_bounds_log2(
        &self,
        n: u64,
        p: u32,
    ) -> Result<(DyadicInterval, DyadicInterval), RigorError> {
        self.check(n, p)?;
        let (lower, upper) = self.refine(n, p, |w| {
            let g = -w;
            let log2_pi = rigor::log2_interval_raw(&rigor::pi(w + 8), w)?;
            let half_log2_2pi = (&log2_pi + &DyadicInterval::from_int(1)).mul_pow2(-1);
            let log2_n = rigor::log2_rational_raw(&BigRational::from_integer(n.into()), w)?;
            let log2_e = log2_e(w);
            let power = log2_n.scale_int(2 * n as i64 + 1).mul_pow2(-1);
            let lower = &(&half_log2_2pi + &power) - &log2_e.scale_int(n as i64);
            let extra = log2_e
                .div_round(&DyadicInterval::from_int(12 * n as i64), g)
                .expect("positive divisor");
            let upper = &lower + &extra;
            Ok((lower, upper))
        })?;
        let upper = upper.round_out(-(i64::from(p) + 2));
        Ok((lower, upper))
    }

    /// log2 of both sides of the sixth-root estimate with the configured `a` and `b`.
    ///
    /// The upper side inherits the width of the `b` enclosure, so it is not
    /// held to the `2^-p` contract when `b` is the printed decimal.
    pub fn ramanujan_bounds_log2(
        &self,
        n: u64,
        p: u32,
    ) -> Result<(DyadicInterval, DyadicInterval), RigorError> {
        self.check(n, p)?;
        let nn = BigInt::from(n);
        // 8n^3 + 4n^2 + n + 1/30, exact.
        let poly = BigRational::new(
            BigInt::from(240) * &nn * &nn * &nn
                + BigInt::from(120) * &nn * &nn
                + BigInt::from(30) * &nn
                + 1,
            BigInt::from(30),
        );
        let shifted_a = BigRational::from_integer(nn.clone()) + &self.params.a_const;
        let x_a = BigRational::new(BigInt::from(11), BigInt::from(11520))
            / (&shifted_a * &shifted_a * &shifted_a * &shifted_a);
        let corr_a = BigRational::one() - x_a;
        if corr_a <= BigRational::zero() || corr_a >= BigRational::one() {
            return Err(RigorError::Domain(format!(
                "lower correction factor {corr_a} outside (0, 1)"
            )));
        }
        let (lower, upper) = self.refine(n, p, |w| {
            let g = -w;
            let log2_pi = rigor::log2_interval_raw(&rigor::pi(w + 8), w)?;
            let log2_n = rigor::log2_rational_raw(&BigRational::from_integer(nn.clone()), w)?;
            let base = &log2_pi.mul_pow2(-1) + &(&log2_n - &log2_e(w)).scale_int(n as i64);
            let sixth = rigor::log2_rational_raw(&poly, w)?
                .div_round(&DyadicInterval::from_int(6), g)
                .expect("positive divisor");
            let common = &base + &sixth;
            let lower = &common + &rigor::log2_rational_raw(&corr_a, w)?;

            let nb = &self.params.b_const + &DyadicInterval::from_int(n as i64);
            let nb2 = nb.mul_round(&nb, g);
            let nb4 = nb2.mul_round(&nb2, g);
            let x_b = DyadicInterval::from_int(11)
                .div_round(&nb4.scale_int(11520), g)
                .ok_or_else(|| RigorError::Domain("n + b reaches zero".into()))?;
            let corr_b = &DyadicInterval::from_int(1) - &x_b;
            let one = DyadicRational::one();
            if !corr_b.is_positive() || corr_b.hi() >= &one {
                return Err(RigorError::Domain(format!(
                    "upper correction factor {corr_b} leaves (0, 1)"
                )));
            }
            let upper = &common + &rigor::log2_interval_raw(&corr_b, w)?;
            Ok((lower, upper))
        })?;
        Ok((lower, upper.round_out(-(i64::from(p) + 2))))
    }

    /// Every field of a row at exactly precision `p`.
    pub fn evaluate_row(&self, n: u64, p: u32) -> Result<BoundRow, RigorError> {
        self.check(n, p)?;
        let (fact, method, g, nl) = self.components(n, p)?;
        let (c_log2, e2) = combine(n, &fact, &g, &nl);
        let paper = paper_lb(n, &g, &nl);
        let (robbins_lo, robbins_hi) = self.robbins_bounds_log2(n, p)?;
        let (ramanujan_lo, ramanujan_hi) = self.ramanujan_bounds_log2(n, p)?;
        let s2 = exact::binary_digit_sum(n);

        let mut verdicts = BTreeMap::new();
        let mut paper_verdict = Verdict::judge(Side::Lower, &paper, &fact, p);
        if paper_verdict.status == VerdictStatus::Inconclusive && s2 == 1 {
            // Exact counting: log2 n! - bound = s2(n) - 1 = 0 here.
            paper_verdict.status = VerdictStatus::Holds;
            paper_verdict.equality = true;
        }
        verdicts.insert(BoundName::Paper, paper_verdict);
        verdicts.insert(
            BoundName::RobbinsLower,
            Verdict::judge(Side::Lower, &robbins_lo, &fact, p),
        );
        verdicts.insert(
            BoundName::RobbinsUpper,
            Verdict::judge(Side::Upper, &robbins_hi, &fact, p),
        );
        verdicts.insert(
            BoundName::RamanujanLower,
            Verdict::judge(Side::Lower, &ramanujan_lo, &fact, p),
        );
        verdicts.insert(
            BoundName::RamanujanUpper,
            Verdict::judge(Side::Upper, &ramanujan_hi, &fact, p),
        );
        Ok(BoundRow {
            n,
            precision_bits: p,
            factorial_method: method,
            log2_fact: fact,
            g,
            n_log2_n: nl,
            paper_lb_log2: paper,
            robbins_lo,
            robbins_hi,
            ramanujan_lo,
            ramanujan_hi,
            c_log2,
            e2,
            s2,
            verdicts,
        })
    }

    /// Row at `p`, doubling precision up to `max_escalations` times while any
    /// verdict is inconclusive. Escalation stops early at the precision ceiling.
    pub fn compare_bounds(
        &self,
        n: u64,
        p: u32,
        max_escalations: u32,
    ) -> Result<BoundRow, RigorError> {
        let mut row = self.evaluate_row(n, p)?;
        let mut prec = p;
        for _ in 0..max_escalations {
            if !row.has_inconclusive() {
                break;
            }
            let Some(next) = prec.checked_mul(2) else {
                break;
            };
            if self.rigor.check_precision(next).is_err() {
                break;
            }
            prec = next;
            row = self.evaluate_row(n, prec)?;
        }
        Ok(row)
    }
}

impl Default for BoundsLab {
    fn default() -> Self {
        BoundsLab::new(Rigor::default(), RamanujanParams::default())
    }
}

fn log2_e(w: i64) -> DyadicInterval {
    DyadicInterval::from_int(1)
        .div_round(&rigor::ln2(w + 8), -w)
        .expect("ln 2 > 0")
}
