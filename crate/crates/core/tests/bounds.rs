mod common;

use common::{log2_oracle, near_decimal};
use fraclog::bounds::{BSource, BoundName, BoundsLab, Family, RamanujanParams, VerdictStatus};
use fraclog::exact::{binary_digit_sum, floor_log2_ratio};
use fraclog::{DyadicInterval, DyadicRational, Rigor, RigorConfig, RigorError};
use rand::{rngs::StdRng, Rng, SeedableRng};

const LOG2_3: &str = "1.58496250072115618145373894394781650875981440769248106045575";
const LOG2_ROBBINS_1_LO: &str = "-0.116946976152804008338285033447888469917407490771465169432055";
const LOG2_ROBBINS_1_HI: &str = "0.00327761058794294227504202330226920820147967207461699174589897";
const LOG2_ROBBINS_10_LO: &str = "21.7790426521638299780607468471736791398235085486097578499238";

fn lab() -> BoundsLab {
    BoundsLab::default()
}

fn contains_int(iv: &DyadicInterval, k: i64) -> bool {
    iv.contains(&DyadicRational::from_int(k))
}

#[test]
fn lower_bound_examples() {
    let l = lab();
    assert_eq!(
        l.paper_lower_bound_log2(1, 40).unwrap(),
        DyadicInterval::zero()
    );
    assert_eq!(
        l.paper_lower_bound_log2(2, 40).unwrap(),
        DyadicInterval::from_int(1)
    );
    let b3 = l.paper_lower_bound_log2(3, 50).unwrap();
    assert!(b3.width_within(50));
    assert!(near_decimal(&b3, LOG2_3));
}

#[test]
fn c_of_n_examples() {
    let l = lab();
    for (n, c) in [(1, 0), (2, 0), (3, 1), (4, 0)] {
        let iv = l.c_of_n(n, 50).unwrap();
        assert!(contains_int(&iv, c), "n = {n}: {iv}");
        assert!(iv.width_within(50));
    }
}

#[test]
fn e2_examples() {
    let l = lab();
    for (n, e) in [(1, 0), (3, 1), (7, 2)] {
        let iv = l.error_term_e2(n, 50).unwrap();
        assert!(contains_int(&iv, e), "n = {n}: {iv}");
    }
}

// Direct evaluation from the squaring oracle, sharing no code with the lab.
fn direct_e2(n: u64, bits: u32) -> DyadicInterval {
    let mut acc = DyadicInterval::zero();
    for m in 2..=n {
        acc = &acc + &log2_oracle(m, 1, bits);
    }
    let nl = log2_oracle(n, 1, bits).scale_int(n as i64);
    let mut g = DyadicInterval::zero();
    for m in 1..=n {
        let k = floor_log2_ratio(n, m).unwrap() as i64;
        g = &g + &(&log2_oracle(n, m, bits) - &DyadicInterval::from_int(k));
    }
    let shift = DyadicInterval::from_int(n as i64 - 1);
    &acc - &(&(&nl - &shift) - &g)
}

#[test]
fn e2_hypothesis_direct_small() {
    for n in 1u64..=48 {
        let e = direct_e2(n, 48);
        let target = i64::from(binary_digit_sum(n)) - 1;
        assert!(contains_int(&e, target), "n = {n}: {e}");
        assert_eq!(e.integers_inside().len(), 1, "n = {n}");
    }
}

#[test]
fn e2_hypothesis_up_to_512() {
    let l = lab();
    for n in 1u64..=512 {
        let e = l.error_term_e2(n, 64).unwrap();
        let target = i64::from(binary_digit_sum(n)) - 1;
        assert!(contains_int(&e, target), "n = {n}: {e}");
        assert!(
            !contains_int(&e, target - 1) && !contains_int(&e, target + 1),
            "n = {n}"
        );
    }
}

#[test]
fn robbins_examples() {
    let l = lab();
    let (lo, hi) = l.robbins_bounds_log2(1, 60).unwrap();
    assert!(near_decimal(&lo, LOG2_ROBBINS_1_LO), "{lo}");
    assert!(near_decimal(&hi, LOG2_ROBBINS_1_HI), "{hi}");
    assert!(lo.strictly_below(&DyadicInterval::zero()));
    assert!(DyadicInterval::zero().strictly_below(&hi));

    let (lo, hi) = l.robbins_bounds_log2(10, 60).unwrap();
    assert!(near_decimal(&lo, LOG2_ROBBINS_10_LO), "{lo}");
    let fact = Rigor::default().log2_factorial_enclosure(10, 60).unwrap();
    assert!(lo.strictly_below(&fact) && fact.strictly_below(&hi));
    for n in [1, 2, 17, 1000, 4999] {
        let (lo, hi) = l.robbins_bounds_log2(n, 64).unwrap();
        assert!(lo.width_within(64) && hi.width_within(64), "n = {n}");
    }
}

#[test]
fn ramanujan_examples() {
    let l = lab();
    let row = l.compare_bounds(10, 64, 4).unwrap();
    for name in [BoundName::RamanujanLower, BoundName::RamanujanUpper] {
        assert_ne!(row.verdicts[&name].status, VerdictStatus::Inconclusive);
    }
    assert!(row.ramanujan_lo.width_within(64));
    let row1 = l.compare_bounds(1, 64, 4).unwrap();
    let v = &row1.verdicts[&BoundName::RamanujanLower];
    assert_ne!(v.status, VerdictStatus::Inconclusive);
    assert!(!v.certificate.0.intersects(&v.certificate.1));
}

#[test]
fn ramanujan_closed_form_b_gives_point_at_one() {
    let l = BoundsLab::new(Rigor::default(), RamanujanParams::new(BSource::ClosedForm));
    let (_, hi) = l.ramanujan_bounds_log2(1, 64).unwrap();
    assert!(hi.width_within(64));
    assert!(hi.contains(&DyadicRational::zero()));
}

#[test]
fn compare_examples() {
    let l = lab();
    let r1 = l.compare_bounds(1, 64, 4).unwrap();
    assert_eq!(r1.family_status(Family::Paper), VerdictStatus::Holds);
    assert_eq!(r1.family_status(Family::Robbins), VerdictStatus::Holds);
    assert!(r1.verdicts[&BoundName::Paper].equality);

    let r2 = l.compare_bounds(2, 64, 4).unwrap();
    assert!(r2.verdicts[&BoundName::Paper].equality);
    assert!(contains_int(&r2.c_log2, 0));

    let r3 = l.compare_bounds(3, 64, 4).unwrap();
    let v = &r3.verdicts[&BoundName::Paper];
    assert_eq!(v.status, VerdictStatus::Holds);
    assert!(!v.equality);
    assert!(contains_int(&r3.c_log2, 1));
}

#[test]
fn equality_cases_shrink_with_precision() {
    let l = lab();
    for e in 0..=12 {
        let n = 1u64 << e;
        for p in [24u32, 64, 160] {
            let c = l.c_of_n(n, p).unwrap();
            assert!(contains_int(&c, 0), "n = {n} p = {p}");
            assert!(c.width_within(i64::from(p)), "n = {n} p = {p}");
        }
        let row = l.compare_bounds(n, 64, 4).unwrap();
        let v = &row.verdicts[&BoundName::Paper];
        assert!(v.equality && v.status == VerdictStatus::Holds, "n = {n}");
    }
}

#[test]
fn rows_are_self_consistent() {
    let l = lab();
    for n in (1..=900).step_by(37) {
        assert!(
            l.evaluate_row(n, 64).unwrap().is_self_consistent(),
            "n = {n}"
        );
    }
}

#[test]
fn verdict_audit_at_double_precision() {
    let l = lab();
    let mut rng = StdRng::seed_from_u64(0x5eed);
    for _ in 0..50 {
        let n = rng.gen_range(1..=5000u64);
        let base = l.evaluate_row(n, 64).unwrap();
        let fine = l.evaluate_row(n, 128).unwrap();
        for (name, v) in &base.verdicts {
            let w = &fine.verdicts[name];
            let flipped = matches!(
                (v.status, w.status),
                (VerdictStatus::Holds, VerdictStatus::Violated)
                    | (VerdictStatus::Violated, VerdictStatus::Holds)
            );
            assert!(!flipped, "n = {n} {}", name.as_str());
        }
    }
}

#[test]
fn errors_are_reported() {
    let l = lab();
    assert!(l.paper_lower_bound_log2(0, 32).is_err());
    assert!(matches!(
        l.c_of_n(5, 0),
        Err(RigorError::PrecisionTooLow(_))
    ));
    let small = BoundsLab::new(
        Rigor::new(RigorConfig {
            max_precision: 100,
            ..RigorConfig::default()
        }),
        RamanujanParams::default(),
    );
    assert!(matches!(
        small.error_term_e2(5, 200),
        Err(RigorError::PrecisionCeiling { .. })
    ));
    // Escalation stops at the ceiling instead of failing.
    assert!(small.compare_bounds(5, 64, 4).is_ok());
}
