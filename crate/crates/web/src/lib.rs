//! wasm-bindgen entry points for the static demo page.
//!
//! Each export returns a JSON string. The `*_json` functions hold the logic
//! so they can be tested natively; the exports only convert errors.

use fraclog::bounds::{BSource, BoundName, BoundsLab, RamanujanParams};
use fraclog::exact::binary_digit_sum;
use fraclog::{DyadicInterval, Rigor};
use serde_json::{json, Value};
use wasm_bindgen::prelude::*;

/// Largest `n` the page will evaluate; keeps a single call well under a second.
pub const MAX_N: u32 = 20_000;
/// Largest number of points in one e2 series.
pub const MAX_SERIES: u32 = 4_000;
/// Largest precision accepted from the page.
pub const MAX_BITS: u32 = 1024;
/// Per-term detail is only returned up to this `n`.
const MAX_TERMS: u32 = 512;
const DIGITS: u32 = 24;

fn check(n: u32, bits: u32) -> Result<(), String> {
    if n == 0 || n > MAX_N {
        return Err(format!("n must be in 1..={MAX_N}"));
    }
    if bits == 0 || bits > MAX_BITS {
        return Err(format!("bits must be in 1..={MAX_BITS}"));
    }
    Ok(())
}

fn interval(iv: &DyadicInterval) -> Value {
    json!({
        "lo": iv.lo().to_decimal_rounded(DIGITS, false),
        "hi": iv.hi().to_decimal_rounded(DIGITS, true),
        "mid": iv.midpoint_f64(),
        "point": iv.is_point(),
    })
}

/// Certified `G(n)` plus the per-term fractional parts for small `n`.
pub fn g_value_json(n: u32, bits: u32) -> Result<String, String> {
    check(n, bits)?;
    let rigor = Rigor::default();
    let g = rigor
        .g_enclosure(n.into(), bits)
        .map_err(|e| e.to_string())?;
    let terms: Vec<Value> = if n <= MAX_TERMS {
        (1..=u64::from(n))
            .map(|m| {
                let t = rigor
                    .frac_log2_enclosure(n.into(), m, bits)
                    .map_err(|e| e.to_string())?;
                Ok(json!({ "m": m, "k": t.k, "frac": t.frac.midpoint_f64(), "exact_zero": t.exact_zero }))
            })
            .collect::<Result<_, String>>()?
    } else {
        Vec::new()
    };
    Ok(json!({ "n": n, "bits": bits, "g": interval(&g), "terms": terms }).to_string())
}

fn parse_b(b: &str) -> Result<BSource, String> {
    match b {
        "printed" => Ok(BSource::Printed),
        "closed-form" => Ok(BSource::ClosedForm),
        other => Err(format!("unknown b source {other:?}")),
    }
}

/// One bound-comparison row with verdicts, after precision escalation.
pub fn bound_row_json(n: u32, bits: u32, b: &str) -> Result<String, String> {
    check(n, bits)?;
    let lab = BoundsLab::new(Rigor::default(), RamanujanParams::new(parse_b(b)?));
    let row = lab
        .compare_bounds(n.into(), bits, 4)
        .map_err(|e| e.to_string())?;
    let verdicts: serde_json::Map<String, Value> = BoundName::ALL
        .iter()
        .map(|name| {
            let v = &row.verdicts[name];
            (
                name.as_str().to_string(),
                json!({
                    "status": v.status.to_string(),
                    "separation": v.separation,
                    "equality": v.equality,
                    "precision_bits": v.precision_used,
                }),
            )
        })
        .collect();
    // Linear values are only meaningful to show for small n.
    let factorial = (n <= 20).then(|| (1..=u64::from(n)).product::<u64>());
    Ok(json!({
        "n": n,
        "precision_bits": row.precision_bits,
        "factorial": factorial,
        "log2_fact": interval(&row.log2_fact),
        "g": interval(&row.g),
        "paper_lb": interval(&row.paper_lb_log2),
        "robbins_lo": interval(&row.robbins_lo),
        "robbins_hi": interval(&row.robbins_hi),
        "ramanujan_lo": interval(&row.ramanujan_lo),
        "ramanujan_hi": interval(&row.ramanujan_hi),
        "c_log2": interval(&row.c_log2),
        "e2": interval(&row.e2),
        "s2": row.s2,
        "verdicts": verdicts,
    })
    .to_string())
}

/// `e2(n)` enclosures over `lo..=hi` next to `s2(n) - 1`.
pub fn e2_series_json(lo: u32, hi: u32, bits: u32) -> Result<String, String> {
    check(lo, bits)?;
    check(hi, bits)?;
    if lo > hi || hi - lo >= MAX_SERIES {
        return Err(format!(
            "range must be ascending with at most {MAX_SERIES} points"
        ));
    }
    let lab = BoundsLab::default();
    let points: Vec<Value> = (lo..=hi)
        .map(|n| {
            let e2 = lab
                .error_term_e2(n.into(), bits)
                .map_err(|e| e.to_string())?;
            let target = i64::from(binary_digit_sum(n.into())) - 1;
            let inside = e2.integers_inside();
            Ok(json!({
                "n": n,
                "lo": e2.lo().to_f64(),
                "hi": e2.hi().to_f64(),
                "s2_minus_1": target,
                "contains": inside.len() == 1 && inside[0] == target.into(),
            }))
        })
        .collect::<Result<_, String>>()?;
    Ok(Value::Array(points).to_string())
}

#[wasm_bindgen]
pub fn g_value(n: u32, bits: u32) -> Result<String, JsError> {
    g_value_json(n, bits).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub fn bound_row(n: u32, bits: u32, b: &str) -> Result<String, JsError> {
    bound_row_json(n, bits, b).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub fn e2_series(lo: u32, hi: u32, bits: u32) -> Result<String, JsError> {
    e2_series_json(lo, hi, bits).map_err(|e| JsError::new(&e))
}
