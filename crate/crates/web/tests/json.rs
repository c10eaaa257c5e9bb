use fraclog_web::{bound_row_json, e2_series_json, g_value_json, MAX_N, MAX_SERIES};
use serde_json::Value;

fn parse(s: String) -> Value {
    serde_json::from_str(&s).unwrap()
}

#[test]
fn g_value_reports_interval_and_terms() {
    let v = parse(g_value_json(3, 50).unwrap());
    assert!(v["g"]["lo"].as_str().unwrap().starts_with("1.16992500144"));
    assert_eq!(v["terms"].as_array().unwrap().len(), 3);
    assert_eq!(v["terms"][1]["exact_zero"], false);
    assert_eq!(v["terms"][2]["exact_zero"], true);
    let v = parse(g_value_json(2, 50).unwrap());
    assert_eq!(v["g"]["point"], true);
    assert!(v["terms"]
        .as_array()
        .unwrap()
        .iter()
        .all(|t| t["exact_zero"] == true));
}

#[test]
fn bound_row_verdicts() {
    let v = parse(bound_row_json(4, 64, "printed").unwrap());
    assert_eq!(v["factorial"], 24);
    assert_eq!(v["verdicts"]["paper"]["status"], "Holds");
    assert_eq!(v["verdicts"]["paper"]["equality"], true);
    assert_eq!(v["verdicts"]["robbins_lower"]["status"], "Holds");
    let v = parse(bound_row_json(30, 64, "closed-form").unwrap());
    assert!(v["factorial"].is_null());
    assert_eq!(v["verdicts"]["paper"]["equality"], false);
}

#[test]
fn e2_series_contains_digit_sum() {
    let v = parse(e2_series_json(1, 64, 64).unwrap());
    let pts = v.as_array().unwrap();
    assert_eq!(pts.len(), 64);
    assert!(pts.iter().all(|p| p["contains"] == true));
    assert_eq!(pts[62]["s2_minus_1"], 5);
}

#[test]
fn inputs_are_validated() {
    assert!(g_value_json(0, 10).is_err());
    assert!(g_value_json(MAX_N + 1, 10).is_err());
    assert!(g_value_json(5, 0).is_err());
    assert!(bound_row_json(5, 64, "other").is_err());
    assert!(e2_series_json(10, 1, 64).is_err());
    assert!(e2_series_json(1, MAX_SERIES + 1, 64).is_err());
}
