use std::path::Path;
use std::process::{Command, Output};

use fraclog::sweep::{BOUND_COLUMNS, ERROR_TERM_COLUMNS};
use serde_json::Value;

fn fraclog(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_fraclog"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn summary(o: &Output) -> Value {
    let text = String::from_utf8_lossy(&o.stderr);
    serde_json::from_str(text.lines().last().expect("summary line")).expect("summary json")
}

fn read_csv(path: &Path) -> (Vec<String>, Vec<csv::StringRecord>) {
    let mut rdr = csv::Reader::from_path(path).unwrap();
    let header = rdr.headers().unwrap().iter().map(String::from).collect();
    let rows = rdr.records().map(Result::unwrap).collect();
    (header, rows)
}

#[test]
fn verify_theorem_examples() {
    let o = fraclog(&["verify-theorem", "--range", "1..99"]);
    assert_eq!(code(&o), 0);
    assert_eq!(summary(&o)["checked"], 50);
    assert_eq!(summary(&o)["failures"], 0);
    let o = fraclog(&["verify-theorem", "--range", "1..1"]);
    assert_eq!(summary(&o)["checked"], 1);
    let o = fraclog(&["verify-theorem", "--range", "2..2", "--odd-only"]);
    assert_eq!(code(&o), 0);
    assert_eq!(summary(&o)["checked"], 0);
}

#[test]
fn sweep_small_range_csv() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("s.csv");
    let o = fraclog(&[
        "sweep-bounds",
        "--range",
        "1..16",
        "--bits",
        "64",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let (header, rows) = read_csv(&path);
    assert_eq!(header, BOUND_COLUMNS);
    assert_eq!(rows.len(), 16);
    let eq: Vec<u64> = rows
        .iter()
        .filter(|r| &r[24] == "true")
        .map(|r| r[0].parse().unwrap())
        .collect();
    assert_eq!(eq, [1, 2, 4, 8, 16]);
    for (i, r) in rows.iter().enumerate() {
        assert_eq!(r[0].parse::<usize>().unwrap(), i + 1);
        assert_eq!(&r[21], "Holds");
        assert_eq!(&r[22], "Holds");
    }
    let s = summary(&o);
    assert_eq!(s["max_e2"]["n"], 15);
    assert_eq!(s["equality_rows"], serde_json::json!([1, 2, 4, 8, 16]));
}

#[test]
fn sweep_json_has_trailing_summary() {
    let o = fraclog(&["sweep-bounds", "--range", "1..5", "--format", "json"]);
    assert_eq!(code(&o), 0);
    let v: Value = serde_json::from_slice(&o.stdout).unwrap();
    let arr = v.as_array().unwrap();
    assert_eq!(arr.len(), 6);
    for (row, n) in arr[..5].iter().zip(1..) {
        let obj = row.as_object().unwrap();
        assert_eq!(obj.keys().count(), BOUND_COLUMNS.len());
        assert_eq!(obj["n"], n);
    }
    assert_eq!(arr[5]["summary"]["rows"], 5);
}

#[test]
fn closed_form_b_at_one_is_inconclusive() {
    let dir = tempfile::tempdir().unwrap();
    let findings = dir.path().join("f.jsonl");
    let o = fraclog(&[
        "sweep-bounds",
        "--range",
        "1..1",
        "--ramanujan-b",
        "closed-form",
        "--findings",
        findings.to_str().unwrap(),
    ]);
    assert_eq!(code(&o), 2);
    let log = std::fs::read_to_string(&findings).unwrap();
    let upper: Vec<Value> = log
        .lines()
        .map(|l| serde_json::from_str::<Value>(l).unwrap())
        .filter(|r| r["bound"] == "ramanujan_upper")
        .collect();
    assert_eq!(upper.len(), 1);
    assert_eq!(upper[0]["status"], "Inconclusive");
}

#[test]
fn printed_constants_log_violations() {
    let dir = tempfile::tempdir().unwrap();
    let findings = dir.path().join("f.jsonl");
    let o = fraclog(&[
        "sweep-bounds",
        "--range",
        "1..3",
        "--findings",
        findings.to_str().unwrap(),
    ]);
    // Only a violated n^n / 2^(n-1+G) bound changes the exit code.
    assert_eq!(code(&o), 0);
    let log = std::fs::read_to_string(&findings).unwrap();
    for line in log.lines() {
        let rec: Value = serde_json::from_str(line).unwrap();
        assert_eq!(rec["status"], "Violated");
        assert!(rec["bound_lo"].is_string() && rec["log2_fact_hi"].is_string());
    }
}

#[test]
fn error_term_range() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("e.csv");
    let o = fraclog(&[
        "error-term",
        "--range",
        "1..256",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert_eq!(code(&o), 0);
    let (header, rows) = read_csv(&path);
    assert_eq!(header, ERROR_TERM_COLUMNS);
    assert_eq!(rows.len(), 256);
    assert!(rows.iter().all(|r| &r[5] == "true"));
    assert_eq!(&rows[0][4], "0");
    assert_eq!(&rows[2][4], "1");
    assert_eq!(summary(&o)["all_contained"], true);
}

#[test]
fn g_value_output() {
    for n in ["1", "2"] {
        let o = fraclog(&["g-value", "--n", n]);
        assert_eq!(code(&o), 0);
        assert_eq!(String::from_utf8_lossy(&o.stdout).trim(), "0 (exact)");
    }
    let o = fraclog(&["g-value", "--n", "3", "--bits", "50"]);
    let text = String::from_utf8_lossy(&o.stdout);
    assert!(text.starts_with("[1.16992500144"), "{text}");
    assert!(text.contains(", 1.16992500144"), "{text}");
}

#[test]
fn usage_errors_exit_three_without_output() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.csv");
    let p = path.to_str().unwrap();
    for args in [
        vec!["sweep-bounds", "--range", "5..1", "--out", p],
        vec!["sweep-bounds", "--range", "0..4", "--out", p],
        vec!["sweep-bounds", "--range", "1..4", "--bits", "0", "--out", p],
        vec!["error-term", "--range", "x..4", "--out", p],
        vec![
            "sweep-bounds",
            "--range",
            "1..4",
            "--format",
            "xml",
            "--out",
            p,
        ],
        vec!["g-value", "--n", "0"],
        vec!["frobnicate"],
    ] {
        let o = fraclog(&args);
        assert_eq!(code(&o), 3, "{args:?}");
        assert!(!path.exists(), "{args:?}");
    }
    assert_eq!(code(&fraclog(&["--help"])), 0);
    assert_eq!(code(&fraclog(&["--version"])), 0);
}

#[test]
fn output_independent_of_workers() {
    let dir = tempfile::tempdir().unwrap();
    let mut files = Vec::new();
    for w in ["1", "3"] {
        let path = dir.path().join(format!("w{w}.json"));
        let o = fraclog(&[
            "sweep-bounds",
            "--range",
            "1..200",
            "--format",
            "json",
            "--workers",
            w,
            "--out",
            path.to_str().unwrap(),
        ]);
        assert_eq!(code(&o), 0);
        files.push(std::fs::read(&path).unwrap());
    }
    assert_eq!(files[0], files[1]);
}
