//! Range drivers behind the `fraclog` binary.
//!
//! Rows are computed in fixed-size chunks on a rayon pool and written by a
//! single ordered writer, flushed after every row. Output bytes therefore
//! depend only on the configuration, never on the worker count.

use std::collections::BTreeMap;
use std::io::{self, Write};
use std::sync::atomic::{AtomicBool, Ordering};

use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Map, Value};
use thiserror::Error;

use crate::bounds::{
    check_b_agreement, BSource, BoundName, BoundRow, BoundsLab, Family, RamanujanParams,
    VerdictStatus,
};
use crate::dyadic::DyadicInterval;
use crate::exact::{self, ExactError};
use crate::rigor::{Rigor, RigorConfig, RigorError, HARD_PRECISION_CEILING};

/// Process exit codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub enum ExitStatus {
    Clean = 0,
    Violation = 1,
    Inconclusive = 2,
    Usage = 3,
}

impl ExitStatus {
    pub fn code(self) -> i32 {
        self as i32
    }
}

#[derive(Debug, Error)]
pub enum SweepError {
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error(transparent)]
    Rigor(#[from] RigorError),
    #[error(transparent)]
    Exact(#[from] ExactError),
    #[error("output error: {0}")]
    Io(#[from] io::Error),
}

impl SweepError {
    pub fn exit_status(&self) -> ExitStatus {
        ExitStatus::Usage
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
#[cfg_attr(feature = "cli", derive(clap::ValueEnum))]
pub enum OutputFormat {
    #[default]
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ParityFilter {
    #[default]
    All,
    Odd,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SweepConfig {
    pub n_lo: u64,
    pub n_hi: u64,
    pub precision_bits: u32,
    pub max_escalations: u32,
    pub output_format: OutputFormat,
    pub parity_filter: ParityFilter,
    pub b_source: BSource,
    /// Worker threads; `None` uses rayon's default.
    pub workers: Option<usize>,
    pub rigor: RigorConfig,
}

impl Default for SweepConfig {
    fn default() -> Self {
        SweepConfig {
            n_lo: 1,
            n_hi: 1,
            precision_bits: 64,
            max_escalations: 4,
            output_format: OutputFormat::Csv,
            parity_filter: ParityFilter::All,
            b_source: BSource::Printed,
            workers: None,
            rigor: RigorConfig::default(),
        }
    }
}

impl SweepConfig {
    pub fn validate(&self) -> Result<(), SweepError> {
        if self.n_lo < 1 {
            return Err(SweepError::Config("range must start at 1 or above".into()));
        }
        if self.n_lo > self.n_hi {
            return Err(SweepError::Config(format!(
                "empty range {}..{}",
                self.n_lo, self.n_hi
            )));
        }
        if self.precision_bits < 4 {
            return Err(SweepError::Config(
                "precision must be at least 4 bits".into(),
            ));
        }
        let ceiling = self.rigor.max_precision.min(HARD_PRECISION_CEILING);
        if self.precision_bits > ceiling {
            return Err(SweepError::Config(format!(
                "precision {} exceeds ceiling {ceiling}",
                self.precision_bits
            )));
        }
        if self.workers == Some(0) {
            return Err(SweepError::Config("workers must be positive".into()));
        }
        Ok(())
    }

    /// The `n` values visited, parity filter applied.
    pub fn values(&self) -> Vec<u64> {
        (self.n_lo..=self.n_hi)
            .filter(|n| self.parity_filter == ParityFilter::All || n % 2 == 1)
            .collect()
    }

    fn pool(&self) -> Result<rayon::ThreadPool, SweepError> {
        let mut builder = rayon::ThreadPoolBuilder::new();
        if let Some(w) = self.workers {
            builder = builder.num_threads(w);
        }
        builder
            .build()
            .map_err(|e| SweepError::Config(format!("thread pool: {e}")))
    }
}

/// Rows computed per parallel batch.
const CHUNK: usize = 64;

/// Column order of the bound sweep CSV.
pub const BOUND_COLUMNS: [&str; 25] = [
    "n",
    "precision_bits",
    "log2_fact_lo",
    "log2_fact_hi",
    "g_lo",
    "g_hi",
    "paper_lb_lo",
    "paper_lb_hi",
    "robbins_lo_lo",
    "robbins_lo_hi",
    "robbins_hi_lo",
    "robbins_hi_hi",
    "ramanujan_lo_lo",
    "ramanujan_lo_hi",
    "ramanujan_hi_lo",
    "ramanujan_hi_hi",
    "c_log2_lo",
    "c_log2_hi",
    "e2_lo",
    "e2_hi",
    "s2",
    "verdict_paper",
    "verdict_robbins",
    "verdict_ramanujan",
    "equality_flag",
];

pub const ERROR_TERM_COLUMNS: [&str; 6] = [
    "n",
    "precision_bits",
    "e2_lo",
    "e2_hi",
    "s2_minus_1",
    "contains",
];

pub const THEOREM_COLUMNS: [&str; 5] = [
    "a",
    "expected",
    "floor_formula",
    "even_enumeration",
    "pair_enumeration",
];

/// A row value: text cells go to CSV verbatim and to JSON as strings.
#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Int(u64),
    Text(String),
    Bool(bool),
}

impl Cell {
    fn csv(&self) -> String {
        match self {
            Cell::Int(v) => v.to_string(),
            Cell::Text(s) => s.clone(),
            Cell::Bool(b) => b.to_string(),
        }
    }

    fn json(&self) -> Value {
        match self {
            Cell::Int(v) => json!(v),
            Cell::Text(s) => json!(s),
            Cell::Bool(b) => json!(b),
        }
    }
}

fn push_interval(cells: &mut Vec<Cell>, iv: &DyadicInterval) {
    cells.push(Cell::Text(iv.lo().to_decimal_string()));
    cells.push(Cell::Text(iv.hi().to_decimal_string()));
}

/// Cells of a bound row in [`BOUND_COLUMNS`] order.
pub fn bound_row_cells(row: &BoundRow) -> Vec<Cell> {
    let mut cells = vec![Cell::Int(row.n), Cell::Int(u64::from(row.precision_bits))];
    for iv in [
        &row.log2_fact,
        &row.g,
        &row.paper_lb_log2,
        &row.robbins_lo,
        &row.robbins_hi,
        &row.ramanujan_lo,
        &row.ramanujan_hi,
        &row.c_log2,
        &row.e2,
    ] {
        push_interval(&mut cells, iv);
    }
    cells.push(Cell::Int(u64::from(row.s2)));
    for family in Family::ALL {
        cells.push(Cell::Text(row.family_status(family).to_string()));
    }
    cells.push(Cell::Bool(row.equality_flag()));
    cells
}

/// Streaming writer for one table, flushed per row.
pub struct TableWriter<'a> {
    out: &'a mut dyn Write,
    format: OutputFormat,
    columns: &'static [&'static str],
    rows: u64,
}

impl<'a> TableWriter<'a> {
    pub fn start(
        out: &'a mut dyn Write,
        format: OutputFormat,
        columns: &'static [&'static str],
    ) -> io::Result<Self> {
        match format {
            OutputFormat::Csv => writeln!(out, "{}", columns.join(","))?,
            OutputFormat::Json => out.write_all(b"[")?,
        }
        out.flush()?;
        Ok(TableWriter {
            out,
            format,
            columns,
            rows: 0,
        })
    }

    pub fn row(&mut self, cells: &[Cell]) -> io::Result<()> {
        debug_assert_eq!(cells.len(), self.columns.len());
        match self.format {
            OutputFormat::Csv => {
                let line: Vec<String> = cells.iter().map(Cell::csv).collect();
                writeln!(self.out, "{}", line.join(","))?;
            }
            OutputFormat::Json => {
                let obj: Map<String, Value> = self
                    .columns
                    .iter()
                    .zip(cells)
                    .map(|(k, v)| (k.to_string(), v.json()))
                    .collect();
                let sep = if self.rows == 0 { "\n" } else { ",\n" };
                write!(self.out, "{sep}{}", Value::Object(obj))?;
            }
        }
        self.rows += 1;
        self.out.flush()
    }

    /// Closes the table; JSON gets the summary as its trailing element.
    pub fn finish(self, summary: &Value) -> io::Result<()> {
        if self.format == OutputFormat::Json {
            let sep = if self.rows == 0 { "\n" } else { ",\n" };
            write!(self.out, "{sep}{}\n]\n", json!({ "summary": summary }))?;
        }
        self.out.flush()
    }
}

/// Result of a run: exit status plus the summary record.
#[derive(Debug, Clone)]
pub struct RunOutcome {
    pub status: ExitStatus,
    pub summary: Value,
}

/// Computes `f` over `values` in ordered chunks, handing each result to `sink`.
/// Returns `false` if interrupted before the end.
fn ordered_map<T: Send>(
    pool: &rayon::ThreadPool,
    values: &[u64],
    interrupt: &AtomicBool,
    f: impl Fn(u64) -> Result<T, SweepError> + Sync,
    mut sink: impl FnMut(T) -> Result<(), SweepError>,
) -> Result<bool, SweepError> {
    for chunk in values.chunks(CHUNK) {
        if interrupt.load(Ordering::SeqCst) {
            return Ok(false);
        }
        let results: Vec<Result<T, SweepError>> =
            pool.install(|| chunk.par_iter().map(|&n| f(n)).collect());
        for r in results {
            sink(r?)?;
        }
    }
    Ok(true)
}

#[derive(Debug, Clone, Serialize)]
struct Extremum {
    n: u64,
    lo: String,
    hi: String,
}

#[derive(Default)]
struct Tracker {
    max: Option<(u64, DyadicInterval)>,
    min: Option<(u64, DyadicInterval)>,
}

impl Tracker {
    // Ordered by upper endpoint for the max and lower endpoint for the min;
    // ties keep the smallest n.
    fn observe(&mut self, n: u64, iv: &DyadicInterval) {
        if self.max.as_ref().is_none_or(|(_, m)| iv.hi() > m.hi()) {
            self.max = Some((n, iv.clone()));
        }
        if self.min.as_ref().is_none_or(|(_, m)| iv.lo() < m.lo()) {
            self.min = Some((n, iv.clone()));
        }
    }

    fn render(entry: &Option<(u64, DyadicInterval)>) -> Value {
        match entry {
            Some((n, iv)) => json!(Extremum {
                n: *n,
                lo: iv.lo().to_decimal_string(),
                hi: iv.hi().to_decimal_string(),
            }),
            None => Value::Null,
        }
    }
}

/// Bound sweep: one row per `n`, ascending. `findings` receives one JSON
/// line per non-holding verdict with its certificate.
pub fn sweep_bounds(
    cfg: &SweepConfig,
    out: &mut dyn Write,
    mut findings: Option<&mut dyn Write>,
    interrupt: &AtomicBool,
) -> Result<RunOutcome, SweepError> {
    cfg.validate()?;
    let lab = BoundsLab::new(Rigor::new(cfg.rigor), RamanujanParams::new(cfg.b_source));
    let pool = cfg.pool()?;
    let values = cfg.values();
    let mut table = TableWriter::start(out, cfg.output_format, &BOUND_COLUMNS)?;

    let mut family_counts: BTreeMap<&str, BTreeMap<String, u64>> = BTreeMap::new();
    let mut side_counts: BTreeMap<&str, BTreeMap<String, u64>> = BTreeMap::new();
    for f in Family::ALL {
        family_counts.insert(f.as_str(), BTreeMap::new());
    }
    for b in BoundName::ALL {
        side_counts.insert(b.as_str(), BTreeMap::new());
    }
    let mut equality_rows = Vec::new();
    let mut violated: BTreeMap<&str, Vec<u64>> = BTreeMap::new();
    let mut escalated = 0u64;
    let mut e2_track = Tracker::default();
    let mut c_track = Tracker::default();
    let mut rows = 0u64;
    let mut paper_violated = false;
    let mut inconclusive = false;

    let completed = ordered_map(
        &pool,
        &values,
        interrupt,
        |n| Ok(lab.compare_bounds(n, cfg.precision_bits, cfg.max_escalations)?),
        |row| {
            table.row(&bound_row_cells(&row))?;
            rows += 1;
            if row.precision_bits != cfg.precision_bits {
                escalated += 1;
            }
            for f in Family::ALL {
                *family_counts
                    .get_mut(f.as_str())
                    .expect("seeded")
                    .entry(row.family_status(f).to_string())
                    .or_default() += 1;
            }
            for (name, v) in &row.verdicts {
                *side_counts
                    .get_mut(name.as_str())
                    .expect("seeded")
                    .entry(v.status.to_string())
                    .or_default() += 1;
                match v.status {
                    VerdictStatus::Violated => {
                        violated.entry(name.as_str()).or_default().push(row.n);
                        if *name == BoundName::Paper {
                            paper_violated = true;
                        }
                    }
                    VerdictStatus::Inconclusive => inconclusive = true,
                    VerdictStatus::Holds => {}
                }
                if v.status != VerdictStatus::Holds {
                    if let Some(w) = findings.as_mut() {
                        let record = json!({
                            "n": row.n,
                            "bound": name.as_str(),
                            "status": v.status.to_string(),
                            "separation": v.separation,
                            "precision_bits": v.precision_used,
                            "bound_lo": v.certificate.0.lo().to_decimal_string(),
                            "bound_hi": v.certificate.0.hi().to_decimal_string(),
                            "log2_fact_lo": v.certificate.1.lo().to_decimal_string(),
                            "log2_fact_hi": v.certificate.1.hi().to_decimal_string(),
                        });
                        writeln!(w, "{record}")?;
                        w.flush()?;
                    }
                }
            }
            if row.equality_flag() {
                equality_rows.push(row.n);
            }
            e2_track.observe(row.n, &row.e2);
            c_track.observe(row.n, &row.c_log2);
            Ok(())
        },
    )?;
    let interrupted = !completed;

    let status = if paper_violated {
        ExitStatus::Violation
    } else if inconclusive || interrupted {
        ExitStatus::Inconclusive
    } else {
        ExitStatus::Clean
    };
    let violations: BTreeMap<&str, Value> = violated
        .iter()
        .map(|(k, ns)| {
            (
                *k,
                json!({ "count": ns.len(), "first": ns.first(), "last": ns.last() }),
            )
        })
        .collect();
    let summary = json!({
        "command": "sweep-bounds",
        "range": [cfg.n_lo, cfg.n_hi],
        "precision_bits": cfg.precision_bits,
        "max_escalations": cfg.max_escalations,
        "ramanujan_b": cfg.b_source,
        "rows": rows,
        "escalated_rows": escalated,
        "verdicts": family_counts,
        "verdicts_by_side": side_counts,
        "violations": violations,
        "equality_rows": equality_rows,
        "max_e2": Tracker::render(&e2_track.max),
        "min_e2": Tracker::render(&e2_track.min),
        "max_c_log2": Tracker::render(&c_track.max),
        "b_agreement": check_b_agreement(),
        "interrupted": interrupted,
        "exit_code": status.code(),
    });
    table.finish(&summary)?;
    Ok(RunOutcome { status, summary })
}

/// `e2(n)` table with the digit-sum containment check.
pub fn error_term(
    cfg: &SweepConfig,
    out: &mut dyn Write,
    interrupt: &AtomicBool,
) -> Result<RunOutcome, SweepError> {
    cfg.validate()?;
    let lab = BoundsLab::new(Rigor::new(cfg.rigor), RamanujanParams::new(cfg.b_source));
    let pool = cfg.pool()?;
    let values = cfg.values();
    let mut table = TableWriter::start(out, cfg.output_format, &ERROR_TERM_COLUMNS)?;
    let mut failures = Vec::new();
    let mut track = Tracker::default();
    let mut max_s2 = 0u32;
    let mut rows = 0u64;

    let completed = ordered_map(
        &pool,
        &values,
        interrupt,
        |n| Ok((n, lab.error_term_e2(n, cfg.precision_bits)?)),
        |(n, e2)| {
            let target = i64::from(exact::binary_digit_sum(n)) - 1;
            let inside = e2.integers_inside();
            let contains = inside.len() == 1 && inside[0] == target.into();
            if !contains {
                failures.push(n);
            }
            max_s2 = max_s2.max(exact::binary_digit_sum(n));
            track.observe(n, &e2);
            rows += 1;
            let mut cells = vec![Cell::Int(n), Cell::Int(u64::from(cfg.precision_bits))];
            push_interval(&mut cells, &e2);
            cells.push(Cell::Int(target as u64));
            cells.push(Cell::Bool(contains));
            table.row(&cells)?;
            Ok(())
        },
    )?;
    let interrupted = !completed;
    let status = if !failures.is_empty() {
        ExitStatus::Violation
    } else if interrupted {
        ExitStatus::Inconclusive
    } else {
        ExitStatus::Clean
    };
    let summary = json!({
        "command": "error-term",
        "range": [cfg.n_lo, cfg.n_hi],
        "precision_bits": cfg.precision_bits,
        "rows": rows,
        "all_contained": failures.is_empty(),
        "failures": failures,
        "max_e2": Tracker::render(&track.max),
        "min_e2": Tracker::render(&track.min),
        "max_s2_minus_1": max_s2.saturating_sub(1),
        "interrupted": interrupted,
        "exit_code": status.code(),
    });
    table.finish(&summary)?;
    Ok(RunOutcome { status, summary })
}

/// Three-way identity check over the odd values of the range.
pub fn verify_theorem(cfg: &SweepConfig, out: &mut dyn Write) -> Result<RunOutcome, SweepError> {
    if cfg.n_lo < 1 || cfg.n_lo > cfg.n_hi {
        return Err(SweepError::Config(format!(
            "invalid range {}..{}",
            cfg.n_lo, cfg.n_hi
        )));
    }
    let pool = cfg.pool()?;
    let report = pool.install(|| exact::verify_theorem_range(cfg.n_lo, cfg.n_hi))?;
    let mut table = TableWriter::start(out, cfg.output_format, &THEOREM_COLUMNS)?;
    for f in &report.failures {
        table.row(&[
            Cell::Int(f.a),
            Cell::Int(f.expected),
            Cell::Int(f.floor_formula),
            Cell::Int(f.even_enumeration),
            Cell::Int(f.pair_enumeration),
        ])?;
    }
    let status = if report.failures.is_empty() {
        ExitStatus::Clean
    } else {
        ExitStatus::Violation
    };
    let summary = json!({
        "command": "verify-theorem",
        "range": [cfg.n_lo, cfg.n_hi],
        "checked": report.checked,
        "failures": report.failures.len(),
        "exit_code": status.code(),
    });
    table.finish(&summary)?;
    Ok(RunOutcome { status, summary })
}

/// Decimal rendering of `G(n)`: `"v (exact)"` for points, otherwise both
/// endpoints rounded outward with enough digits to resolve the width.
pub fn g_value_text(n: u64, p: u32, rigor: RigorConfig) -> Result<String, SweepError> {
    let g = Rigor::new(rigor).g_enclosure(n, p)?;
    if g.is_point() {
        return Ok(format!("{} (exact)", g.lo().to_decimal_string()));
    }
    // 2^-(p+3) needs about 0.302 (p+3) decimal digits.
    let digits = (u64::from(p) + 3) * 302 / 1000 + 2;
    Ok(format!(
        "[{}, {}] (width < 2^-{p})",
        g.lo().to_decimal_rounded(digits as u32, false),
        g.hi().to_decimal_rounded(digits as u32, true)
    ))
}
