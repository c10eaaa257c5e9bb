use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;
use std::sync::atomic::{AtomicBool, Ordering};
use std::sync::Arc;

use clap::{Args, Parser, Subcommand, ValueEnum};

use fraclog::bounds::BSource;
use fraclog::rigor::RigorConfig;
use fraclog::sweep::{
    self, ExitStatus, OutputFormat, ParityFilter, RunOutcome, SweepConfig, SweepError,
};

#[derive(Parser)]
#[command(
    name = "fraclog",
    version,
    about = "Floor-log2 identities, certified G(n), and factorial bound sweeps"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check the odd-index floor-log2 identity against both counting oracles.
    VerifyTheorem(RangeArgs),
    /// Compare the factorial bounds against certified log2 n! for every n.
    SweepBounds(SweepArgs),
    /// Tabulate the measured error term e2(n) against s2(n) - 1.
    ErrorTerm(SweepArgs),
    /// Print a certified enclosure of G(n).
    GValue {
        #[arg(long)]
        n: u64,
        #[arg(long = "bits", default_value_t = 64)]
        bits: u32,
    },
}

#[derive(Args, Clone)]
struct RangeArgs {
    /// Inclusive range, `LO..HI`.
    #[arg(long, value_parser = parse_range)]
    range: (u64, u64),
    #[arg(long, value_enum, default_value_t = OutputFormat::Csv)]
    format: OutputFormat,
    #[arg(long)]
    out: Option<PathBuf>,
    /// Only odd values (always on for verify-theorem).
    #[arg(long)]
    odd_only: bool,
    /// Worker threads; output does not depend on this.
    #[arg(long)]
    workers: Option<usize>,
}

#[derive(Args, Clone)]
struct SweepArgs {
    #[command(flatten)]
    range: RangeArgs,
    #[arg(long = "bits", default_value_t = 64)]
    bits: u32,
    #[arg(long, default_value_t = 4)]
    max_escalations: u32,
    #[arg(long = "ramanujan-b", value_enum, default_value_t = BChoice::Printed)]
    ramanujan_b: BChoice,
    /// JSON-lines log of every non-holding verdict with its certificate.
    #[arg(long)]
    findings: Option<PathBuf>,
    #[arg(long, default_value_t = RigorConfig::default().max_precision)]
    max_precision: u32,
}

#[derive(Clone, Copy, ValueEnum)]
enum BChoice {
    Printed,
    ClosedForm,
}

fn parse_range(s: &str) -> Result<(u64, u64), String> {
    let (lo, hi) = s
        .split_once("..")
        .ok_or_else(|| format!("expected LO..HI, got {s:?}"))?;
    let lo: u64 = lo.trim().parse().map_err(|e| format!("bad LO: {e}"))?;
    let hi: u64 = hi.trim().parse().map_err(|e| format!("bad HI: {e}"))?;
    Ok((lo, hi))
}

fn config(range: &RangeArgs) -> SweepConfig {
    SweepConfig {
        n_lo: range.range.0,
        n_hi: range.range.1,
        output_format: range.format,
        parity_filter: if range.odd_only {
            ParityFilter::Odd
        } else {
            ParityFilter::All
        },
        workers: range.workers,
        ..SweepConfig::default()
    }
}

fn sweep_config(args: &SweepArgs) -> SweepConfig {
    let mut cfg = config(&args.range);
    cfg.precision_bits = args.bits;
    cfg.max_escalations = args.max_escalations;
    cfg.b_source = match args.ramanujan_b {
        BChoice::Printed => BSource::Printed,
        BChoice::ClosedForm => BSource::ClosedForm,
    };
    cfg.rigor.max_precision = args.max_precision;
    cfg
}

fn open_out(path: &Option<PathBuf>) -> io::Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p)?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn interrupt_flag() -> Arc<AtomicBool> {
    let flag = Arc::new(AtomicBool::new(false));
    let handler_flag = Arc::clone(&flag);
    // A second Ctrl-C is not special: the current chunk still finishes.
    let _ = ctrlc::set_handler(move || handler_flag.store(true, Ordering::SeqCst));
    flag
}

fn run(cli: Cli) -> Result<RunOutcome, SweepError> {
    match cli.command {
        Command::VerifyTheorem(range) => {
            let mut cfg = config(&range);
            cfg.parity_filter = ParityFilter::Odd;
            if cfg.n_lo < 1 || cfg.n_lo > cfg.n_hi {
                return Err(SweepError::Config(format!(
                    "invalid range {}..{}",
                    cfg.n_lo, cfg.n_hi
                )));
            }
            let mut out = open_out(&range.out)?;
            sweep::verify_theorem(&cfg, &mut out)
        }
        Command::SweepBounds(args) => {
            let cfg = sweep_config(&args);
            cfg.validate()?;
            let flag = interrupt_flag();
            let mut out = open_out(&args.range.out)?;
            let mut findings = match &args.findings {
                Some(p) => Some(BufWriter::new(File::create(p)?)),
                None => None,
            };
            sweep::sweep_bounds(
                &cfg,
                &mut out,
                findings.as_mut().map(|w| w as &mut dyn Write),
                &flag,
            )
        }
        Command::ErrorTerm(args) => {
            let cfg = sweep_config(&args);
            cfg.validate()?;
            let flag = interrupt_flag();
            let mut out = open_out(&args.range.out)?;
            sweep::error_term(&cfg, &mut out, &flag)
        }
        Command::GValue { n, bits } => {
            let text = sweep::g_value_text(n, bits, RigorConfig::default())?;
            println!("{text}");
            Ok(RunOutcome {
                status: ExitStatus::Clean,
                summary: serde_json::Value::Null,
            })
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(ExitStatus::Usage.code() as u8)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match run(cli) {
        Ok(outcome) => {
            if !outcome.summary.is_null() {
                eprintln!("{}", outcome.summary);
            }
            ExitCode::from(outcome.status.code() as u8)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_status().code() as u8)
        }
    }
}
