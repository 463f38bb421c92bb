//! Command-line harness: argument parsing, experiment execution and report
//! emission. The binary is a thin wrapper around [`run_cli`].

use std::ffi::OsString;
use std::io::{self, Write};
use std::ops::RangeInclusive;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::algorithm::{run_classical_bv, run_quantum_bv, Mode, RunReport};
use crate::error::Error;
use crate::oracle::LinearOracle;
use crate::state::{AmplitudeBudget, DigitString, Dimension};
use crate::verification::{self, CheckResult};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_CAPACITY: i32 = 3;
pub const EXIT_INTERNAL: i32 = 4;

#[derive(Debug, Parser)]
#[command(
    name = "quditbv",
    version,
    about = "Bernstein-Vazirani on d-level qudits"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Recover a hidden string with the quantum and/or classical algorithm.
    Run(RunArgs),
    /// Compare query counts over a range of d and n.
    Sweep(SweepArgs),
    /// Run the numeric verification suite.
    Selfcheck(SelfcheckArgs),
}

#[derive(Debug, Args)]
struct RunArgs {
    /// Levels per qudit.
    #[arg(long)]
    d: usize,
    /// Length of the hidden string.
    #[arg(long)]
    n: usize,
    /// Comma-separated hidden string; drawn from the seed when absent.
    #[arg(long)]
    secret: Option<String>,
    #[arg(long, value_enum, default_value_t = RunMode::Both)]
    mode: RunMode,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Independent repetitions, each with fresh oracles.
    #[arg(long, default_value_t = 1)]
    shots: usize,
    #[arg(long, value_enum, default_value_t = OutputFormat::Json, alias = "output-format")]
    format: OutputFormat,
}

#[derive(Debug, Args)]
struct SweepArgs {
    /// Dimension or inclusive range, e.g. `3` or `2-5`.
    #[arg(long, default_value = "3")]
    d: String,
    /// String length or inclusive range, e.g. `1-8`.
    #[arg(long, default_value = "1-8")]
    n: String,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, value_enum, default_value_t = OutputFormat::Json, alias = "output-format")]
    format: OutputFormat,
}

#[derive(Debug, Args)]
struct SelfcheckArgs {
    #[arg(long, value_enum, default_value_t = OutputFormat::Text, alias = "output-format")]
    format: OutputFormat,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum RunMode {
    Quantum,
    Classical,
    Both,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OutputFormat {
    Json,
    Csv,
    Text,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub dim: Dimension,
    pub n: usize,
    pub secret: Option<DigitString>,
    pub mode: RunMode,
    pub seed: u64,
    pub shots: usize,
    pub format: OutputFormat,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepConfig {
    pub dims: RangeInclusive<usize>,
    pub lengths: RangeInclusive<usize>,
    pub seed: u64,
    pub format: OutputFormat,
}

/// A parsed and validated command line.
#[derive(Debug, Clone, PartialEq)]
pub enum Invocation {
    Run(ExperimentConfig),
    Sweep(SweepConfig),
    Selfcheck { format: OutputFormat },
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    /// `--help` / `--version` output; not a failure.
    #[error("{0}")]
    Info(String),
    #[error(transparent)]
    Run(#[from] Error),
    #[error("{0} verification check(s) failed")]
    ChecksFailed(usize),
    #[error("failed to write output: {0}")]
    Io(#[from] io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Info(_) => EXIT_OK,
            CliError::Usage(_) | CliError::Run(Error::Domain(_)) => EXIT_USAGE,
            CliError::Run(Error::Capacity { .. }) => EXIT_CAPACITY,
            CliError::Run(_) | CliError::ChecksFailed(_) | CliError::Io(_) => EXIT_INTERNAL,
        }
    }
}

fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

/// Parses `"v"`, `"lo-hi"` or `"lo..=hi"` into an inclusive range.
pub fn parse_range(text: &str) -> Result<RangeInclusive<usize>, CliError> {
    let text = text.trim();
    let (lo, hi) = match text.split_once("..=").or_else(|| text.split_once('-')) {
        Some((lo, hi)) => (lo.trim(), hi.trim()),
        None => (text, text),
    };
    let parse = |s: &str| {
        s.parse::<usize>()
            .map_err(|_| usage(format!("invalid range {text:?}")))
    };
    let (lo, hi) = (parse(lo)?, parse(hi)?);
    if lo > hi {
        return Err(usage(format!("empty range {text:?}")));
    }
    Ok(lo..=hi)
}

/// Parses and validates a full argument list (including the program name).
pub fn parse_config<I, T>(argv: I) -> Result<Invocation, CliError>
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = Cli::try_parse_from(argv).map_err(|e| {
        use clap::error::ErrorKind;
        match e.kind() {
            ErrorKind::DisplayHelp
            | ErrorKind::DisplayVersion
            | ErrorKind::DisplayHelpOnMissingArgumentOrSubcommand
                if e.exit_code() == 0 =>
            {
                CliError::Info(e.render().to_string())
            }
            _ => CliError::Usage(e.render().to_string()),
        }
    })?;
    match cli.command {
        Command::Run(args) => {
            let dim = Dimension::new(args.d).map_err(|e| usage(e.to_string()))?;
            if args.n == 0 {
                return Err(usage("--n must be at least 1"));
            }
            if args.shots == 0 {
                return Err(usage("--shots must be at least 1"));
            }
            let secret = args
                .secret
                .as_deref()
                .map(|text| {
                    DigitString::parse(text, dim).map_err(|e| usage(format!("--secret: {e}")))
                })
                .transpose()?;
            if let Some(s) = &secret {
                if s.len() != args.n {
                    return Err(usage(format!(
                        "--secret has {} digits but --n is {}",
                        s.len(),
                        args.n
                    )));
                }
            }
            Ok(Invocation::Run(ExperimentConfig {
                dim,
                n: args.n,
                secret,
                mode: args.mode,
                seed: args.seed,
                shots: args.shots,
                format: args.format,
            }))
        }
        Command::Sweep(args) => {
            let dims = parse_range(&args.d)?;
            let lengths = parse_range(&args.n)?;
            if *dims.start() < 2 {
                return Err(usage("sweep dimensions must be at least 2"));
            }
            if *lengths.start() < 1 {
                return Err(usage("sweep lengths must be at least 1"));
            }
            Ok(Invocation::Sweep(SweepConfig {
                dims,
                lengths,
                seed: args.seed,
                format: args.format,
            }))
        }
        Command::Selfcheck(args) => Ok(Invocation::Selfcheck {
            format: args.format,
        }),
    }
}

/// One emitted line of a `run` report.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReportRow {
    pub mode: Mode,
    pub d: usize,
    pub n: usize,
    pub secret: DigitString,
    pub recovered: DigitString,
    pub oracle_queries: u64,
    pub peak_probability: f64,
    pub seed: u64,
}

impl ReportRow {
    fn new(report: RunReport, secret: &DigitString, seed: u64) -> Self {
        ReportRow {
            mode: report.mode,
            d: report.d,
            n: report.n,
            secret: secret.clone(),
            recovered: report.recovered,
            oracle_queries: report.oracle_queries,
            peak_probability: report.peak_probability,
            seed,
        }
    }
}

fn check_register(dim: Dimension, n: usize) -> Result<(), Error> {
    AmplitudeBudget::current()
        .register_len(dim, n + 1, "register")
        .map(|_| ())
}

/// Runs the requested modes. Every run gets its own oracle, so the query
/// counts of different modes never mix.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<Vec<ReportRow>, Error> {
    check_register(cfg.dim, cfg.n)?;
    let secret = match &cfg.secret {
        Some(s) => s.clone(),
        None => DigitString::random(cfg.n, cfg.dim, &mut ChaCha8Rng::seed_from_u64(cfg.seed))?,
    };
    let mut rows = Vec::new();
    for _ in 0..cfg.shots {
        if matches!(cfg.mode, RunMode::Quantum | RunMode::Both) {
            let report = run_quantum_bv(&mut LinearOracle::new(secret.clone()))?;
            rows.push(ReportRow::new(report, &secret, cfg.seed));
        }
        if matches!(cfg.mode, RunMode::Classical | RunMode::Both) {
            let report = run_classical_bv(&mut LinearOracle::new(secret.clone()))?;
            rows.push(ReportRow::new(report, &secret, cfg.seed));
        }
    }
    Ok(rows)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRow {
    pub d: usize,
    pub n: usize,
    pub secret: DigitString,
    pub quantum_queries: u64,
    pub classical_queries: u64,
    pub quantum_recovered: bool,
    pub classical_recovered: bool,
}

/// One quantum and one classical run per `(d, n)`, secrets drawn in order
/// from a single seeded stream.
pub fn run_sweep(cfg: &SweepConfig) -> Result<Vec<SweepRow>, Error> {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut rows = Vec::new();
    for d in cfg.dims.clone() {
        let dim = Dimension::new(d)?;
        for n in cfg.lengths.clone() {
            check_register(dim, n)?;
            let secret = DigitString::random(n, dim, &mut rng)?;
            let quantum = run_quantum_bv(&mut LinearOracle::new(secret.clone()))?;
            let classical = run_classical_bv(&mut LinearOracle::new(secret.clone()))?;
            rows.push(SweepRow {
                d,
                n,
                quantum_queries: quantum.oracle_queries,
                classical_queries: classical.oracle_queries,
                quantum_recovered: quantum.recovered == secret,
                classical_recovered: classical.recovered == secret,
                secret,
            });
        }
    }
    Ok(rows)
}

fn write_json<T: Serialize, W: Write + ?Sized>(rows: &[T], out: &mut W) -> io::Result<()> {
    serde_json::to_writer_pretty(&mut *out, rows)?;
    writeln!(out)
}

fn write_csv<W: Write + ?Sized>(
    header: &[&str],
    records: Vec<Vec<String>>,
    out: &mut W,
) -> io::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(header)?;
    for rec in records {
        w.write_record(rec)?;
    }
    w.flush()
}

const REPORT_FIELDS: [&str; 8] = [
    "mode",
    "d",
    "n",
    "secret",
    "recovered",
    "oracle_queries",
    "peak_probability",
    "seed",
];

/// Writes `run` reports to `out` in the chosen format.
pub fn emit_report<W: Write + ?Sized>(
    rows: &[ReportRow],
    format: OutputFormat,
    out: &mut W,
) -> io::Result<()> {
    match format {
        OutputFormat::Json => write_json(rows, out),
        OutputFormat::Csv => {
            let records = rows
                .iter()
                .map(|r| {
                    vec![
                        r.mode.to_string(),
                        r.d.to_string(),
                        r.n.to_string(),
                        r.secret.join("-"),
                        r.recovered.join("-"),
                        r.oracle_queries.to_string(),
                        r.peak_probability.to_string(),
                        r.seed.to_string(),
                    ]
                })
                .collect();
            write_csv(&REPORT_FIELDS, records, out)
        }
        OutputFormat::Text => {
            for r in rows {
                writeln!(
                    out,
                    "{:<9} d={} n={} secret={} recovered={} queries={} peak={} seed={}",
                    r.mode,
                    r.d,
                    r.n,
                    r.secret.join("-"),
                    r.recovered.join("-"),
                    r.oracle_queries,
                    r.peak_probability,
                    r.seed
                )?;
            }
            Ok(())
        }
    }
}

pub fn emit_sweep<W: Write + ?Sized>(
    rows: &[SweepRow],
    format: OutputFormat,
    out: &mut W,
) -> io::Result<()> {
    match format {
        OutputFormat::Json => write_json(rows, out),
        OutputFormat::Csv => {
            let header = [
                "d",
                "n",
                "secret",
                "quantum_queries",
                "classical_queries",
                "quantum_recovered",
                "classical_recovered",
            ];
            let records = rows
                .iter()
                .map(|r| {
                    vec![
                        r.d.to_string(),
                        r.n.to_string(),
                        r.secret.join("-"),
                        r.quantum_queries.to_string(),
                        r.classical_queries.to_string(),
                        r.quantum_recovered.to_string(),
                        r.classical_recovered.to_string(),
                    ]
                })
                .collect();
            write_csv(&header, records, out)
        }
        OutputFormat::Text => {
            writeln!(
                out,
                "{:>3} {:>3} {:>8} {:>10}  secret",
                "d", "n", "quantum", "classical"
            )?;
            for r in rows {
                writeln!(
                    out,
                    "{:>3} {:>3} {:>8} {:>10}  {}",
                    r.d,
                    r.n,
                    r.quantum_queries,
                    r.classical_queries,
                    r.secret.join("-")
                )?;
            }
            Ok(())
        }
    }
}

pub fn emit_checks<W: Write + ?Sized>(
    rows: &[CheckResult],
    format: OutputFormat,
    out: &mut W,
) -> io::Result<()> {
    match format {
        OutputFormat::Json => write_json(rows, out),
        OutputFormat::Csv => {
            let records = rows
                .iter()
                .map(|r| {
                    vec![
                        r.name.clone(),
                        format!("{:e}", r.max_abs_error),
                        format!("{:e}", r.tolerance),
                        r.passed.to_string(),
                        r.details.clone(),
                    ]
                })
                .collect();
            write_csv(
                &["name", "max_abs_error", "tolerance", "passed", "details"],
                records,
                out,
            )
        }
        OutputFormat::Text => {
            for r in rows {
                writeln!(
                    out,
                    "{} {} (max error {:.3e}, tolerance {:.0e}; {})",
                    if r.passed { "PASS" } else { "FAIL" },
                    r.name,
                    r.max_abs_error,
                    r.tolerance,
                    r.details
                )?;
            }
            Ok(())
        }
    }
}

fn execute<W: Write + ?Sized>(invocation: Invocation, out: &mut W) -> Result<(), CliError> {
    match invocation {
        Invocation::Run(cfg) => {
            let rows = run_experiment(&cfg)?;
            emit_report(&rows, cfg.format, out)?;
        }
        Invocation::Sweep(cfg) => {
            let rows = run_sweep(&cfg)?;
            emit_sweep(&rows, cfg.format, out)?;
        }
        Invocation::Selfcheck { format } => {
            let rows = verification::run_all()?;
            emit_checks(&rows, format, out)?;
            let failed = rows.iter().filter(|r| !r.passed).count();
            if failed > 0 {
                return Err(CliError::ChecksFailed(failed));
            }
        }
    }
    out.flush()?;
    Ok(())
}

/// Entry point shared by the binary and tests. Returns the process exit code.
pub fn run_cli<I, T, W, E>(argv: I, out: &mut W, err: &mut E) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
    W: Write + ?Sized,
    E: Write + ?Sized,
{
    let result = AmplitudeBudget::from_env()
        .map_err(|e| usage(e.to_string()))
        .and_then(|budget| {
            budget.install();
            parse_config(argv)
        })
        .and_then(|inv| execute(inv, out));
    match result {
        Ok(()) => EXIT_OK,
        Err(CliError::Info(text)) => {
            let _ = write!(out, "{text}");
            EXIT_OK
        }
        Err(e) => {
            let code = e.exit_code();
            let _ = match &e {
                CliError::Usage(text) => write!(err, "{}", ensure_newline(text)),
                _ => writeln!(err, "error: {e}"),
            };
            code
        }
    }
}

fn ensure_newline(text: &str) -> String {
    if text.ends_with('\n') {
        text.to_string()
    } else {
        format!("error: {text}\n")
    }
}
