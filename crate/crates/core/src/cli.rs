//! The `fuzzy-agg` command line: reproduces the worked example, runs axiom
//! suites, extracts representing measures and replays the four classical
//! counterexamples.
//!
//! Exit codes are a stable contract: [`SUCCESS`], [`ASSERTION_FAILED`],
//! [`USAGE`] (bad arguments, unreadable or unwritable files) and [`PROTOCOL`]
//! (a black box answered a probe with something that is not a classification).

use std::collections::BTreeSet;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use clap::{Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

use crate::aggregators::{counterexamples, cubic_weight_measure, AggregatorSpec};
use crate::axioms::{
    implication_matrix, run_suite, Axiom, ImplicationRow, ProbeKind, SuiteConfig, SuiteReport, DEFAULT_GRID_N,
    DEFAULT_PROBES, DEFAULT_SEED, DEFAULT_TOL,
};
use crate::classification::Shape;
use crate::error::{Error, Result};
use crate::harness::{
    consistency_check, example1_report_with, extract_h, extract_measure, Curve, ExtractConfig, HTable,
};

pub const SUCCESS: i32 = 0;
pub const ASSERTION_FAILED: i32 = 1;
pub const USAGE: i32 = 2;
pub const PROTOCOL: i32 = 3;

/// Curve samples per object in the worked-example report.
const CURVE_SAMPLES: usize = 101;
const EXTRACT_GRID_N: usize = 21;
const VALIDATION_PROFILES: usize = 100;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum OutputFormat {
    Json,
    Csv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    /// Axiom suites: probe profiles agree at every individual.
    Pointwise,
    /// Axiom suites: probe profiles agree up to planted atoms.
    #[value(alias = "ae")]
    AlmostEverywhere,
    /// Extraction of the representing measure (`m >= 3`).
    Measure,
    /// Extraction of the odd map `h` (`m = p = 2`).
    H,
}

#[derive(Debug, Parser)]
#[command(name = "fuzzy-agg", version, about = "Fuzzy classification aggregation: axioms, counterexamples and measure extraction")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub flags: Flags,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Subcommand)]
pub enum Command {
    /// Aggregate the worked example with the 3i^2 weighted mean.
    Example1,
    /// Run the eight axiom suites on one aggregator.
    Axioms,
    /// Read the representing measure (or h) back from a black box.
    Extract,
    /// Run the four classical counterexamples through the suites.
    Counterexamples,
}

#[derive(Debug, Clone, Default, clap::Args)]
pub struct Flags {
    /// JSON run configuration; flags given on the command line win.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Aggregator spec: inline JSON or a path to a JSON file.
    #[arg(long, global = true)]
    pub aggregator: Option<String>,
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Probes per axiom suite; validation profiles for `extract`.
    #[arg(long, global = true)]
    pub probes: Option<usize>,
    /// Cells of the non-dictatorship grid; CDF grid points for `extract`.
    #[arg(long, global = true)]
    pub grid_n: Option<usize>,
    #[arg(long, global = true)]
    pub tol: Option<f64>,
    #[arg(long, global = true, value_enum)]
    pub output: Option<OutputFormat>,
    #[arg(long, global = true)]
    pub out_path: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    pub mode: Option<Mode>,
    /// Profile shape as `MxP`, e.g. `6x3`.
    #[arg(long, global = true, value_parser = parse_shape)]
    pub shape: Option<Shape>,
}

fn parse_shape(s: &str) -> std::result::Result<Shape, String> {
    let (m, p) = s.split_once(['x', 'X']).ok_or_else(|| format!("expected MxP, got {s:?}"))?;
    let m = usize::from_str(m.trim()).map_err(|e| e.to_string())?;
    let p = usize::from_str(p.trim()).map_err(|e| e.to_string())?;
    Shape::new(m, p).map_err(|e| e.to_string())
}

/// The `--config` file. Every field is optional; unknown fields are rejected.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub aggregator: Option<AggregatorSpec>,
    pub seed: Option<u64>,
    pub probes: Option<usize>,
    pub grid_n: Option<usize>,
    pub tol: Option<f64>,
    pub output: Option<OutputFormat>,
    pub out_path: Option<PathBuf>,
    pub mode: Option<Mode>,
    pub shape: Option<Shape>,
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self> {
        Ok(serde_json::from_str(&read(path)?)?)
    }

    /// Command-line flags over the configuration file.
    pub fn merged(mut self, flags: &Flags) -> Result<Self> {
        if let Some(a) = &flags.aggregator {
            self.aggregator = Some(parse_aggregator(a)?);
        }
        self.seed = flags.seed.or(self.seed);
        self.probes = flags.probes.or(self.probes);
        self.grid_n = flags.grid_n.or(self.grid_n);
        self.tol = flags.tol.or(self.tol);
        self.output = flags.output.or(self.output);
        self.out_path = flags.out_path.clone().or(self.out_path);
        self.mode = flags.mode.or(self.mode);
        self.shape = flags.shape.or(self.shape);
        Ok(self)
    }

    pub fn validate(&self) -> Result<()> {
        if self.tol.is_some_and(|t| !(t > 0.0)) {
            return Err(Error::Argument("tol must be positive".into()));
        }
        if self.probes == Some(0) {
            return Err(Error::Argument("probes must be at least 1".into()));
        }
        if self.grid_n.is_some_and(|n| n < 2) {
            return Err(Error::Argument("grid_n must be at least 2".into()));
        }
        Ok(())
    }

    fn tol(&self) -> f64 {
        self.tol.unwrap_or(DEFAULT_TOL)
    }

    fn format(&self) -> OutputFormat {
        self.output.unwrap_or(OutputFormat::Json)
    }

    fn suite(&self) -> Result<SuiteConfig> {
        let kind = match self.mode {
            None | Some(Mode::Pointwise) => ProbeKind::Pointwise,
            Some(Mode::AlmostEverywhere) => ProbeKind::AlmostEverywhere,
            Some(m) => return Err(Error::Argument(format!("mode {m:?} does not apply to axiom suites"))),
        };
        Ok(SuiteConfig {
            seed: self.seed.unwrap_or(DEFAULT_SEED),
            probes: self.probes.unwrap_or(DEFAULT_PROBES),
            tol: self.tol(),
            grid_n: self.grid_n.unwrap_or(DEFAULT_GRID_N),
            shape: self.shape,
            kind,
        })
    }

    fn require_aggregator(&self) -> Result<&AggregatorSpec> {
        self.aggregator
            .as_ref()
            .ok_or_else(|| Error::Argument("this command needs --aggregator".into()))
    }
}

fn with_path(path: &Path, e: std::io::Error) -> Error {
    Error::Io(std::io::Error::new(e.kind(), format!("{}: {e}", path.display())))
}

fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| with_path(path, e))
}

fn write(path: &Path, body: &str) -> Result<()> {
    std::fs::write(path, body).map_err(|e| with_path(path, e))
}

/// Inline JSON when the argument starts with `{`, a file path otherwise.
pub fn parse_aggregator(arg: &str) -> Result<AggregatorSpec> {
    let text = if arg.trim_start().starts_with('{') {
        arg.to_string()
    } else {
        read(Path::new(arg))?
    };
    Ok(serde_json::from_str(&text)?)
}

/// A rendered report plus the exit code its checks earned.
#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub code: i32,
    pub report: String,
    /// Extra files written next to `out_path` (curve CSVs).
    pub attachments: Vec<(String, String)>,
}

pub fn exit_code(err: &Error) -> i32 {
    match err {
        Error::Protocol { .. } => PROTOCOL,
        _ => USAGE,
    }
}

fn json<T: Serialize>(value: &T) -> Result<String> {
    let mut s = serde_json::to_string_pretty(value)?;
    s.push('\n');
    Ok(s)
}

/// 17 significant digits: every `f64` survives a round trip.
fn num(x: f64) -> String {
    format!("{x:.16e}")
}

fn csv_row(out: &mut String, head: &str, values: impl IntoIterator<Item = f64>) {
    out.push_str(head);
    for v in values {
        out.push(',');
        out.push_str(&num(v));
    }
    out.push('\n');
}

fn type_header(first: &str, p: usize) -> String {
    let mut h = first.to_string();
    for t in 0..p {
        let _ = write!(h, ",t{t}");
    }
    h.push('\n');
    h
}

fn curve_csv(c: &Curve) -> String {
    let p = c.samples.first().map_or(0, |s| s.values.len());
    let mut out = type_header("i", p);
    for s in &c.samples {
        csv_row(&mut out, &num(s.i), s.values.iter().copied());
    }
    out
}

pub fn cmd_example1(cfg: &RunConfig) -> Result<Outcome> {
    let spec = cfg
        .aggregator
        .clone()
        .unwrap_or(AggregatorSpec::WeightedMean { measure: cubic_weight_measure() });
    let alpha = spec.build()?;
    let report = example1_report_with(alpha.as_ref(), CURVE_SAMPLES)?;
    let code = if report.max_deviation <= cfg.tol() { SUCCESS } else { ASSERTION_FAILED };
    let (text, attachments) = match cfg.format() {
        OutputFormat::Json => (json(&report)?, Vec::new()),
        OutputFormat::Csv => {
            let mut out = type_header("object", report.table.shape().p);
            for (j, row) in report.table.rows().iter().enumerate() {
                csv_row(&mut out, &j.to_string(), row.iter().copied());
            }
            let curves = report
                .curves
                .iter()
                .map(|c| (format!("curve{}.csv", c.object), curve_csv(c)))
                .collect();
            (out, curves)
        }
    };
    Ok(Outcome { code, report: text, attachments })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AxiomsOutput {
    pub suite: SuiteReport,
    pub claimed: BTreeSet<Axiom>,
    pub matches_claims: bool,
    pub implications: Vec<ImplicationRow>,
}

fn suite_csv(suite: &SuiteReport) -> String {
    let mut out = String::from("axiom,verdict,probes\n");
    for r in &suite.reports {
        let verdict = if r.passed() { "pass" } else { "fail" };
        let _ = writeln!(out, "{},{verdict},{}", r.axiom, r.probes);
    }
    out
}

pub fn cmd_axioms(cfg: &RunConfig) -> Result<Outcome> {
    let alpha = cfg.require_aggregator()?.build()?;
    let suite_cfg = cfg.suite()?;
    let suite = run_suite(alpha.as_ref(), &suite_cfg)?;
    let implications = implication_matrix(&[alpha.as_ref()], &suite_cfg)?;
    let claimed = alpha.claimed_axioms();
    let matches_claims = suite.passed() == claimed;
    let report = match cfg.format() {
        OutputFormat::Json => json(&AxiomsOutput { suite, claimed, matches_claims, implications })?,
        OutputFormat::Csv => suite_csv(&suite),
    };
    let code = if matches_claims { SUCCESS } else { ASSERTION_FAILED };
    Ok(Outcome { code, report, attachments: Vec::new() })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExtractOutput {
    pub result: crate::harness::ExtractionResult,
    pub consistent: bool,
    pub tol: f64,
}

fn h_csv(t: &HTable) -> String {
    let mut out = String::from("u,h\n");
    for (u, h) in t.u.iter().zip(&t.h) {
        let _ = writeln!(out, "{},{}", num(*u), num(*h));
    }
    out
}

pub fn cmd_extract(cfg: &RunConfig) -> Result<Outcome> {
    let alpha = cfg.require_aggregator()?.build()?;
    let tol = cfg.tol();
    let grid_n = cfg.grid_n.unwrap_or(EXTRACT_GRID_N);
    if cfg.mode == Some(Mode::H) {
        let suite = SuiteConfig { seed: cfg.seed.unwrap_or(DEFAULT_SEED), tol, ..SuiteConfig::default() };
        let table = extract_h(alpha.as_ref(), grid_n, &suite)?;
        let code = if table.is_odd(tol) { SUCCESS } else { ASSERTION_FAILED };
        let report = match cfg.format() {
            OutputFormat::Json => json(&table)?,
            OutputFormat::Csv => h_csv(&table),
        };
        return Ok(Outcome { code, report, attachments: Vec::new() });
    }
    if let Some(m) = cfg.mode.filter(|&m| m != Mode::Measure) {
        return Err(Error::Argument(format!("mode {m:?} does not apply to extraction")));
    }
    let ecfg = ExtractConfig {
        grid_n,
        validation_n: cfg.probes.unwrap_or(VALIDATION_PROFILES),
        seed: cfg.seed.unwrap_or(DEFAULT_SEED),
        shape: cfg.shape,
    };
    let result = extract_measure(alpha.as_ref(), &ecfg)?;
    let consistent = consistency_check(&result, tol);
    let code = if consistent && result.match_deviation <= tol { SUCCESS } else { ASSERTION_FAILED };
    let report = match cfg.format() {
        OutputFormat::Json => json(&ExtractOutput { result, consistent, tol })?,
        OutputFormat::Csv => {
            let mut out = String::from("x");
            for c in &result.cdf_values {
                let _ = write!(out, ",cdf_t{}", c.ty);
            }
            out.push('\n');
            for (k, &x) in result.grid.iter().enumerate() {
                csv_row(&mut out, &num(x), result.cdf_values.iter().map(|c| c.values[k]));
            }
            out
        }
    };
    Ok(Outcome { code, report, attachments: Vec::new() })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CounterexampleRow {
    pub aggregator: String,
    pub breaks: Axiom,
    /// Verdicts on optimality, independence, zero unanimity, non-dictatorship.
    pub passed: BTreeSet<Axiom>,
    pub failed: BTreeSet<Axiom>,
    /// True iff the designated axiom is the only one of the four that fails.
    pub matches: bool,
    pub suite: SuiteReport,
}

/// The four axioms of the characterization.
pub const CHARACTERIZATION: [Axiom; 4] =
    [Axiom::Optimality, Axiom::Independence, Axiom::ZeroUnanimity, Axiom::NonDictatorship];

pub fn counterexample_rows(suite_cfg: &SuiteConfig) -> Result<Vec<CounterexampleRow>> {
    counterexamples()
        .into_iter()
        .map(|cx| {
            let alpha = cx.spec.build()?;
            let suite = run_suite(alpha.as_ref(), suite_cfg)?;
            let (passed, failed): (BTreeSet<Axiom>, BTreeSet<Axiom>) = CHARACTERIZATION
                .iter()
                .partition(|&&a| suite.get(a).is_some_and(|r| r.passed()));
            let matches = failed.len() == 1 && failed.contains(&cx.breaks);
            Ok(CounterexampleRow { aggregator: alpha.name(), breaks: cx.breaks, passed, failed, matches, suite })
        })
        .collect()
}

pub fn cmd_counterexamples(cfg: &RunConfig) -> Result<Outcome> {
    let rows = counterexample_rows(&cfg.suite()?)?;
    let code = if rows.iter().all(|r| r.matches) { SUCCESS } else { ASSERTION_FAILED };
    let report = match cfg.format() {
        OutputFormat::Json => json(&rows)?,
        OutputFormat::Csv => {
            let mut out = String::from("aggregator,breaks");
            for a in CHARACTERIZATION {
                let _ = write!(out, ",{a}");
            }
            out.push_str(",matches\n");
            for r in &rows {
                let _ = write!(out, "{},{}", r.aggregator, r.breaks);
                for a in CHARACTERIZATION {
                    out.push_str(if r.passed.contains(&a) { ",pass" } else { ",fail" });
                }
                let _ = writeln!(out, ",{}", r.matches);
            }
            out
        }
    };
    Ok(Outcome { code, report, attachments: Vec::new() })
}

/// Loads the configuration, runs the command and writes its report once.
pub fn execute(cli: &Cli) -> Result<i32> {
    let base = match &cli.flags.config {
        Some(path) => RunConfig::load(path)?,
        None => RunConfig::default(),
    };
    let cfg = base.merged(&cli.flags)?;
    cfg.validate()?;
    let outcome = match cli.command {
        Command::Example1 => cmd_example1(&cfg)?,
        Command::Axioms => cmd_axioms(&cfg)?,
        Command::Extract => cmd_extract(&cfg)?,
        Command::Counterexamples => cmd_counterexamples(&cfg)?,
    };
    match &cfg.out_path {
        Some(path) => {
            write(path, &outcome.report)?;
            for (suffix, body) in &outcome.attachments {
                write(&path.with_extension(suffix), body)?;
            }
        }
        None => print!("{}", outcome.report),
    }
    Ok(outcome.code)
}

/// Parses `args` (program name first) and runs; returns the exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { USAGE } else { SUCCESS };
        }
    };
    match execute(&cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}
