//! relcyc: relative Hochschild and cyclic homology of square-zero extensions.

mod input;

use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};
use relcyc::bar::RelativeOracle;
use relcyc::harmonic::{harmonic_certificate, nilpotence_certificate, periodic_vanishing_certificate};
use relcyc::report::{Certificate, Ledger};
use relcyc::retract::verify_bar_retract;
use relcyc::small::SmallComplex;
use relcyc::suites::{
    connection_certificate, identities_certificate, oracle_match_certificate, periodicity_certificate,
};
use serde::Serialize;
use serde_json::{json, Value};

use input::{read_spec, split_spec, Parsed};

/// Default memory budget, in basis elements of the largest bar space.
const DEFAULT_MAX_DIM: usize = 2_000_000;
const MAX_DIM_VAR: &str = "RELCYC_MAX_DIM";

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("io error: {0}")]
    Io(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("validation error: {0}")]
    Validation(String),
    #[error("estimated dimension {estimate} exceeds the budget {budget} (set {MAX_DIM_VAR} to raise it)")]
    CapExceeded { estimate: usize, budget: usize },
    #[error(transparent)]
    Core(#[from] relcyc::error::Error),
}

#[derive(Parser, Debug)]
#[command(name = "relcyc", version, about = "Relative Hochschild and cyclic homology of square-zero extensions")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Degree cap.
    #[arg(long, global = true, default_value_t = 4)]
    nmax: usize,
    /// Weight cap for block-wise identity checks.
    #[arg(long, global = true, default_value_t = 6)]
    vmax: usize,
    /// Write the JSON report (or the emitted spec for split-ideal) here.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Worker threads.
    #[arg(long, global = true)]
    jobs: Option<usize>,
    /// Print an aligned text summary instead of JSON on stdout.
    #[arg(long, global = true)]
    text: bool,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Parse and validate an input file.
    Validate { input: PathBuf },
    /// HH and HC tables from the small complexes, checked against the bar complex.
    Compute {
        input: PathBuf,
        #[arg(long)]
        hh: bool,
        #[arg(long)]
        hc: bool,
    },
    /// Run verification suites.
    Verify {
        input: PathBuf,
        #[arg(long, value_enum, default_value_t = Suite::All)]
        suite: Suite,
    },
    /// Connection maps against the snake-lemma maps of the bar complex.
    Connection { input: PathBuf },
    /// The harmonic decomposition suite.
    Harmonic { input: PathBuf },
    /// Rewrite C with a square-zero ideal as a split extension (A, M, f).
    SplitIdeal { input: PathBuf },
    /// Vanishing of relative periodic cyclic homology.
    Goodwillie {
        input: PathBuf,
        /// Highest target degree of the S-composite checks.
        #[arg(long, default_value_t = 3)]
        s_nmax: usize,
    },
    /// Vanishing of powers of S when M^(2^m) = 0.
    Nilpotence {
        input: PathBuf,
        #[arg(long, default_value_t = 1)]
        m: u32,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Suite {
    Identities,
    Retract,
    Harmonic,
    Connection,
    Periodicity,
    All,
}

#[derive(Debug, Serialize)]
struct Tables {
    #[serde(skip_serializing_if = "Option::is_none")]
    hh: Option<Value>,
    #[serde(skip_serializing_if = "Option::is_none")]
    hh_oracle: Option<Value>,
    #[serde(skip_serializing_if = "Option::is_none")]
    hc: Option<Value>,
    #[serde(skip_serializing_if = "Option::is_none")]
    hc_oracle: Option<Value>,
}

#[derive(Debug, Serialize)]
struct Timings {
    total_ms: u128,
}

#[derive(Debug, Serialize)]
struct HomologyReport {
    algebra: String,
    command: String,
    n_max: usize,
    v_max: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    tables: Option<Tables>,
    #[serde(skip_serializing_if = "Option::is_none")]
    output: Option<Value>,
    certificates: Vec<Certificate>,
    passed: bool,
    timings: Timings,
}

impl HomologyReport {
    fn to_text(&self) -> String {
        let mut s = format!("{} on {} (n_max = {}, v_max = {})\n", self.command, self.algebra, self.n_max, self.v_max);
        if let Some(t) = &self.tables {
            let rows = [("HH", &t.hh), ("HH bar", &t.hh_oracle), ("HC", &t.hc), ("HC bar", &t.hc_oracle)];
            s.push_str(&format!("{:<8}", "n"));
            for n in 0..=self.n_max {
                s.push_str(&format!("{n:>6}"));
            }
            s.push('\n');
            for (label, row) in rows {
                let Some(Value::Array(vals)) = row else { continue };
                s.push_str(&format!("{label:<8}"));
                for v in vals {
                    s.push_str(&format!("{:>6}", v.to_string()));
                }
                s.push('\n');
            }
        }
        if let Some(out) = &self.output {
            s.push_str(&format!("output: {out}\n"));
        }
        for c in &self.certificates {
            s.push_str(&c.to_text());
        }
        s.push_str(if self.passed { "all certificates passed\n" } else { "some certificates FAILED\n" });
        s
    }
}

fn budget() -> Result<usize, CliError> {
    match std::env::var(MAX_DIM_VAR) {
        Ok(v) => v
            .trim()
            .parse()
            .map_err(|_| CliError::Parse(format!("{MAX_DIM_VAR} must be a positive integer, got {v:?}"))),
        Err(_) => Ok(DEFAULT_MAX_DIM),
    }
}

/// Refuses jobs whose bar complex in degree `top` has more than the budget.
fn check_cap(dim: usize, top: usize) -> Result<(), CliError> {
    let budget = budget()?;
    let estimate = (0..top).try_fold(dim, |acc, _| acc.checked_mul(dim.saturating_sub(1))).unwrap_or(usize::MAX);
    if estimate > budget {
        return Err(CliError::CapExceeded { estimate, budget });
    }
    Ok(())
}

fn default_name(path: &Path) -> String {
    path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_else(|| "algebra".into())
}

struct Job {
    name: String,
    parsed: Parsed,
}

fn load(path: &Path) -> Result<Job, CliError> {
    let spec = read_spec(path)?;
    let name = spec.name_or(&default_name(path));
    Ok(Job { parsed: spec.parse()?, name })
}

fn verify_suite(s: &SmallComplex, o: &RelativeOracle, suite: Suite, n_max: i64, v_max: i64) -> Vec<Certificate> {
    let all = suite == Suite::All;
    let mut certs = Vec::new();
    if all || suite == Suite::Identities {
        certs.push(identities_certificate(s, v_max));
    }
    if all || suite == Suite::Retract {
        certs.push(verify_bar_retract(s, o, n_max + 1));
    }
    if all || suite == Suite::Harmonic {
        certs.push(harmonic_certificate(s, v_max, n_max));
    }
    if all || suite == Suite::Connection {
        certs.push(connection_certificate(s, o, n_max));
    }
    if all || suite == Suite::Periodicity {
        certs.push(periodicity_certificate(s, o, n_max));
    }
    certs
}

fn run(cli: &Cli) -> Result<(HomologyReport, Option<Value>), CliError> {
    let start = Instant::now();
    let (n_max, v_max) = (cli.nmax, cli.vmax);
    let (ni, vi) = (n_max as i64, v_max as i64);
    let mut tables = None;
    let mut output = None;
    let mut emitted = None;
    let (command, job, certificates) = match &cli.command {
        Command::Validate { input } => {
            let job = load(input)?;
            output = Some(match &job.parsed {
                Parsed::Algebra(a) => json!({ "kind": "algebra", "dim": a.dim() }),
                Parsed::WithIdeal { c, ideal } => {
                    json!({ "kind": "algebra_with_ideal", "dim": c.dim(), "ideal_dim": ideal.len() })
                }
                Parsed::Split(e) => json!({ "kind": "split_extension", "dim_a": e.dim_a(), "dim_m": e.dim_m() }),
            });
            ("validate", job, Vec::new())
        }
        Command::Compute { input, hh, hc } => {
            let job = load(input)?;
            let e = job.parsed.extension(&job.name)?;
            check_cap(e.e.dim(), n_max + 1)?;
            let (s, o) = (SmallComplex::new(&e), RelativeOracle::new(&e));
            let cert = oracle_match_certificate(&s, &o, n_max);
            let (want_hh, want_hc) = if *hh || *hc { (*hh, *hc) } else { (true, true) };
            let d = &cert.details;
            let pick = |want: bool, key: &str| if want { d.get(key).cloned() } else { None };
            tables = Some(Tables {
                hh: pick(want_hh, "hh"),
                hh_oracle: pick(want_hh, "hh_oracle"),
                hc: pick(want_hc, "hc"),
                hc_oracle: pick(want_hc, "hc_oracle"),
            });
            ("compute", job, vec![cert])
        }
        Command::Verify { input, suite } => {
            let job = load(input)?;
            let e = job.parsed.extension(&job.name)?;
            check_cap(e.e.dim(), n_max + 2)?;
            let (s, o) = (SmallComplex::new(&e), RelativeOracle::new(&e));
            ("verify", job, verify_suite(&s, &o, *suite, ni, vi))
        }
        Command::Connection { input } => {
            let job = load(input)?;
            let e = job.parsed.extension(&job.name)?;
            check_cap(e.e.dim(), n_max + 2)?;
            let (s, o) = (SmallComplex::new(&e), RelativeOracle::new(&e));
            ("connection", job, vec![connection_certificate(&s, &o, ni)])
        }
        Command::Harmonic { input } => {
            let job = load(input)?;
            let e = job.parsed.extension(&job.name)?;
            let s = SmallComplex::new(&e);
            ("harmonic", job, vec![harmonic_certificate(&s, vi, ni)])
        }
        Command::Goodwillie { input, s_nmax } => {
            let job = load(input)?;
            let e = job.parsed.extension(&job.name)?;
            let s = SmallComplex::new(&e);
            ("goodwillie", job, vec![periodic_vanishing_certificate(&s, vi, ni, *s_nmax as i64)])
        }
        Command::SplitIdeal { input } => {
            let job = load(input)?;
            if !matches!(job.parsed, Parsed::WithIdeal { .. }) {
                return Err(CliError::Parse("split-ideal needs an algebra with an `ideal`".into()));
            }
            let e = job.parsed.extension(&job.name)?;
            let spec = split_spec(&e, &job.name);
            // the emitted document must parse back to the same algebra E
            let mut ledger = Ledger::new();
            let back = spec.parse().and_then(|p| p.extension(&job.name));
            let outcome = match back {
                Ok(b) if b.e == e.e => Ok(()),
                Ok(_) => Err(relcyc::error::Error::Mismatch("re-parsed extension differs".into())),
                Err(err) => Err(relcyc::error::Error::InvalidInput(err.to_string())),
            };
            ledger.record("emitted (A, M, f) rebuilds E", 1, outcome);
            let cert = Certificate::new(
                "split_round_trip",
                &job.name,
                json!({ "dim_a": e.dim_a(), "dim_m": e.dim_m() }),
                ledger,
            );
            let doc = serde_json::to_value(&spec).map_err(|err| CliError::Parse(err.to_string()))?;
            emitted = Some(doc.clone());
            output = Some(doc);
            ("split-ideal", job, vec![cert])
        }
        Command::Nilpotence { input, m } => {
            let job = load(input)?;
            let (c, ideal) = match &job.parsed {
                Parsed::WithIdeal { c, ideal } => (c.clone(), ideal.clone()),
                Parsed::Split(e) => (e.e.clone(), (e.dim_a()..e.e.dim()).collect()),
                Parsed::Algebra(_) => return Err(CliError::Parse("nilpotence needs an `ideal` or a bimodule".into())),
            };
            let top = n_max + 2 * (*m as usize) * (n_max / 2 + 1);
            check_cap(c.dim(), top + 1)?;
            ("nilpotence", job, vec![nilpotence_certificate(&c, &ideal, *m, ni)])
        }
    };
    let passed = certificates.iter().all(|c| c.passed);
    let report = HomologyReport {
        algebra: job.name,
        command: command.to_string(),
        n_max,
        v_max,
        tables,
        output,
        certificates,
        passed,
        timings: Timings { total_ms: start.elapsed().as_millis() },
    };
    Ok((report, emitted))
}

fn write_json(path: &Path, v: &impl Serialize) -> Result<(), CliError> {
    let text = serde_json::to_string_pretty(v).map_err(|e| CliError::Parse(e.to_string()))?;
    std::fs::write(path, text + "\n").map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(k) = cli.jobs {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(k).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    }
    let result = run(&cli).and_then(|(report, emitted)| {
        match (&cli.out, &emitted) {
            (Some(path), Some(doc)) => write_json(path, doc)?,
            (Some(path), None) => write_json(path, &report)?,
            (None, _) => {}
        }
        if cli.text {
            print!("{}", report.to_text());
        } else if cli.out.is_none() || emitted.is_some() {
            println!("{}", serde_json::to_string_pretty(&report).map_err(|e| CliError::Parse(e.to_string()))?);
        }
        Ok(report.passed)
    });
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
