//! Command-line front end. `run` parses arguments, dispatches, and renders
//! the report as text, CSV or JSON.
//!
//! Exit status: 0 on success, 1 when a contained check fails, 2 on usage
//! errors.

use std::fs::File;
use std::io::{self, Write};
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

use crate::coeffs::{column_sums, table_for, table_series, CoeffTable, SchmidtRow};
use crate::exact::{format_rat, parse_rat, ExactInt, ExactRat};
use crate::guess::{
    fit_ansatz, solve_kernel, solve_kernel_grid, FitOutcome, KernelValues, SearchBounds,
};
use crate::oracle::{solve_implicit, ImplicitSolveReport};
use crate::sequences::{schmidt_poly, schmidt_s, PowerIndex};
use crate::verify::{
    cross_check_explicit, sweep_integrality, verify_kernel, verify_kernel_grid, verify_lemma,
    verify_lemma_grid, ExplicitCheckReport, IdentityCheckResult, IntegralityReport,
};

pub const EXIT_OK: i32 = 0;
pub const EXIT_CHECK_FAILED: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Debug, Parser)]
#[command(
    name = "schmidt",
    version,
    about = "Exact Schmidt coefficients, identity checks and kernel guessing"
)]
pub struct Cli {
    /// Output format; `verify` defaults to json, everything else to text.
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    /// Write the report to PATH instead of stdout.
    #[arg(long = "out", global = true, value_name = "PATH")]
    pub out: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
    Text,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Method {
    Table,
    Implicit,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Schmidt number sum_k C(n,k)^r C(n+k,k)^r.
    S {
        #[arg(long, allow_hyphen_values = true)]
        r: i64,
        #[arg(long, allow_hyphen_values = true)]
        n: i64,
    },
    /// Schmidt polynomial evaluated at a rational point.
    Poly {
        #[arg(long, allow_hyphen_values = true)]
        r: i64,
        #[arg(long, allow_hyphen_values = true)]
        n: i64,
        /// Integer or fraction `a/b`.
        #[arg(long, allow_hyphen_values = true)]
        x: String,
    },
    /// Coefficients c(r; 0..=k_max).
    C {
        #[arg(long, allow_hyphen_values = true)]
        r: i64,
        #[arg(long = "k-max", allow_hyphen_values = true)]
        k_max: i64,
        #[arg(long, value_enum, default_value = "table")]
        method: Method,
    },
    /// Dump the coefficient table a(r; k, j).
    Table {
        #[arg(long, allow_hyphen_values = true)]
        r: i64,
        #[arg(long = "k-max", allow_hyphen_values = true)]
        k_max: i64,
    },
    /// Identity, integrality and explicit-formula checks.
    Verify {
        #[command(subcommand)]
        check: VerifyCommand,
    },
    /// Kernel solving and ansatz fitting.
    Guess {
        #[command(subcommand)]
        step: GuessCommand,
    },
}

#[derive(Debug, Subcommand)]
pub enum VerifyCommand {
    /// Degree-bounded proof of the table row k for power r.
    Lemma {
        #[arg(long, allow_hyphen_values = true)]
        r: i64,
        #[arg(long, allow_hyphen_values = true)]
        k: i64,
    },
    /// Degree-bounded proof of the kernel identity for (k, i).
    Kernel {
        #[arg(long, allow_hyphen_values = true)]
        k: i64,
        #[arg(long, allow_hyphen_values = true)]
        i: i64,
    },
    /// Implicit solve for every r <= r_max, n <= n_max.
    Integrality {
        #[arg(long = "r-max", allow_hyphen_values = true)]
        r_max: i64,
        #[arg(long = "n-max", allow_hyphen_values = true)]
        n_max: i64,
    },
    /// Franel and Strehl closed forms against the implicit solve.
    Explicit {
        #[arg(long = "n-max", allow_hyphen_values = true)]
        n_max: i64,
    },
    /// Every check over a parameter box.
    All(AllArgs),
}

#[derive(Debug, Args)]
pub struct AllArgs {
    #[arg(long = "lemma-r-max", default_value_t = 4, allow_hyphen_values = true)]
    pub lemma_r_max: i64,
    #[arg(long = "lemma-k-max", default_value_t = 8, allow_hyphen_values = true)]
    pub lemma_k_max: i64,
    #[arg(long = "kernel-max", default_value_t = 20, allow_hyphen_values = true)]
    pub kernel_max: i64,
    #[arg(long = "r-max", default_value_t = 20, allow_hyphen_values = true)]
    pub r_max: i64,
    #[arg(long = "n-max", default_value_t = 9, allow_hyphen_values = true)]
    pub n_max: i64,
    #[arg(
        long = "explicit-n-max",
        default_value_t = 60,
        allow_hyphen_values = true
    )]
    pub explicit_n_max: i64,
}

#[derive(Debug, Subcommand)]
pub enum GuessCommand {
    /// Solve s(k, j, i) for i in k..=j from tables r = 1..=r_max+1.
    SolveKernel {
        #[arg(long, allow_hyphen_values = true)]
        k: i64,
        #[arg(long, allow_hyphen_values = true)]
        j: i64,
        #[arg(long = "r-max", allow_hyphen_values = true)]
        r_max: i64,
    },
    /// Solve the kernel on a grid and search binomial-product closed forms.
    Fit {
        #[arg(long = "k-max", default_value_t = 4, allow_hyphen_values = true)]
        k_max: i64,
        #[arg(long = "j-max", default_value_t = 6, allow_hyphen_values = true)]
        j_max: i64,
        #[arg(long = "r-max", default_value_t = 14, allow_hyphen_values = true)]
        r_max: i64,
        #[arg(long = "max-factors", default_value_t = 3, allow_hyphen_values = true)]
        max_factors: i64,
        #[arg(
            long = "max-candidates",
            default_value_t = 10_000,
            allow_hyphen_values = true
        )]
        max_candidates: i64,
    },
}

#[derive(Debug, thiserror::Error)]
enum UsageError {
    #[error("--{name} must be {rule}, got {value}")]
    Param {
        name: &'static str,
        rule: &'static str,
        value: i64,
    },
    #[error("{0}")]
    Other(String),
}

fn nonneg(name: &'static str, value: i64) -> Result<usize, UsageError> {
    usize::try_from(value).map_err(|_| UsageError::Param {
        name,
        rule: "non-negative",
        value,
    })
}

fn power(name: &'static str, value: i64) -> Result<PowerIndex, UsageError> {
    PowerIndex::try_from(value).map_err(|_| UsageError::Param {
        name,
        rule: "at least 1",
        value,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct NumberReport {
    pub r: PowerIndex,
    pub n: usize,
    #[serde(with = "crate::serde_big::int")]
    pub value: ExactInt,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PolyReport {
    pub r: PowerIndex,
    pub n: usize,
    #[serde(with = "crate::serde_big::rat")]
    pub x: ExactRat,
    #[serde(with = "crate::serde_big::rat")]
    pub value: ExactRat,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TableEntry {
    pub k: usize,
    pub j: usize,
    #[serde(with = "crate::serde_big::int")]
    pub value: ExactInt,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TableDump {
    pub r: PowerIndex,
    pub k_max: usize,
    pub entries: Vec<TableEntry>,
}

impl From<&CoeffTable> for TableDump {
    fn from(t: &CoeffTable) -> Self {
        TableDump {
            r: t.r(),
            k_max: t.k_max(),
            entries: t
                .entries()
                .map(|(k, j, v)| TableEntry {
                    k,
                    j,
                    value: v.clone(),
                })
                .collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AllChecksReport {
    pub lemma: Vec<IdentityCheckResult>,
    pub kernel: Vec<IdentityCheckResult>,
    pub integrality: IntegralityReport,
    pub explicit: ExplicitCheckReport,
    pub passed: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FitReport {
    pub k_max: usize,
    pub j_max: usize,
    pub r_max: usize,
    pub solved: Vec<KernelValues>,
    pub bounds: SearchBounds,
    pub outcome: FitOutcome,
}

/// Everything a command can print.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Report {
    Number(NumberReport),
    Poly(PolyReport),
    Row(SchmidtRow),
    Implicit(ImplicitSolveReport),
    Table(TableDump),
    Identity(IdentityCheckResult),
    Integrality(IntegralityReport),
    Explicit(ExplicitCheckReport),
    All(AllChecksReport),
    Kernel(KernelValues),
    Fit(FitReport),
}

impl Report {
    /// Whether every check carried by the report passed.
    pub fn passed(&self) -> bool {
        match self {
            Report::Implicit(r) => r.all_integral,
            Report::Identity(r) => r.passed,
            Report::Integrality(r) => r.passed,
            Report::Explicit(r) => r.passed,
            Report::All(r) => r.passed,
            Report::Kernel(r) => r.consistent,
            Report::Number(_)
            | Report::Poly(_)
            | Report::Row(_)
            | Report::Table(_)
            | Report::Fit(_) => true,
        }
    }

    pub fn to_json(&self) -> serde_json::Result<String> {
        match self {
            Report::Number(r) => serde_json::to_string_pretty(r),
            Report::Poly(r) => serde_json::to_string_pretty(r),
            Report::Row(r) => serde_json::to_string_pretty(r),
            Report::Implicit(r) => serde_json::to_string_pretty(r),
            Report::Table(r) => serde_json::to_string_pretty(r),
            Report::Identity(r) => serde_json::to_string_pretty(r),
            Report::Integrality(r) => serde_json::to_string_pretty(r),
            Report::Explicit(r) => serde_json::to_string_pretty(r),
            Report::All(r) => serde_json::to_string_pretty(r),
            Report::Kernel(r) => serde_json::to_string_pretty(r),
            Report::Fit(r) => serde_json::to_string_pretty(r),
        }
    }

    pub fn to_csv(&self) -> Result<String, csv::Error> {
        let mut w = csv::Writer::from_writer(Vec::new());
        match self {
            Report::Number(r) => {
                w.write_record(["r", "n", "value"])?;
                w.write_record([r.r.to_string(), r.n.to_string(), r.value.to_string()])?;
            }
            Report::Poly(r) => {
                w.write_record(["r", "n", "x", "value"])?;
                w.write_record([
                    r.r.to_string(),
                    r.n.to_string(),
                    format_rat(&r.x),
                    format_rat(&r.value),
                ])?;
            }
            Report::Row(r) => {
                w.write_record(["k", "value"])?;
                for (k, v) in r.values.iter().enumerate() {
                    w.write_record([k.to_string(), v.to_string()])?;
                }
            }
            Report::Implicit(r) => {
                w.write_record(["k", "value"])?;
                for (k, v) in r.values.iter().enumerate() {
                    w.write_record([k.to_string(), format_rat(v)])?;
                }
            }
            Report::Table(t) => {
                w.write_record(["k", "j", "value"])?;
                for e in &t.entries {
                    w.write_record([e.k.to_string(), e.j.to_string(), e.value.to_string()])?;
                }
            }
            Report::Identity(r) => {
                write_identity_header(&mut w)?;
                write_identity_row(&mut w, r)?;
            }
            Report::Integrality(r) => {
                w.write_record(["r", "all_integral", "first_nonintegral_index"])?;
                for e in &r.per_r {
                    w.write_record([
                        e.r.to_string(),
                        e.all_integral.to_string(),
                        opt(e.first_nonintegral_index),
                    ])?;
                }
            }
            Report::Explicit(r) => {
                w.write_record(["n_max", "points_checked", "mismatches", "passed"])?;
                w.write_record([
                    r.n_max.to_string(),
                    r.points_checked.to_string(),
                    r.mismatches.len().to_string(),
                    r.passed.to_string(),
                ])?;
            }
            Report::All(r) => {
                w.write_record(["check", "passed"])?;
                let lemma = r.lemma.iter().all(|c| c.passed);
                let kernel = r.kernel.iter().all(|c| c.passed);
                w.write_record(["lemma", &lemma.to_string()])?;
                w.write_record(["kernel", &kernel.to_string()])?;
                w.write_record(["integrality", &r.integrality.passed.to_string()])?;
                w.write_record(["explicit", &r.explicit.passed.to_string()])?;
            }
            Report::Kernel(r) => {
                w.write_record(["k", "j", "i", "value"])?;
                for v in &r.values {
                    w.write_record([
                        r.k.to_string(),
                        r.j.to_string(),
                        v.i.to_string(),
                        format_rat(&v.value),
                    ])?;
                }
            }
            Report::Fit(r) => {
                w.write_record(["candidate"])?;
                for c in &r.outcome.candidates {
                    w.write_record([c.to_string()])?;
                }
            }
        }
        let bytes = w.into_inner().map_err(|e| e.into_error())?;
        Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
    }

    pub fn to_text(&self) -> String {
        match self {
            Report::Number(r) => format!("{}\n", r.value),
            Report::Poly(r) => format!("{}\n", format_rat(&r.value)),
            Report::Row(r) => r
                .values
                .iter()
                .enumerate()
                .map(|(k, v)| format!("{k}\t{v}\n"))
                .collect(),
            Report::Implicit(r) => r
                .values
                .iter()
                .enumerate()
                .map(|(k, v)| format!("{k}\t{}\n", format_rat(v)))
                .collect(),
            Report::Table(t) => t
                .entries
                .iter()
                .map(|e| format!("{}\t{}\t{}\n", e.k, e.j, e.value))
                .collect(),
            Report::Identity(r) => identity_line(r),
            Report::Integrality(r) => {
                let mut s: String = r
                    .per_r
                    .iter()
                    .map(|e| {
                        format!(
                            "r={:<3} {}\n",
                            e.r,
                            match e.first_nonintegral_index {
                                None => "integral".to_string(),
                                Some(n) => format!("non-integral at n={n}"),
                            }
                        )
                    })
                    .collect();
                s.push_str(&format!("{} (n <= {})\n", verdict(r.passed), r.n_max));
                s
            }
            Report::Explicit(r) => {
                let mut s: String = r
                    .mismatches
                    .iter()
                    .map(|m| {
                        format!(
                            "{} n={}: oracle {} vs {}\n",
                            m.formula, m.n, m.oracle, m.formula_value
                        )
                    })
                    .collect();
                s.push_str(&format!(
                    "{}: {} comparisons, n <= {}\n",
                    verdict(r.passed),
                    r.points_checked,
                    r.n_max
                ));
                s
            }
            Report::All(r) => {
                let count = |v: &[IdentityCheckResult]| v.iter().filter(|c| c.is_proof()).count();
                format!(
                    "lemma        {} ({}/{} proved)\nkernel       {} ({}/{} proved)\nintegrality  {}\nexplicit     {}\n{}\n",
                    verdict(r.lemma.iter().all(|c| c.passed)),
                    count(&r.lemma),
                    r.lemma.len(),
                    verdict(r.kernel.iter().all(|c| c.passed)),
                    count(&r.kernel),
                    r.kernel.len(),
                    verdict(r.integrality.passed),
                    verdict(r.explicit.passed),
                    verdict(r.passed),
                )
            }
            Report::Kernel(r) => {
                let mut s: String = r
                    .values
                    .iter()
                    .map(|v| format!("s({},{},{}) = {}\n", r.k, r.j, v.i, format_rat(&v.value)))
                    .collect();
                s.push_str(&format!(
                    "{} (square system from r = {:?}, {} equations checked)\n",
                    if r.consistent {
                        "consistent"
                    } else {
                        "INCONSISTENT"
                    },
                    r.r_used,
                    r.equations_checked
                ));
                s
            }
            Report::Fit(r) => {
                let o = &r.outcome;
                let mut s = format!(
                    "# {} candidate(s){}, {} data points, {} factor classes\n",
                    o.candidates.len(),
                    if o.truncated { " (truncated)" } else { "" },
                    o.data_points,
                    o.factor_classes
                );
                for c in &o.candidates {
                    s.push_str(&format!("{c}\n"));
                }
                s
            }
        }
    }

    pub fn render(&self, format: Format) -> Result<String, String> {
        match format {
            Format::Text => Ok(self.to_text()),
            Format::Json => self.to_json().map(|s| s + "\n").map_err(|e| e.to_string()),
            Format::Csv => self.to_csv().map_err(|e| e.to_string()),
        }
    }
}

fn verdict(ok: bool) -> &'static str {
    if ok {
        "PASS"
    } else {
        "FAIL"
    }
}

fn opt(v: Option<usize>) -> String {
    v.map(|n| n.to_string()).unwrap_or_default()
}

fn identity_line(r: &IdentityCheckResult) -> String {
    let names = match r.identity {
        crate::verify::Identity::LemmaMain => ("r", "k"),
        crate::verify::Identity::Kernel => ("k", "i"),
    };
    let mut s = format!(
        "{} ({}={}, {}={}): {}, {} points, degree bound {}\n",
        r.identity,
        names.0,
        r.parameters.0,
        names.1,
        r.parameters.1,
        verdict(r.passed),
        r.points_checked,
        r.degree_bound
    );
    if let Some(f) = &r.first_failure {
        s.push_str(&format!(
            "  first failure at n={}: lhs {} rhs {}\n",
            f.n, f.lhs, f.rhs
        ));
    }
    s
}

fn write_identity_header<W: Write>(w: &mut csv::Writer<W>) -> csv::Result<()> {
    w.write_record([
        "identity",
        "p1",
        "p2",
        "points_checked",
        "degree_bound",
        "passed",
        "failure_n",
        "lhs",
        "rhs",
    ])
}

fn write_identity_row<W: Write>(
    w: &mut csv::Writer<W>,
    r: &IdentityCheckResult,
) -> csv::Result<()> {
    let (n, lhs, rhs) = match &r.first_failure {
        Some(f) => (f.n.to_string(), f.lhs.to_string(), f.rhs.to_string()),
        None => Default::default(),
    };
    w.write_record([
        r.identity.to_string(),
        r.parameters.0.to_string(),
        r.parameters.1.to_string(),
        r.points_checked.to_string(),
        r.degree_bound.to_string(),
        r.passed.to_string(),
        n,
        lhs,
        rhs,
    ])
}

/// Validates parameters and runs the command.
pub fn execute(command: &Command) -> Result<Report, String> {
    dispatch(command).map_err(|e| e.to_string())
}

fn dispatch(command: &Command) -> Result<Report, UsageError> {
    Ok(match command {
        Command::S { r, n } => {
            let (r, n) = (power("r", *r)?, nonneg("n", *n)?);
            Report::Number(NumberReport {
                r,
                n,
                value: schmidt_s(r, n),
            })
        }
        Command::Poly { r, n, x } => {
            let (r, n) = (power("r", *r)?, nonneg("n", *n)?);
            let x = parse_rat(x).map_err(|e| UsageError::Other(format!("--x: {e}")))?;
            Report::Poly(PolyReport {
                r,
                n,
                value: schmidt_poly(r, n, &x),
                x,
            })
        }
        Command::C { r, k_max, method } => {
            let (r, k_max) = (power("r", *r)?, nonneg("k-max", *k_max)?);
            match method {
                Method::Table => Report::Row(column_sums(&table_for(r, k_max))),
                Method::Implicit => {
                    let rep = solve_implicit(r, k_max);
                    match rep.to_row() {
                        Ok(row) => Report::Row(row),
                        Err(_) => Report::Implicit(rep),
                    }
                }
            }
        }
        Command::Table { r, k_max } => {
            let (r, k_max) = (power("r", *r)?, nonneg("k-max", *k_max)?);
            Report::Table(TableDump::from(&table_for(r, k_max)))
        }
        Command::Verify { check } => match check {
            VerifyCommand::Lemma { r, k } => {
                let (r, k) = (power("r", *r)?, nonneg("k", *k)?);
                Report::Identity(verify_lemma(&table_for(r, k), k))
            }
            VerifyCommand::Kernel { k, i } => {
                Report::Identity(verify_kernel(nonneg("k", *k)?, nonneg("i", *i)?))
            }
            VerifyCommand::Integrality { r_max, n_max } => Report::Integrality(sweep_integrality(
                power("r-max", *r_max)?,
                nonneg("n-max", *n_max)?,
            )),
            VerifyCommand::Explicit { n_max } => {
                Report::Explicit(cross_check_explicit(nonneg("n-max", *n_max)?))
            }
            VerifyCommand::All(a) => {
                let lemma_r = power("lemma-r-max", a.lemma_r_max)?;
                let lemma_k = nonneg("lemma-k-max", a.lemma_k_max)?;
                let kernel_max = nonneg("kernel-max", a.kernel_max)?;
                let r_max = power("r-max", a.r_max)?;
                let n_max = nonneg("n-max", a.n_max)?;
                let explicit_n = nonneg("explicit-n-max", a.explicit_n_max)?;
                let lemma = verify_lemma_grid(&table_series(lemma_r, lemma_k));
                let kernel = verify_kernel_grid(kernel_max, kernel_max);
                let integrality = sweep_integrality(r_max, n_max);
                let explicit = cross_check_explicit(explicit_n);
                let passed = lemma.iter().all(|c| c.passed)
                    && kernel.iter().all(|c| c.passed)
                    && integrality.passed
                    && explicit.passed;
                Report::All(AllChecksReport {
                    lemma,
                    kernel,
                    integrality,
                    explicit,
                    passed,
                })
            }
        },
        Command::Guess { step } => match step {
            GuessCommand::SolveKernel { k, j, r_max } => {
                let (k, j) = (nonneg("k", *k)?, nonneg("j", *j)?);
                let r_max = power("r-max", *r_max)?;
                let tables = table_series(r_max.next(), k);
                let kv = solve_kernel(&tables, k, j, r_max.as_usize())
                    .map_err(|e| UsageError::Other(e.to_string()))?;
                Report::Kernel(kv)
            }
            GuessCommand::Fit {
                k_max,
                j_max,
                r_max,
                max_factors,
                max_candidates,
            } => {
                let (k_max, j_max) = (nonneg("k-max", *k_max)?, nonneg("j-max", *j_max)?);
                let r_max = power("r-max", *r_max)?;
                let bounds = SearchBounds {
                    max_factors: nonneg("max-factors", *max_factors)?,
                    max_candidates: nonneg("max-candidates", *max_candidates)?,
                    ..SearchBounds::default()
                };
                let tables = table_series(r_max.next(), k_max);
                let solved = solve_kernel_grid(&tables, k_max, j_max, r_max.as_usize())
                    .map_err(|e| UsageError::Other(e.to_string()))?;
                let outcome = fit_ansatz(&solved, &bounds);
                Report::Fit(FitReport {
                    k_max,
                    j_max,
                    r_max: r_max.as_usize(),
                    solved,
                    bounds,
                    outcome,
                })
            }
        },
    })
}

fn default_format(command: &Command) -> Format {
    match command {
        Command::Verify { .. } => Format::Json,
        _ => Format::Text,
    }
}

/// Full CLI entry point; returns the process exit status.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let sink: &mut dyn Write = if e.use_stderr() { stderr } else { stdout };
            let _ = write!(sink, "{}", e.render());
            return e.exit_code();
        }
    };
    let report = match execute(&cli.command) {
        Ok(r) => r,
        Err(msg) => {
            let _ = writeln!(stderr, "error: {msg}");
            return EXIT_USAGE;
        }
    };
    let format = cli.format.unwrap_or_else(|| default_format(&cli.command));
    let body = match report.render(format) {
        Ok(b) => b,
        Err(msg) => {
            let _ = writeln!(stderr, "error: {msg}");
            return EXIT_USAGE;
        }
    };
    let written = match &cli.out {
        Some(path) => File::create(path).and_then(|mut f| f.write_all(body.as_bytes())),
        None => stdout.write_all(body.as_bytes()),
    };
    if let Err(e) = written {
        let _ = writeln!(stderr, "error: writing report: {e}");
        return EXIT_USAGE;
    }
    if report.passed() {
        EXIT_OK
    } else {
        EXIT_CHECK_FAILED
    }
}

/// `run` on the real process streams.
pub fn main_with_args(args: impl IntoIterator<Item = std::ffi::OsString>) -> i32 {
    run(args, &mut io::stdout().lock(), &mut io::stderr().lock())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_args(args: &[&str]) -> (i32, String, String) {
        let mut out = Vec::new();
        let mut err = Vec::new();
        let code = run(
            std::iter::once("schmidt").chain(args.iter().copied()),
            &mut out,
            &mut err,
        );
        (
            code,
            String::from_utf8(out).unwrap(),
            String::from_utf8(err).unwrap(),
        )
    }

    #[test]
    fn s_prints_value() {
        assert_eq!(
            run_args(&["s", "--r", "2", "--n", "2"]),
            (0, "73\n".into(), String::new())
        );
    }

    #[test]
    fn validation_errors_exit_two() {
        let (code, out, err) = run_args(&["s", "--r", "0", "--n", "2"]);
        assert_eq!(code, 2);
        assert!(out.is_empty());
        assert!(err.contains("--r must be at least 1"));
        assert_eq!(run_args(&["s", "--r", "2", "--n", "-1"]).0, 2);
        assert_eq!(run_args(&["bogus"]).0, 2);
        assert_eq!(
            run_args(&["poly", "--r", "1", "--n", "1", "--x", "1/0"]).0,
            2
        );
        assert_eq!(
            run_args(&[
                "guess",
                "solve-kernel",
                "--k",
                "0",
                "--j",
                "2",
                "--r-max",
                "3"
            ])
            .0,
            2
        );
    }

    #[test]
    fn verify_defaults_to_json() {
        let (code, out, _) = run_args(&["verify", "kernel", "--k", "1", "--i", "1"]);
        assert_eq!(code, 0);
        let v: serde_json::Value = serde_json::from_str(&out).unwrap();
        assert_eq!(v["passed"], true);
        assert_eq!(v["degree_bound"], 4);
        assert_eq!(v["points_checked"], 5);
    }

    #[test]
    fn csv_quotes_candidates() {
        let (code, out, _) = run_args(&["guess", "fit", "--format", "csv"]);
        assert_eq!(code, 0);
        assert!(out.lines().any(|l| l == "\"C(k+i,i)*C(k,j-i)*C(j,k)\""));
    }
}
