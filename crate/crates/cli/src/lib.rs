//! Command-line front end for `simroots`.
//!
//! Three subcommands: `solve` runs one method on a problem file and writes a
//! JSON report (plus an optional CSV trace), `compare` runs a convergence
//! study over several methods from a common perturbed start, and `selftest`
//! runs the embedded identity suites.
//!
//! Exit codes: 0 success, 1 the solver ran but did not converge, 2 usage or
//! input error.

pub mod error;
pub mod problem;
pub mod report;

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use simroots::driver::{self, convergence_study};
use simroots::{selftest, MethodSpec, SolveConfig, Termination};

pub use error::CliError;
pub use problem::{Problem, ProblemFile};
pub use report::{CompareReport, CompareRow, SolveReport};

pub const EXIT_OK: u8 = 0;
pub const EXIT_NOT_CONVERGED: u8 = 1;
pub const EXIT_USAGE: u8 = 2;

pub const METHOD_NAMES: [&str; 7] = [
    "dk",
    "aberth",
    "gargantini",
    "mroot",
    "householder",
    "wlin",
    "wquad",
];

#[derive(Debug, Parser)]
#[command(
    name = "simroots",
    version,
    about = "Simultaneous polynomial root finding"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run one method on a problem file.
    Solve(SolveArgs),
    /// Compare several methods from a common start near the known roots.
    Compare(CompareArgs),
    /// Run the identity suites.
    Selftest(SelftestArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum MethodName {
    Dk,
    Aberth,
    Gargantini,
    Mroot,
    Householder,
    Wlin,
    Wquad,
}

#[derive(Debug, Args)]
pub struct SolveArgs {
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long, value_enum)]
    pub method: MethodName,
    /// Order parameter for mroot, wlin and wquad.
    #[arg(long)]
    pub m: Option<usize>,
    /// Order parameter for householder.
    #[arg(long)]
    pub d: Option<usize>,
    /// Residual tolerance on max |f(z_i)|.
    #[arg(long, default_value_t = 1e-12)]
    pub tol: f64,
    #[arg(long, default_value_t = 200)]
    pub max_iter: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Write the per-iteration trace as CSV.
    #[arg(long)]
    pub trace: Option<PathBuf>,
    /// Report destination; `stdout` or omitted prints it.
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct CompareArgs {
    #[arg(long)]
    pub input: PathBuf,
    /// Comma-separated list such as `dk,aberth,householder:2`.
    #[arg(long)]
    pub methods: String,
    #[arg(long, default_value_t = 1e-2)]
    pub init_error: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub max_iter: Option<usize>,
    /// Also write the table as CSV.
    #[arg(long)]
    pub csv: Option<PathBuf>,
    /// JSON destination; `stdout` or omitted prints it.
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SelftestArgs {
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

/// Builds a method from `--method` plus `--m`/`--d`, rejecting parameters
/// that do not belong to the method.
pub fn method_from_flags(
    name: MethodName,
    m: Option<usize>,
    d: Option<usize>,
) -> Result<MethodSpec, CliError> {
    let none = |flag: &str, v: Option<usize>| match v {
        Some(_) => Err(CliError::Usage(format!(
            "--{flag} does not apply to this method"
        ))),
        None => Ok(()),
    };
    let need = |flag: &str, v: Option<usize>, method: &str| {
        v.ok_or_else(|| CliError::Usage(format!("--method {method} requires --{flag}")))
    };
    Ok(match name {
        MethodName::Dk | MethodName::Aberth | MethodName::Gargantini => {
            none("m", m)?;
            none("d", d)?;
            match name {
                MethodName::Dk => MethodSpec::DurandKerner,
                MethodName::Aberth => MethodSpec::Aberth,
                _ => MethodSpec::Gargantini,
            }
        }
        MethodName::Mroot => {
            none("d", d)?;
            MethodSpec::MthRoot(need("m", m, "mroot")?)
        }
        MethodName::Householder => {
            none("m", m)?;
            MethodSpec::Householder(need("d", d, "householder")?)
        }
        MethodName::Wlin => {
            none("d", d)?;
            MethodSpec::WeierstrassLinear(need("m", m, "wlin")?)
        }
        MethodName::Wquad => {
            none("d", d)?;
            MethodSpec::WeierstrassQuadratic(need("m", m, "wquad")?)
        }
    })
}

/// Parses one `name` or `name:k` item of a method list.
pub fn parse_method(item: &str) -> Result<MethodSpec, CliError> {
    let item = item.trim();
    let (name, param) = match item.split_once(':') {
        Some((n, p)) => {
            let k = p
                .parse::<usize>()
                .map_err(|_| CliError::Usage(format!("bad parameter in method `{item}`")))?;
            (n, Some(k))
        }
        None => (item, None),
    };
    let kind = MethodName::from_str(name, true).map_err(|_| {
        CliError::Usage(format!(
            "unknown method `{name}`; valid names: {}",
            METHOD_NAMES.join(", ")
        ))
    })?;
    let (m, d) = match kind {
        MethodName::Householder => (None, param),
        _ => (param, None),
    };
    method_from_flags(kind, m, d)
        .map_err(|e| CliError::Usage(format!("method `{item}`: {e} (write it as name:k)")))
}

pub fn parse_method_list(list: &str) -> Result<Vec<MethodSpec>, CliError> {
    let methods = list
        .split(',')
        .filter(|s| !s.trim().is_empty())
        .map(parse_method)
        .collect::<Result<Vec<_>, _>>()?;
    if methods.is_empty() {
        return Err(CliError::Usage("--methods is empty".into()));
    }
    Ok(methods)
}

fn open_output(path: Option<&Path>) -> Result<Box<dyn Write>, CliError> {
    match path {
        None => Ok(Box::new(io::stdout().lock())),
        Some(p) if p == Path::new("stdout") || p == Path::new("-") => {
            Ok(Box::new(io::stdout().lock()))
        }
        Some(p) => {
            let f = File::create(p).map_err(|source| CliError::Write {
                path: p.to_owned(),
                source,
            })?;
            Ok(Box::new(BufWriter::new(f)))
        }
    }
}

fn write_json<T: serde::Serialize>(value: &T, path: Option<&Path>) -> Result<(), CliError> {
    let display = path.map(Path::to_owned).unwrap_or_else(|| "stdout".into());
    let mut out = open_output(path)?;
    serde_json::to_writer_pretty(&mut out, value)?;
    writeln!(out)
        .and_then(|_| out.flush())
        .map_err(|source| CliError::Write {
            path: display,
            source,
        })
}

fn create(path: &Path) -> Result<BufWriter<File>, CliError> {
    File::create(path)
        .map(BufWriter::new)
        .map_err(|source| CliError::Write {
            path: path.to_owned(),
            source,
        })
}

/// Only an exhausted iteration budget or a singular breakdown count as
/// non-convergence; stagnation means the iteration reached the rounding floor
/// of the residual, which for large roots can sit above `--tol`.
pub fn exit_code_for(t: Termination) -> u8 {
    match t {
        Termination::MaxIterReached | Termination::Singular => EXIT_NOT_CONVERGED,
        Termination::ResidualMet | Termination::StepMet | Termination::Stagnated => EXIT_OK,
    }
}

pub fn cmd_solve(args: &SolveArgs) -> Result<u8, CliError> {
    let method = method_from_flags(args.method, args.m, args.d)?;
    let problem = problem::load_problem(&args.input)?;
    let p = &problem.polynomial;
    method.validate(p.degree())?;
    let cfg = SolveConfig {
        tol_residual: args.tol,
        max_iter: args.max_iter,
        seed: args.seed,
        ..SolveConfig::default()
    };
    cfg.validate()?;
    let trace = driver::solve(method, p, &cfg, problem.known_roots.as_deref())?;
    if let Some(path) = &args.trace {
        report::write_trace_csv(&trace, create(path)?)?;
    }
    let rep = SolveReport::from_trace(problem.label, &trace);
    write_json(&rep, args.output.as_deref())?;
    Ok(exit_code_for(trace.termination))
}

pub fn cmd_compare(args: &CompareArgs) -> Result<u8, CliError> {
    let methods = parse_method_list(&args.methods)?;
    let problem = problem::load_problem(&args.input)?;
    let roots = problem
        .known_roots
        .as_deref()
        .ok_or_else(|| CliError::Usage("compare needs known_roots in the problem file".into()))?;
    let p = &problem.polynomial;
    for m in &methods {
        m.validate(p.degree())?;
    }
    let mut cfg = SolveConfig {
        seed: args.seed,
        ..SolveConfig::default()
    };
    if let Some(k) = args.max_iter {
        cfg.max_iter = k;
    }
    let rows: Vec<CompareRow> =
        convergence_study(p, roots, &methods, &cfg, args.init_error, args.seed)?
            .iter()
            .map(CompareRow::from)
            .collect();
    if let Some(path) = &args.csv {
        report::write_compare_csv(&rows, create(path)?)?;
    }
    let rep = CompareReport {
        label: problem.label,
        degree: p.degree(),
        init_error: args.init_error,
        seed: args.seed,
        rows,
    };
    write_json(&rep, args.output.as_deref())?;
    Ok(EXIT_OK)
}

/// Prints one line per suite; returns 1 if any failed.
pub fn cmd_selftest(args: &SelftestArgs, out: &mut dyn Write) -> Result<u8, CliError> {
    let suites = selftest::run_all(args.seed)?;
    let io_err = |source| CliError::Write {
        path: "stdout".into(),
        source,
    };
    let mut failed = 0;
    for s in &suites {
        let verdict = if s.passed { "PASS" } else { "FAIL" };
        writeln!(
            out,
            "{verdict} {} ({} checks, max error {:.3e}, tolerance {:.0e})",
            s.name, s.cases, s.max_error, s.tolerance
        )
        .map_err(io_err)?;
        if let Some(d) = s.detail.as_ref().filter(|_| !s.passed) {
            writeln!(out, "     first failure: {d}").map_err(io_err)?;
        }
        if !s.passed {
            failed += 1;
        }
    }
    writeln!(
        out,
        "{} of {} suites passed (seed {})",
        suites.len() - failed,
        suites.len(),
        args.seed
    )
    .map_err(io_err)?;
    Ok(if failed == 0 {
        EXIT_OK
    } else {
        EXIT_NOT_CONVERGED
    })
}

/// Runs a parsed command and maps errors to exit code 2.
pub fn dispatch(cli: &Cli) -> u8 {
    let result = match &cli.command {
        Command::Solve(a) => cmd_solve(a),
        Command::Compare(a) => cmd_compare(a),
        Command::Selftest(a) => cmd_selftest(a, &mut io::stdout().lock()),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
