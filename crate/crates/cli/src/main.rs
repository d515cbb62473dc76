//! `strichartz`: run verification suites for the sharp Strichartz estimates and write
//! machine-readable reports.
//!
//! Exit status is 0 when every check passes, 1 when a check fails or a computation
//! errors, and 2 for usage errors.

// `!(x > 0.0)` is used on purpose: it also rejects NaN
#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod config;
mod report;
mod suites;

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use config::{Overrides, RunConfig, Suite, UsageError};
use report::{write_rows, Row};
use suites::SuiteError;

/// Default worker threads; unset leaves the choice to rayon.
const THREADS_ENV: &str = "STRICHARTZ_THREADS";

#[derive(Parser, Debug)]
#[command(name = "strichartz", version, about = "Numerical checks of sharp Strichartz estimates")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    overrides: Overrides,
}

#[derive(Subcommand, Debug, Clone, Copy)]
enum Command {
    /// Sharp constants W(d,k), S(d,k): log-gamma path against direct products.
    Constants,
    /// Wave shell convolutions: closed form, recursion and smoothed Monte Carlo.
    Shells,
    /// k-linear wave estimate on random and extremal tuples, and the term II identity.
    Bilinear,
    /// Mixed-norm, one-sided L^4, energy and cross-term checks.
    Corollary,
    /// The one-dimensional Schrödinger bilinear identity on a grid.
    SchrodingerIdentity,
    /// Extremizer search from random restarts.
    Search,
    /// Functional equation residuals and symmetry invariance.
    Audit,
    /// Every suite with its default cases.
    All,
}

impl Command {
    fn suite(self) -> Suite {
        match self {
            Command::Constants => Suite::Constants,
            Command::Shells => Suite::Shells,
            Command::Bilinear => Suite::Bilinear,
            Command::Corollary => Suite::Corollary,
            Command::SchrodingerIdentity => Suite::SchrodingerIdentity,
            Command::Search => Suite::Search,
            Command::Audit => Suite::Audit,
            Command::All => Suite::All,
        }
    }
}

fn init_threads() -> Result<(), UsageError> {
    let Ok(v) = std::env::var(THREADS_ENV) else { return Ok(()) };
    let n: usize = v.trim().parse().ok().filter(|&n| n > 0).ok_or_else(|| UsageError::Value {
        key: THREADS_ENV.into(),
        msg: format!("expected a positive integer, got `{v}`"),
    })?;
    // a second initialization only happens in tests; keep the existing pool
    let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    Ok(())
}

fn print_table(out: &mut impl Write, suite: Suite, notes: &[String], rows: &[Row]) -> io::Result<()> {
    for n in notes {
        writeln!(out, "{n}")?;
    }
    let width = rows.iter().map(|r| r.suite.len() + r.case_id.len() + 1).max().unwrap_or(0);
    for r in rows {
        let name = format!("{} {}", r.suite, r.case_id);
        writeln!(
            out,
            "[{}] {name:<width$}  lhs {:>23.15e}  rhs {:>23.15e}  ratio {:.12}  stderr {:.1e}",
            if r.pass { "PASS" } else { "FAIL" },
            r.lhs,
            r.rhs,
            r.ratio,
            r.stderr
        )?;
    }
    let passed = rows.iter().filter(|r| r.pass).count();
    writeln!(out, "{suite}: {passed} of {} checks passed", rows.len())
}

fn execute(cfg: &RunConfig) -> Result<bool, SuiteError> {
    let output = suites::run(cfg)?;
    let stdout = io::stdout();
    let mut lock = stdout.lock();
    match (&cfg.out, cfg.csv) {
        (Some(path), csv) => {
            write_rows(&output.rows, csv, BufWriter::new(File::create(path)?))?;
            print_table(&mut lock, cfg.suite, &output.notes, &output.rows)?;
        }
        (None, true) => write_rows(&output.rows, true, &mut lock)?,
        (None, false) => print_table(&mut lock, cfg.suite, &output.notes, &output.rows)?,
    }
    Ok(output.rows.iter().all(|r| r.pass))
}

fn main() -> ExitCode {
    // clap exits with status 2 on usage errors and 0 for --help/--version
    let cli = Cli::parse();
    let cfg = match init_threads().and_then(|()| RunConfig::resolve(cli.command.suite(), &cli.overrides)) {
        Ok(cfg) => cfg,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    match execute(&cfg) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(SuiteError::Usage(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
