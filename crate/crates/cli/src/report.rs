//! Report rows and their JSON-lines and CSV encodings.

use std::io::{self, Write};

use serde::Serialize;
use strichartz_core::special_constants::sig15;
use strichartz_core::strichartz_functionals::json_line;

/// One acceptance check. Fields that do not apply are null.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Row {
    pub suite: String,
    pub case_id: String,
    pub lhs: f64,
    pub rhs: f64,
    pub constant: Option<f64>,
    pub ratio: f64,
    pub deficit: f64,
    pub stderr: f64,
    pub seed: Option<u64>,
    pub pass: bool,
}

impl Row {
    /// A comparison of `lhs` against `rhs` with `ratio = lhs/rhs`.
    pub fn compare(suite: &str, case_id: impl Into<String>, lhs: f64, rhs: f64, stderr: f64, pass: bool) -> Self {
        let ratio = lhs / rhs;
        Row {
            suite: suite.into(),
            case_id: case_id.into(),
            lhs,
            rhs,
            constant: None,
            ratio,
            deficit: 1.0 - ratio,
            stderr,
            seed: None,
            pass,
        }
    }

    pub fn with_constant(mut self, c: f64) -> Self {
        self.constant = Some(c);
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = Some(seed);
        self
    }
}

pub const CSV_HEADER: &str = "suite,case_id,lhs,rhs,constant,ratio,deficit,stderr,seed,pass";

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

pub fn csv_line(r: &Row) -> String {
    format!(
        "{},{},{},{},{},{},{},{},{},{}",
        csv_field(&r.suite),
        csv_field(&r.case_id),
        sig15(r.lhs),
        sig15(r.rhs),
        r.constant.map(sig15).unwrap_or_default(),
        sig15(r.ratio),
        sig15(r.deficit),
        sig15(r.stderr),
        r.seed.map(|s| s.to_string()).unwrap_or_default(),
        r.pass
    )
}

pub fn write_rows<W: Write>(rows: &[Row], csv: bool, mut w: W) -> io::Result<()> {
    if csv {
        writeln!(w, "{CSV_HEADER}")?;
        for r in rows {
            writeln!(w, "{}", csv_line(r))?;
        }
    } else {
        for r in rows {
            writeln!(w, "{}", json_line(r))?;
        }
    }
    w.flush()
}
