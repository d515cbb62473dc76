//! Run configuration: flat `key = value` files, overridden by flags.

use std::collections::BTreeMap;
use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use strichartz_core::Family;

/// Problems with the invocation itself; these exit with status 2.
#[derive(Debug, thiserror::Error)]
pub enum UsageError {
    #[error("cannot read config {path}: {source}")]
    Read { path: PathBuf, source: std::io::Error },
    #[error("config line {line}: expected `key = value`, got `{text}`")]
    Syntax { line: usize, text: String },
    #[error("unknown config key `{0}`")]
    UnknownKey(String),
    #[error("bad value for `{key}`: {msg}")]
    Value { key: String, msg: String },
    #[error("{0}")]
    Unsupported(String),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Suite {
    Constants,
    Shells,
    Bilinear,
    Corollary,
    SchrodingerIdentity,
    Search,
    Audit,
    All,
}

impl Suite {
    pub fn name(self) -> &'static str {
        match self {
            Suite::Constants => "constants",
            Suite::Shells => "shells",
            Suite::Bilinear => "bilinear",
            Suite::Corollary => "corollary",
            Suite::SchrodingerIdentity => "schrodinger-identity",
            Suite::Search => "search",
            Suite::Audit => "audit",
            Suite::All => "all",
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Values given on the command line; `None` falls back to the config file, then defaults.
#[derive(Clone, Debug, Default, clap::Args)]
pub struct Overrides {
    /// Flat `key = value` file; flags take precedence.
    #[arg(long, global = true, value_name = "PATH")]
    pub config: Option<PathBuf>,
    /// Spatial dimension.
    #[arg(long, global = true)]
    pub d: Option<usize>,
    /// Multilinearity degree.
    #[arg(long, global = true)]
    pub k: Option<usize>,
    /// `wave` or `schrodinger`.
    #[arg(long, global = true)]
    pub family: Option<String>,
    /// Comma-separated base seeds; randomized suites repeat once per seed.
    #[arg(long, global = true, value_name = "LIST")]
    pub seeds: Option<String>,
    /// Multiplies every acceptance tolerance.
    #[arg(long, global = true, value_name = "FACTOR")]
    pub tol_scale: Option<f64>,
    /// Monte Carlo sample count (random tuples for `bilinear`).
    #[arg(long, global = true)]
    pub samples: Option<u64>,
    /// Width of the smoothed delta in `shells`.
    #[arg(long, global = true)]
    pub epsilon: Option<f64>,
    /// Cone point `tau,xi_1,...,xi_d` for `shells`.
    #[arg(long, global = true, value_name = "TAU,XI..")]
    pub point: Option<String>,
    /// Grid size for `schrodinger-identity`.
    #[arg(long, global = true)]
    pub grid: Option<usize>,
    /// Restarts for `search`.
    #[arg(long, global = true)]
    pub restarts: Option<usize>,
    /// Objective evaluations per restart for `search`.
    #[arg(long, global = true)]
    pub budget: Option<usize>,
    /// Report file (JSON lines, or CSV with `--csv`).
    #[arg(long, global = true, value_name = "PATH")]
    pub out: Option<PathBuf>,
    /// Tabular CSV instead of JSON lines.
    #[arg(long, global = true)]
    pub csv: bool,
    /// CSV of the best search trace.
    #[arg(long, global = true, value_name = "PATH")]
    pub trace: Option<PathBuf>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    pub suite: Suite,
    pub d: Option<usize>,
    pub k: Option<usize>,
    pub family: Option<Family>,
    pub seeds: Vec<u64>,
    pub tol_scale: f64,
    pub samples: Option<u64>,
    pub epsilon: f64,
    pub point: Option<Vec<f64>>,
    pub grid: usize,
    pub restarts: usize,
    pub budget: usize,
    pub out: Option<PathBuf>,
    pub csv: bool,
    pub trace: Option<PathBuf>,
}

const KEYS: [&str; 14] = [
    "d",
    "k",
    "family",
    "seeds",
    "tol_scale",
    "samples",
    "epsilon",
    "point",
    "grid",
    "restarts",
    "budget",
    "out",
    "csv",
    "trace",
];

/// Parse `key = value` lines; `#` starts a comment and `-` in keys reads as `_`.
pub fn parse_file(text: &str) -> Result<BTreeMap<String, String>, UsageError> {
    let mut map = BTreeMap::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line.split_once('=').ok_or_else(|| UsageError::Syntax { line: i + 1, text: raw.into() })?;
        let key = key.trim().replace('-', "_");
        if !KEYS.contains(&key.as_str()) {
            return Err(UsageError::UnknownKey(key));
        }
        map.insert(key, value.trim().trim_matches('"').to_string());
    }
    Ok(map)
}

fn parse<T: FromStr>(key: &str, s: &str) -> Result<T, UsageError>
where
    T::Err: fmt::Display,
{
    s.trim().parse().map_err(|e: T::Err| UsageError::Value { key: key.into(), msg: e.to_string() })
}

fn parse_list<T: FromStr>(key: &str, s: &str) -> Result<Vec<T>, UsageError>
where
    T::Err: fmt::Display,
{
    s.split(',').map(|x| parse(key, x)).collect()
}

fn parse_bool(key: &str, s: &str) -> Result<bool, UsageError> {
    match s.to_ascii_lowercase().as_str() {
        "true" | "yes" | "1" => Ok(true),
        "false" | "no" | "0" => Ok(false),
        _ => Err(UsageError::Value { key: key.into(), msg: format!("expected a boolean, got `{s}`") }),
    }
}

impl RunConfig {
    pub fn resolve(suite: Suite, o: &Overrides) -> Result<Self, UsageError> {
        let file = match &o.config {
            Some(path) => read(path)?,
            None => BTreeMap::new(),
        };
        Self::merge(suite, o, &file)
    }

    pub fn merge(suite: Suite, o: &Overrides, file: &BTreeMap<String, String>) -> Result<Self, UsageError> {
        let get = |key: &str| file.get(key).map(String::as_str);
        let pick = |flag: Option<String>, key: &str| flag.or_else(|| get(key).map(str::to_string));
        let num = |flag: Option<String>, key: &str| pick(flag, key).map(|s| parse::<f64>(key, &s)).transpose();

        let d = pick(o.d.map(|x| x.to_string()), "d").map(|s| parse("d", &s)).transpose()?;
        let k = pick(o.k.map(|x| x.to_string()), "k").map(|s| parse("k", &s)).transpose()?;
        let family = pick(o.family.clone(), "family").map(|s| parse::<Family>("family", &s)).transpose()?;
        let seeds = pick(o.seeds.clone(), "seeds").map(|s| parse_list("seeds", &s)).transpose()?.unwrap_or(vec![1]);
        let tol_scale = num(o.tol_scale.map(|x| x.to_string()), "tol_scale")?.unwrap_or(1.0);
        let samples = pick(o.samples.map(|x| x.to_string()), "samples").map(|s| parse("samples", &s)).transpose()?;
        let epsilon = num(o.epsilon.map(|x| x.to_string()), "epsilon")?.unwrap_or(1e-3);
        let point = pick(o.point.clone(), "point").map(|s| parse_list("point", &s)).transpose()?;
        let grid = pick(o.grid.map(|x| x.to_string()), "grid").map(|s| parse("grid", &s)).transpose()?.unwrap_or(4096);
        let restarts =
            pick(o.restarts.map(|x| x.to_string()), "restarts").map(|s| parse("restarts", &s)).transpose()?;
        let budget = pick(o.budget.map(|x| x.to_string()), "budget").map(|s| parse("budget", &s)).transpose()?;
        let csv = o.csv || get("csv").map(|s| parse_bool("csv", s)).transpose()?.unwrap_or(false);
        let out = o.out.clone().or_else(|| get("out").map(PathBuf::from));
        let trace = o.trace.clone().or_else(|| get("trace").map(PathBuf::from));

        let cfg = RunConfig {
            suite,
            d,
            k,
            family,
            seeds,
            tol_scale,
            samples,
            epsilon,
            point,
            grid,
            restarts: restarts.unwrap_or(5),
            budget: budget.unwrap_or(500),
            out,
            csv,
            trace,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    fn validate(&self) -> Result<(), UsageError> {
        let bad = |key: &str, msg: &str| Err(UsageError::Value { key: key.into(), msg: msg.into() });
        if self.seeds.is_empty() {
            return bad("seeds", "need at least one seed");
        }
        if !(self.tol_scale > 0.0 && self.tol_scale.is_finite()) {
            return bad("tol_scale", "must be positive");
        }
        if !(self.epsilon > 0.0 && self.epsilon.is_finite()) {
            return bad("epsilon", "must be positive");
        }
        if self.samples == Some(0) || self.samples == Some(1) {
            return bad("samples", "need at least two");
        }
        if self.grid < 16 || !self.grid.is_power_of_two() {
            return bad("grid", "must be a power of two, at least 16");
        }
        if self.restarts == 0 || self.budget == 0 {
            return bad("restarts", "restarts and budget must be positive");
        }
        if let Some(p) = &self.point {
            if p.len() < 3 {
                return bad("point", "need tau and at least two spatial components");
            }
            if self.d.is_some_and(|d| d + 1 != p.len()) {
                return bad("point", "length must be d + 1");
            }
        }
        Ok(())
    }
}

fn read(path: &Path) -> Result<BTreeMap<String, String>, UsageError> {
    let text = std::fs::read_to_string(path).map_err(|source| UsageError::Read { path: path.into(), source })?;
    parse_file(&text)
}
