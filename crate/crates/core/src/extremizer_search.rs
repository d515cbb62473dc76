//! Simplex ascent of Strichartz quotients over a radial log-profile ansatz.
//!
//! The ansatz is `log g(r) = -phi(r) + sum_{i=1}^m theta_i w(r)^i` with
//! `phi = r, w = r/(1+r)` for waves and `phi = r^2, w = r^2/(1+r^2)` for Schrödinger data.
//! The leading coefficient is pinned to `-1`: dilations, amplitudes, phases and translations
//! leave every quotient here unchanged, so they are removed from the coordinates. The
//! extremal profile is `theta = 0`.

use std::f64::consts::PI;
use std::io::Write;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::extremal_profiles::{symmetry_apply, ExtremalProfile, GroupElement, Sheet};
use crate::mc::derive_seed;
use crate::nelder_mead::{minimize, Stop};
use crate::propagators::{RadialEvaluator, RadialFn};
use crate::quadrature::Tolerance;
use crate::special::sphere_area;
use crate::special_constants::{EstimateScale, Family};
use crate::strichartz_functionals::{
    carneiro_quotient, carneiro_quotient_radial, lp_norm_radial, one_sided_constant, one_sided_quotient,
    one_sided_quotient_radial, radial_sobolev_sq, FourierGrid, QuadratureField, QuotientReport, RadialProfile,
    ReportMetadata, Valued,
};

pub const MAX_BASIS: usize = 12;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AnsatzProfile {
    pub family: Family,
    pub d: usize,
    pub theta: Vec<f64>,
}

impl AnsatzProfile {
    pub fn new(family: Family, d: usize, theta: Vec<f64>) -> Result<Self> {
        if theta.is_empty() || theta.len() > MAX_BASIS {
            return Err(Error::domain(format!("ansatz needs 1..={MAX_BASIS} coefficients, got {}", theta.len())));
        }
        if theta.iter().any(|t| !t.is_finite()) {
            return Err(Error::domain("ansatz coefficients must be finite"));
        }
        Ok(AnsatzProfile { family, d, theta })
    }

    /// The discretized extremal profile.
    pub fn extremal(family: Family, d: usize, m: usize) -> Result<Self> {
        Self::new(family, d, vec![0.0; m])
    }

    /// `(phi(r), w(r))` for the family.
    fn basis(family: Family, r: f64) -> (f64, f64) {
        let p = match family {
            Family::Wave => r,
            Family::Schrodinger => r * r,
        };
        (p, p / (1.0 + p))
    }

    pub fn log_g(&self, r: f64) -> f64 {
        let (p, w) = Self::basis(self.family, r);
        // Horner in w, lowest power 1
        let poly = self.theta.iter().rev().fold(0.0, |acc, t| (acc + t) * w);
        -p + poly
    }

    pub fn g(&self, r: f64) -> f64 {
        self.log_g(r).exp()
    }

    /// `sup_r sum theta_i w^i`, bounded by the positive part of the coefficients.
    fn shape_bound(&self) -> f64 {
        self.theta.iter().map(|t| t.max(0.0)).sum()
    }

    pub fn radial(&self) -> Result<RadialProfile> {
        let me = self.clone();
        let g: RadialFn = Arc::new(move |r: f64| me.g(r).into());
        RadialProfile::new(self.family, self.d, g, 1.0)
    }
}

/// Iterates of one simplex run: best point so far and its quotient.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SearchTrace {
    pub iterates: Vec<(Vec<f64>, f64)>,
    pub terminated_by: Termination,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Termination {
    Tolerance,
    Budget,
}

impl SearchTrace {
    pub fn is_monotone(&self) -> bool {
        self.iterates.windows(2).all(|w| w[1].1 >= w[0].1)
    }

    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<()> {
        let m = self.iterates.first().map_or(0, |(t, _)| t.len());
        let head: Vec<String> = (1..=m).map(|i| format!("theta{i}")).collect();
        writeln!(out, "iterate,quotient{}{}", if m > 0 { "," } else { "" }, head.join(","))?;
        for (i, (theta, q)) in self.iterates.iter().enumerate() {
            let row: Vec<String> = theta.iter().map(|t| format!("{t:.15e}")).collect();
            writeln!(out, "{i},{q:.15e},{}", row.join(","))?;
        }
        Ok(())
    }
}

/// Starting point of restart 0; later restarts always start at random.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Init {
    Extremal,
    Random,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SearchConfig {
    /// Objective evaluations per restart.
    pub budget: usize,
    /// Absolute spread of simplex quotients at which a restart stops.
    pub tol: f64,
    pub seed: u64,
    pub m: usize,
    pub restarts: usize,
    pub init: Init,
    /// Random starts draw `theta_i` uniformly from `[-spread, spread]`.
    pub spread: f64,
    pub step: f64,
    pub grid: FourierGrid,
    /// Quadrature tolerance for the space-time objective.
    pub rel_tol: f64,
}

impl Default for SearchConfig {
    fn default() -> Self {
        SearchConfig {
            budget: 500,
            tol: 1e-10,
            seed: 1,
            m: 6,
            restarts: 5,
            init: Init::Random,
            spread: 0.5,
            step: 0.3,
            grid: FourierGrid::default(),
            rel_tol: 1e-4,
        }
    }
}

/// Supported quotients.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Objective {
    /// `L^4` of the `d = 4` Schrödinger evolution against `||f||_2^{1/2} ||grad f||_2^{1/2}`.
    SchroMixed,
    /// One-sided `L^4` wave estimate in `d = 5`.
    WaveL4,
    /// One-sided `L^6` wave estimate in `d = 3`, by space-time quadrature.
    WaveL6,
}

impl Objective {
    pub fn for_case(d: usize, k: usize, family: Family) -> Result<Self> {
        match (d, k, family) {
            (4, 2, Family::Schrodinger) => Ok(Objective::SchroMixed),
            (5, 2, Family::Wave) => Ok(Objective::WaveL4),
            (3, 3, Family::Wave) => Ok(Objective::WaveL6),
            _ => Err(Error::Unsupported(format!("no search objective for d = {d}, k = {k}, {family}"))),
        }
    }

    fn family(self) -> Family {
        match self {
            Objective::SchroMixed => Family::Schrodinger,
            _ => Family::Wave,
        }
    }

    fn d(self) -> usize {
        match self {
            Objective::SchroMixed => 4,
            Objective::WaveL4 => 5,
            Objective::WaveL6 => 3,
        }
    }

    pub fn quotient(self, p: &AnsatzProfile, cfg: &SearchConfig) -> Result<QuotientReport> {
        if p.family != self.family() || p.d != self.d() {
            return Err(Error::domain("ansatz does not match the objective"));
        }
        let prof = p.radial()?;
        match self {
            Objective::SchroMixed => carneiro_quotient_radial(&prof, cfg.grid),
            Objective::WaveL4 => one_sided_quotient_radial(&prof, cfg.grid),
            Objective::WaveL6 => wave_l6_quotient(p, &prof, cfg.rel_tol),
        }
    }
}

fn wave_l6_quotient(p: &AnsatzProfile, prof: &RadialProfile, rel_tol: f64) -> Result<QuotientReport> {
    let d = p.d;
    let (k, c) = one_sided_constant(d)?;
    // tail of int_R^inf g rho^{d-2} drho with g <= e^{S - rho}
    let s = p.shape_bound();
    let n = d as f64 - 2.0;
    let mut radius = 40.0 + s;
    while (s - radius).exp() * radius.powf(n) > rel_tol * 1e-3 {
        radius += 5.0;
    }
    let pre = (2.0 * PI).powi(-(d as i32)) * sphere_area(d);
    let tail = pre * 2.0 * (s - radius).exp() * radius.powf(n);
    // |u| <= u(0, 0); far-field points only need accuracy relative to the peak
    // (the evaluator's tolerances apply before the (2 pi)^{-d} |S^{d-1}| prefactor)
    let peak = (1..=4000)
        .map(|j| {
            let r = j as f64 * radius / 4000.0;
            prof.g.as_ref()(r).re * r.powf(n)
        })
        .sum::<f64>()
        * radius
        / 4000.0;
    let tol = Tolerance::new(rel_tol * 1e-2 * peak, rel_tol * 1e-2).with_max_panels(20_000);
    let ev = RadialEvaluator::from_fn(d, Sheet::Plus, prof.g.clone(), radius, tail, tol)?;
    let field = QuadratureField { evaluator: ev, scale: 1.0 };
    let lhs = lp_norm_radial(&field, 2 * k as u32, Tolerance::new(0.0, rel_tol))?;
    let h_half = radial_sobolev_sq(prof, 0.5)?;
    let h_one = radial_sobolev_sq(prof, 1.0)?;
    let rhs = h_half.powf(k as f64 - 2.0) * h_one * h_one;
    let meta = ReportMetadata {
        label: format!("one-sided L^{} estimate, d = {d}, radial data", 2 * k),
        scale: Some(EstimateScale::new(d, k, Family::Wave)?),
        tolerance: rel_tol,
        method: "space-time quadrature of a frequency-quadrature field".into(),
        ..Default::default()
    };
    Ok(QuotientReport::new(Valued::new(lhs.integral, lhs.error), rhs, c, meta))
}

/// Least-squares fit of `log g` against `-rate phi(r) + intercept` on `[0.5, 4]`, with
/// `phi = r` (wave) or `r^2` (Schrödinger). `residual` is the root-mean-square misfit.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExpFit {
    pub rate: f64,
    pub intercept: f64,
    pub residual: f64,
}

pub const FIT_RANGE: (f64, f64) = (0.5, 4.0);
pub const FIT_THRESHOLD: f64 = 5e-2;

impl ExpFit {
    pub fn passes(&self) -> bool {
        self.residual < FIT_THRESHOLD && self.rate > 0.0
    }
}

pub fn exponential_fit(p: &AnsatzProfile) -> ExpFit {
    let n = 200;
    let (lo, hi) = FIT_RANGE;
    let pts: Vec<(f64, f64)> = (0..n)
        .map(|j| {
            let r = lo + (hi - lo) * j as f64 / (n - 1) as f64;
            (AnsatzProfile::basis(p.family, r).0, p.log_g(r))
        })
        .collect();
    let nf = n as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / nf;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / nf;
    let sxy: f64 = pts.iter().map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = pts.iter().map(|(x, _)| (x - mx) * (x - mx)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ss: f64 = pts.iter().map(|(x, y)| (y - intercept - slope * x).powi(2)).sum();
    ExpFit { rate: -slope, intercept, residual: (ss / nf).sqrt() }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RestartResult {
    pub seed: u64,
    pub start: Vec<f64>,
    pub best: AnsatzProfile,
    pub report: QuotientReport,
    pub trace: SearchTrace,
    pub evals: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SearchResult {
    pub objective: Objective,
    /// Index into `restarts` of the best quotient.
    pub best_index: usize,
    pub restarts: Vec<RestartResult>,
    pub fit: ExpFit,
}

impl SearchResult {
    pub fn best(&self) -> &RestartResult {
        &self.restarts[self.best_index]
    }

    pub fn trace(&self) -> &SearchTrace {
        &self.best().trace
    }

    /// Any restart ended on the budget rather than the tolerance.
    pub fn partial(&self) -> bool {
        self.restarts.iter().any(|r| r.trace.terminated_by == Termination::Budget)
    }

    /// No restart found a quotient above the sharp constant beyond `factor` error bounds.
    pub fn never_super_sharp(&self, factor: f64) -> bool {
        self.restarts.iter().all(|r| r.report.within_bound(factor))
    }
}

/// Simplex ascent with independent restarts, run in parallel and merged by restart index.
pub fn search(d: usize, k: usize, family: Family, cfg: &SearchConfig) -> Result<SearchResult> {
    let objective = Objective::for_case(d, k, family)?;
    if cfg.m == 0 || cfg.m > MAX_BASIS || cfg.restarts == 0 || cfg.budget < cfg.m + 2 {
        return Err(Error::domain("search needs 1 <= m <= 12, a restart and a budget above m + 1"));
    }
    let restarts: Vec<Result<RestartResult>> = (0..cfg.restarts)
        .into_par_iter()
        .map(|i| {
            let seed = derive_seed(cfg.seed, i as u64);
            let start: Vec<f64> = if i == 0 && cfg.init == Init::Extremal {
                vec![0.0; cfg.m]
            } else {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                (0..cfg.m).map(|_| rng.random_range(-cfg.spread..=cfg.spread)).collect()
            };
            let f = |theta: &[f64]| {
                AnsatzProfile::new(family, d, theta.to_vec())
                    .and_then(|p| objective.quotient(&p, cfg))
                    .map_or(f64::NAN, |r| -r.ratio)
            };
            let run = minimize(f, &start, cfg.step, cfg.budget, cfg.tol);
            let iterates = run.history.into_iter().map(|(x, v)| (x, -v)).collect();
            let terminated_by = match run.stop {
                Stop::Tolerance => Termination::Tolerance,
                Stop::Budget => Termination::Budget,
            };
            let best = AnsatzProfile::new(family, d, run.x)?;
            let report = objective.quotient(&best, cfg)?;
            Ok(RestartResult {
                seed,
                start,
                best,
                report,
                trace: SearchTrace { iterates, terminated_by },
                evals: run.evals,
            })
        })
        .collect();
    let restarts = restarts.into_iter().collect::<Result<Vec<_>>>()?;
    let best_index = restarts
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.report.ratio.total_cmp(&b.1.report.ratio).then(b.0.cmp(&a.0)))
        .map(|(i, _)| i)
        .unwrap_or(0);
    let fit = exponential_fit(&restarts[best_index].best);
    Ok(SearchResult { objective, best_index, restarts, fit })
}

/// Quotient changes under a sample of group elements.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AuditReport {
    pub base: QuotientReport,
    pub changes: Vec<f64>,
    pub max_change: f64,
    /// Largest combined relative error of the compared quotients.
    pub error_bound: f64,
}

/// The quotient a profile is audited with: the one-sided estimate for waves, the
/// mixed-norm `d = 4` estimate for Schrödinger data.
pub fn audit_quotient(p: &ExtremalProfile, tol: Tolerance) -> Result<QuotientReport> {
    match p.family {
        Family::Wave => one_sided_quotient(p, tol),
        Family::Schrodinger => carneiro_quotient(p, tol),
    }
}

/// `max |Q(g p) - Q(p)| / Q(p)` over the sampled elements.
pub fn symmetry_invariance_audit(
    p: &ExtremalProfile,
    elements: &[GroupElement],
    tol: Tolerance,
) -> Result<AuditReport> {
    let base = audit_quotient(p, tol)?;
    let reports: Vec<QuotientReport> =
        elements.par_iter().map(|g| audit_quotient(&symmetry_apply(g, p)?, tol)).collect::<Result<_>>()?;
    let changes: Vec<f64> = reports.iter().map(|r| (r.ratio - base.ratio).abs() / base.ratio).collect();
    let max_change = changes.iter().copied().fold(0.0, f64::max);
    let error_bound = reports.iter().chain(std::iter::once(&base)).map(|r| r.ratio_error / r.ratio).fold(0.0, f64::max);
    Ok(AuditReport { base, changes, max_change, error_bound })
}
