//! The verification suites. Each returns report rows plus optional notes for the terminal.

use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use strichartz_core::extremal_profiles::{flighthome_profiles, ExtremalProfile, GroupElement};
use strichartz_core::extremizer_search::{
    search as run_search, symmetry_invariance_audit, Objective, SearchConfig, FIT_THRESHOLD,
};
use strichartz_core::mc::{derive_seed, unit_vector};
use strichartz_core::minkowski_geometry::{
    boost_matrix, dot, galilean_map, lorentz_boost, minkowski_form, norm, BoostVelocity, ConePoint,
};
use strichartz_core::quadrature::Tolerance;
use strichartz_core::shell_convolutions::{itilde_closed, itilde_montecarlo, itilde_recursive};
use strichartz_core::special_constants::{
    alpha_exponent, direct, schrodinger_general_formula, sharp_constant, EstimateScale,
};
use strichartz_core::strichartz_functionals::{
    bilinear_quotient, carneiro_quotient, carneiro_quotient_radial, cross_term_gap, energy_quotient,
    functional_eq_residual, multilinear_rhs, one_sided_quotient, random_wave_profile, remark_profiles,
    schro_identity_1d, smooth_bump, term_ii, BilinearConfig, FourierGrid, QuotientReport, RadialProfile,
    FUNCTIONAL_EQ_SAMPLES,
};
use strichartz_core::Family;

use crate::config::{RunConfig, Suite, UsageError};
use crate::report::Row;

#[derive(Debug, thiserror::Error)]
pub enum SuiteError {
    #[error(transparent)]
    Usage(#[from] UsageError),
    #[error(transparent)]
    Compute(#[from] strichartz_core::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

type Outcome = Result<Output, SuiteError>;

/// A named non-Gaussian radial profile.
type Perturbation = (&'static str, fn(f64) -> f64);

/// Closed form, recursion and its error, Monte Carlo and its stderr.
type ShellValues = (f64, f64, f64, f64, f64);

#[derive(Debug, Default)]
pub struct Output {
    pub rows: Vec<Row>,
    /// Extra lines printed ahead of the check table.
    pub notes: Vec<String>,
}

impl Output {
    fn extend(&mut self, o: Output) {
        self.rows.extend(o.rows);
        self.notes.extend(o.notes);
    }
}

fn usage(msg: impl Into<String>) -> SuiteError {
    SuiteError::Usage(UsageError::Unsupported(msg.into()))
}

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

fn tol(rel: f64) -> Tolerance {
    Tolerance::new(0.0, rel).with_max_panels(20_000)
}

fn from_report(suite: &str, case: impl Into<String>, r: &QuotientReport, pass: bool) -> Row {
    Row {
        suite: suite.into(),
        case_id: case.into(),
        lhs: r.lhs.value,
        rhs: r.rhs.value,
        constant: Some(r.sharp_constant),
        ratio: r.ratio,
        deficit: r.deficit,
        stderr: r.ratio_error,
        seed: None,
        pass,
    }
}

/// `lhs` must stay below `bound` (or above it when `above`).
fn threshold(suite: &str, case: impl Into<String>, lhs: f64, bound: f64, above: bool) -> Row {
    let pass = if above { lhs > bound } else { lhs < bound };
    Row::compare(suite, case, lhs, bound, 0.0, pass)
}

fn short(x: f64) -> String {
    let s = format!("{x:.6}");
    let s = s.trim_end_matches('0').trim_end_matches('.');
    if s == "-0" {
        "0".into()
    } else {
        s.into()
    }
}

fn fmt_point(p: &ConePoint) -> String {
    let xs: Vec<String> = std::iter::once(p.tau).chain(p.xi.iter().copied()).map(short).collect();
    format!("({})", xs.join(", "))
}

fn code(d: usize, k: usize) -> u64 {
    (10 * d + k) as u64
}

pub fn run(cfg: &RunConfig) -> Outcome {
    match cfg.suite {
        Suite::Constants => constants(cfg),
        Suite::Shells => shells(cfg),
        Suite::Bilinear => bilinear(cfg),
        Suite::Corollary => corollary(cfg),
        Suite::SchrodingerIdentity => schrodinger_identity(cfg),
        Suite::Search => search(cfg),
        Suite::Audit => audit(cfg),
        Suite::All => {
            if cfg.d.is_some() || cfg.k.is_some() || cfg.family.is_some() || cfg.point.is_some() {
                return Err(usage("`all` runs the default cases; drop --d, --k, --family and --point"));
            }
            let mut out = Output::default();
            for suite in [
                Suite::Constants,
                Suite::Shells,
                Suite::SchrodingerIdentity,
                Suite::Corollary,
                Suite::Bilinear,
                Suite::Search,
                Suite::Audit,
            ] {
                let sub = RunConfig { suite, samples: None, ..cfg.clone() };
                out.extend(run(&sub)?);
            }
            Ok(out)
        }
    }
}

fn constants(cfg: &RunConfig) -> Outcome {
    const S: &str = "constants";
    let families = cfg.family.map_or(vec![Family::Wave, Family::Schrodinger], |f| vec![f]);
    let ks = cfg.k.map_or(vec![2, 3, 4], |k| vec![k]);
    let t = 1e-12 * cfg.tol_scale;
    let mut out = Output::default();
    for &family in &families {
        let dims = cfg.d.map_or((2..=6).collect::<Vec<_>>(), |d| vec![d]);
        for &d in &dims {
            for &k in &ks {
                let scale = match EstimateScale::new(d, k, family) {
                    Ok(scale) => scale,
                    Err(_) if cfg.family.is_none() && families.len() > 1 && d == 1 => continue,
                    Err(e) => return Err(usage(e.to_string())),
                };
                let sc = sharp_constant(scale)?;
                let (tag, product) = match family {
                    Family::Wave => ("W", direct::wave(d, k)),
                    Family::Schrodinger => ("S", direct::schrodinger(d, k)),
                };
                let case = format!("{tag}({d},{k})");
                let r = rel(sc.value, product);
                out.rows.push(
                    Row::compare(S, format!("{case} log-gamma vs product"), sc.value, product, 0.0, r <= t)
                        .with_constant(sc.value),
                );
                if family == Family::Wave && (d, k) == (3, 2) {
                    let exact = (2.0 * PI).powi(-7);
                    out.rows.push(
                        Row::compare(S, "W(3,2) vs (2pi)^-7", sc.value, exact, 0.0, rel(sc.value, exact) <= t)
                            .with_constant(sc.value),
                    );
                }
                if family == Family::Schrodinger && k == 2 {
                    let g = schrodinger_general_formula(d, 2);
                    out.rows.push(
                        Row::compare(S, format!("{case} general formula"), g, sc.value, 0.0, rel(g, sc.value) <= t)
                            .with_constant(sc.value),
                    );
                }
            }
        }
        if family == Family::Schrodinger && cfg.d.is_none() && ks.contains(&2) {
            let v = sharp_constant(EstimateScale::new(1, 2, family)?)?.value;
            let exact = 2.0 / (2.0 * (2.0 * PI).powi(2));
            out.rows
                .push(Row::compare(S, "S(1,2) vs 2/(2 (2pi)^2)", v, exact, 0.0, rel(v, exact) <= t).with_constant(v));
        }
    }
    Ok(out)
}

/// Cone point with `tau` in `[0.5, 3]` and `|xi| < 0.9 tau`.
fn cone_point<R: Rng>(rng: &mut R, d: usize) -> ConePoint {
    let tau = rng.random_range(0.5..3.0);
    let rad = 0.9 * tau * rng.random::<f64>();
    ConePoint::new(tau, unit_vector(rng, d).into_iter().map(|o| rad * o).collect())
}

fn shells(cfg: &RunConfig) -> Outcome {
    const S: &str = "shells";
    let ks = cfg.k.map_or(vec![2, 3, 4], |k| vec![k]);
    if ks.iter().any(|&k| k < 2) {
        return Err(usage("shell integrals need k >= 2"));
    }
    let n = cfg.samples.unwrap_or(1_000_000);
    let mut cases: Vec<(usize, usize, ConePoint, u64)> = Vec::new();
    if let Some(p) = &cfg.point {
        let cp = ConePoint::new(p[0], p[1..].to_vec());
        if !(cp.tau > cp.xi_norm()) {
            return Err(usage("the point must lie inside the forward cone, tau > |xi|"));
        }
        for &seed in &cfg.seeds {
            for &k in &ks {
                cases.push((cp.dim(), k, cp.clone(), derive_seed(seed, code(cp.dim(), k))));
            }
        }
    } else {
        let dims = cfg.d.map_or(vec![2, 3, 4, 5], |d| vec![d]);
        if dims.iter().any(|&d| d < 2) {
            return Err(usage("shell integrals need d >= 2"));
        }
        for &seed in &cfg.seeds {
            for &d in &dims {
                for &k in &ks {
                    let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(seed, code(d, k)));
                    for i in 0..5 {
                        let p = cone_point(&mut rng, d);
                        cases.push((d, k, p, derive_seed(seed, 100 * code(d, k) + i)));
                    }
                }
            }
        }
    }
    let results: Vec<Result<ShellValues, strichartz_core::Error>> = cases
        .par_iter()
        .map(|(d, k, p, seed)| {
            let cf = itilde_closed(*d, *k, p)?.value;
            let rec = itilde_recursive(*d, *k, p, 1e-12)?;
            let mc = itilde_montecarlo(*d, *k, p, cfg.epsilon, n, *seed)?;
            Ok((cf, rec.value, rec.error, mc.value, mc.stderr))
        })
        .collect();
    let mut out = Output::default();
    out.notes.push(format!(
        "{:<3}{:<3}{:<36}{:>22}{:>22}{:>9}{:>22}{:>10}{:>7}",
        "d", "k", "point", "closed form", "recursion", "rel", "monte carlo", "stderr", "z"
    ));
    for ((d, k, p, seed), r) in cases.iter().zip(results) {
        let (cf, rec, rec_err, mc, se) = r?;
        // constant integrands leave only rounding in the Monte Carlo error
        let se_floor = se.max(1e-12 * cf);
        let z = (mc - cf) / se_floor;
        let case = format!("I({d},{k}) at {}", fmt_point(p));
        out.notes.push(format!(
            "{d:<3}{k:<3}{:<36}{cf:>22.15e}{rec:>22.15e}{:>9.1e}{mc:>22.15e}{se:>10.1e}{z:>7.2}",
            fmt_point(p),
            rel(rec, cf)
        ));
        out.rows.push(Row::compare(
            S,
            format!("{case} recursion"),
            rec,
            cf,
            rec_err,
            rel(rec, cf) <= 1e-8 * cfg.tol_scale,
        ));
        out.rows.push(
            Row::compare(S, format!("{case} monte carlo"), mc, cf, se, z.abs() <= 3.0 * cfg.tol_scale).with_seed(*seed),
        );
    }
    Ok(out)
}

fn tilted(d: usize, b1: f64) -> Result<ExtremalProfile, strichartz_core::Error> {
    let mut b = vec![Complex64::default(); d];
    b[0] = c(b1, 0.3);
    ExtremalProfile::wave(d, c(-1.0, 0.4), b, c(0.2, -1.0))
}

fn bilinear(cfg: &RunConfig) -> Outcome {
    const S: &str = "bilinear";
    if cfg.family.is_some_and(|f| f != Family::Wave) {
        return Err(usage("the bilinear suite covers the wave estimates only"));
    }
    let explicit = cfg.d.is_some() || cfg.k.is_some();
    let cases = if explicit { vec![(cfg.d.unwrap_or(3), cfg.k.unwrap_or(2))] } else { vec![(3, 2), (5, 2), (2, 3)] };
    for &(d, k) in &cases {
        if d < 2 || k < 2 || alpha_exponent(d, k).to_f64() <= -0.5 {
            return Err(usage(format!("the bilinear suite needs d, k >= 2 and alpha > -1/2, got d = {d}, k = {k}")));
        }
    }
    let count = cfg.samples.unwrap_or(100);
    let sc = 3.0 * cfg.tol_scale;
    let mut out = Output::default();
    for &seed in &cfg.seeds {
        for &(d, k) in &cases {
            let base = derive_seed(seed, code(d, k));
            let rows: Vec<Result<Row, strichartz_core::Error>> = (0..count)
                .into_par_iter()
                .map(|i| {
                    let s = derive_seed(base, i);
                    let mut rng = ChaCha8Rng::seed_from_u64(s);
                    let ps: Vec<ExtremalProfile> =
                        (0..k).map(|_| random_wave_profile(&mut rng, d)).collect::<Result<_, _>>()?;
                    let r = bilinear_quotient(&ps, BilinearConfig { seed: s, ..Default::default() })?;
                    Ok(from_report(S, format!("W({d},{k}) random tuple {i}"), &r, r.within_bound(sc)).with_seed(s))
                })
                .collect();
            for r in rows {
                out.rows.push(r?);
            }
            for i in 0..5u64 {
                let s = derive_seed(base, 1_000_000 + i);
                let mut rng = ChaCha8Rng::seed_from_u64(s);
                let p0 = random_wave_profile(&mut rng, d)?;
                let ps: Vec<ExtremalProfile> = (0..k)
                    .map(|j| {
                        let mut q = p0.clone();
                        q.c += c(rng.random_range(-0.5..0.5), rng.random_range(-PI..PI)) * (j as f64);
                        q
                    })
                    .collect();
                let r = bilinear_quotient(&ps, BilinearConfig { seed: s, ..Default::default() })?;
                // shared (a, b) makes every sample exact; the floor covers rounding
                let pass = (r.ratio - 1.0).abs() <= sc * r.ratio_error + 1e-12;
                out.rows.push(from_report(S, format!("W({d},{k}) extremal tuple {i}"), &r, pass).with_seed(s));
            }
        }
        if !explicit {
            out.rows.extend(term_two(cfg, seed)?);
        }
    }
    Ok(out)
}

fn term_two(cfg: &RunConfig, seed: u64) -> Result<Vec<Row>, SuiteError> {
    const S: &str = "bilinear";
    let mut rows = Vec::new();
    for d in [5usize, 3] {
        let t0 = term_ii(&tilted(d, 0.0)?)?;
        rows.push(threshold(
            S,
            format!("term II vanishes at Re b = 0, d = {d}"),
            t0.ii.abs(),
            1e-12 * cfg.tol_scale,
            false,
        ));
        for (j, b1) in [0.2, 0.5].into_iter().enumerate() {
            let p = tilted(d, b1)?;
            let t = term_ii(&p)?;
            rows.push(threshold(S, format!("term II positive at Re b_1 = {b1}, d = {d}"), t.ii, 0.0, true));
            let s = derive_seed(seed, 500 + 10 * d as u64 + j as u64);
            let m = multilinear_rhs(&vec![p.clone(); t.k], 1_000_000, s)?;
            let err = m.stderr + t.error;
            let pass = (m.mean - (t.i - t.ii)).abs() <= 3.0 * cfg.tol_scale * err;
            rows.push(
                Row::compare(S, format!("rhs vs I - II at Re b_1 = {b1}, d = {d}"), m.mean, t.i - t.ii, err, pass)
                    .with_seed(s),
            );
        }
    }
    Ok(rows)
}

fn corollary(cfg: &RunConfig) -> Outcome {
    const S: &str = "corollary";
    let s = cfg.tol_scale;
    let mut rows = Vec::new();

    let gaussians = [
        ("Gaussian a = -1", ExtremalProfile::basic(Family::Schrodinger, 4, -1.0)?),
        (
            "tilted Gaussian",
            ExtremalProfile::schrodinger(
                4,
                c(-0.6, 0.9),
                vec![c(0.0, 1.0), c(0.0, -2.0), c(0.0, 0.0), c(0.0, 0.5)],
                c(0.3, 1.0),
            )?,
        ),
        ("Gaussian a = -3", ExtremalProfile::basic(Family::Schrodinger, 4, -3.0)?),
    ];
    let sharp = (32.0 * PI).powf(-0.25);
    for (name, g) in &gaussians {
        let r = carneiro_quotient(g, tol(1e-11))?;
        let pass = (r.ratio - 1.0).abs() < 1e-4 * s && rel(r.sharp_constant, sharp) < 1e-14;
        rows.push(from_report(S, format!("mixed-norm d = 4, {name}"), &r, pass));
    }
    let perturbed: [Perturbation; 2] = [("exp(-r^4)", |r| (-r.powi(4)).exp()), ("exp(-r)", |r| (-r).exp())];
    for (name, f) in perturbed {
        let prof = RadialProfile::new(Family::Schrodinger, 4, Arc::new(move |r| c(f(r), 0.0)), 1.0)?;
        let r = carneiro_quotient_radial(&prof, FourierGrid { n: 64 })?;
        rows.push(from_report(S, format!("mixed-norm d = 4, {name} deficit"), &r, r.deficit > 1e-2));
    }

    let p = ExtremalProfile::basic(Family::Wave, 5, -1.0)?;
    let r = one_sided_quotient(&p, tol(1e-9))?;
    let exact = 1.0 / (6144.0 * PI.powi(8));
    let pass = rel(r.lhs.value, exact) < 5e-3 * s && r.deficit.abs() < 5e-3 * s;
    rows.push(from_report(S, "one-sided L^4 d = 5", &r, pass));

    let (pp, pm) = flighthome_profiles(5, 1.0)?;
    let e = energy_quotient(&pp, &pm, tol(1e-9))?;
    let pass = (e.ratio - 1.0).abs() < 5e-3 * s && rel(e.sharp_constant, (8.0 * PI).powf(-0.5)) < 1e-14;
    rows.push(from_report(S, "energy d = 5, data (0, (1+|x|^2)^-3)", &e, pass));
    let mut broken = pm.clone();
    broken.a.re -= 0.3;
    let b = energy_quotient(&pp, &broken, tol(1e-9))?;
    rows.push(from_report(S, "energy d = 5, conjugate pair broken by 0.3", &b, b.deficit_exceeds(10.0)));

    let (u, v) = remark_profiles(2)?;
    let g = cross_term_gap(&u, &v, tol(1e-9))?;
    let mixed = (g.cube_norm_sq.value * g.mixed_norm_sq.value).sqrt();
    let pairing = g.pairing_re.hypot(g.pairing_im);
    rows.push(Row::compare(S, "cross term d = 2", pairing, mixed, g.error, g.ratio < 1.0 && g.gap() > 10.0 * g.error));
    let ctl = cross_term_gap(&u, &u, tol(1e-9))?;
    let mixed = (ctl.cube_norm_sq.value * ctl.mixed_norm_sq.value).sqrt();
    let pairing = ctl.pairing_re.hypot(ctl.pairing_im);
    rows.push(Row::compare(
        S,
        "cross term control u_- = u_+",
        pairing,
        mixed,
        ctl.error,
        (ctl.ratio - 1.0).abs() < 1e-6 * s,
    ));
    Ok(Output { rows, notes: Vec::new() })
}

fn schrodinger_identity(cfg: &RunConfig) -> Outcome {
    let f1 = smooth_bump(-3.5, -0.5);
    let f2 = smooth_bump(0.5, 3.5);
    let r = schro_identity_1d(f1, (-3.5, -0.5), f2, (0.5, 3.5), cfg.grid, 600.0)?;
    let row = Row::compare(
        "schrodinger-identity",
        format!("d = 1 separated bumps, n = {}", r.n),
        r.lhs.value,
        r.rhs.value,
        r.lhs.error + r.rhs.error,
        r.rel_error < 1e-2 * cfg.tol_scale,
    );
    Ok(Output { rows: vec![row], notes: Vec::new() })
}

fn search(cfg: &RunConfig) -> Outcome {
    const S: &str = "search";
    let (d, k) = (cfg.d.unwrap_or(4), cfg.k.unwrap_or(2));
    let family = cfg.family.unwrap_or(Family::Schrodinger);
    Objective::for_case(d, k, family).map_err(|e| usage(e.to_string()))?;
    let tag = if family == Family::Wave { "W" } else { "S" };
    let mut out = Output::default();
    for &seed in &cfg.seeds {
        let sc = SearchConfig { restarts: cfg.restarts, budget: cfg.budget, seed, ..Default::default() };
        let r = run_search(d, k, family, &sc)?;
        for (i, x) in r.restarts.iter().enumerate() {
            let pass = x.report.within_bound(cfg.tol_scale) && x.trace.is_monotone();
            out.rows.push(from_report(S, format!("{tag}({d},{k}) restart {i}"), &x.report, pass).with_seed(x.seed));
        }
        let best = r.best();
        out.rows.push(
            threshold(S, format!("{tag}({d},{k}) best quotient vs 0.99"), best.report.ratio, 0.99, true)
                .with_seed(seed),
        );
        let fit_ok = r.fit.rate > 0.0 && r.fit.residual < FIT_THRESHOLD * cfg.tol_scale;
        let mut fit = threshold(
            S,
            format!("{tag}({d},{k}) exponential fit residual"),
            r.fit.residual,
            FIT_THRESHOLD * cfg.tol_scale,
            false,
        );
        fit.pass = fit_ok;
        out.rows.push(fit.with_seed(seed));
        out.notes.push(format!(
            "seed {seed}: best restart {} ratio {:.12}, fit rate {:.4}, residual {:.2e}{}",
            r.best_index,
            best.report.ratio,
            r.fit.rate,
            r.fit.residual,
            if r.partial() { ", some restarts hit the budget" } else { "" }
        ));
        if let Some(path) = &cfg.trace {
            r.trace().write_csv(std::fs::File::create(path)?)?;
        }
    }
    Ok(out)
}

fn audit(cfg: &RunConfig) -> Outcome {
    const S: &str = "audit";
    let s = cfg.tol_scale;
    let mut rows = Vec::new();

    let a = c(-1.2, 0.7);
    let b = [c(0.3, -2.0), c(-0.1, 0.5), c(0.0, 1.0)];
    let g3 = move |x: &[f64]| (a * norm(x) + b.iter().zip(x).map(|(b, x)| b * x).sum::<Complex64>() + 0.4).exp();
    let g5 = |x: &[f64]| c(-0.8 * norm(x) + 0.3 * x[2], 2.0 * x[0] - x[4]).exp();
    let gauss = |x: &[f64]| c((-dot(x, x)).exp(), 0.0);

    for &seed in &cfg.seeds {
        let r3 = functional_eq_residual(g3, 3, FUNCTIONAL_EQ_SAMPLES, derive_seed(seed, 3))?;
        rows.push(
            threshold(S, "functional equation, exponential d = 3", r3, 1e-10 * s, false)
                .with_seed(derive_seed(seed, 3)),
        );
        let r5 = functional_eq_residual(g5, 5, FUNCTIONAL_EQ_SAMPLES, derive_seed(seed, 5))?;
        rows.push(
            threshold(S, "functional equation, exponential d = 5", r5, 1e-10 * s, false)
                .with_seed(derive_seed(seed, 5)),
        );
        let rg = functional_eq_residual(gauss, 3, FUNCTIONAL_EQ_SAMPLES, derive_seed(seed, 6))?;
        rows.push(
            threshold(S, "functional equation, Gaussian control d = 3", rg, 1e-2, true).with_seed(derive_seed(seed, 6)),
        );

        let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(seed, 12));
        let (mut form, mut det, mut para): (f64, f64, f64) = (0.0, 0.0, 0.0);
        for d in 1..=5 {
            for _ in 0..200 {
                let speed = rng.random_range(0.0..0.99);
                let v = BoostVelocity::new(unit_vector(&mut rng, d).into_iter().map(|o| speed * o).collect())?;
                let p =
                    ConePoint::new(rng.random_range(-3.0..3.0), (0..d).map(|_| rng.random_range(-3.0..3.0)).collect());
                let q = lorentz_boost(&v, &p)?;
                let scale = (p.tau * p.tau + dot(&p.xi, &p.xi)) * v.gamma() * v.gamma();
                form = form.max((minkowski_form(&q) - minkowski_form(&p)).abs() / scale);
                let m = boost_matrix(&v);
                let mat = nalgebra::DMatrix::from_fn(d + 1, d + 1, |i, j| m[i][j]);
                det = det.max((mat.determinant() - 1.0).abs() / v.gamma().powi(2));
                let xi: Vec<f64> = (0..d).map(|_| rng.random_range(-3.0..3.0)).collect();
                let on = ConePoint::new(dot(&xi, &xi), xi);
                let w: Vec<f64> = (0..d).map(|_| rng.random_range(-2.0..2.0)).collect();
                let g = galilean_map(&w, &on);
                para = para.max((g.tau - dot(&g.xi, &g.xi)).abs() / (1.0 + g.tau));
            }
        }
        let seed12 = derive_seed(seed, 12);
        rows.push(threshold(S, "Minkowski form under boosts", form, 1e-12 * s, false).with_seed(seed12));
        rows.push(threshold(S, "boost determinant", det, 1e-12 * s, false).with_seed(seed12));
        rows.push(threshold(S, "paraboloid under Galilean maps", para, 1e-12 * s, false).with_seed(seed12));
    }

    let p = ExtremalProfile::basic(Family::Wave, 5, -1.0)?;
    let els = vec![
        GroupElement::WaveTranslation { t0: 0.7, x0: vec![0.3, -1.0, 0.0, 2.0, 0.5] },
        GroupElement::WaveTranslation { t0: -2.0, x0: vec![0.0; 5] },
        GroupElement::WaveScaling { lambda1: 3.0, lambda2: 0.6 },
        GroupElement::WaveScaling { lambda1: 0.2, lambda2: 1.7 },
        GroupElement::WavePhase { theta_plus: 1.1, theta_minus: -0.4 },
    ];
    let w = symmetry_invariance_audit(&p, &els, tol(1e-9))?;
    rows.push(threshold(S, "wave quotient under translations, scalings, phases", w.max_change, 1e-6 * s, false));
    let sp = ExtremalProfile::basic(Family::Schrodinger, 4, -1.0)?;
    let g = symmetry_invariance_audit(&sp, &[GroupElement::Galilean { v: vec![0.5, 0.0, 0.0, 0.0] }], tol(1e-11))?;
    rows.push(threshold(S, "mixed-norm quotient moves under a Galilean boost", g.max_change, 1e-3, true));
    Ok(Output { rows, notes: Vec::new() })
}
