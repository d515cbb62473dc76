//! Acceptance suite: one line per criterion, nonzero exit if any fails.
//!
//! Runs without the libtest harness so the table always prints. Positional arguments
//! select criteria by number or by a substring of the name.

use std::f64::consts::PI;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::ExitCode;
use std::sync::Arc;
use std::time::Instant;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use strichartz_core::extremal_profiles::{
    data_split, flighthome_data, flighthome_profiles, ExtremalProfile, GroupElement,
};
use strichartz_core::extremizer_search::{search, symmetry_invariance_audit, SearchConfig};
use strichartz_core::mc::unit_vector;
use strichartz_core::minkowski_geometry::{
    boost_matrix, dot, galilean_map, lorentz_boost, minkowski_form, norm, BoostVelocity, ConePoint,
};
use strichartz_core::quadrature::{integrate, Tolerance};
use strichartz_core::shell_convolutions::{itilde_closed, itilde_montecarlo, itilde_recursive};
use strichartz_core::special_constants::{
    direct, schrodinger_general_formula, schrodinger_sharp_constant, wave_sharp_constant,
};
use strichartz_core::strichartz_functionals::{
    bilinear_quotient, carneiro_quotient, carneiro_quotient_radial, cross_term_gap, energy_quotient,
    functional_eq_residual, multilinear_rhs, one_sided_quotient, random_wave_profile, remark_profiles,
    schro_identity_1d, smooth_bump, term_ii, wave_l4_fourier, BilinearConfig, FourierGrid, RadialProfile,
    FUNCTIONAL_EQ_SAMPLES,
};
use strichartz_core::{Family, Result};

type Check = fn() -> Result<(bool, String)>;

/// A named non-Gaussian radial profile.
type Perturbation = (&'static str, fn(f64) -> f64);

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

fn tol(rel: f64) -> Tolerance {
    Tolerance::new(0.0, rel).with_max_panels(20_000)
}

/// Cone point with `tau` in `[0.5, 3]` and `|xi| < 0.9 tau`.
fn cone_point<R: Rng>(rng: &mut R, d: usize) -> ConePoint {
    let tau = rng.random_range(0.5..3.0);
    let rad = 0.9 * tau * rng.random::<f64>();
    ConePoint::new(tau, unit_vector(rng, d).into_iter().map(|o| rad * o).collect())
}

fn constants_catalog() -> Result<(bool, String)> {
    let mut worst: f64 = 0.0;
    for d in 2..=6 {
        for k in 2..=4 {
            worst = worst.max(rel(wave_sharp_constant(d, k)?.value, direct::wave(d, k)));
            worst = worst.max(rel(schrodinger_sharp_constant(d, k)?.value, direct::schrodinger(d, k)));
        }
    }
    let mut formulas: f64 = 0.0;
    for d in 1..=6 {
        formulas = formulas.max(rel(schrodinger_general_formula(d, 2), schrodinger_sharp_constant(d, 2)?.value));
    }
    let s12 = schrodinger_sharp_constant(1, 2)?.value;
    let s12_err = rel(s12, 2.0 * (1.0 / (2.0 * (2.0 * PI).powi(2))));
    let w32 = rel(wave_sharp_constant(3, 2)?.value, (2.0 * PI).powi(-7));
    let pass = worst < 1e-12 && formulas < 1e-12 && s12_err < 1e-12 && w32 < 1e-12;
    Ok((pass, format!("log-gamma vs product {worst:.1e}; two k=2 formulas {formulas:.1e}; S(1,2) {s12_err:.1e}")))
}

fn wave_shells() -> Result<(bool, String)> {
    let cases: Vec<(usize, usize)> = (2..=5).flat_map(|d| (2..=4).map(move |k| (d, k))).collect();
    let rows: Vec<Result<(f64, f64)>> = cases
        .par_iter()
        .map(|&(d, k)| {
            let mut rng = ChaCha8Rng::seed_from_u64(1000 + 10 * d as u64 + k as u64);
            let (mut rec, mut z): (f64, f64) = (0.0, 0.0);
            for i in 0..5 {
                let p = cone_point(&mut rng, d);
                let cf = itilde_closed(d, k, &p)?.value;
                rec = rec.max(rel(itilde_recursive(d, k, &p, 1e-12)?.value, cf));
                let seed = 7919 * (10 * d + k) as u64 + i;
                let mc = itilde_montecarlo(d, k, &p, 1e-3, 1_000_000, seed)?;
                // constant integrands leave only rounding
                z = z.max((mc.value - cf).abs() / mc.stderr.max(1e-12 * cf));
            }
            Ok((rec, z))
        })
        .collect();
    let rows = rows.into_iter().collect::<Result<Vec<_>>>()?;
    let rec = rows.iter().map(|r| r.0).fold(0.0, f64::max);
    let z = rows.iter().map(|r| r.1).fold(0.0, f64::max);
    Ok((rec < 1e-8 && z <= 3.0, format!("60 points: recursion max rel {rec:.1e}; Monte Carlo max |z| {z:.2}")))
}

fn schro_identity() -> Result<(bool, String)> {
    let f1 = smooth_bump(-3.5, -0.5);
    let f2 = smooth_bump(0.5, 3.5);
    let c = schro_identity_1d(f1, (-3.5, -0.5), f2, (0.5, 3.5), 4096, 600.0)?;
    Ok((
        c.rel_error < 1e-2,
        format!("n = {}, lhs {:.6e}, rhs {:.6e}, rel {:.1e}", c.n, c.lhs.value, c.rhs.value, c.rel_error),
    ))
}

fn carneiro() -> Result<(bool, String)> {
    let sharp = (32.0 * PI).powf(-0.25);
    let gaussians = [
        ExtremalProfile::basic(Family::Schrodinger, 4, -1.0)?,
        ExtremalProfile::schrodinger(
            4,
            c(-0.6, 0.9),
            vec![c(0.0, 1.0), c(0.0, -2.0), c(0.0, 0.0), c(0.0, 0.5)],
            c(0.3, 1.0),
        )?,
        ExtremalProfile::basic(Family::Schrodinger, 4, -3.0)?,
    ];
    let mut worst: f64 = 0.0;
    let mut const_err: f64 = 0.0;
    for g in &gaussians {
        let r = carneiro_quotient(g, tol(1e-11))?;
        worst = worst.max((r.ratio - 1.0).abs());
        const_err = const_err.max(rel(r.sharp_constant, sharp));
    }
    let perturbed: [Perturbation; 2] = [("exp(-r^4)", |r| (-r.powi(4)).exp()), ("exp(-r)", |r| (-r).exp())];
    let mut least = f64::INFINITY;
    let mut names = Vec::new();
    for (name, f) in perturbed {
        let prof = RadialProfile::new(Family::Schrodinger, 4, Arc::new(move |r| c(f(r), 0.0)), 1.0)?;
        let r = carneiro_quotient_radial(&prof, FourierGrid { n: 64 })?;
        least = least.min(r.deficit);
        names.push(format!("{name} {:.3e}", r.deficit));
    }
    Ok((
        worst < 1e-4 && const_err < 1e-14 && least > 1e-2,
        format!("Gaussian |ratio - 1| {worst:.1e}; deficits {}", names.join(", ")),
    ))
}

fn five_dim_l4() -> Result<(bool, String)> {
    let p = ExtremalProfile::basic(Family::Wave, 5, -1.0)?;
    let exact = 1.0 / (6144.0 * PI.powi(8));
    let r = one_sided_quotient(&p, tol(1e-9))?;
    let fourier = wave_l4_fourier(&RadialProfile::from_extremal(&p)?, FourierGrid::default())?;
    let e1 = rel(r.lhs.value, exact);
    let e2 = rel(fourier.value, exact);
    Ok((
        e1 < 5e-3 && e2 < 5e-3 && r.deficit.abs() < 5e-3,
        format!(
            "||u||_4^4 = {:.6e} (space-time), {:.6e} (Fourier), exact {exact:.6e}; deficit {:.1e}",
            r.lhs.value, fourier.value, r.deficit
        ),
    ))
}

fn energy() -> Result<(bool, String)> {
    let (p, m) = flighthome_profiles(5, 1.0)?;
    // the profiles are the split of the data (0, c e^{-|xi|}), i.e. (0, C (1+|x|^2)^{-3})
    let (fp, fm) = data_split(&flighthome_data(5, 1.0));
    let mut split_err: f64 = 0.0;
    for r in [0.1, 0.7, 2.5] {
        let xi = [0.6 * r, 0.0, -0.8 * r, 0.0, 0.0];
        split_err = split_err.max((fp(&xi) - p.fourier(&xi)).norm() / fp(&xi).norm());
        split_err = split_err.max((fm(&xi) - m.fourier(&xi)).norm() / fm(&xi).norm());
    }
    let e = energy_quotient(&p, &m, tol(1e-9))?;
    let mut m2 = m.clone();
    m2.a.re -= 0.3;
    let b = energy_quotient(&p, &m2, tol(1e-9))?;
    let pass = split_err < 1e-12
        && (e.ratio - 1.0).abs() < 5e-3
        && rel(e.sharp_constant, (8.0 * PI).powf(-0.5)) < 1e-15
        && b.deficit_exceeds(10.0);
    Ok((pass, format!("ratio {:.9}; broken pair deficit {:.3e} vs error {:.1e}", e.ratio, b.deficit, b.ratio_error)))
}

fn bilinear() -> Result<(bool, String)> {
    let mut parts = Vec::new();
    let mut pass = true;
    for (d, k) in [(3usize, 2usize), (5, 2), (2, 3)] {
        let results: Vec<Result<(bool, f64)>> = (0..100u64)
            .into_par_iter()
            .map(|i| {
                let mut rng = ChaCha8Rng::seed_from_u64(50_000 + 1000 * d as u64 + 100 * k as u64 + i);
                let ps: Vec<ExtremalProfile> =
                    (0..k).map(|_| random_wave_profile(&mut rng, d)).collect::<Result<_>>()?;
                let r = bilinear_quotient(&ps, BilinearConfig { seed: i, ..Default::default() })?;
                Ok((r.within_bound(3.0), r.ratio))
            })
            .collect();
        let results = results.into_iter().collect::<Result<Vec<_>>>()?;
        let ok = results.iter().filter(|r| r.0).count();
        let max = results.iter().map(|r| r.1).fold(0.0, f64::max);
        let mut ext_z: f64 = 0.0;
        for i in 0..5u64 {
            let mut rng = ChaCha8Rng::seed_from_u64(90_000 + 10 * d as u64 + i);
            let base = random_wave_profile(&mut rng, d)?;
            let ps: Vec<ExtremalProfile> = (0..k)
                .map(|j| {
                    let mut q = base.clone();
                    q.c += c(rng.random_range(-0.5..0.5), rng.random_range(-PI..PI)) * (j as f64);
                    q
                })
                .collect();
            let r = bilinear_quotient(&ps, BilinearConfig { seed: 100 + i, ..Default::default() })?;
            // shared (a, b) makes every sample exact; the floor covers rounding
            ext_z = ext_z.max(((r.ratio - 1.0).abs() - 1e-12).max(0.0) / r.ratio_error.max(f64::MIN_POSITIVE));
        }
        pass &= ok == 100 && ext_z <= 3.0;
        parts.push(format!("({d},{k}) {ok}/100, max {max:.4}, extremal z {ext_z:.2}"));
    }
    Ok((pass, parts.join("; ")))
}

fn tilted(d: usize, b1: f64) -> Result<ExtremalProfile> {
    let mut b = vec![Complex64::default(); d];
    b[0] = c(b1, 0.3);
    ExtremalProfile::wave(d, c(-1.0, 0.4), b, c(0.2, -1.0))
}

/// `II` by 2-D polar quadrature of `|f^|^2 |xi|` and `|f^|^2 |xi| xi_1` in `(rho, theta)`.
fn term_ii_oracle(p: &ExtremalProfile, k: usize) -> Result<f64> {
    let d = p.d;
    let (lam, beta, cre) = (-p.a.re, p.b[0].re, p.c.re);
    let t = tol(1e-12);
    let s_perp = strichartz_core::special_constants::sphere_area(d - 1)?;
    let radial = |moment: bool| -> Result<f64> {
        let inner = |rho: f64| {
            let f = |th: f64| {
                let w = (2.0 * (-lam * rho + beta * rho * th.cos() + cre)).exp() * rho.powi(d as i32 - 2);
                let w = if moment { w * rho * th.cos() } else { w };
                w * th.sin().powi(d as i32 - 2)
            };
            integrate(f, 0.0, PI, t).map(|e| e.value).unwrap_or(f64::NAN)
        };
        Ok(s_perp * integrate(inner, 0.0, 120.0 / (lam - beta), t)?.value)
    };
    let (m0, m1) = (radial(false)?, radial(true)?);
    Ok((k * (k - 1) / 2) as f64 * m0.powi(k as i32 - 2) * m1 * m1)
}

fn term_two() -> Result<(bool, String)> {
    let mut zero: f64 = 0.0;
    let mut oracle: f64 = 0.0;
    let mut positive = true;
    let mut z: f64 = 0.0;
    for (d, seed) in [(5usize, 31u64), (3, 32)] {
        zero = zero.max(term_ii(&tilted(d, 0.0)?)?.ii.abs());
        for b1 in [0.2, 0.5] {
            let p = tilted(d, b1)?;
            let t = term_ii(&p)?;
            positive &= t.ii > 0.0;
            oracle = oracle.max(rel(t.ii, term_ii_oracle(&p, t.k)?));
            let m = multilinear_rhs(&vec![p.clone(); t.k], 1_000_000, seed + (10.0 * b1) as u64)?;
            z = z.max((m.mean - (t.i - t.ii)).abs() / (m.stderr + t.error));
        }
    }
    Ok((
        zero < 1e-12 && positive && oracle < 1e-8 && z <= 3.0,
        format!("II at Re b = 0: {zero:.1e}; vs polar oracle {oracle:.1e}; rhs vs I - II max z {z:.2}"),
    ))
}

fn remark() -> Result<(bool, String)> {
    let (u, v) = remark_profiles(2)?;
    let g = cross_term_gap(&u, &v, tol(1e-9))?;
    let ctl = cross_term_gap(&u, &u, tol(1e-9))?;
    Ok((
        g.ratio < 1.0 && g.gap() > 10.0 * g.error && (ctl.ratio - 1.0).abs() < 1e-6,
        format!("ratio {:.6} (gap {:.3e}, error {:.1e}); control {:.9}", g.ratio, g.gap(), g.error, ctl.ratio),
    ))
}

fn functional_equation() -> Result<(bool, String)> {
    let a = c(-1.2, 0.7);
    let b = [c(0.3, -2.0), c(-0.1, 0.5), c(0.0, 1.0)];
    let g3 = move |x: &[f64]| (a * norm(x) + b.iter().zip(x).map(|(b, x)| b * x).sum::<Complex64>() + 0.4).exp();
    let r3 = functional_eq_residual(g3, 3, FUNCTIONAL_EQ_SAMPLES, 1)?;
    let g5 = |x: &[f64]| c(-0.8 * norm(x) + 0.3 * x[2], 2.0 * x[0] - x[4]).exp();
    let r5 = functional_eq_residual(g5, 5, FUNCTIONAL_EQ_SAMPLES, 2)?;
    let gauss = |x: &[f64]| c((-dot(x, x)).exp(), 0.0);
    let rg = functional_eq_residual(gauss, 3, FUNCTIONAL_EQ_SAMPLES, 3)?;
    Ok((
        r3 < 1e-10 && r5 < 1e-10 && rg > 1e-2,
        format!("exponential {:.1e}, {:.1e}; Gaussian control {rg:.3e}", r3, r5),
    ))
}

fn extremizer() -> Result<(bool, String)> {
    let cfg = SearchConfig { restarts: 5, budget: 500, seed: 2024, ..Default::default() };
    let r = search(4, 2, Family::Schrodinger, &cfg)?;
    let best = r.best().report.ratio;
    let monotone = r.restarts.iter().all(|x| x.trace.is_monotone());
    let pass = best >= 0.99 && r.fit.passes() && r.never_super_sharp(1.0) && monotone;
    Ok((
        pass,
        format!(
            "best ratio {best:.9} (restart {}); fit rate {:.4}, residual {:.1e}; all within sharp bound: {}",
            r.best_index,
            r.fit.rate,
            r.fit.residual,
            r.never_super_sharp(1.0)
        ),
    ))
}

fn invariance() -> Result<(bool, String)> {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    let (mut form, mut det): (f64, f64) = (0.0, 0.0);
    let mut para: f64 = 0.0;
    for d in 1..=5 {
        for _ in 0..200 {
            let speed = rng.random_range(0.0..0.99);
            let v = BoostVelocity::new(unit_vector(&mut rng, d).into_iter().map(|o| speed * o).collect())?;
            let p = ConePoint::new(rng.random_range(-3.0..3.0), (0..d).map(|_| rng.random_range(-3.0..3.0)).collect());
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
    let p = ExtremalProfile::basic(Family::Wave, 5, -1.0)?;
    let els = vec![
        GroupElement::WaveTranslation { t0: 0.7, x0: vec![0.3, -1.0, 0.0, 2.0, 0.5] },
        GroupElement::WaveTranslation { t0: -2.0, x0: vec![0.0; 5] },
        GroupElement::WaveScaling { lambda1: 3.0, lambda2: 0.6 },
        GroupElement::WaveScaling { lambda1: 0.2, lambda2: 1.7 },
        GroupElement::WavePhase { theta_plus: 1.1, theta_minus: -0.4 },
    ];
    let w = symmetry_invariance_audit(&p, &els, tol(1e-9))?;
    let s = ExtremalProfile::basic(Family::Schrodinger, 4, -1.0)?;
    let g = symmetry_invariance_audit(&s, &[GroupElement::Galilean { v: vec![0.5, 0.0, 0.0, 0.0] }], tol(1e-11))?;
    let pass = form < 1e-12 && det < 1e-12 && para < 1e-12 && w.max_change < 1e-6 && g.max_change > 1e-3;
    Ok((
        pass,
        format!(
            "form {form:.1e}, det {det:.1e}, paraboloid {para:.1e}; wave symmetries change {:.1e}; Galilean change {:.4}",
            w.max_change, g.max_change
        ),
    ))
}

fn main() -> ExitCode {
    let criteria: [(u32, &str, Check); 12] = [
        (1, "constants catalog", constants_catalog),
        (2, "wave shell convolutions", wave_shells),
        (3, "d=1 Schrödinger identity", schro_identity),
        (4, "mixed-norm Schrödinger estimate", carneiro),
        (5, "d=5 one-sided L^4 norm", five_dim_l4),
        (6, "energy estimate", energy),
        (7, "bilinear Monte Carlo bound", bilinear),
        (8, "term II", term_two),
        (9, "cross-term audit", remark),
        (10, "functional equation residual", functional_equation),
        (11, "extremizer search", extremizer),
        (12, "invariance suites", invariance),
    ];
    let filters: Vec<String> = std::env::args().skip(1).filter(|a| !a.starts_with('-')).collect();
    let selected = |n: u32, name: &str| {
        filters.is_empty() || filters.iter().any(|f| f.parse::<u32>().ok() == Some(n) || name.contains(f.as_str()))
    };
    let mut failed = 0;
    let mut ran = 0;
    for (n, name, check) in criteria {
        if !selected(n, name) {
            continue;
        }
        ran += 1;
        let start = Instant::now();
        let (pass, detail) = match catch_unwind(AssertUnwindSafe(check)) {
            Ok(Ok(r)) => r,
            Ok(Err(e)) => (false, format!("error: {e}")),
            Err(_) => (false, "panicked".into()),
        };
        if !pass {
            failed += 1;
        }
        println!(
            "[{}] {n:>2} {name} ({:.1}s): {detail}",
            if pass { "PASS" } else { "FAIL" },
            start.elapsed().as_secs_f64()
        );
    }
    println!("acceptance: {} of {ran} criteria passed", ran - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
