//! Extremizer families, their Sobolev norms, the `f_+/f_-` data split and the
//! parameter-level symmetry actions.
//!
//! Wave profiles describe `|xi| f^(xi) = exp(a|xi| + b.xi + c)` on one sheet of the cone;
//! Schrödinger profiles describe `f^(xi) = exp(a|xi|^2 + b.xi + c)`.

use std::f64::consts::PI;
use std::fmt::Write as _;
use std::sync::Arc;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::minkowski_geometry::{dot, norm};
use crate::quadrature::{integrate, integrate_points, integrate_vec_semi_infinite, Tolerance};
use crate::special::{ln_gamma, sphere_area};
use crate::special_constants::Family;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Sheet {
    Plus,
    Minus,
}

impl Sheet {
    pub fn sign(self) -> f64 {
        match self {
            Sheet::Plus => 1.0,
            Sheet::Minus => -1.0,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExtremalProfile {
    pub family: Family,
    pub d: usize,
    pub a: Complex64,
    pub b: Vec<Complex64>,
    pub c: Complex64,
    /// Propagator sheet; ignored for Schrödinger profiles.
    pub sheet: Sheet,
}

impl ExtremalProfile {
    pub fn wave(d: usize, a: Complex64, b: Vec<Complex64>, c: Complex64) -> Result<Self> {
        Self::build(Family::Wave, d, a, b, c)
    }

    pub fn schrodinger(d: usize, a: Complex64, b: Vec<Complex64>, c: Complex64) -> Result<Self> {
        Self::build(Family::Schrodinger, d, a, b, c)
    }

    /// `a` real and negative, `b = 0`, `c = 0`.
    pub fn basic(family: Family, d: usize, a: f64) -> Result<Self> {
        Self::build(family, d, Complex64::new(a, 0.0), vec![Complex64::default(); d], Complex64::default())
    }

    fn build(family: Family, d: usize, a: Complex64, b: Vec<Complex64>, c: Complex64) -> Result<Self> {
        if d == 0 || b.len() != d {
            return Err(Error::domain(format!("tilt has length {} but d = {d}", b.len())));
        }
        if !(a.re < 0.0) {
            return Err(Error::domain(format!("Re(a) = {} must be negative", a.re)));
        }
        if family == Family::Wave && d < 2 {
            return Err(Error::domain("wave profiles need d >= 2"));
        }
        Ok(ExtremalProfile { family, d, a, b, c, sheet: Sheet::Plus })
    }

    pub fn with_sheet(mut self, sheet: Sheet) -> Self {
        self.sheet = sheet;
        self
    }

    pub fn re_b(&self) -> Vec<f64> {
        self.b.iter().map(|z| z.re).collect()
    }

    pub fn im_b(&self) -> Vec<f64> {
        self.b.iter().map(|z| z.im).collect()
    }

    pub fn re_b_norm(&self) -> f64 {
        norm(&self.re_b())
    }

    /// Finiteness of the Sobolev norms and multilinear right-hand sides.
    pub fn is_admissible(&self) -> bool {
        match self.family {
            Family::Wave => self.re_b_norm() < -self.a.re,
            Family::Schrodinger => self.a.re < 0.0,
        }
    }

    pub fn require_admissible(&self) -> Result<()> {
        if self.is_admissible() {
            Ok(())
        } else {
            Err(Error::domain(format!(
                "inadmissible profile: |Re b| = {} is not below -Re a = {}",
                self.re_b_norm(),
                -self.a.re
            )))
        }
    }

    /// The exponent `a|xi| + b.xi + c` (wave) or `a|xi|^2 + b.xi + c` (Schrödinger).
    pub fn log_weight(&self, xi: &[f64]) -> Complex64 {
        let r = norm(xi);
        let radial = match self.family {
            Family::Wave => r,
            Family::Schrodinger => r * r,
        };
        let bx: Complex64 = self.b.iter().zip(xi).map(|(b, x)| b * x).sum();
        self.a * radial + bx + self.c
    }

    /// `f^(xi)`.
    pub fn fourier(&self, xi: &[f64]) -> Complex64 {
        let e = self.log_weight(xi).exp();
        match self.family {
            Family::Wave => e / norm(xi),
            Family::Schrodinger => e,
        }
    }

    /// Radial modulus profile `g(rho)` ignoring the tilt: `|xi| f^` for waves, `f^` otherwise.
    pub fn radial(&self, rho: f64) -> Complex64 {
        let x = match self.family {
            Family::Wave => rho,
            Family::Schrodinger => rho * rho,
        };
        (self.a * x + self.c).exp()
    }
}

/// A squared Sobolev norm or the tag for an infinite one.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum SobolevNorm {
    Finite(f64),
    Divergent,
}

impl SobolevNorm {
    pub fn finite(self) -> Result<f64> {
        match self {
            SobolevNorm::Finite(v) => Ok(v),
            SobolevNorm::Divergent => Err(Error::domain("Sobolev norm diverges")),
        }
    }

    pub fn is_finite(self) -> bool {
        matches!(self, SobolevNorm::Finite(_))
    }
}

/// `(2 pi)^{-d} int |xi|^{2s} |f^(xi)|^2 dxi`.
pub fn sobolev_norm_sq(p: &ExtremalProfile, s: f64) -> Result<SobolevNorm> {
    match p.family {
        Family::Wave => wave_sobolev(p, s),
        Family::Schrodinger => schro_sobolev(p, s),
    }
}

fn wave_sobolev(p: &ExtremalProfile, s: f64) -> Result<SobolevNorm> {
    let d = p.d;
    let n = 2.0 * s + d as f64 - 2.0;
    if !(n > 0.0) {
        return Err(Error::domain(format!("|xi|^{{2s-2}} is not integrable at 0 for s = {s}, d = {d}")));
    }
    let beta = p.re_b_norm();
    let lam = -p.a.re;
    if beta >= lam {
        return Ok(SobolevNorm::Divergent);
    }
    let pre = (-(d as f64) * (2.0 * PI).ln() + 2.0 * p.c.re + ln_gamma(n)).exp();
    // the r-integral is a Gamma integral; the angular one is 1-D in theta
    let angular = if beta == 0.0 {
        sphere_area(d) * (2.0 * lam).powf(-n)
    } else {
        let f = |th: f64| th.sin().powi(d as i32 - 2) * (2.0 * lam - 2.0 * beta * th.cos()).powf(-n);
        // peak at theta = 0 has width ~ sqrt(1 - beta/lam); break geometrically from there
        let w = (2.0 * (lam - beta) / beta).sqrt().min(1.0);
        let mut pts = vec![0.0];
        let mut t = w;
        while t < PI {
            pts.push(t);
            t *= 2.0;
        }
        pts.push(PI);
        let q = integrate_points(f, &pts, Tolerance::new(0.0, 1e-13).with_max_panels(20_000))?;
        sphere_area(d - 1) * q.value
    };
    Ok(SobolevNorm::Finite(pre * angular))
}

fn schro_sobolev(p: &ExtremalProfile, s: f64) -> Result<SobolevNorm> {
    let d = p.d;
    let df = d as f64;
    if !(2.0 * s + df > 0.0) {
        return Err(Error::domain("negative Sobolev index below -d/2"));
    }
    let big_a = -2.0 * p.a.re;
    let beta = p.re_b();
    let b2 = dot(&beta, &beta);
    let mass = (2.0 * PI).powf(-df) * (PI / big_a).powf(df / 2.0) * (b2 / big_a + 2.0 * p.c.re).exp();
    if s == 0.0 {
        return Ok(SobolevNorm::Finite(mass));
    }
    if s == 1.0 {
        return Ok(SobolevNorm::Finite(mass * (df / (2.0 * big_a) + b2 / (big_a * big_a))));
    }
    // general s: |xi|^{2s} against the Gaussian N(beta/A, 1/(2A)), in polar form about 0
    let bn = b2.sqrt();
    let ln_pre = -df * (2.0 * PI).ln() + 2.0 * p.c.re;
    let tol = Tolerance::new(0.0, 1e-12).with_max_panels(20_000);
    let radial = |r: f64| -> f64 {
        let base = (-big_a * r * r).exp() * r.powf(2.0 * s + df - 1.0);
        if d == 1 {
            return base * 2.0 * (2.0 * bn * r).cosh();
        }
        let ang = |th: f64| th.sin().powi(d as i32 - 2) * (2.0 * bn * r * th.cos() - 2.0 * bn * r).exp();
        let q = integrate(ang, 0.0, PI, tol).map(|e| e.value).unwrap_or(f64::NAN);
        base * sphere_area(d - 1) * q * (2.0 * bn * r).exp()
    };
    let peak = bn / big_a;
    let r = integrate_vec_semi_infinite(|r| [radial(r)], 0.0, &[peak], (1.0 / big_a.sqrt()).max(peak), tol);
    if !r.converged {
        return Err(Error::Convergence { estimate: r.value[0], error: r.error[0] });
    }
    Ok(SobolevNorm::Finite(ln_pre.exp() * r.value[0]))
}

/// A function of frequency, `R^d -> C`.
pub type FreqFn = Arc<dyn Fn(&[f64]) -> Complex64 + Send + Sync>;

#[derive(Clone)]
pub struct CauchyData {
    pub u0_hat: FreqFn,
    pub udot0_hat: FreqFn,
    pub d: usize,
}

impl std::fmt::Debug for CauchyData {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("CauchyData").field("d", &self.d).finish_non_exhaustive()
    }
}

/// `f^_+- = (u0^ -+ i udot0^/|xi|)/2`.
pub fn data_split(cd: &CauchyData) -> (FreqFn, FreqFn) {
    let (u0, u1) = (cd.u0_hat.clone(), cd.udot0_hat.clone());
    let (v0, v1) = (u0.clone(), u1.clone());
    let i = Complex64::i();
    let plus: FreqFn = Arc::new(move |xi: &[f64]| 0.5 * (u0(xi) - i * u1(xi) / norm(xi)));
    let minus: FreqFn = Arc::new(move |xi: &[f64]| 0.5 * (v0(xi) + i * v1(xi) / norm(xi)));
    (plus, minus)
}

/// Inverse of [`data_split`]: `u0^ = f+ + f-`, `udot0^ = i|xi|(f+ - f-)`.
pub fn reconstruct(plus: FreqFn, minus: FreqFn, d: usize) -> CauchyData {
    let (p2, m2) = (plus.clone(), minus.clone());
    let i = Complex64::i();
    CauchyData {
        u0_hat: Arc::new(move |xi: &[f64]| plus(xi) + minus(xi)),
        udot0_hat: Arc::new(move |xi: &[f64]| i * norm(xi) * (p2(xi) - m2(xi))),
        d,
    }
}

/// Data `(0, c0 e^{-|xi|})` in frequency, whose split is the conjugate extremal pair.
pub fn flighthome_data(d: usize, c0: f64) -> CauchyData {
    CauchyData {
        u0_hat: Arc::new(|_: &[f64]| Complex64::default()),
        udot0_hat: Arc::new(move |xi: &[f64]| Complex64::new(c0 * (-norm(xi)).exp(), 0.0)),
        d,
    }
}

/// The split of [`flighthome_data`] as two wave profiles, `|xi| f^_+- = +-c0 e^{-|xi|}/(2i)`.
pub fn flighthome_profiles(d: usize, c0: f64) -> Result<(ExtremalProfile, ExtremalProfile)> {
    let zero = vec![Complex64::default(); d];
    let amp = Complex64::new(c0, 0.0) / (2.0 * Complex64::i());
    let a = Complex64::new(-1.0, 0.0);
    let plus = ExtremalProfile::wave(d, a, zero.clone(), amp.ln())?;
    let minus = ExtremalProfile::wave(d, a, zero, (-amp).ln())?.with_sheet(Sheet::Minus);
    Ok((plus, minus))
}

/// `(2 pi)^{-d} int |xi|^{2s} |h(xi)|^2 dxi` for radial `h`, evaluated along the first axis.
pub fn radial_norm_sq(h: &FreqFn, d: usize, s: f64, r_max: f64, tol: Tolerance) -> Result<f64> {
    let f = |r: f64| {
        let mut xi = vec![0.0; d];
        xi[0] = r;
        h(&xi).norm_sqr() * r.powf(2.0 * s + d as f64 - 1.0)
    };
    let q = integrate(f, 0.0, r_max, tol)?;
    Ok((2.0 * PI).powi(-(d as i32)) * sphere_area(d) * q.value)
}

/// Symmetry group elements acting on profile parameters.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum GroupElement {
    Identity,
    /// Space-time translation.
    WaveTranslation {
        t0: f64,
        x0: Vec<f64>,
    },
    /// Amplitude and spatial scaling.
    WaveScaling {
        lambda1: f64,
        lambda2: f64,
    },
    /// Independent phases on the two sheets.
    WavePhase {
        theta_plus: f64,
        theta_minus: f64,
    },
    /// Space-time translation.
    SchroTranslation {
        t0: f64,
        x0: Vec<f64>,
    },
    /// Amplitude and parabolic scaling.
    SchroScaling {
        lambda1: f64,
        lambda2: f64,
    },
    /// Phase.
    SchroPhase {
        theta: f64,
    },
    /// Galilean boost, a frequency shift by `-v`.
    Galilean {
        v: Vec<f64>,
    },
    /// Apply the listed elements right to left.
    Sequence(Vec<GroupElement>),
}

impl GroupElement {
    fn family(&self) -> Option<Family> {
        use GroupElement::*;
        match self {
            WaveTranslation { .. } | WaveScaling { .. } | WavePhase { .. } => Some(Family::Wave),
            SchroTranslation { .. } | SchroScaling { .. } | SchroPhase { .. } | Galilean { .. } => {
                Some(Family::Schrodinger)
            }
            Identity | Sequence(_) => None,
        }
    }

    /// `self . other`, reduced to a single element when both have the same kind.
    pub fn compose(&self, other: &GroupElement) -> GroupElement {
        use GroupElement::*;
        let add = |x: &[f64], y: &[f64]| x.iter().zip(y).map(|(a, b)| a + b).collect::<Vec<_>>();
        match (self, other) {
            (Identity, g) | (g, Identity) => g.clone(),
            (WaveTranslation { t0: s, x0: y }, WaveTranslation { t0, x0 }) => {
                WaveTranslation { t0: s + t0, x0: add(y, x0) }
            }
            (WaveScaling { lambda1: m1, lambda2: m2 }, WaveScaling { lambda1, lambda2 }) => {
                WaveScaling { lambda1: m1 * lambda1, lambda2: m2 * lambda2 }
            }
            (WavePhase { theta_plus: p, theta_minus: m }, WavePhase { theta_plus, theta_minus }) => {
                WavePhase { theta_plus: p + theta_plus, theta_minus: m + theta_minus }
            }
            (SchroTranslation { t0: s, x0: y }, SchroTranslation { t0, x0 }) => {
                SchroTranslation { t0: s + t0, x0: add(y, x0) }
            }
            (SchroScaling { lambda1: m1, lambda2: m2 }, SchroScaling { lambda1, lambda2 }) => {
                SchroScaling { lambda1: m1 * lambda1, lambda2: m2 * lambda2 }
            }
            (SchroPhase { theta: s }, SchroPhase { theta }) => SchroPhase { theta: s + theta },
            (Galilean { v: w }, Galilean { v }) => Galilean { v: add(w, v) },
            (a, b) => Sequence(vec![a.clone(), b.clone()]),
        }
    }
}

pub fn symmetry_apply(g: &GroupElement, p: &ExtremalProfile) -> Result<ExtremalProfile> {
    use GroupElement::*;
    if let Some(fam) = g.family() {
        if fam != p.family {
            return Err(Error::Unsupported(format!("{g:?} does not act on {} profiles", p.family)));
        }
    }
    let i = Complex64::i();
    let mut q = p.clone();
    let check_len = |x: &[f64]| {
        if x.len() == p.d {
            Ok(())
        } else {
            Err(Error::Unsupported(format!("element dimension {} does not match d = {}", x.len(), p.d)))
        }
    };
    let positive = |l1: f64, l2: f64| {
        if l1 > 0.0 && l2 > 0.0 {
            Ok(())
        } else {
            Err(Error::Unsupported("scalings need positive factors".into()))
        }
    };
    match g {
        Identity => {}
        WaveTranslation { t0, x0 } => {
            check_len(x0)?;
            q.a += i * (p.sheet.sign() * t0);
            q.b.iter_mut().zip(x0).for_each(|(b, x)| *b += i * x);
        }
        WaveScaling { lambda1, lambda2 } => {
            positive(*lambda1, *lambda2)?;
            q.a /= *lambda2;
            q.b.iter_mut().for_each(|b| *b /= *lambda2);
            q.c += lambda1.ln() + (1.0 - p.d as f64) * lambda2.ln();
        }
        WavePhase { theta_plus, theta_minus } => {
            q.c += i * match p.sheet {
                Sheet::Plus => *theta_plus,
                Sheet::Minus => *theta_minus,
            };
        }
        SchroTranslation { t0, x0 } => {
            check_len(x0)?;
            q.a -= i * t0;
            q.b.iter_mut().zip(x0).for_each(|(b, x)| *b += i * x);
        }
        SchroScaling { lambda1, lambda2 } => {
            positive(*lambda1, *lambda2)?;
            q.a /= lambda2 * lambda2;
            q.b.iter_mut().for_each(|b| *b /= *lambda2);
            q.c += lambda1.ln() - p.d as f64 * lambda2.ln();
        }
        SchroPhase { theta } => q.c += i * theta,
        Galilean { v } => {
            check_len(v)?;
            let v2 = dot(v, v);
            let bv: Complex64 = p.b.iter().zip(v).map(|(b, x)| b * x).sum();
            q.c += p.a * v2 + bv;
            q.b.iter_mut().zip(v).for_each(|(b, x)| *b += 2.0 * p.a * x);
        }
        Sequence(list) => {
            for h in list.iter().rev() {
                q = symmetry_apply(h, &q)?;
            }
        }
    }
    Ok(q)
}

/// `Gamma(d-1) |S^{d-1}|`, the center-line constant of the amplitude.
pub fn center_line_constant(d: usize) -> f64 {
    ln_gamma(d as f64 - 1.0).exp() * sphere_area(d)
}

/// `|e^{+-it sqrt(-Delta)} f|(x)` for a wave profile with `Re b = 0`.
pub fn lambda_amplitude(p: &ExtremalProfile, t: f64, x: &[f64]) -> Result<f64> {
    Ok(crate::propagators::wave_closed_form(p, t, x)?.norm())
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LambdaDiagnostics {
    pub argmax_t: f64,
    pub argmax_x: Vec<f64>,
    /// Coefficients (ascending) of `(2 pi)^{-d} C0 / Lambda` along the center line,
    /// as a polynomial in `s = t + Im a`.
    pub coefficients: Vec<f64>,
    pub leading: f64,
    pub constant: f64,
    pub fit_residual: f64,
}

/// The two uniqueness diagnostics: the maximizer of the amplitude and the
/// center-line polynomial. Needs odd `d` so the reciprocal is polynomial.
pub fn lambda_diagnostics(p: &ExtremalProfile) -> Result<LambdaDiagnostics> {
    if p.family != Family::Wave || p.d.is_multiple_of(2) {
        return Err(Error::domain("amplitude diagnostics need a wave profile in odd dimension"));
    }
    if p.re_b_norm() != 0.0 {
        return Err(Error::domain("amplitude diagnostics need Re(b) = 0"));
    }
    let d = p.d;
    let sgn = p.sheet.sign();
    let amp = |z: &[f64]| lambda_amplitude(p, z[0], &z[1..]).unwrap_or(0.0);
    // coarse grid over t and each spatial axis, then a local simplex refinement
    let mut best = vec![0.0; d + 1];
    let mut best_v = amp(&best);
    let span = 6.0;
    for step in 0..2 {
        let centre = best.clone();
        let h = if step == 0 { span / 12.0 } else { span / 60.0 };
        for axis in 0..=d {
            for j in -12..=12 {
                let mut z = centre.clone();
                z[axis] += h * j as f64;
                let v = amp(&z);
                if v > best_v {
                    best_v = v;
                    best = z;
                }
            }
        }
    }
    let neg = |z: &[f64]| -amp(z);
    let refined = crate::nelder_mead::minimize(neg, &best, 0.05, 4000, 1e-15);
    let argmax = refined.x;
    let c0 = (2.0 * PI).powi(-(d as i32)) * center_line_constant(d);
    let xc: Vec<f64> = p.im_b().iter().map(|v| -v).collect();
    let deg = d - 1;
    let npts = 4 * (deg + 1);
    let mut rows = Vec::with_capacity(npts);
    let mut ys = Vec::with_capacity(npts);
    for j in 0..npts {
        let s = -2.0 + 4.0 * j as f64 / (npts - 1) as f64;
        let t = s - sgn * p.a.im;
        let lam = lambda_amplitude(p, t, &xc)?;
        rows.push((0..=deg).map(|e| s.powi(e as i32)).collect::<Vec<_>>());
        ys.push(c0 / lam);
    }
    let a = nalgebra::DMatrix::from_fn(npts, deg + 1, |i, j| rows[i][j]);
    let y = nalgebra::DVector::from_vec(ys.clone());
    let coef =
        a.clone().svd(true, true).solve(&y, 1e-14).map_err(|e| Error::domain(format!("least squares failed: {e}")))?;
    let resid = (&a * &coef - &y).norm() / y.norm();
    let coefficients: Vec<f64> = coef.iter().copied().collect();
    Ok(LambdaDiagnostics {
        argmax_t: argmax[0],
        argmax_x: argmax[1..].to_vec(),
        leading: coefficients[deg],
        constant: coefficients[0],
        coefficients,
        fit_residual: resid,
    })
}

fn fmt_list(v: impl Iterator<Item = f64>) -> String {
    v.map(|x| format!("{x:?}")).collect::<Vec<_>>().join(",")
}

/// Flat `key=value` text, one record per profile, records separated by a blank line.
pub fn profiles_to_text(ps: &[ExtremalProfile]) -> String {
    let mut out = String::new();
    for (i, p) in ps.iter().enumerate() {
        if i > 0 {
            out.push('\n');
        }
        let sheet = match p.sheet {
            Sheet::Plus => "plus",
            Sheet::Minus => "minus",
        };
        let _ = writeln!(out, "family={}", p.family);
        let _ = writeln!(out, "d={}", p.d);
        let _ = writeln!(out, "sheet={sheet}");
        let _ = writeln!(out, "a_re={:?}", p.a.re);
        let _ = writeln!(out, "a_im={:?}", p.a.im);
        let _ = writeln!(out, "b_re={}", fmt_list(p.b.iter().map(|z| z.re)));
        let _ = writeln!(out, "b_im={}", fmt_list(p.b.iter().map(|z| z.im)));
        let _ = writeln!(out, "c_re={:?}", p.c.re);
        let _ = writeln!(out, "c_im={:?}", p.c.im);
    }
    out
}

pub fn profiles_from_text(text: &str) -> Result<Vec<ExtremalProfile>> {
    let mut out = Vec::new();
    for block in text.split("\n\n").filter(|b| !b.trim().is_empty()) {
        let mut map = std::collections::HashMap::new();
        for line in block.lines().map(str::trim).filter(|l| !l.is_empty() && !l.starts_with('#')) {
            let (k, v) =
                line.split_once('=').ok_or_else(|| Error::Parse(format!("expected key=value, got `{line}`")))?;
            map.insert(k.trim().to_string(), v.trim().to_string());
        }
        let get = |k: &str| map.get(k).ok_or_else(|| Error::Parse(format!("missing key `{k}`")));
        let num = |k: &str| -> Result<f64> { get(k)?.parse::<f64>().map_err(|e| Error::Parse(format!("{k}: {e}"))) };
        let list = |k: &str| -> Result<Vec<f64>> {
            get(k)?
                .split(',')
                .filter(|s| !s.trim().is_empty())
                .map(|s| s.trim().parse::<f64>().map_err(|e| Error::Parse(format!("{k}: {e}"))))
                .collect()
        };
        let family: Family = get("family")?.parse()?;
        let d: usize = get("d")?.parse().map_err(|e| Error::Parse(format!("d: {e}")))?;
        let (bre, bim) = (list("b_re")?, list("b_im")?);
        if bre.len() != bim.len() {
            return Err(Error::Parse("b_re and b_im lengths differ".into()));
        }
        let b = bre.into_iter().zip(bim).map(|(r, i)| Complex64::new(r, i)).collect();
        let a = Complex64::new(num("a_re")?, num("a_im")?);
        let c = Complex64::new(num("c_re")?, num("c_im")?);
        let sheet = match map.get("sheet").map(String::as_str) {
            None | Some("plus") => Sheet::Plus,
            Some("minus") => Sheet::Minus,
            Some(other) => return Err(Error::Parse(format!("unknown sheet `{other}`"))),
        };
        let p = match family {
            Family::Wave => ExtremalProfile::wave(d, a, b, c)?,
            Family::Schrodinger => ExtremalProfile::schrodinger(d, a, b, c)?,
        };
        out.push(p.with_sheet(sheet));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn zeros(d: usize) -> Vec<Complex64> {
        vec![c(0.0, 0.0); d]
    }

    #[test]
    fn wave_norm_examples() {
        let p5 = ExtremalProfile::basic(Family::Wave, 5, -1.0).unwrap();
        let v = sobolev_norm_sq(&p5, 1.0).unwrap().finite().unwrap();
        assert_relative_eq!(v, 1.0 / (16.0 * PI.powi(3)), max_relative = 1e-13);
        // oracle: (2 pi)^-5 |S^4| int e^{-2r} r^4 dr
        let q = integrate(|r| (-2.0 * r).exp() * r.powi(4), 0.0, 60.0, Tolerance::new(0.0, 1e-14)).unwrap();
        assert_relative_eq!(v, (2.0 * PI).powi(-5) * sphere_area(5) * q.value, max_relative = 1e-12);
        let p3 = ExtremalProfile::basic(Family::Wave, 3, -1.0).unwrap();
        let h = sobolev_norm_sq(&p3, 0.5).unwrap().finite().unwrap();
        assert_relative_eq!(h, 1.0 / (8.0 * PI * PI), max_relative = 1e-13);
        let mut b = zeros(3);
        b[0] = c(1.0, 0.0);
        let edge = ExtremalProfile::wave(3, c(-1.0, 0.0), b, c(0.0, 0.0)).unwrap();
        assert_eq!(sobolev_norm_sq(&edge, 1.0).unwrap(), SobolevNorm::Divergent);
    }

    #[test]
    fn tilted_wave_norm_against_cartesian_quadrature() {
        // d = 2 tilt along x: compare the reduction with a direct polar double integral
        let mut b = zeros(2);
        b[0] = c(0.4, 0.0);
        let p = ExtremalProfile::wave(2, c(-1.0, 0.3), b, c(0.2, 1.0)).unwrap();
        let v = sobolev_norm_sq(&p, 1.0).unwrap().finite().unwrap();
        let tol = Tolerance::new(0.0, 1e-12);
        let outer = integrate(
            |th| integrate(|r| (2.0 * (-1.0 + 0.4 * th.cos()) * r).exp() * r, 0.0, 80.0, tol).unwrap().value,
            0.0,
            2.0 * PI,
            tol,
        )
        .unwrap();
        assert_relative_eq!(v, (2.0 * PI).powi(-2) * (0.4f64).exp() * outer.value, max_relative = 1e-10);
    }

    #[test]
    fn schrodinger_norms() {
        let p = ExtremalProfile::basic(Family::Schrodinger, 4, -1.0).unwrap();
        let m = sobolev_norm_sq(&p, 0.0).unwrap().finite().unwrap();
        let g = sobolev_norm_sq(&p, 1.0).unwrap().finite().unwrap();
        // (2 pi)^-4 (pi/2)^2 and twice that
        assert_relative_eq!(m, (2.0 * PI).powi(-4) * (PI / 2.0).powi(2), max_relative = 1e-14);
        assert_relative_eq!(g, m, max_relative = 1e-14);
        assert_relative_eq!((m * g).sqrt(), 1.0 / (64.0 * PI * PI), max_relative = 1e-13);
        // general-s path reproduces s = 1 when tilted
        let mut b = zeros(3);
        b[1] = c(0.7, 0.2);
        let q = ExtremalProfile::schrodinger(3, c(-0.8, 0.1), b, c(0.1, 0.0)).unwrap();
        let exact = sobolev_norm_sq(&q, 1.0).unwrap().finite().unwrap();
        let general = schro_sobolev(&q, 1.0 + 1e-15).unwrap().finite().unwrap();
        assert_relative_eq!(exact, general, max_relative = 1e-9);
    }

    #[test]
    fn split_examples() {
        let d = 3;
        let gauss: FreqFn = Arc::new(|xi: &[f64]| c((-dot(xi, xi)).exp(), 0.0));
        let cd = CauchyData { u0_hat: gauss.clone(), udot0_hat: Arc::new(|_: &[f64]| c(0.0, 0.0)), d };
        let (fp, fm) = data_split(&cd);
        let xi = [0.3, -0.1, 0.7];
        assert_relative_eq!(fp(&xi).re, 0.5 * gauss(&xi).re, max_relative = 1e-15);
        assert_eq!(fp(&xi), fm(&xi));
        let (fp, fm) = data_split(&flighthome_data(5, 1.0));
        let xi = [0.2, 0.1, -0.4, 0.0, 0.3];
        let r = norm(&xi);
        let expect = c((-r).exp(), 0.0) / (2.0 * Complex64::i());
        assert!((r * fp(&xi) - expect).norm() < 1e-15);
        assert!((r * fm(&xi) + expect).norm() < 1e-15);
        let (pp, pm) = flighthome_profiles(5, 1.0).unwrap();
        assert!((pp.fourier(&xi) - fp(&xi)).norm() < 1e-14);
        assert!((pm.fourier(&xi) - fm(&xi)).norm() < 1e-14);
    }

    #[test]
    fn parallelogram_law_band_limited() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        for _ in 0..5 {
            let d = 3;
            let co: Vec<(f64, f64, f64, f64)> = (0..4)
                .map(|_| {
                    (
                        rng.random_range(-1.0..1.0),
                        rng.random_range(-1.0..1.0),
                        rng.random_range(-1.0..1.0),
                        rng.random_range(-1.0..1.0),
                    )
                })
                .collect();
            let bump = |r: f64| if r < 2.0 { (1.0 - (r / 2.0).powi(2)).powi(3) } else { 0.0 };
            let c1 = co.clone();
            let u0: FreqFn = Arc::new(move |xi: &[f64]| {
                let r = norm(xi);
                c1.iter().enumerate().map(|(j, q)| c(q.0, q.1) * (j as f64 * r).cos()).sum::<Complex64>() * bump(r)
            });
            let c2 = co.clone();
            let u1: FreqFn = Arc::new(move |xi: &[f64]| {
                let r = norm(xi);
                c2.iter().enumerate().map(|(j, q)| c(q.2, q.3) * (j as f64 * r).sin()).sum::<Complex64>() * bump(r)
            });
            let cd = CauchyData { u0_hat: u0.clone(), udot0_hat: u1.clone(), d };
            let (fp, fm) = data_split(&cd);
            let tol = Tolerance::new(0.0, 1e-12);
            let lhs = radial_norm_sq(&fp, d, 1.0, 2.0, tol).unwrap() + radial_norm_sq(&fm, d, 1.0, 2.0, tol).unwrap();
            let rhs =
                0.5 * (radial_norm_sq(&u0, d, 1.0, 2.0, tol).unwrap() + radial_norm_sq(&u1, d, 0.0, 2.0, tol).unwrap());
            assert_relative_eq!(lhs, rhs, max_relative = 1e-10);
        }
    }

    #[test]
    fn symmetry_examples() {
        let p = ExtremalProfile::wave(3, c(-1.0, 0.2), zeros(3), c(0.5, 0.1)).unwrap();
        assert_eq!(symmetry_apply(&GroupElement::Identity, &p).unwrap(), p);
        let q = symmetry_apply(&GroupElement::WavePhase { theta_plus: PI, theta_minus: 0.0 }, &p).unwrap();
        assert_relative_eq!(q.c.im, p.c.im + PI);
        let xi = [0.1, 0.2, 0.3];
        assert_relative_eq!(q.fourier(&xi).norm(), p.fourier(&xi).norm(), max_relative = 1e-14);
        let t = symmetry_apply(&GroupElement::WaveTranslation { t0: 1.0, x0: vec![0.0; 3] }, &p).unwrap();
        assert_relative_eq!(t.a.im, p.a.im + 1.0);
        let tm = symmetry_apply(
            &GroupElement::WaveTranslation { t0: 1.0, x0: vec![0.0; 3] },
            &p.clone().with_sheet(Sheet::Minus),
        )
        .unwrap();
        assert_relative_eq!(tm.a.im, p.a.im - 1.0);
        assert!(symmetry_apply(&GroupElement::Galilean { v: vec![1.0; 3] }, &p).is_err());
    }

    #[test]
    fn galilean_is_a_frequency_shift() {
        let mut b = zeros(2);
        b[0] = c(0.3, -0.4);
        let p = ExtremalProfile::schrodinger(2, c(-0.7, 0.5), b, c(0.1, 0.2)).unwrap();
        let v = vec![0.4, -0.9];
        let q = symmetry_apply(&GroupElement::Galilean { v: v.clone() }, &p).unwrap();
        let xi = [0.25, 1.5];
        let shifted = [xi[0] + v[0], xi[1] + v[1]];
        assert!((q.fourier(&xi) - p.fourier(&shifted)).norm() < 1e-13);
    }

    #[test]
    fn text_round_trip() {
        let (pp, pm) = flighthome_profiles(5, 1.0).unwrap();
        let text = profiles_to_text(&[pp.clone(), pm.clone()]);
        let back = profiles_from_text(&text).unwrap();
        assert_eq!(back, vec![pp, pm]);
        assert!(profiles_from_text("family=wave\nd=2\n").is_err());
    }

    #[test]
    fn center_line_and_argmax() {
        let p = ExtremalProfile::basic(Family::Wave, 5, -1.0).unwrap();
        let v = lambda_amplitude(&p, 0.0, &[0.0; 5]).unwrap();
        assert_relative_eq!(v, 6.0 * sphere_area(5) / (2.0 * PI).powi(5), max_relative = 1e-13);
        let mut b = zeros(5);
        b[1] = c(0.0, 0.7);
        let q = ExtremalProfile::wave(5, c(-1.3, 0.4), b, c(0.3, 0.0)).unwrap();
        let diag = lambda_diagnostics(&q).unwrap();
        assert!((diag.argmax_t + 0.4).abs() < 1e-4, "{diag:?}");
        assert!((diag.argmax_x[1] + 0.7).abs() < 1e-4);
        let e = (-0.3f64).exp();
        assert_relative_eq!(diag.leading, e, max_relative = 1e-9);
        assert_relative_eq!(diag.constant, e * 1.3f64.powi(4), max_relative = 1e-9);
        assert!(diag.fit_residual < 1e-12);
    }

    fn wave_elem() -> impl Strategy<Value = GroupElement> {
        prop_oneof![
            (-3.0f64..3.0, prop::collection::vec(-2.0f64..2.0, 3))
                .prop_map(|(t0, x0)| GroupElement::WaveTranslation { t0, x0 }),
            (0.2f64..5.0, 0.2f64..5.0).prop_map(|(lambda1, lambda2)| GroupElement::WaveScaling { lambda1, lambda2 }),
            (-3.0f64..3.0, -3.0f64..3.0)
                .prop_map(|(theta_plus, theta_minus)| GroupElement::WavePhase { theta_plus, theta_minus }),
        ]
    }

    fn schro_elem() -> impl Strategy<Value = GroupElement> {
        prop_oneof![
            (-3.0f64..3.0, prop::collection::vec(-2.0f64..2.0, 3))
                .prop_map(|(t0, x0)| GroupElement::SchroTranslation { t0, x0 }),
            (0.2f64..5.0, 0.2f64..5.0).prop_map(|(lambda1, lambda2)| GroupElement::SchroScaling { lambda1, lambda2 }),
            (-3.0f64..3.0).prop_map(|theta| GroupElement::SchroPhase { theta }),
            prop::collection::vec(-2.0f64..2.0, 3).prop_map(|v| GroupElement::Galilean { v }),
        ]
    }

    fn close(p: &ExtremalProfile, q: &ExtremalProfile) -> bool {
        let tol = |x: Complex64, y: Complex64| (x - y).norm() <= 1e-12 * (1.0 + x.norm());
        tol(p.a, q.a) && tol(p.c, q.c) && p.b.iter().zip(&q.b).all(|(x, y)| tol(*x, *y))
    }

    proptest! {
        #[test]
        fn wave_group_law(g in wave_elem(), h in wave_elem(), minus in any::<bool>()) {
            let mut p = ExtremalProfile::wave(3, c(-1.0, 0.3), vec![c(0.1, 0.2), c(0.0, -0.1), c(0.2, 0.0)], c(0.1, 0.4)).unwrap();
            if minus { p = p.with_sheet(Sheet::Minus); }
            let two = symmetry_apply(&g, &symmetry_apply(&h, &p).unwrap()).unwrap();
            let one = symmetry_apply(&g.compose(&h), &p).unwrap();
            prop_assert!(close(&one, &two), "{:?} vs {:?}", one, two);
        }

        #[test]
        fn schro_group_law(g in schro_elem(), h in schro_elem()) {
            let p = ExtremalProfile::schrodinger(3, c(-1.0, 0.3), vec![c(0.1, 0.2), c(0.0, -0.1), c(0.2, 0.0)], c(0.1, 0.4)).unwrap();
            let two = symmetry_apply(&g, &symmetry_apply(&h, &p).unwrap()).unwrap();
            let one = symmetry_apply(&g.compose(&h), &p).unwrap();
            prop_assert!(close(&one, &two), "{:?} vs {:?}", one, two);
        }

        #[test]
        fn admissibility_matches_norm_finiteness(beta in 0.0f64..2.0, s in 0.5f64..3.0) {
            let p = ExtremalProfile::wave(4, c(-1.0, 0.0), vec![c(beta, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)], c(0.0, 0.0)).unwrap();
            let n = sobolev_norm_sq(&p, s).unwrap();
            prop_assert_eq!(n.is_finite(), beta < 1.0);
            prop_assert_eq!(p.is_admissible(), beta < 1.0);
        }
    }
}
