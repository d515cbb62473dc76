//! Evaluation of the one-sided wave propagator on radial data, closed forms for the
//! extremal families, and a 1-D spectral Schrödinger propagator.

use std::f64::consts::PI;
use std::io::Write;
use std::sync::Arc;

use num_complex::Complex64;
use rustfft::FftPlanner;

use crate::error::{Error, Result};
use crate::extremal_profiles::{ExtremalProfile, Sheet};
use crate::minkowski_geometry::{dot, norm};
use crate::quadrature::{integrate_vec_points, Tolerance};
use crate::special::{ln_gamma, sphere_area, sphere_kernel};
use crate::special_constants::Family;

/// A radial function of `rho = |xi|`.
pub type RadialFn = Arc<dyn Fn(f64) -> Complex64 + Send + Sync>;

/// `e^{+-it sqrt(-Delta)} f` for radial data `|xi| f^(xi) = g(|xi|)`, by 1-D quadrature.
#[derive(Clone)]
pub struct RadialEvaluator {
    pub d: usize,
    pub sheet: Sheet,
    g: RadialFn,
    /// Truncation radius for the frequency integral.
    pub radius: f64,
    /// Bound on the discarded tail `rho > radius`, included in reported errors.
    pub tail_bound: f64,
    pub tol: Tolerance,
}

impl std::fmt::Debug for RadialEvaluator {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("RadialEvaluator")
            .field("d", &self.d)
            .field("sheet", &self.sheet)
            .field("radius", &self.radius)
            .field("tol", &self.tol)
            .finish_non_exhaustive()
    }
}

/// Smallest `R` whose tail bound `e^{-lam R} R^{d-2}/lam` falls below `tol` times the
/// `r = 0` scale `Gamma(d-1)/lam^{d-1}`; monotone in `tol`.
fn truncation_radius(re_a: f64, d: usize, tol: f64) -> f64 {
    let lam = -re_a;
    let n = d as f64 - 2.0;
    let scale = ln_gamma(d as f64 - 1.0) - (d as f64 - 1.0) * lam.ln();
    let mut r = 1.0f64;
    for _ in 0..100 {
        r = (-tol.ln() - scale + 2.0 + n * r.max(1.0).ln() - lam.ln()) / lam;
    }
    r.max(1.0 / lam)
}

impl RadialEvaluator {
    /// From a wave profile; `Im b` is a translation and is dropped, `Re b` must vanish.
    pub fn from_profile(p: &ExtremalProfile, tol: Tolerance) -> Result<Self> {
        if p.family != Family::Wave {
            return Err(Error::domain("the radial wave evaluator needs a wave profile"));
        }
        p.require_admissible()?;
        if p.re_b_norm() != 0.0 {
            return Err(Error::domain("radial evaluation needs Re(b) = 0"));
        }
        let (a, c) = (p.a, p.c);
        let radius = truncation_radius(p.a.re, p.d, tol.rel.max(1e-16));
        let (lam, n) = (-p.a.re, p.d as f64 - 2.0);
        let tail_bound =
            (2.0 * PI).powi(-(p.d as i32)) * sphere_area(p.d) * (c.re - lam * radius).exp() * radius.powf(n)
                / (lam - n / radius).max(0.5 * lam);
        Ok(RadialEvaluator {
            d: p.d,
            sheet: p.sheet,
            g: Arc::new(move |rho| (a * rho + c).exp()),
            radius,
            tail_bound,
            tol,
        })
    }

    /// From an arbitrary radial profile whose tail beyond `radius` is bounded by `tail_bound`.
    pub fn from_fn(d: usize, sheet: Sheet, g: RadialFn, radius: f64, tail_bound: f64, tol: Tolerance) -> Result<Self> {
        if d < 2 || !(radius > 0.0) {
            return Err(Error::domain("radial evaluator needs d >= 2 and a positive radius"));
        }
        Ok(RadialEvaluator { d, sheet, g, radius, tail_bound, tol })
    }

    pub fn g(&self, rho: f64) -> Complex64 {
        (self.g)(rho)
    }

    /// Value with the quadrature error estimate.
    pub fn eval_with_error(&self, t: f64, r: f64) -> Result<(Complex64, f64)> {
        let d = self.d;
        let st = self.sheet.sign() * t;
        let pre = (2.0 * PI).powi(-(d as i32)) * sphere_area(d);
        let omega = st.abs() + r + 1.0;
        let pieces = ((self.radius * omega / (2.0 * PI)) / 2.0).ceil().clamp(1.0, 400.0) as usize;
        let pts: Vec<f64> = (0..=pieces).map(|j| self.radius * j as f64 / pieces as f64).collect();
        let f = |rho: f64| {
            let v =
                self.g(rho) * Complex64::new(0.0, st * rho).exp() * rho.powi(d as i32 - 2) * sphere_kernel(d, rho * r);
            [v.re, v.im]
        };
        let out = integrate_vec_points(f, &pts, self.tol);
        let val = Complex64::new(out.value[0], out.value[1]) * pre;
        let err = out.error[0] * pre + self.tail_bound;
        if !out.converged {
            return Err(Error::Convergence { estimate: val.norm(), error: err });
        }
        Ok((val, err))
    }

    pub fn eval(&self, t: f64, r: f64) -> Result<Complex64> {
        self.eval_with_error(t, r).map(|v| v.0)
    }
}

/// `e^{it sqrt(-Delta)} f` at `|x| = r` (relative to the translation `-Im b`) by quadrature.
pub fn wave_eval(p: &ExtremalProfile, t: f64, r: f64) -> Result<Complex64> {
    RadialEvaluator::from_profile(p, Tolerance::new(1e-15, 1e-11).with_max_panels(20_000))?.eval(t, r)
}

/// Closed form of the wave propagator on a profile with `Re b = 0`:
/// `(2 pi)^{-d} e^c |S^{d-1}| Gamma(d-1) (A^2 + |x + Im b|^2)^{-(d-1)/2}`, `A = a +- it`.
pub fn wave_closed_form(p: &ExtremalProfile, t: f64, x: &[f64]) -> Result<Complex64> {
    if p.family != Family::Wave {
        return Err(Error::domain("closed form needs a wave profile"));
    }
    if p.re_b_norm() != 0.0 {
        return Err(Error::domain("closed form needs Re(b) = 0"));
    }
    if x.len() != p.d {
        return Err(Error::domain("point dimension does not match the profile"));
    }
    let y2: f64 = x.iter().zip(&p.b).map(|(xi, b)| (xi + b.im).powi(2)).sum();
    Ok(wave_closed_form_radial(p, t, y2.sqrt()))
}

pub(crate) fn wave_closed_form_radial(p: &ExtremalProfile, t: f64, r: f64) -> Complex64 {
    let d = p.d as f64;
    let big_a = p.a + Complex64::new(0.0, p.sheet.sign() * t);
    let z = big_a * big_a + r * r;
    let pre = (-d * (2.0 * PI).ln() + ln_gamma(d - 1.0)).exp() * sphere_area(p.d);
    pre * p.c.exp() * z.powf(-(d - 1.0) / 2.0)
}

/// Closed form `(2 pi)^{-d} (pi/(it - a))^{d/2} exp((b + ix).(b + ix)/(4(it - a)) + c)`.
pub fn schro_gaussian_eval(p: &ExtremalProfile, t: f64, x: &[f64]) -> Result<Complex64> {
    if p.family != Family::Schrodinger {
        return Err(Error::domain("closed form needs a Schrödinger profile"));
    }
    if x.len() != p.d {
        return Err(Error::domain("point dimension does not match the profile"));
    }
    let d = p.d as f64;
    let w = Complex64::new(0.0, t) - p.a;
    let bb: Complex64 = p.b.iter().zip(x).map(|(b, xi)| (b + Complex64::new(0.0, *xi)).powi(2)).sum();
    let amp = (Complex64::new(PI, 0.0) / w).powf(d / 2.0);
    Ok((2.0 * PI).powf(-d) * amp * (bb / (4.0 * w) + p.c).exp())
}

/// `int |u(t,x)|^p dx` for a Gaussian Schrödinger solution, in closed form.
pub fn schro_gaussian_slice_power(p: &ExtremalProfile, t: f64, power: f64) -> f64 {
    let d = p.d as f64;
    let ar = -p.a.re;
    let ai = t - p.a.im;
    let m2 = ar * ar + ai * ai;
    let br: Vec<f64> = p.re_b();
    let bi: Vec<f64> = p.im_b();
    let bb_re = dot(&br, &br) - dot(&bi, &bi);
    let bb_im = 2.0 * dot(&br, &bi);
    // Re of the exponent is -ar|x|^2/(4m2) + l.x + k0 + Re c
    let kappa = power * ar / (4.0 * m2);
    let l: Vec<f64> = br.iter().zip(&bi).map(|(r, i)| power * (2.0 * ai * r - 2.0 * ar * i) / (4.0 * m2)).collect();
    let k0 = power * ((ar * bb_re + ai * bb_im) / (4.0 * m2) + p.c.re);
    let amp = -d * power * (2.0 * PI).ln() + power * d / 2.0 * (PI / m2.sqrt()).ln();
    (amp + d / 2.0 * (PI / kappa).ln() + dot(&l, &l) / (4.0 * kappa) + k0).exp()
}

/// Uniform periodic grid on `[-L, L)`.
#[derive(Clone, Debug, PartialEq)]
pub struct Grid1D {
    pub n: usize,
    pub half_width: f64,
    pub values: Vec<Complex64>,
}

impl Grid1D {
    pub fn new(n: usize, half_width: f64, values: Vec<Complex64>) -> Result<Self> {
        if n < 256 || !n.is_power_of_two() || values.len() != n || !(half_width > 0.0) {
            return Err(Error::domain("grid needs a power-of-two size n >= 256 and matching values"));
        }
        Ok(Grid1D { n, half_width, values })
    }

    pub fn from_fn(n: usize, half_width: f64, f: impl Fn(f64) -> Complex64) -> Result<Self> {
        let h = 2.0 * half_width / n as f64;
        let values = (0..n).map(|j| f(-half_width + h * j as f64)).collect();
        Grid1D::new(n, half_width, values)
    }

    /// Samples of `f(x) = (2 pi)^{-1} int f^(k) e^{ikx} dk`, built from `f^` on the dual grid.
    pub fn from_spectrum(n: usize, half_width: f64, fhat: impl Fn(f64) -> Complex64) -> Result<Self> {
        let mut g = Grid1D::new(n, half_width, vec![Complex64::default(); n])?;
        let dk = PI / half_width;
        let mut spec: Vec<Complex64> = (0..n)
            .map(|m| {
                let k = g.wavenumber(m);
                fhat(k) * Complex64::new(0.0, -k * half_width).exp() * dk / (2.0 * PI)
            })
            .collect();
        FftPlanner::new().plan_fft_inverse(n).process(&mut spec);
        g.values = spec;
        Ok(g)
    }

    pub fn x(&self, j: usize) -> f64 {
        -self.half_width + 2.0 * self.half_width * j as f64 / self.n as f64
    }

    pub fn dx(&self) -> f64 {
        2.0 * self.half_width / self.n as f64
    }

    pub fn wavenumber(&self, m: usize) -> f64 {
        let mm = if m < self.n / 2 { m as f64 } else { m as f64 - self.n as f64 };
        PI / self.half_width * mm
    }

    pub fn mass(&self) -> f64 {
        self.values.iter().map(|v| v.norm_sqr()).sum::<f64>() * self.dx()
    }

    /// Data must be below `1e-12` of the peak on the outer eighths of the grid.
    pub fn check_boundary(&self) -> Result<()> {
        let peak = self.values.iter().map(|v| v.norm()).fold(0.0, f64::max);
        let edge = self.n / 64;
        let worst =
            self.values[..edge].iter().chain(&self.values[self.n - edge..]).map(|v| v.norm()).fold(0.0, f64::max);
        if worst > 1e-12 * peak.max(f64::MIN_POSITIVE) {
            return Err(Error::domain(format!("grid data not decayed at the boundary: {worst:e} vs peak {peak:e}")));
        }
        Ok(())
    }
}

/// Apply the multiplier `e^{-it k^2}` on the discrete transform.
pub fn schro_fft_1d(g: &Grid1D, t: f64) -> Result<Grid1D> {
    g.check_boundary()?;
    let n = g.n;
    let mut planner = FftPlanner::new();
    let mut buf = g.values.clone();
    planner.plan_fft_forward(n).process(&mut buf);
    for (m, v) in buf.iter_mut().enumerate() {
        let k = g.wavenumber(m);
        *v *= Complex64::new(0.0, -t * k * k).exp() / n as f64;
    }
    planner.plan_fft_inverse(n).process(&mut buf);
    Ok(Grid1D { n, half_width: g.half_width, values: buf })
}

/// Write `(t, r, Re u, Im u)` rows for plotting.
pub fn dump_csv<W: Write>(mut w: W, ts: &[f64], rs: &[f64], u: impl Fn(f64, f64) -> Result<Complex64>) -> Result<()> {
    writeln!(w, "t,r,re_u,im_u")?;
    for &t in ts {
        for &r in rs {
            let v = u(t, r)?;
            writeln!(w, "{:.14e},{:.14e},{:.14e},{:.14e}", t, r, v.re, v.im)?;
        }
    }
    Ok(())
}

/// Spatial norm of a point, for callers holding vectors.
pub fn radius_of(x: &[f64]) -> f64 {
    norm(x)
}
