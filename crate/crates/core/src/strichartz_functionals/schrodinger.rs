use std::cell::RefCell;
use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::fourier::{radial_sobolev_sq, schro_l4_fourier, FourierGrid, RadialProfile};
use super::{QuotientReport, ReportMetadata, Valued};
use crate::error::{Error, Result};
use crate::extremal_profiles::{sobolev_norm_sq, ExtremalProfile};
use crate::propagators::{schro_fft_1d, schro_gaussian_slice_power, Grid1D};
use crate::quadrature::{integrate, integrate_vec_real_line, Tolerance};
use crate::special_constants::{EstimateScale, Family};

/// `||e^{it Delta} f||_{L^4}^4` for a Gaussian profile: closed form in `x`, quadrature in `t`.
pub fn schro_l4_gaussian(p: &ExtremalProfile, tol: Tolerance) -> Result<Valued> {
    if p.family != Family::Schrodinger {
        return Err(Error::domain("needs a Schrödinger profile"));
    }
    p.require_admissible()?;
    let est = integrate_vec_real_line(|t| [schro_gaussian_slice_power(p, t, 4.0)], p.a.im, &[p.a.im], -p.a.re, tol);
    if !est.converged {
        return Err(Error::Convergence { estimate: est.value[0], error: est.error[0] });
    }
    Ok(Valued::new(est.value[0], est.error[0]))
}

fn carneiro_report(l4: Valued, mass: Valued, grad: Valued, meta: ReportMetadata) -> QuotientReport {
    QuotientReport::new(l4.powf(0.25), (mass * grad).powf(0.25), (32.0 * PI).powf(-0.25), meta)
}

fn carneiro_meta(label: &str, method: &str, tol: f64) -> Result<ReportMetadata> {
    Ok(ReportMetadata {
        label: label.into(),
        scale: Some(EstimateScale::new(4, 2, Family::Schrodinger)?),
        tolerance: tol,
        method: method.into(),
        ..Default::default()
    })
}

/// `||u||_{L^4(R^{4+1})} <= (32 pi)^{-1/4} ||f||_2^{1/2} ||grad f||_2^{1/2}` for Gaussian data.
pub fn carneiro_quotient(p: &ExtremalProfile, tol: Tolerance) -> Result<QuotientReport> {
    if p.d != 4 {
        return Err(Error::Unsupported("this mixed-norm estimate is stated in d = 4".into()));
    }
    let l4 = schro_l4_gaussian(p, tol)?;
    let mass = Valued::exact(sobolev_norm_sq(p, 0.0)?.finite()?);
    let grad = Valued::exact(sobolev_norm_sq(p, 1.0)?.finite()?);
    let mut meta =
        carneiro_meta("mixed-norm Schrödinger estimate, d = 4", "closed-form slices, quadrature in t", tol.rel)?;
    meta.profiles = vec![p.clone()];
    Ok(carneiro_report(l4, mass, grad, meta))
}

/// The same estimate for arbitrary radial data, on the Fourier side.
pub fn carneiro_quotient_radial(prof: &RadialProfile, grid: FourierGrid) -> Result<QuotientReport> {
    if prof.family != Family::Schrodinger || prof.d != 4 {
        return Err(Error::Unsupported("this mixed-norm estimate is stated for d = 4 Schrödinger data".into()));
    }
    let l4 = schro_l4_fourier(prof, grid)?;
    let mass = radial_sobolev_sq(prof, 0.0)?;
    let grad = radial_sobolev_sq(prof, 1.0)?;
    let meta =
        carneiro_meta("mixed-norm Schrödinger estimate, d = 4, radial data", "Fourier-side tensor quadrature", 0.0)?;
    Ok(carneiro_report(l4, mass, grad, meta))
}

/// `exp(-1/(1 - s^2))` with `s` the position in `(lo, hi)` rescaled to `(-1, 1)`; zero outside.
pub fn smooth_bump(lo: f64, hi: f64) -> impl Fn(f64) -> f64 + Copy {
    move |x: f64| {
        let s = (2.0 * x - lo - hi) / (hi - lo);
        if s.abs() < 1.0 {
            (-1.0 / (1.0 - s * s)).exp()
        } else {
            0.0
        }
    }
}

/// Grid and quadrature sides of the `d = 1` bilinear identity.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct IdentityCheck {
    /// `||e^{it Delta} f_1 e^{it Delta} f_2||_{L^2_{t,x}}^2` on the grid.
    pub lhs: Valued,
    /// `(2 (2 pi)^2)^{-1} int int |f^_1|^2 |f^_2|^2 / |xi_1 - xi_2|`.
    pub rhs: Valued,
    pub rel_error: f64,
    pub n: usize,
    pub half_width: f64,
    pub t_max: f64,
}

/// Evolve both data on an `n`-point periodic grid and integrate `|u_1 u_2|^2` over space
/// and time. The spectra must vanish outside the given disjoint intervals.
pub fn schro_identity_1d(
    f1: impl Fn(f64) -> f64 + Copy,
    supp1: (f64, f64),
    f2: impl Fn(f64) -> f64 + Copy,
    supp2: (f64, f64),
    n: usize,
    half_width: f64,
) -> Result<IdentityCheck> {
    if !(supp1.0 < supp1.1 && supp2.0 < supp2.1) || !(supp1.1 <= supp2.0 || supp2.1 <= supp1.0) {
        return Err(Error::domain("the identity needs separated frequency supports"));
    }
    let g1 = Grid1D::from_spectrum(n, half_width, |k| Complex64::new(f1(k), 0.0))?;
    let g2 = Grid1D::from_spectrum(n, half_width, |k| Complex64::new(f2(k), 0.0))?;
    g1.check_boundary()?;
    g2.check_boundary()?;
    let k_max = [supp1.0, supp1.1, supp2.0, supp2.1].iter().fold(0.0f64, |m, x| m.max(x.abs()));
    if 2.0 * half_width / n as f64 * k_max >= PI {
        return Err(Error::domain("grid too coarse for the spectral support"));
    }
    // wave packets travel at speed <= 2 k_max; stop while they are well inside the box
    let t_max = 0.25 * half_width / k_max;
    let failure: RefCell<Option<Error>> = RefCell::new(None);
    let slice = |t: f64| -> f64 {
        match (schro_fft_1d(&g1, t), schro_fft_1d(&g2, t)) {
            (Ok(a), Ok(b)) => a.values.iter().zip(&b.values).map(|(x, y)| (x * y).norm_sqr()).sum::<f64>() * a.dx(),
            (Err(e), _) | (_, Err(e)) => {
                failure.borrow_mut().get_or_insert(e);
                0.0
            }
        }
    };
    let peak = slice(0.0);
    let edge = slice(t_max).max(slice(-t_max));
    if edge > 1e-8 * peak {
        return Err(Error::domain(format!("interaction has not decayed by |t| = {t_max}: {edge:e} vs {peak:e}")));
    }
    let tol = Tolerance::new(1e-14 * peak, 1e-8).with_max_panels(2_000);
    let lhs = integrate(slice, -t_max, t_max, tol)?;
    if let Some(e) = failure.into_inner() {
        return Err(e);
    }
    let inner_tol = Tolerance::new(0.0, 1e-11);
    let rhs = integrate(
        |x1| {
            let a = f1(x1).powi(2);
            if a == 0.0 {
                return 0.0;
            }
            integrate(|x2| f2(x2).powi(2) / (x1 - x2).abs(), supp2.0, supp2.1, inner_tol)
                .map(|e| e.value)
                .unwrap_or(f64::NAN)
                * a
        },
        supp1.0,
        supp1.1,
        Tolerance::new(0.0, 1e-10),
    )?;
    let pre = 1.0 / (2.0 * (2.0 * PI).powi(2));
    let lhs = Valued::new(lhs.value, lhs.error + 2.0 * t_max * edge);
    let rhs = Valued::new(pre * rhs.value, pre * rhs.error);
    Ok(IdentityCheck { rel_error: (lhs.value - rhs.value).abs() / rhs.value, lhs, rhs, n, half_width, t_max })
}
