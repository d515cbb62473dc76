//! `L^4` norms of radial solutions computed on the Fourier side: `||u||_4^4 = ||u^2||_2^2`
//! and the space-time transform of `u^2` is a weighted integral over a two-sheet shell.
//! Fixed Gauss-Legendre tensor grids keep the result a smooth function of the profile,
//! which matters when it is used as an optimization objective.

use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;
use rayon::prelude::*;

use super::Valued;
use crate::error::{Error, Result};
use crate::extremal_profiles::ExtremalProfile;
use crate::propagators::RadialFn;
use crate::quadrature::{integrate_vec_semi_infinite, GaussLegendre, Tolerance};
use crate::special::sphere_area;
use crate::special_constants::Family;

/// Radial data: `|xi| f^(xi) = g(|xi|)` for waves, `f^(xi) = g(|xi|)` for Schrödinger.
/// `decay` is the rate `lam` in `|g| <~ e^{-lam rho}` (wave) or `e^{-lam rho^2}`.
#[derive(Clone)]
pub struct RadialProfile {
    pub family: Family,
    pub d: usize,
    pub g: RadialFn,
    pub decay: f64,
}

impl std::fmt::Debug for RadialProfile {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("RadialProfile")
            .field("family", &self.family)
            .field("d", &self.d)
            .field("decay", &self.decay)
            .finish_non_exhaustive()
    }
}

impl RadialProfile {
    pub fn new(family: Family, d: usize, g: RadialFn, decay: f64) -> Result<Self> {
        if d == 0 || !(decay > 0.0) {
            return Err(Error::domain("radial profile needs d >= 1 and a positive decay rate"));
        }
        Ok(RadialProfile { family, d, g, decay })
    }

    /// The radial modulus of an extremal profile; `Im b` only translates and is dropped.
    pub fn from_extremal(p: &ExtremalProfile) -> Result<Self> {
        p.require_admissible()?;
        if p.re_b_norm() != 0.0 {
            return Err(Error::domain("radial reduction needs Re(b) = 0"));
        }
        let (a, c) = (p.a, p.c);
        let g: RadialFn = match p.family {
            Family::Wave => Arc::new(move |r: f64| (a * r + c).exp()),
            Family::Schrodinger => Arc::new(move |r: f64| (a * r * r + c).exp()),
        };
        RadialProfile::new(p.family, p.d, g, -p.a.re)
    }

    fn length(&self) -> f64 {
        match self.family {
            Family::Wave => 1.0 / self.decay,
            Family::Schrodinger => 1.0 / self.decay.sqrt(),
        }
    }
}

/// Node counts for the tensor grids; the error estimate compares `n` with `3n/2`.
#[derive(Clone, Copy, Debug, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct FourierGrid {
    pub n: usize,
}

impl Default for FourierGrid {
    fn default() -> Self {
        FourierGrid { n: 48 }
    }
}

/// Nodes and weights for `int_0^inf` under `x = L u/(1-u)`.
fn half_line(gl: &GaussLegendre, len: f64) -> Vec<(f64, f64)> {
    gl.mapped(0.0, 1.0)
        .map(|(u, w)| {
            let om = 1.0 - u;
            (len * u / om, w * len / (om * om))
        })
        .collect()
}

fn angular(gl: &GaussLegendre, d: usize) -> Vec<(f64, f64)> {
    gl.mapped(0.0, PI).map(|(th, w)| (th.cos(), w * th.sin().powi(d as i32 - 2))).collect()
}

fn two_resolutions(grid: FourierGrid, f: impl Fn(usize) -> f64) -> Valued {
    let coarse = f(grid.n);
    let fine = f(grid.n * 3 / 2);
    Valued::new(fine, fine - coarse)
}

/// `||e^{+-it sqrt(-Delta)} f||_{L^4}^4` for radial wave data, `d >= 3`.
///
/// With `sigma = tau - q`, the transform of `u^2` at `(tau, |xi| = q)` is
/// `(2 pi)^{1-d} |S^{d-2}| 2^{2-d} (tau^2 - q^2)^{(d-3)/2} B` where
/// `B = int_0^pi g((tau + q cos phi)/2) g((tau - q cos phi)/2) sin^{d-2} phi dphi`.
pub fn wave_l4_fourier(prof: &RadialProfile, grid: FourierGrid) -> Result<Valued> {
    let d = prof.d;
    if prof.family != Family::Wave {
        return Err(Error::domain("wave_l4_fourier needs a wave profile"));
    }
    if d < 3 {
        return Err(Error::domain("u^2 is not square integrable for d < 3"));
    }
    let df = d as f64;
    let pre = (2.0 * PI).powf(1.0 - df) * sphere_area(d - 1) * 2f64.powf(2.0 - df);
    let total = (2.0 * PI).powf(-(df + 1.0)) * sphere_area(d) * pre * pre;
    let len = prof.length();
    let eval = |n: usize| {
        let gl = GaussLegendre::new(n);
        let radial = half_line(&gl, len);
        let ang = angular(&GaussLegendre::new(n * 3 / 4), d);
        let acc: f64 = radial
            .par_iter()
            .map(|&(q, wq)| {
                let mut inner = 0.0;
                for &(s, ws) in &radial {
                    let tau = q + s;
                    let b: Complex64 = ang
                        .iter()
                        .map(|&(c, w)| (prof.g)(0.5 * (tau + q * c)) * (prof.g)(0.5 * (tau - q * c)) * w)
                        .sum();
                    inner += ws * (s * (2.0 * q + s)).powi(d as i32 - 3) * b.norm_sqr();
                }
                wq * q.powi(d as i32 - 1) * inner
            })
            .sum();
        total * acc
    };
    Ok(two_resolutions(grid, eval))
}

/// `||e^{it Delta} f||_{L^4}^4` for radial Schrödinger data, `d >= 2`, from
/// `(2 pi)^{1-3d} |S^{d-1}| |S^{d-2}|^2 / 4 int q^{d-1} int s^{2d-3} |A(q,s)|^2 ds dq`
/// with `A = int_0^pi g(|xi/2 + s w|) g(|xi/2 - s w|) sin^{d-2} theta dtheta`.
pub fn schro_l4_fourier(prof: &RadialProfile, grid: FourierGrid) -> Result<Valued> {
    let d = prof.d;
    if prof.family != Family::Schrodinger {
        return Err(Error::domain("schro_l4_fourier needs a Schrödinger profile"));
    }
    if d < 2 {
        return Err(Error::domain("u^2 is not square integrable for d < 2"));
    }
    let df = d as f64;
    let total = (2.0 * PI).powf(1.0 - 3.0 * df) * sphere_area(d) * sphere_area(d - 1).powi(2) / 4.0;
    let len = prof.length();
    let eval = |n: usize| {
        let gl = GaussLegendre::new(n);
        let radial = half_line(&gl, len);
        let ang = angular(&GaussLegendre::new(n * 3 / 4), d);
        let acc: f64 = radial
            .par_iter()
            .map(|&(q, wq)| {
                let mut inner = 0.0;
                for &(s, ws) in &radial {
                    let base = 0.25 * q * q + s * s;
                    let a: Complex64 = ang
                        .iter()
                        .map(|&(c, w)| {
                            let x = q * s * c;
                            (prof.g)((base + x).max(0.0).sqrt()) * (prof.g)((base - x).max(0.0).sqrt()) * w
                        })
                        .sum();
                    inner += ws * s.powi(2 * d as i32 - 3) * a.norm_sqr();
                }
                wq * q.powi(d as i32 - 1) * inner
            })
            .sum();
        total * acc
    };
    Ok(two_resolutions(grid, eval))
}

/// `||f||_{H^s}^2 = (2 pi)^{-d} |S^{d-1}| int |F|^2 rho^{2s+d-1} drho`, `F = g/rho` for
/// waves and `F = g` otherwise.
pub fn radial_sobolev_sq(prof: &RadialProfile, s: f64) -> Result<Valued> {
    let d = prof.d;
    let df = d as f64;
    let power = match prof.family {
        Family::Wave => 2.0 * s + df - 3.0,
        Family::Schrodinger => 2.0 * s + df - 1.0,
    };
    if !(power > -1.0) {
        return Err(Error::domain(format!("|xi|^{{2s}} |f^|^2 is not integrable at 0 for s = {s}")));
    }
    let len = prof.length();
    let est = integrate_vec_semi_infinite(
        |r| [(prof.g)(r).norm_sqr() * r.powf(power)],
        0.0,
        &[len],
        len,
        Tolerance::new(0.0, 1e-12).with_max_panels(20_000),
    );
    if !est.converged {
        return Err(Error::Convergence { estimate: est.value[0], error: est.error[0] });
    }
    let pre = (2.0 * PI).powf(-df) * sphere_area(d);
    Ok(Valued::new(pre * est.value[0], pre * est.error[0]))
}
