use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::fourier::{radial_sobolev_sq, wave_l4_fourier, FourierGrid, RadialProfile};
use super::spacetime::{spacetime_integral, SpaceTimeField, WaveField};
use super::{QuotientReport, ReportMetadata, Valued};
use crate::error::{Error, Result};
use crate::extremal_profiles::{sobolev_norm_sq, ExtremalProfile, Sheet};
use crate::quadrature::Tolerance;
use crate::special_constants::{alpha_exponent, wave_sharp_constant, EstimateScale, Family};

/// The `k` with `alpha(k) = 1` in dimension `d`, if any.
fn unit_alpha_k(d: usize) -> Result<usize> {
    (2..=5)
        .find(|&k| alpha_exponent(d, k).to_f64() == 1.0)
        .ok_or_else(|| Error::Unsupported(format!("no k with alpha(k) = 1 in dimension {d}")))
}

/// Sharp constant `k(k-1)/2 (2 pi)^{kd} W(d,k)` of the one-sided estimate
/// `||u||_{2k}^{2k} <= C ||f||_{H^{1/2}}^{2(k-2)} ||f||_{H^1}^4`.
pub fn one_sided_constant(d: usize) -> Result<(usize, f64)> {
    let k = unit_alpha_k(d)?;
    let w = wave_sharp_constant(d, k)?;
    let kf = k as f64;
    Ok((k, 0.5 * kf * (kf - 1.0) * ((kf * d as f64) * (2.0 * PI).ln() + w.ln_value).exp()))
}

fn one_sided_rhs(h_half: f64, h_one: f64, k: usize) -> f64 {
    h_half.powi(k as i32 - 2) * h_one * h_one
}

/// One-sided estimate for a closed-form wave profile, `d` in {2, 3, 5}; the space-time
/// norm is by 2-D quadrature.
pub fn one_sided_quotient(p: &ExtremalProfile, tol: Tolerance) -> Result<QuotientReport> {
    let (k, c) = one_sided_constant(p.d)?;
    let field = WaveField::single(p)?;
    let lhs = super::spacetime::lp_norm_radial(&field, 2 * k as u32, tol)?;
    let h_half = sobolev_norm_sq(p, 0.5)?.finite()?;
    let h_one = sobolev_norm_sq(p, 1.0)?.finite()?;
    let meta = ReportMetadata {
        label: format!("one-sided L^{} estimate, d = {}", 2 * k, p.d),
        scale: Some(EstimateScale::new(p.d, k, Family::Wave)?),
        profiles: vec![p.clone()],
        tolerance: tol.rel,
        method: "space-time quadrature".into(),
        ..Default::default()
    };
    Ok(QuotientReport::new(
        Valued::new(lhs.integral, lhs.error),
        Valued::new(one_sided_rhs(h_half, h_one, k), 1e-12 * one_sided_rhs(h_half, h_one, k)),
        c,
        meta,
    ))
}

/// The `d = 5` one-sided `L^4` estimate for arbitrary radial data, on the Fourier side.
pub fn one_sided_quotient_radial(prof: &RadialProfile, grid: FourierGrid) -> Result<QuotientReport> {
    if prof.family != Family::Wave || prof.d != 5 {
        return Err(Error::Unsupported("the radial L^4 quotient is implemented for d = 5 waves".into()));
    }
    let (k, c) = one_sided_constant(5)?;
    let lhs = wave_l4_fourier(prof, grid)?;
    let h1 = radial_sobolev_sq(prof, 1.0)?;
    let meta = ReportMetadata {
        label: "one-sided L^4 estimate, d = 5, radial data".into(),
        scale: Some(EstimateScale::new(5, k, Family::Wave)?),
        method: "Fourier-side tensor quadrature".into(),
        ..Default::default()
    };
    Ok(QuotientReport::new(lhs, h1 * h1, c, meta))
}

fn pair_field(plus: &ExtremalProfile, minus: Option<&ExtremalProfile>) -> Result<(WaveField, Option<WaveField>)> {
    if plus.sheet != Sheet::Plus || minus.is_some_and(|m| m.sheet != Sheet::Minus) {
        return Err(Error::domain("expected a + sheet profile and a - sheet profile"));
    }
    if let Some(m) = minus {
        // a shared center is needed for the pointwise sum
        WaveField::new(vec![plus.clone(), m.clone()])?;
    }
    Ok((WaveField::single(plus)?, minus.map(WaveField::single).transpose()?))
}

/// Both sides of `||u||_4^4 = ||u+||_4^4 + ||u-||_4^4 + 4 ||u+ u-||_2^2`, each integral
/// computed independently from pointwise values of `u = u+ + u-`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SplitCheck {
    pub full: Valued,
    pub plus: Valued,
    pub minus: Valued,
    pub cross: Valued,
    /// `|full - (plus + minus + 4 cross)| / full`.
    pub residual: f64,
    pub residual_error: f64,
    /// `X = ||u+||_4^2`, `Y = ||u-||_4^2`.
    pub x: f64,
    pub y: f64,
}

impl SplitCheck {
    /// `2(X^2 + Y^2 + 4XY) <= 3(X + Y)^2`, returned as `(left, right)`.
    pub fn basic_inequality(&self) -> (f64, f64) {
        let (x, y) = (self.x, self.y);
        (2.0 * (x * x + y * y + 4.0 * x * y), 3.0 * (x + y) * (x + y))
    }
}

pub fn orthogonal_split_check(
    plus: &ExtremalProfile,
    minus: Option<&ExtremalProfile>,
    tol: Tolerance,
) -> Result<SplitCheck> {
    let (fp, fm) = pair_field(plus, minus)?;
    let est = match &fm {
        Some(fm) => spacetime_integral(
            &[&fp as &dyn SpaceTimeField, fm],
            4.0,
            |v| {
                let (a, b) = (v[0], v[1]);
                [(a + b).norm_sqr().powi(2), a.norm_sqr().powi(2), b.norm_sqr().powi(2), (a * b).norm_sqr()]
            },
            tol,
        )?,
        None => {
            let e = spacetime_integral(&[&fp as &dyn SpaceTimeField], 4.0, |v| [v[0].norm_sqr().powi(2)], tol)?;
            crate::quadrature::VecEstimate {
                value: [e.value[0], e.value[0], 0.0, 0.0],
                error: [e.error[0], e.error[0], 0.0, 0.0],
                converged: true,
            }
        }
    };
    let [full, p4, m4, cross] = est.value;
    let err = est.error;
    let residual = (full - (p4 + m4 + 4.0 * cross)).abs() / full;
    let residual_error = (err[0] + err[1] + err[2] + 4.0 * err[3]) / full;
    Ok(SplitCheck {
        full: Valued::new(full, err[0]),
        plus: Valued::new(p4, err[1]),
        minus: Valued::new(m4, err[2]),
        cross: Valued::new(cross, err[3]),
        residual,
        residual_error,
        x: p4.sqrt(),
        y: m4.sqrt(),
    })
}

/// `||u||_4 <= (8 pi)^{-1/2} E^{1/2}` in `d = 5`, for `u = u+ + u-` with closed-form
/// halves; the energy comes from the parallelogram law `E = 2(||grad f+||^2 + ||grad f-||^2)`.
pub fn energy_quotient(plus: &ExtremalProfile, minus: &ExtremalProfile, tol: Tolerance) -> Result<QuotientReport> {
    if plus.d != 5 || minus.d != 5 {
        return Err(Error::Unsupported("the energy estimate is stated in d = 5".into()));
    }
    let (fp, fm) = pair_field(plus, Some(minus))?;
    let fm = fm.expect("minus field");
    let est = spacetime_integral(&[&fp as &dyn SpaceTimeField, &fm], 4.0, |v| [(v[0] + v[1]).norm_sqr().powi(2)], tol)?;
    let l4 = Valued::new(est.value[0], est.error[0]).powf(0.25);
    let energy = 2.0 * (sobolev_norm_sq(plus, 1.0)?.finite()? + sobolev_norm_sq(minus, 1.0)?.finite()?);
    let meta = ReportMetadata {
        label: "energy estimate, d = 5".into(),
        scale: Some(EstimateScale::new(5, 2, Family::Wave)?),
        profiles: vec![plus.clone(), minus.clone()],
        tolerance: tol.rel,
        method: "space-time quadrature, parallelogram energy".into(),
        ..Default::default()
    };
    Ok(QuotientReport::new(l4, Valued::new(energy.sqrt(), 1e-12 * energy.sqrt()), (8.0 * PI).powf(-0.5), meta))
}

/// The split of the data `(0, ...)` or `((1+|x|^2)^{-(d-1)/2}, 0)`: both halves have
/// `|xi| f^_+- = c e^{-|xi|}` with the constant fixed by `u(0)`.
pub fn remark_profiles(d: usize) -> Result<(ExtremalProfile, ExtremalProfile)> {
    // u(0, 0) = 2 * (2 pi)^{-d} e^c |S^{d-1}| Gamma(d-1) must equal 1
    let one = ExtremalProfile::basic(Family::Wave, d, -1.0)?;
    let at_origin = crate::propagators::wave_closed_form(&one, 0.0, &vec![0.0; d])?.re;
    let c = Complex64::new((0.5 / at_origin).ln(), 0.0);
    let zero = vec![Complex64::default(); d];
    let a = Complex64::new(-1.0, 0.0);
    Ok((ExtremalProfile::wave(d, a, zero.clone(), c)?, ExtremalProfile::wave(d, a, zero, c)?.with_sheet(Sheet::Minus)))
}

/// `|<u^3, u^2 v>| / (||u^3||_2 ||u^2 v||_2)` for two closed-form waves `u`, `v`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CrossTermGap {
    pub ratio: f64,
    pub error: f64,
    pub pairing_re: f64,
    pub pairing_im: f64,
    pub cube_norm_sq: Valued,
    pub mixed_norm_sq: Valued,
}

impl CrossTermGap {
    pub fn gap(&self) -> f64 {
        1.0 - self.ratio
    }
}

pub fn cross_term_gap(u: &ExtremalProfile, v: &ExtremalProfile, tol: Tolerance) -> Result<CrossTermGap> {
    let fu = WaveField::single(u)?;
    let fv = WaveField::single(v)?;
    WaveField::new(vec![u.clone(), v.clone()])?;
    let est = spacetime_integral(
        &[&fu as &dyn SpaceTimeField, &fv],
        6.0,
        |x| {
            let (a, b) = (x[0], x[1]);
            let a2 = a.norm_sqr();
            // u^3 conj(u^2 v) = |u|^4 u conj(v)
            let n = a2 * a2 * a * b.conj();
            [n.re, n.im, a2 * a2 * a2, a2 * a2 * b.norm_sqr()]
        },
        tol,
    )?;
    let [re, im, d1, d2] = est.value;
    let e = est.error;
    let pairing = re.hypot(im);
    let ratio = pairing / (d1 * d2).sqrt();
    let error = ratio * (e[0].hypot(e[1]) / pairing + 0.5 * (e[2] / d1 + e[3] / d2));
    Ok(CrossTermGap {
        ratio,
        error,
        pairing_re: re,
        pairing_im: im,
        cube_norm_sq: Valued::new(d1, e[2]),
        mixed_norm_sq: Valued::new(d2, e[3]),
    })
}
