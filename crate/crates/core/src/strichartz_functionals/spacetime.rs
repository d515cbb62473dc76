use std::cell::{Cell, RefCell};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::extremal_profiles::ExtremalProfile;
use crate::propagators::{wave_closed_form_radial, RadialEvaluator};
use crate::quadrature::{integrate_vec_real_line, integrate_vec_semi_infinite, Tolerance, VecEstimate};
use crate::special::sphere_area;
use crate::special_constants::Family;

/// A solution that is radial in `x` about a fixed spatial center, sampled at `(t, r)`.
pub trait SpaceTimeField: Sync {
    fn dim(&self) -> usize;
    fn eval(&self, t: f64, r: f64) -> Result<Complex64>;
    /// Times at which the solution focuses at `r = 0`; light cones open from these.
    fn time_centers(&self) -> Vec<f64>;
    /// Width of the focused profile, used to place breakpoints.
    fn length_scale(&self) -> f64;
    /// Bound on the relative pointwise error of `eval`.
    fn rel_error(&self) -> f64 {
        0.0
    }
}

/// Sum of closed-form one-sided waves sharing the spatial center `-Im b`.
#[derive(Clone, Debug)]
pub struct WaveField {
    d: usize,
    components: Vec<ExtremalProfile>,
}

impl WaveField {
    pub fn new(components: Vec<ExtremalProfile>) -> Result<Self> {
        let first = components.first().ok_or_else(|| Error::domain("a wave field needs a component"))?;
        let d = first.d;
        let center = first.im_b();
        for p in &components {
            if p.family != Family::Wave || p.d != d {
                return Err(Error::domain("wave field components must be wave profiles of one dimension"));
            }
            p.require_admissible()?;
            if p.re_b_norm() != 0.0 {
                return Err(Error::domain("closed-form fields need Re(b) = 0"));
            }
            if p.im_b().iter().zip(&center).any(|(x, y)| (x - y).abs() > 1e-12) {
                return Err(Error::domain("wave field components must share the spatial center"));
            }
        }
        Ok(WaveField { d, components })
    }

    pub fn single(p: &ExtremalProfile) -> Result<Self> {
        WaveField::new(vec![p.clone()])
    }

    pub fn components(&self) -> &[ExtremalProfile] {
        &self.components
    }
}

impl SpaceTimeField for WaveField {
    fn dim(&self) -> usize {
        self.d
    }

    fn eval(&self, t: f64, r: f64) -> Result<Complex64> {
        Ok(self.components.iter().map(|p| wave_closed_form_radial(p, t, r)).sum())
    }

    fn time_centers(&self) -> Vec<f64> {
        self.components.iter().map(|p| -p.sheet.sign() * p.a.im).collect()
    }

    fn length_scale(&self) -> f64 {
        self.components.iter().map(|p| -p.a.re).fold(0.0, f64::max)
    }
}

/// A one-sided wave evaluated by frequency quadrature, focused at `t = 0`.
#[derive(Clone, Debug)]
pub struct QuadratureField {
    pub evaluator: RadialEvaluator,
    pub scale: f64,
}

impl SpaceTimeField for QuadratureField {
    fn dim(&self) -> usize {
        self.evaluator.d
    }

    fn eval(&self, t: f64, r: f64) -> Result<Complex64> {
        self.evaluator.eval(t, r)
    }

    fn time_centers(&self) -> Vec<f64> {
        vec![0.0]
    }

    fn length_scale(&self) -> f64 {
        self.scale
    }

    fn rel_error(&self) -> f64 {
        self.evaluator.tol.rel
    }
}

/// `int int F(u_1(t,r), ..., u_m(t,r)) |S^{d-1}| r^{d-1} dr dt` over all of space-time.
///
/// The `r` integral is mapped onto `[0, 1)` with breakpoints on every light cone; the
/// `t` integral is mapped onto a bounded interval by `tan`. The returned error adds the
/// outer estimate, the worst relative inner estimate and the fields' pointwise errors
/// (scaled by `degree`, the homogeneity of `F`).
pub fn spacetime_integral<const N: usize, F>(
    fields: &[&dyn SpaceTimeField],
    degree: f64,
    integrand: F,
    tol: Tolerance,
) -> Result<VecEstimate<N>>
where
    F: Fn(&[Complex64]) -> [f64; N],
{
    let first = fields.first().ok_or_else(|| Error::domain("no fields to integrate"))?;
    let d = first.dim();
    if fields.iter().any(|f| f.dim() != d) {
        return Err(Error::domain("fields of different dimensions"));
    }
    let mut centers: Vec<f64> = fields.iter().flat_map(|f| f.time_centers()).collect();
    centers.sort_by(f64::total_cmp);
    centers.dedup_by(|a, b| (*a - *b).abs() < 1e-14);
    let scale = fields.iter().map(|f| f.length_scale()).fold(0.0, f64::max);
    if !(scale > 0.0) {
        return Err(Error::domain("fields need a positive length scale"));
    }
    let t_mid = 0.5 * (centers[0] + centers[centers.len() - 1]);
    let area = sphere_area(d);
    let failure: RefCell<Option<Error>> = RefCell::new(None);
    let inner_rel = Cell::new(0.0f64);
    let mut vals = vec![Complex64::default(); fields.len()];
    let outer = integrate_vec_real_line(
        |t| {
            let mut breaks: Vec<f64> = centers
                .iter()
                .flat_map(|c| {
                    let s = (t - c).abs();
                    [s - 2.0 * scale, s, s + 2.0 * scale]
                })
                .filter(|b| *b > 0.0)
                .collect();
            breaks.sort_by(f64::total_cmp);
            let far = breaks.last().copied().unwrap_or(0.0);
            let inner = integrate_vec_semi_infinite(
                |r| {
                    for (v, f) in vals.iter_mut().zip(fields) {
                        match f.eval(t, r) {
                            Ok(x) => *v = x,
                            Err(e) => {
                                failure.borrow_mut().get_or_insert(e);
                                return [0.0; N];
                            }
                        }
                    }
                    let w = area * r.powi(d as i32 - 1);
                    integrand(&vals).map(|x| x * w)
                },
                0.0,
                &breaks,
                scale + 0.5 * far,
                tol,
            );
            if !inner.converged {
                failure
                    .borrow_mut()
                    .get_or_insert(Error::Convergence { estimate: inner.value[0], error: inner.error[0] });
            }
            let size = inner.value.iter().fold(0.0f64, |m, x| m.max(x.abs()));
            let err = inner.error.iter().fold(0.0f64, |m, x| m.max(*x));
            if size > 0.0 {
                inner_rel.set(inner_rel.get().max(err / size));
            }
            inner.value
        },
        t_mid,
        &centers,
        scale,
        tol,
    );
    if let Some(e) = failure.into_inner() {
        return Err(e);
    }
    if !outer.converged {
        return Err(Error::Convergence { estimate: outer.value[0], error: outer.error[0] });
    }
    let pointwise = degree * fields.iter().map(|f| f.rel_error()).fold(0.0, f64::max);
    let mut error = outer.error;
    for (e, v) in error.iter_mut().zip(&outer.value) {
        *e += (inner_rel.get() + pointwise) * v.abs();
    }
    Ok(VecEstimate { value: outer.value, error, converged: true })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LpNorm {
    pub p: u32,
    /// `||u||_p^p`.
    pub integral: f64,
    pub error: f64,
}

impl LpNorm {
    pub fn norm(&self) -> f64 {
        self.integral.powf(1.0 / self.p as f64)
    }
}

/// `||u||_{L^p_{t,x}}` for a one- or two-sided wave field.
pub fn lp_norm_radial(u: &dyn SpaceTimeField, p: u32, tol: Tolerance) -> Result<LpNorm> {
    if ![2, 4, 6, 10].contains(&p) {
        return Err(Error::domain(format!("p = {p} is not one of 2, 4, 6, 10")));
    }
    let d = u.dim();
    // ||u(t)||_p^p decays like |t|^{-q} along the cone
    let q = (d as f64 - 1.0) * (p as f64 - 2.0) / 2.0;
    if q <= 1.0 {
        return Err(Error::domain(format!("|u|^{p} is not integrable in time for d = {d} (decay t^-{q})")));
    }
    let half = p as i32 / 2;
    let est = spacetime_integral(&[u], p as f64, |v| [v[0].norm_sqr().powi(half)], tol)?;
    Ok(LpNorm { p, integral: est.value[0], error: est.error[0] })
}
