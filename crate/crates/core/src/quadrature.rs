//! Gauss–Legendre rules and a globally adaptive bisection integrator.
//!
//! Each panel is integrated by a fixed Gauss–Legendre rule on the whole panel and on
//! both halves; the difference is the panel's error estimate and the halves' sum is the
//! accepted value. The reported error is therefore conservative.

use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::f64::consts::FRAC_PI_2;

use crate::error::{Error, Result};

#[derive(Clone, Debug)]
pub struct GaussLegendre {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl GaussLegendre {
    /// Nodes and weights on `[-1, 1]` by Newton iteration on `P_n`.
    pub fn new(n: usize) -> Self {
        assert!(n >= 1);
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        let nf = n as f64;
        for i in 0..n.div_ceil(2) {
            let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
            let mut dp = 1.0;
            for _ in 0..100 {
                let (p, d) = legendre(n, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            let (_, d) = legendre(n, x);
            dp = if d != 0.0 { d } else { dp };
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[i] = -x;
            nodes[n - 1 - i] = x;
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        GaussLegendre { nodes, weights }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Nodes and weights mapped to `[a, b]`.
    pub fn mapped(&self, a: f64, b: f64) -> impl Iterator<Item = (f64, f64)> + '_ {
        let h = 0.5 * (b - a);
        let m = 0.5 * (a + b);
        self.nodes.iter().zip(&self.weights).map(move |(&x, &w)| (m + h * x, h * w))
    }

    pub fn integrate<F: FnMut(f64) -> f64>(&self, mut f: F, a: f64, b: f64) -> f64 {
        self.mapped(a, b).map(|(x, w)| w * f(x)).sum()
    }

    pub fn integrate_vec<const N: usize, F: FnMut(f64) -> [f64; N]>(&self, mut f: F, a: f64, b: f64) -> [f64; N] {
        let mut acc = [0.0; N];
        for (x, w) in self.mapped(a, b) {
            let v = f(x);
            for (s, vi) in acc.iter_mut().zip(v) {
                *s += w * vi;
            }
        }
        acc
    }
}

fn legendre(n: usize, x: f64) -> (f64, f64) {
    let (mut p0, mut p1) = (1.0, x);
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    if n == 0 {
        return (1.0, 0.0);
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Tolerance {
    pub abs: f64,
    pub rel: f64,
    pub max_panels: usize,
}

impl Tolerance {
    pub const fn new(abs: f64, rel: f64) -> Self {
        Tolerance { abs, rel, max_panels: 4000 }
    }

    pub const fn with_max_panels(mut self, max_panels: usize) -> Self {
        self.max_panels = max_panels;
        self
    }
}

impl Default for Tolerance {
    fn default() -> Self {
        Tolerance::new(0.0, 1e-10)
    }
}

/// A quadrature value with its error estimate.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Estimate {
    pub value: f64,
    pub error: f64,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct VecEstimate<const N: usize> {
    pub value: [f64; N],
    pub error: [f64; N],
    pub converged: bool,
}

struct Panel<const N: usize> {
    a: f64,
    b: f64,
    value: [f64; N],
    left: [f64; N],
    right: [f64; N],
    err: f64,
}

impl<const N: usize> PartialEq for Panel<N> {
    fn eq(&self, other: &Self) -> bool {
        self.err == other.err
    }
}
impl<const N: usize> Eq for Panel<N> {}
impl<const N: usize> PartialOrd for Panel<N> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl<const N: usize> Ord for Panel<N> {
    fn cmp(&self, other: &Self) -> Ordering {
        self.err.total_cmp(&other.err)
    }
}

thread_local! {
    static RULE: GaussLegendre = GaussLegendre::new(15);
}

fn make_panel<const N: usize, F: FnMut(f64) -> [f64; N]>(
    f: &mut F,
    rule: &GaussLegendre,
    a: f64,
    b: f64,
    whole: Option<[f64; N]>,
) -> Panel<N> {
    let m = 0.5 * (a + b);
    let whole = whole.unwrap_or_else(|| rule.integrate_vec(&mut *f, a, b));
    let left = rule.integrate_vec(&mut *f, a, m);
    let right = rule.integrate_vec(&mut *f, m, b);
    let mut value = [0.0; N];
    let mut err = 0.0f64;
    for i in 0..N {
        value[i] = left[i] + right[i];
        let e = (value[i] - whole[i]).abs();
        err = err.max(if e.is_nan() { f64::INFINITY } else { e });
    }
    Panel { a, b, value, left, right, err }
}

/// Globally adaptive integration of a vector-valued integrand over the consecutive
/// intervals given by `points`. The error criterion uses the max-norm over components,
/// so every component shares one set of nodes.
pub fn integrate_vec_points<const N: usize, F: FnMut(f64) -> [f64; N]>(
    mut f: F,
    points: &[f64],
    tol: Tolerance,
) -> VecEstimate<N> {
    assert!(points.len() >= 2, "need at least one interval");
    let rule = RULE.with(|r| r.clone());
    let mut heap = BinaryHeap::new();
    for w in points.windows(2) {
        if w[1] > w[0] {
            heap.push(make_panel(&mut f, &rule, w[0], w[1], None));
        }
    }
    let mut panels = heap.len();
    loop {
        let mut total = [0.0; N];
        let mut err_total = 0.0;
        for p in heap.iter() {
            total.iter_mut().zip(&p.value).for_each(|(t, v)| *t += v);
            err_total += p.err;
        }
        let scale = total.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        let target = tol.abs.max(tol.rel * scale);
        let done = err_total <= target;
        if done || panels >= tol.max_panels {
            let mut error = [0.0; N];
            for p in heap.iter() {
                let e = p.err;
                for slot in error.iter_mut() {
                    *slot += e;
                }
            }
            return VecEstimate { value: total, error, converged: done };
        }
        let worst = match heap.pop() {
            Some(p) => p,
            None => return VecEstimate { value: total, error: [0.0; N], converged: true },
        };
        let m = 0.5 * (worst.a + worst.b);
        if !(m > worst.a && m < worst.b) {
            // cannot bisect further; freeze the panel with zero weight in the queue
            heap.push(Panel { err: 0.0, ..worst });
            let error = [err_total; N];
            let mut total = [0.0; N];
            for p in heap.iter() {
                total.iter_mut().zip(&p.value).for_each(|(t, v)| *t += v);
            }
            return VecEstimate { value: total, error, converged: false };
        }
        heap.push(make_panel(&mut f, &rule, worst.a, m, Some(worst.left)));
        heap.push(make_panel(&mut f, &rule, m, worst.b, Some(worst.right)));
        panels += 1;
    }
}

pub fn integrate_vec<const N: usize, F: FnMut(f64) -> [f64; N]>(
    f: F,
    a: f64,
    b: f64,
    tol: Tolerance,
) -> VecEstimate<N> {
    integrate_vec_points(f, &[a, b], tol)
}

/// Adaptive scalar integration; non-convergence carries the best estimate.
pub fn integrate<F: FnMut(f64) -> f64>(f: F, a: f64, b: f64, tol: Tolerance) -> Result<Estimate> {
    integrate_points(f, &[a, b], tol)
}

pub fn integrate_points<F: FnMut(f64) -> f64>(mut f: F, points: &[f64], tol: Tolerance) -> Result<Estimate> {
    let r = integrate_vec_points(|x| [f(x)], points, tol);
    if r.converged {
        Ok(Estimate { value: r.value[0], error: r.error[0] })
    } else {
        Err(Error::Convergence { estimate: r.value[0], error: r.error[0] })
    }
}

/// Map `[a, inf)` onto `[0, 1)` by `x = a + L u/(1-u)`; breakpoints are given in `x`.
pub fn integrate_vec_semi_infinite<const N: usize, F: FnMut(f64) -> [f64; N]>(
    mut f: F,
    a: f64,
    breaks: &[f64],
    scale: f64,
    tol: Tolerance,
) -> VecEstimate<N> {
    let to_u = |x: f64| {
        let y = (x - a) / scale;
        y / (1.0 + y)
    };
    let mut pts = vec![0.0];
    for &b in breaks {
        if b > a {
            let u = to_u(b);
            if u > *pts.last().unwrap_or(&0.0) && u < 1.0 {
                pts.push(u);
            }
        }
    }
    pts.push(1.0);
    integrate_vec_points(
        |u| {
            let om = 1.0 - u;
            let x = a + scale * u / om;
            let jac = scale / (om * om);
            let v = f(x);
            let mut out = [0.0; N];
            for i in 0..N {
                let t = v[i] * jac;
                out[i] = if t.is_finite() { t } else { 0.0 };
            }
            out
        },
        &pts,
        tol,
    )
}

/// Map the real line by `x = c + L tan(phi)`; breakpoints are given in `x`.
pub fn integrate_vec_real_line<const N: usize, F: FnMut(f64) -> [f64; N]>(
    mut f: F,
    center: f64,
    breaks: &[f64],
    scale: f64,
    tol: Tolerance,
) -> VecEstimate<N> {
    let mut pts = vec![-FRAC_PI_2];
    let mut inner: Vec<f64> = breaks.iter().map(|&b| ((b - center) / scale).atan()).collect();
    inner.sort_by(f64::total_cmp);
    for p in inner {
        if p > *pts.last().unwrap_or(&-FRAC_PI_2) && p < FRAC_PI_2 {
            pts.push(p);
        }
    }
    pts.push(FRAC_PI_2);
    integrate_vec_points(
        |phi| {
            let c = phi.cos();
            let x = center + scale * phi.tan();
            let jac = scale / (c * c);
            let v = f(x);
            let mut out = [0.0; N];
            for i in 0..N {
                let t = v[i] * jac;
                out[i] = if t.is_finite() { t } else { 0.0 };
            }
            out
        },
        &pts,
        tol,
    )
}
