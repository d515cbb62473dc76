//! Cone points, Lorentz boosts, the Galilean map and interaction weights.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A space-time frequency `(tau, xi)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConePoint {
    pub tau: f64,
    pub xi: Vec<f64>,
}

impl ConePoint {
    pub fn new(tau: f64, xi: Vec<f64>) -> Self {
        ConePoint { tau, xi }
    }

    pub fn rest(tau: f64, d: usize) -> Self {
        ConePoint { tau, xi: vec![0.0; d] }
    }

    pub fn dim(&self) -> usize {
        self.xi.len()
    }

    pub fn xi_norm(&self) -> f64 {
        norm(&self.xi)
    }

    /// Strictly inside the forward light cone.
    pub fn inside_cone(&self) -> bool {
        self.tau > self.xi_norm()
    }

    /// Strictly above the paraboloid `2 tau = |xi|^2`.
    pub fn above_paraboloid(&self) -> bool {
        2.0 * self.tau > dot(&self.xi, &self.xi)
    }

    pub fn scaled(&self, lambda: f64) -> Self {
        ConePoint { tau: self.tau * lambda, xi: self.xi.iter().map(|x| x * lambda).collect() }
    }
}

/// A boost velocity with `|v| < 1`.
#[derive(Clone, Debug, PartialEq)]
pub struct BoostVelocity(Vec<f64>);

impl BoostVelocity {
    pub fn new(v: Vec<f64>) -> Result<Self> {
        let n = norm(&v);
        if !(n < 1.0) {
            return Err(Error::domain(format!("boost speed {n} is not below 1")));
        }
        Ok(BoostVelocity(v))
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn gamma(&self) -> f64 {
        1.0 / (1.0 - dot(&self.0, &self.0)).sqrt()
    }

    pub fn neg(&self) -> Self {
        BoostVelocity(self.0.iter().map(|x| -x).collect())
    }

    /// The boost taking `(sqrt(tau^2 - |xi|^2), 0)` to `(tau, xi)`.
    pub fn to_point(p: &ConePoint) -> Result<Self> {
        if !(p.tau > 0.0) {
            return Err(Error::domain("boost target needs tau > 0"));
        }
        BoostVelocity::new(p.xi.iter().map(|x| -x / p.tau).collect())
    }
}

/// A k-tuple of frequency vectors.
#[derive(Clone, Debug, PartialEq)]
pub struct FreqTuple {
    pub eta: Vec<Vec<f64>>,
}

impl FreqTuple {
    pub fn new(eta: Vec<Vec<f64>>) -> Result<Self> {
        if eta.len() < 2 {
            return Err(Error::domain("a frequency tuple needs k >= 2"));
        }
        let d = eta[0].len();
        if eta.iter().any(|e| e.len() != d || e.iter().any(|x| !x.is_finite())) {
            return Err(Error::domain("frequency vectors must be finite and of equal length"));
        }
        Ok(FreqTuple { eta })
    }

    /// `(sum |eta_j|, sum eta_j)`.
    pub fn cone_sum(&self) -> ConePoint {
        let d = self.eta[0].len();
        let mut xi = vec![0.0; d];
        let mut tau = 0.0;
        for e in &self.eta {
            tau += norm(e);
            for (s, x) in xi.iter_mut().zip(e) {
                *s += x;
            }
        }
        ConePoint { tau, xi }
    }
}

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

pub fn minkowski_form(p: &ConePoint) -> f64 {
    p.tau * p.tau - dot(&p.xi, &p.xi)
}

/// `(gamma - 1)/|v|^2`, written as `gamma^2/(gamma + 1)` so it is regular at `v = 0`.
fn boost_coefficient(v: &BoostVelocity) -> f64 {
    let v2 = dot(&v.0, &v.0);
    if v2 < 1e-16 {
        0.5 + 0.375 * v2
    } else {
        let g = v.gamma();
        g * g / (g + 1.0)
    }
}

/// The `(d+1) x (d+1)` boost matrix, row-major, time coordinate first.
pub fn boost_matrix(v: &BoostVelocity) -> Vec<Vec<f64>> {
    let d = v.0.len();
    let g = v.gamma();
    let c = boost_coefficient(v);
    let mut m = vec![vec![0.0; d + 1]; d + 1];
    m[0][0] = g;
    for i in 0..d {
        m[0][i + 1] = -g * v.0[i];
        m[i + 1][0] = -g * v.0[i];
        for j in 0..d {
            m[i + 1][j + 1] = c * v.0[i] * v.0[j] + if i == j { 1.0 } else { 0.0 };
        }
    }
    m
}

pub fn lorentz_boost(v: &BoostVelocity, p: &ConePoint) -> Result<ConePoint> {
    if v.0.len() != p.dim() {
        return Err(Error::domain("boost and point dimensions differ"));
    }
    let m = boost_matrix(v);
    let mut x = Vec::with_capacity(p.dim() + 1);
    x.push(p.tau);
    x.extend_from_slice(&p.xi);
    let y: Vec<f64> = m.iter().map(|row| dot(row, &x)).collect();
    Ok(ConePoint { tau: y[0], xi: y[1..].to_vec() })
}

/// Boost a null vector `(|eta|, eta)` and return the spatial part; used in samplers.
pub fn galilean_map(v: &[f64], p: &ConePoint) -> ConePoint {
    ConePoint { tau: p.tau + 2.0 * dot(&p.xi, v) + dot(v, v), xi: p.xi.iter().zip(v).map(|(x, y)| x + y).collect() }
}

/// Wave interaction weight `K(eta)`.
///
/// Each pair term `|a||b| - a.b` is evaluated as `|a||b| |a/|a| - b/|b||^2 / 2`, which is
/// nonnegative by construction and free of cancellation for nearly parallel pairs.
pub fn wave_weight(eta: &FreqTuple) -> f64 {
    wave_weight_sq(&eta.eta).sqrt()
}

pub(crate) fn wave_weight_sq(eta: &[Vec<f64>]) -> f64 {
    let norms: Vec<f64> = eta.iter().map(|e| norm(e)).collect();
    let mut acc = 0.0;
    for i in 0..eta.len() {
        for j in i + 1..eta.len() {
            let (ni, nj) = (norms[i], norms[j]);
            if ni == 0.0 || nj == 0.0 {
                continue;
            }
            let diff2: f64 = eta[i]
                .iter()
                .zip(&eta[j])
                .map(|(a, b)| {
                    let t = a / ni - b / nj;
                    t * t
                })
                .sum();
            acc += 0.5 * ni * nj * diff2;
        }
    }
    acc.max(0.0)
}

/// Schrödinger interaction weight.
pub fn schro_weight(eta: &FreqTuple) -> f64 {
    schro_weight_sq(&eta.eta).sqrt()
}

pub(crate) fn schro_weight_sq(eta: &[Vec<f64>]) -> f64 {
    let mut acc = 0.0;
    for i in 0..eta.len() {
        for j in i + 1..eta.len() {
            acc += eta[i].iter().zip(&eta[j]).map(|(a, b)| (a - b) * (a - b)).sum::<f64>();
        }
    }
    acc
}
