use std::f64::consts::PI;

use num_complex::Complex64;
use rand::Rng;

use crate::error::{Error, Result};
use crate::mc::{self, unit_vector};
use crate::minkowski_geometry::ConePoint;
use crate::shell_convolutions::ShellSampler;

/// Quadruples drawn when no count is given.
pub const DEFAULT_SAMPLES: u64 = 10_000;

fn wrap(x: f64) -> f64 {
    let y = (x + PI).rem_euclid(2.0 * PI) - PI;
    if y == -PI {
        PI
    } else {
        y
    }
}

/// Root-mean-square defect of `g(eta_1) g(eta_2) = g(eta_3) g(eta_4)` over quadruples with
/// `|eta_1| + |eta_2| = |eta_3| + |eta_4|` and `eta_1 + eta_2 = eta_3 + eta_4`.
///
/// Each quadruple is two independent exact draws from the two-fold shell through a random
/// `(tau, xi)` with `tau` in `[0.5, 3]` and `|xi| <= 0.9 tau`. The defect is the complex log
/// ratio, phase wrapped into `(-pi, pi]`.
pub fn functional_eq_residual<G>(g: G, d: usize, n_samples: u64, seed: u64) -> Result<f64>
where
    G: Fn(&[f64]) -> Complex64 + Sync,
{
    if n_samples == 0 {
        return Err(Error::domain("need at least one sample"));
    }
    let sampler = ShellSampler::new(d, 2)?;
    let m = mc::run(n_samples, seed, |rng| {
        let tau = rng.random_range(0.5..3.0);
        let rad = 0.9 * tau * rng.random::<f64>().powf(1.0 / d as f64);
        let xi: Vec<f64> = unit_vector(rng, d).into_iter().map(|o| rad * o).collect();
        let p = ConePoint::new(tau, xi);
        let (mut a, mut b) = (Vec::new(), Vec::new());
        if sampler.sample(rng, &p, &mut a).is_err() || sampler.sample(rng, &p, &mut b).is_err() {
            return [f64::NAN];
        }
        let vals = [g(&a[0]), g(&a[1]), g(&b[0]), g(&b[1])];
        if vals.iter().any(|v| !(v.norm() > 0.0) || !v.is_finite()) {
            return [f64::NAN];
        }
        let re = vals[0].norm().ln() + vals[1].norm().ln() - vals[2].norm().ln() - vals[3].norm().ln();
        let im = wrap(vals[0].arg() + vals[1].arg() - vals[2].arg() - vals[3].arg());
        [re * re + im * im]
    });
    let ms = m.mean(0);
    if !ms.is_finite() {
        return Err(Error::domain("g vanishes or is not finite at a sampled frequency"));
    }
    Ok(ms.sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::minkowski_geometry::{dot, norm};

    #[test]
    fn exponential_profiles_solve_the_equation() {
        let a = Complex64::new(-1.2, 0.7);
        let b = [Complex64::new(0.3, -2.0), Complex64::new(-0.1, 0.5), Complex64::new(0.0, 1.0)];
        let g = |x: &[f64]| (a * norm(x) + b.iter().zip(x).map(|(b, x)| b * x).sum::<Complex64>()).exp();
        assert!(functional_eq_residual(g, 3, 10_000, 1).unwrap() < 1e-10);
        let g5 = |x: &[f64]| Complex64::new(-norm(x) + 0.2 * x[4], 3.0 * x[0]).exp();
        assert!(functional_eq_residual(g5, 5, 10_000, 2).unwrap() < 1e-10);
    }

    #[test]
    fn gaussian_control_fails() {
        let g = |x: &[f64]| Complex64::new((-dot(x, x)).exp(), 0.0);
        assert!(functional_eq_residual(g, 3, DEFAULT_SAMPLES, 3).unwrap() > 1e-2);
    }

    #[test]
    fn constant_and_vanishing() {
        assert_eq!(functional_eq_residual(|_: &[f64]| Complex64::new(1.0, 0.0), 3, 1000, 4).unwrap(), 0.0);
        assert!(functional_eq_residual(|_: &[f64]| Complex64::default(), 3, 1000, 4).is_err());
        assert!((wrap(3.0 * PI) - PI).abs() < 1e-15);
        assert!((wrap(-PI) - PI).abs() < 1e-15);
    }
}
