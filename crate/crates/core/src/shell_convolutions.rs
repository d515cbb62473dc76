//! k-fold convolutions of the cone measure `delta(tau - |xi|)/|xi|` and the paraboloid
//! analogue: closed forms, the radial recursion, smoothed Monte Carlo, and an exact
//! sampler for the normalized shell measure.

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Beta, Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::mc::{self, unit_vector};
use crate::minkowski_geometry::{dot, minkowski_form, norm, ConePoint};
use crate::quadrature::{integrate, Tolerance};
use crate::special::{beta, sphere_area};
use crate::special_constants::alpha_exponent;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ShellMethod {
    ClosedForm,
    Recursion,
    MonteCarlo,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ShellResult {
    pub value: f64,
    pub method: ShellMethod,
    /// Monte Carlo standard error; zero for deterministic methods.
    pub stderr: f64,
    /// Quadrature error estimate for the recursion; zero otherwise.
    pub error: f64,
}

fn check(d: usize, k: usize, p: &ConePoint) -> Result<f64> {
    if d < 2 || k < 2 {
        return Err(Error::domain(format!("shell integrals need d, k >= 2, got d = {d}, k = {k}")));
    }
    if p.dim() != d {
        return Err(Error::domain("point dimension does not match d"));
    }
    if !p.inside_cone() {
        return Err(Error::domain(format!("point is not inside the cone: tau = {}, |xi| = {}", p.tau, p.xi_norm())));
    }
    Ok(minkowski_form(p))
}

fn ln_closed_at_rest(d: usize, k: usize) -> f64 {
    let a = alpha_exponent(d, k).to_f64();
    let mut v = (k as f64 - 1.0) * sphere_area(d).ln() - (2.0 * a + 1.0) * 2f64.ln();
    for j in 2..k {
        v += beta(d as f64 - 1.0, alpha_exponent(d, j).to_f64() + 1.0).ln();
    }
    v
}

/// `(tau^2 - |xi|^2)^{alpha(k)} |S^{d-1}|^{k-1} 2^{-2 alpha(k) - 1} prod_j B(d-1, alpha(j)+1)`.
pub fn itilde_closed(d: usize, k: usize, p: &ConePoint) -> Result<ShellResult> {
    let rho = check(d, k, p)?;
    let a = alpha_exponent(d, k).to_f64();
    let value = (a * rho.ln() + ln_closed_at_rest(d, k)).exp();
    Ok(ShellResult { value, method: ShellMethod::ClosedForm, stderr: 0.0, error: 0.0 })
}

/// `int_0^{1/2} (1 - 2r)^alpha r^{d-2} dr`.
fn radial_factor(d: usize, alpha: f64, tol: f64) -> Result<(f64, f64)> {
    if alpha <= -1.0 {
        return Err(Error::domain(format!("recursion needs alpha > -1, got {alpha}")));
    }
    let tol = Tolerance::new(0.0, tol);
    let n = d as i32 - 2;
    let q = if alpha < 0.0 {
        // 1 - 2r = s^{1/(1+alpha)} makes the integrand bounded
        let e = 1.0 / (1.0 + alpha);
        let f = |s: f64| (0.5 * (1.0 - s.powf(e))).powi(n);
        let q = integrate(f, 0.0, 1.0, tol)?;
        (q.value * 0.5 * e, q.error * 0.5 * e)
    } else {
        let q = integrate(|r: f64| (1.0 - 2.0 * r).powf(alpha) * r.powi(n), 0.0, 0.5, tol)?;
        (q.value, q.error)
    };
    Ok(q)
}

/// The recursion from `k-1` to `k`, reduced to radial 1-D integrals.
pub fn itilde_recursive(d: usize, k: usize, p: &ConePoint, tol: f64) -> Result<ShellResult> {
    let rho = check(d, k, p)?;
    let s = sphere_area(d);
    let mut value = s / 2f64.powi(d as i32 - 2);
    let mut rel = 0.0;
    for j in 3..=k {
        let (q, e) = radial_factor(d, alpha_exponent(d, j - 1).to_f64(), tol)?;
        value *= s * q;
        rel += e / q;
    }
    let value = value * rho.powf(alpha_exponent(d, k).to_f64());
    Ok(ShellResult { value, method: ShellMethod::Recursion, stderr: 0.0, error: rel * value })
}

/// Smoothed Monte Carlo: the scalar delta becomes a Gaussian of width `epsilon` in the
/// lab frame. Integrating the Gaussian last, the smoothed integral is
/// `int phi_eps(tau - t) Itilde_k(t, xi) dt`, so each sample draws the total energy `t`
/// from the Gaussian and then walks the shell at `(t, xi)` exactly.
///
/// `deta/|eta|` is Lorentz invariant, so each of `eta_1..eta_{k-2}` is drawn in the rest
/// frame of what is left, with a `Beta(1 + min(alpha, 0), 1)` law for the remaining mass
/// fraction. The last pair sits at `r = s/2` in its rest frame and contributes
/// `area (s/2)^{d-3} / 2`. Weights stay bounded.
///
/// Each weight carries the factor `(3 - z^2)/2` of the fourth-order Gaussian kernel, which
/// cancels the `epsilon^2 Itilde''/2` smoothing bias; without it the bias is resolved at
/// `n = 10^6` for `k = 2`. What remains is `O(epsilon^4)` inside the cone.
pub fn itilde_montecarlo(
    d: usize,
    k: usize,
    p: &ConePoint,
    epsilon: f64,
    n_samples: u64,
    seed: u64,
) -> Result<ShellResult> {
    check(d, k, p)?;
    if !(epsilon > 0.0) {
        return Err(Error::domain("epsilon must be positive"));
    }
    if n_samples < 2 {
        return Err(Error::domain("need at least two samples"));
    }
    let walk = ShellWalk::new(d, k, p, epsilon)?;
    let moments = mc::run(n_samples, seed, |rng| [walk.weight(rng)]);
    let est = moments.estimate(0, seed);
    if est.mean == 0.0 {
        return Err(Error::Sampling("all importance weights vanished".into()));
    }
    Ok(ShellResult { value: est.mean, method: ShellMethod::MonteCarlo, stderr: est.stderr, error: 0.0 })
}

struct ShellWalk {
    d: usize,
    tau: f64,
    xi: Vec<f64>,
    eps: f64,
    area: f64,
    /// Remaining-mass laws, one per intermediate vector, as `(law, exponent)`.
    stages: Vec<(Beta<f64>, f64)>,
}

impl ShellWalk {
    fn new(d: usize, k: usize, p: &ConePoint, eps: f64) -> Result<Self> {
        let stages = (0..k - 2)
            .map(|j| {
                let e = alpha_exponent(d, k - j - 1).to_f64().min(0.0);
                Beta::new(1.0 + e, 1.0).map(|b| (b, e)).map_err(|e| Error::Sampling(e.to_string()))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(ShellWalk { d, tau: p.tau, xi: p.xi.clone(), eps, area: sphere_area(d), stages })
    }

    fn weight(&self, rng: &mut ChaCha8Rng) -> f64 {
        let z: f64 = rng.sample(StandardNormal);
        let mut tau = self.tau + self.eps * z;
        let mut xi = self.xi.clone();
        let q = norm(&xi);
        if tau <= q {
            return 0.0;
        }
        let mut gap = tau - q;
        let dn = self.d as i32 - 2;
        let mut w = 0.5 * (3.0 - z * z);
        for (law, e) in &self.stages {
            let s = (gap * (tau + norm(&xi))).sqrt();
            let y: f64 = law.sample(rng);
            if !(y > 0.0 && y < 1.0) {
                return 0.0;
            }
            let r = 0.5 * s * (1.0 - y);
            w *= self.area * r.powi(dn) * 0.5 * s / ((1.0 + e) * y.powf(*e));
            let mut eta: Vec<f64> = unit_vector(rng, self.d).into_iter().map(|o| r * o).collect();
            boost_from_rest(&mut eta, tau, &xi, gap, s);
            tau -= norm(&eta);
            xi.iter_mut().zip(&eta).for_each(|(x, y)| *x -= y);
            // the remainder has rest mass s sqrt(y)
            gap = s * s * y / (tau + norm(&xi));
        }
        let s = (gap * (tau + norm(&xi))).sqrt();
        w * 0.5 * self.area * (0.5 * s).powi(self.d as i32 - 3)
    }
}

/// Boost `eta` from the rest frame of `(tau, xi)` to the lab frame.
fn boost_from_rest(eta: &mut [f64], tau: f64, xi: &[f64], gap: f64, s: f64) {
    let q = norm(xi);
    if q > 0.0 {
        let u: Vec<f64> = xi.iter().map(|x| x / q).collect();
        boost_to(&u, tau, q, gap, s, eta);
    }
}

/// `I_k = 2^alpha (tau^2 - |xi|^2)^{-alpha} Itilde_k`, constant in the point.
pub fn i_weighted(d: usize, k: usize, p: &ConePoint) -> Result<ShellResult> {
    let rho = check(d, k, p)?;
    let a = alpha_exponent(d, k).to_f64();
    let it = itilde_closed(d, k, p)?;
    Ok(ShellResult { value: (a * 2f64.ln() - a * rho.ln()).exp() * it.value, ..it })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SchroShell {
    pub itilde: ShellResult,
    pub weighted: ShellResult,
}

/// Two-fold convolution of the paraboloid measure, with `tau = |eta_1|^2 + |eta_2|^2`.
pub fn schro_shell(d: usize, p: &ConePoint) -> Result<SchroShell> {
    if d == 0 || p.dim() != d {
        return Err(Error::domain("point dimension does not match d"));
    }
    if !p.above_paraboloid() {
        return Err(Error::domain("need 2 tau > |xi|^2"));
    }
    let df = d as f64;
    let gap = 2.0 * p.tau - dot(&p.xi, &p.xi);
    let at_rest = 2f64.powf(-(df + 2.0) / 2.0) * sphere_area(d);
    let itilde = 2f64.powf(-(df - 2.0) / 2.0) * gap.powf((df - 2.0) / 2.0) * at_rest;
    let det = |value| ShellResult { value, method: ShellMethod::ClosedForm, stderr: 0.0, error: 0.0 };
    Ok(SchroShell { itilde: det(itilde), weighted: det(2f64.powf(-df) * sphere_area(d)) })
}

/// Exact sampler of the normalized measure `prod |eta_j|^{-1} dsigma / Itilde_k` on
/// `{sum |eta_j| = tau, sum eta_j = xi}`. Samples in the rest frame and boosts.
#[derive(Clone, Debug)]
pub struct ShellSampler {
    d: usize,
    k: usize,
    radial: Vec<Beta<f64>>,
}

impl ShellSampler {
    pub fn new(d: usize, k: usize) -> Result<Self> {
        if d < 2 || k < 2 {
            return Err(Error::domain("shell sampler needs d, k >= 2"));
        }
        // radial[m] serves an (m+3)-fold shell: r = s (1 - y)/2 with y ~ Beta(alpha(m+2)+1, d-1)
        let radial = (3..=k)
            .map(|j| {
                Beta::new(alpha_exponent(d, j - 1).to_f64() + 1.0, d as f64 - 1.0)
                    .map_err(|e| Error::Sampling(e.to_string()))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(ShellSampler { d, k, radial })
    }

    pub fn k(&self) -> usize {
        self.k
    }

    /// Draw a `k`-tuple on the shell through `p` into `out` (resized as needed).
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R, p: &ConePoint, out: &mut Vec<Vec<f64>>) -> Result<()> {
        if p.dim() != self.d || !p.inside_cone() {
            return Err(Error::domain("shell sampling needs a point inside the cone"));
        }
        out.resize(self.k, vec![0.0; self.d]);
        let q = p.xi_norm();
        let gap = minkowski_form(p) / (p.tau + q);
        self.sample_into(rng, self.k, p.tau, &p.xi, gap, out);
        Ok(())
    }

    // `gap = tau - |xi|` is passed separately; near the cone edge it cannot be recovered
    // from `tau` and `xi` without cancellation.
    fn sample_into<R: Rng + ?Sized>(
        &self,
        rng: &mut R,
        k: usize,
        tau: f64,
        xi: &[f64],
        gap: f64,
        out: &mut [Vec<f64>],
    ) {
        let d = self.d;
        let q = norm(xi);
        let s = (gap * (tau + q)).sqrt();
        if k == 2 {
            let om = unit_vector(rng, d);
            out[0].iter_mut().zip(&om).for_each(|(o, w)| *o = 0.5 * s * w);
            out[1].iter_mut().zip(&om).for_each(|(o, w)| *o = -0.5 * s * w);
        } else {
            let y = self.radial[k - 3].sample(rng);
            let r = 0.5 * s * (1.0 - y);
            let om = unit_vector(rng, d);
            out[0].iter_mut().zip(&om).for_each(|(o, w)| *o = r * w);
            let neg: Vec<f64> = out[0].iter().map(|e| -e).collect();
            self.sample_into(rng, k - 1, 0.5 * s * (1.0 + y), &neg, s * y, &mut out[1..]);
        }
        if q > 0.0 {
            let u: Vec<f64> = xi.iter().map(|x| x / q).collect();
            for o in out.iter_mut().take(k) {
                boost_to(&u, tau, q, gap, s, o);
            }
        }
    }
}

/// Boost the null vector `eta` from the rest frame of `(tau, xi)` to the lab frame, in
/// place. `u` is the unit vector along `xi`. The component along `u` is
/// `gamma rho (omega.u + beta)`, formed from `gap/tau` and `|omega + u|^2` when the two
/// terms nearly cancel.
fn boost_to(u: &[f64], tau: f64, q: f64, gap: f64, s: f64, eta: &mut [f64]) {
    let rho = norm(eta);
    if rho == 0.0 {
        return;
    }
    let par = dot(eta, u) / rho;
    let along = if par >= 0.0 {
        par + q / tau
    } else {
        let dist2: f64 = eta.iter().zip(u).map(|(e, w)| (e / rho + w).powi(2)).sum();
        0.5 * dist2 - gap / tau
    };
    let g = tau / s;
    for (e, w) in eta.iter_mut().zip(u) {
        *e += (g * rho * along - rho * par) * w;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use rand::SeedableRng;
    use std::f64::consts::PI;

    fn rest(d: usize, tau: f64) -> ConePoint {
        ConePoint::rest(tau, d)
    }

    #[test]
    fn closed_form_examples() {
        assert_relative_eq!(itilde_closed(3, 2, &rest(3, 1.0)).unwrap().value, 2.0 * PI, max_relative = 1e-14);
        assert_relative_eq!(itilde_closed(2, 3, &rest(2, 1.0)).unwrap().value, 4.0 * PI * PI, max_relative = 1e-13);
        let p = ConePoint::new(1.3, vec![0.2, -0.5, 0.1]);
        for k in 2..5 {
            let a = alpha_exponent(3, k).to_f64();
            let base = itilde_closed(3, k, &p).unwrap().value;
            let scaled = itilde_closed(3, k, &p.scaled(2.7)).unwrap().value;
            assert_relative_eq!(scaled, 2.7f64.powf(2.0 * a) * base, max_relative = 1e-12);
        }
        assert!(itilde_closed(3, 2, &ConePoint::new(1.0, vec![1.0, 0.0, 0.0])).is_err());
    }

    #[test]
    fn recursion_examples() {
        let r = itilde_recursive(3, 3, &rest(3, 1.0), 1e-12).unwrap();
        assert_relative_eq!(r.value, itilde_closed(3, 3, &rest(3, 1.0)).unwrap().value, max_relative = 1e-10);
        let r = itilde_recursive(2, 3, &rest(2, 1.0), 1e-12).unwrap();
        assert_relative_eq!(r.value, 4.0 * PI * PI, max_relative = 1e-10);
        let r = itilde_recursive(2, 5, &rest(2, 2.0), 1e-12).unwrap();
        let c = itilde_closed(2, 5, &rest(2, 1.0)).unwrap().value * 2f64.powf(2.0 * alpha_exponent(2, 5).to_f64());
        assert_relative_eq!(r.value, c, max_relative = 1e-10);
        assert!(radial_factor(2, -1.0, 1e-10).is_err());
    }

    #[test]
    fn weighted_constants() {
        let a = i_weighted(3, 2, &rest(3, 1.0)).unwrap().value;
        assert_relative_eq!(a, 2.0 * PI, max_relative = 1e-14);
        let b = i_weighted(5, 2, &ConePoint::new(2.0, vec![0.3, 0.0, 0.1, 0.0, 0.0])).unwrap().value;
        assert_relative_eq!(b, 0.25 * sphere_area(5), max_relative = 1e-13);
        for k in 2..5 {
            let x = i_weighted(3, k, &rest(3, 1.0)).unwrap().value;
            let y = i_weighted(3, k, &ConePoint::new(7.0, vec![3.0, 1.0, 0.0])).unwrap().value;
            assert_relative_eq!(x, y, max_relative = 1e-10);
        }
    }

    #[test]
    fn schro_shell_examples() {
        let s = schro_shell(2, &rest(2, 1.0)).unwrap();
        assert_relative_eq!(s.itilde.value, PI / 2.0, max_relative = 1e-14);
        for d in 1..6 {
            let p = ConePoint::new(3.0, vec![0.5; d]);
            assert_relative_eq!(
                schro_shell(d, &p).unwrap().weighted.value,
                sphere_area(d) / 2f64.powi(d as i32),
                max_relative = 1e-14
            );
            // the pair sum of Galilean-shifted frequencies keeps 2 tau - |xi|^2
            let v = vec![0.3; d];
            let q = ConePoint::new(
                p.tau + 2.0 * dot(&p.xi, &v) + 2.0 * dot(&v, &v),
                p.xi.iter().zip(&v).map(|(x, y)| x + 2.0 * y).collect(),
            );
            assert_relative_eq!(
                schro_shell(d, &q).unwrap().itilde.value,
                schro_shell(d, &p).unwrap().itilde.value,
                max_relative = 1e-12
            );
        }
        assert!(schro_shell(2, &ConePoint::new(0.5, vec![1.0, 0.0])).is_err());
    }

    #[test]
    fn schro_shell_against_direct_integral() {
        // d = 3 at (tau, 0): |S^2| r0^{d-2}/4 with r0 = sqrt(tau/2)
        let tau: f64 = 1.7;
        let direct = 4.0 * PI * (tau / 2.0).sqrt() / 4.0;
        assert_relative_eq!(schro_shell(3, &rest(3, tau)).unwrap().itilde.value, direct, max_relative = 1e-13);
    }

    #[test]
    fn monte_carlo_examples() {
        // constant integrands (d = 3, k = 2 and d = 2, k = 3) leave only rounding
        let near = |m: &ShellResult, c: f64| (m.value - c).abs() <= 3.0 * m.stderr + 1e-12 * c;
        let m = itilde_montecarlo(3, 2, &rest(3, 1.0), 1e-3, 200_000, 1).unwrap();
        assert!(near(&m, 2.0 * PI), "{m:?}");
        let p = ConePoint::new(2.0, vec![1.0, 0.0, 0.0, 0.0, 0.0]);
        let m = itilde_montecarlo(5, 2, &p, 1e-3, 200_000, 2).unwrap();
        let c = itilde_closed(5, 2, &p).unwrap().value;
        assert!(near(&m, c), "{m:?} vs {c}");
        let m = itilde_montecarlo(2, 3, &rest(2, 1.0), 1e-3, 200_000, 3).unwrap();
        assert!(near(&m, 4.0 * PI * PI), "{m:?}");
        let p = ConePoint::new(1.5, vec![0.9, 0.3, 0.0]);
        let m = itilde_montecarlo(3, 4, &p, 1e-3, 200_000, 4).unwrap();
        let c = itilde_closed(3, 4, &p).unwrap().value;
        assert!(near(&m, c), "{m:?} vs {c}");
    }

    #[test]
    fn monte_carlo_epsilon_consistency() {
        for (d, k, p) in
            [(2, 2, ConePoint::new(1.2, vec![1.0, 0.2])), (4, 3, ConePoint::new(2.0, vec![0.5, 0.5, 0.5, 0.5]))]
        {
            let a = itilde_montecarlo(d, k, &p, 1e-3, 200_000, 11).unwrap();
            let b = itilde_montecarlo(d, k, &p, 5e-4, 200_000, 12).unwrap();
            let band = 3.0 * (a.stderr.powi(2) + b.stderr.powi(2)).sqrt();
            assert!((a.value - b.value).abs() < band, "d={d} k={k}: {a:?} vs {b:?}");
        }
    }

    #[test]
    fn monte_carlo_rejects_bad_input() {
        let p = rest(3, 1.0);
        assert!(itilde_montecarlo(3, 2, &p, 0.0, 1000, 1).is_err());
        assert!(itilde_montecarlo(3, 2, &p, 1e-3, 1, 1).is_err());
        assert!(itilde_montecarlo(3, 1, &p, 1e-3, 1000, 1).is_err());
    }

    #[test]
    fn sampler_lands_on_the_shell_and_is_symmetric() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for (d, k) in [(2usize, 2usize), (3, 3), (5, 4), (2, 5)] {
            let s = ShellSampler::new(d, k).unwrap();
            let mut p = ConePoint::rest(2.0, d);
            p.xi[0] = 1.2;
            let mut out = Vec::new();
            let mut mean = vec![0.0; k];
            let n = 40_000;
            for _ in 0..n {
                s.sample(&mut rng, &p, &mut out).unwrap();
                let tau: f64 = out.iter().map(|e| norm(e)).sum();
                assert!((tau - p.tau).abs() < 1e-12 * p.tau, "d={d} k={k} {tau}");
                for i in 0..d {
                    let xi: f64 = out.iter().map(|e| e[i]).sum();
                    assert!((xi - p.xi[i]).abs() < 1e-12 * p.tau);
                }
                for (m, e) in mean.iter_mut().zip(&out) {
                    *m += norm(e) / n as f64;
                }
            }
            // exchangeability: every slot has the same mean radius
            let avg = mean.iter().sum::<f64>() / k as f64;
            for m in &mean {
                assert!((m - avg).abs() < 0.02 * avg, "d={d} k={k} {mean:?}");
            }
        }
    }

    mod props {
        use super::*;
        use crate::minkowski_geometry::{lorentz_boost, BoostVelocity};
        use proptest::prelude::*;

        proptest! {
            #![proptest_config(ProptestConfig::with_cases(200))]

            #[test]
            fn closed_form_is_lorentz_invariant(
                d in 2usize..6, k in 2usize..6,
                x in prop::collection::vec(-0.5f64..0.5, 5),
                v in prop::collection::vec(-0.5f64..0.5, 5),
                tau in 0.5f64..3.0,
            ) {
                let p = ConePoint::new(tau, x[..d].iter().map(|y| y * tau).collect());
                let v = BoostVelocity::new(v[..d].to_vec()).unwrap();
                let q = lorentz_boost(&v, &p).unwrap();
                let a = itilde_closed(d, k, &p).unwrap().value;
                let b = itilde_closed(d, k, &q).unwrap().value;
                prop_assert!((a - b).abs() <= 1e-10 * a);
            }

            #[test]
            fn recursion_matches_closed_form(
                d in 2usize..7, k in 2usize..6,
                x in prop::collection::vec(-0.5f64..0.5, 6),
                tau in 0.5f64..3.0,
            ) {
                let p = ConePoint::new(tau, x[..d].iter().map(|y| y * tau).collect());
                let a = itilde_closed(d, k, &p).unwrap().value;
                let r = itilde_recursive(d, k, &p, 1e-12).unwrap();
                prop_assert!((a - r.value).abs() <= 1e-9 * a);
                prop_assert!(r.error <= 1e-9 * a);
            }
        }
    }
}
