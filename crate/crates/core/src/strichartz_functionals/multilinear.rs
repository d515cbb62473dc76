use std::f64::consts::PI;

use num_complex::Complex64;
use rand::Rng;
use rand_distr::{Beta, Distribution, Gamma, Normal};
use serde::{Deserialize, Serialize};

use super::{QuotientReport, ReportMetadata, Valued};
use crate::error::{Error, Result};
use crate::extremal_profiles::{sobolev_norm_sq, ExtremalProfile};
use crate::mc::{self, unit_vector, McEstimate};
use crate::minkowski_geometry::{dot, schro_weight_sq, wave_weight_sq, ConePoint};
use crate::quadrature::{integrate, Tolerance};
use crate::shell_convolutions::ShellSampler;
use crate::special::{ln_beta, ln_gamma, sphere_area};
use crate::special_constants::{
    alpha_exponent, beta_exponent, ln_cone_constant, wave_sharp_constant, EstimateScale, Family,
};

fn common(profiles: &[ExtremalProfile]) -> Result<(Family, usize)> {
    let first = profiles.first().ok_or_else(|| Error::domain("no profiles"))?;
    if profiles.len() < 2 {
        return Err(Error::domain("a multilinear estimate needs k >= 2 profiles"));
    }
    for p in profiles {
        if p.family != first.family || p.d != first.d {
            return Err(Error::domain("profiles must share family and dimension"));
        }
        p.require_admissible()?;
    }
    Ok((first.family, first.d))
}

/// Monte Carlo estimate of `int prod |f^_j(eta_j)|^2 |eta_j| K(eta)^{2 alpha(k)} deta` (wave)
/// or `int prod |f^_j(eta_j)|^2 K(eta)^{2 beta(k)} deta` (Schrödinger).
///
/// Each `eta_j` is drawn from a proposal matched to `|f^_j|^2`: a Gamma radius with a uniform
/// direction for waves and the Gaussian itself for Schrödinger.
pub fn multilinear_rhs(profiles: &[ExtremalProfile], n_samples: u64, seed: u64) -> Result<McEstimate> {
    let (family, d) = common(profiles)?;
    let k = profiles.len();
    if n_samples < 2 {
        return Err(Error::domain("need at least two samples"));
    }
    let df = d as f64;
    let area = sphere_area(d);
    match family {
        Family::Wave => {
            let alpha = alpha_exponent(d, k).to_f64();
            let comps: Vec<(Gamma<f64>, f64, &ExtremalProfile)> = profiles
                .iter()
                .map(|p| {
                    let lam = 2.0 * (-p.a.re - p.re_b_norm());
                    let ln_norm = 2.0 * p.c.re + area.ln() + ln_gamma(df - 1.0) - (df - 1.0) * lam.ln();
                    let g = Gamma::new(df - 1.0, 1.0 / lam).map_err(|e| Error::Sampling(e.to_string()))?;
                    Ok((g, ln_norm, p))
                })
                .collect::<Result<_>>()?;
            let m = mc::run(n_samples, seed, |rng| {
                let mut etas = Vec::with_capacity(k);
                let mut ln_w = 0.0;
                for (g, ln_norm, p) in &comps {
                    let rho: f64 = g.sample(rng);
                    let eta: Vec<f64> = unit_vector(rng, d).into_iter().map(|o| rho * o).collect();
                    let lam = 2.0 * (-p.a.re - p.re_b_norm());
                    ln_w += ln_norm + (2.0 * p.a.re + lam) * rho + 2.0 * dot(&p.re_b(), &eta);
                    etas.push(eta);
                }
                let kk = wave_weight_sq(&etas);
                [ln_w.exp() * if alpha == 0.0 { 1.0 } else { kk.powf(alpha) }]
            });
            Ok(m.estimate(0, seed))
        }
        Family::Schrodinger => {
            let beta = beta_exponent(d, k).to_f64();
            if beta < 0.0 {
                return Err(Error::domain("the Schrödinger weight is not locally integrable here"));
            }
            let comps: Vec<(Vec<f64>, f64, f64)> = profiles
                .iter()
                .map(|p| {
                    let big_a = -2.0 * p.a.re;
                    let rb = p.re_b();
                    let mean: Vec<f64> = rb.iter().map(|x| x / big_a).collect();
                    let ln_norm = 2.0 * p.c.re + 0.5 * df * (PI / big_a).ln() + dot(&rb, &rb) / big_a;
                    (mean, (0.5 / big_a).sqrt(), ln_norm)
                })
                .collect();
            let m = mc::run(n_samples, seed, |rng| {
                let mut etas = Vec::with_capacity(k);
                let mut ln_w = 0.0;
                for (mean, sd, ln_norm) in &comps {
                    let n = Normal::new(0.0, *sd).expect("positive width");
                    etas.push(mean.iter().map(|m| m + n.sample(rng)).collect::<Vec<f64>>());
                    ln_w += ln_norm;
                }
                let kk = schro_weight_sq(&etas);
                [ln_w.exp() * if beta == 0.0 { 1.0 } else { kk.powf(beta) }]
            });
            Ok(m.estimate(0, seed))
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BilinearConfig {
    /// Draws of the outer point `(tau, xi)`.
    pub n_outer: u64,
    /// Shell samples per outer point; at least 2.
    pub n_shell: usize,
    pub seed: u64,
}

impl Default for BilinearConfig {
    fn default() -> Self {
        BilinearConfig { n_outer: 20_000, n_shell: 8, seed: 1 }
    }
}

/// Both sides of the k-linear wave estimate, sampled over the same outer points.
///
/// The space-time transform of `prod u_j` at `(tau, xi)` is a multiple of
/// `Itilde_k(tau, xi) E[prod g_j(eta_j)]` over the normalized shell measure, and the right
/// side integrand is `Itilde_k ((tau^2 - |xi|^2)/2)^alpha E[prod |g_j|^2]`; both
/// expectations use the exact shell sampler. `|E[G]|^2` is estimated without bias by the
/// off-diagonal pair average.
pub fn bilinear_quotient(profiles: &[ExtremalProfile], cfg: BilinearConfig) -> Result<QuotientReport> {
    let (family, d) = common(profiles)?;
    if family != Family::Wave {
        return Err(Error::Unsupported("the shell-sampled quotient is implemented for waves".into()));
    }
    if cfg.n_shell < 2 || cfg.n_outer < 2 {
        return Err(Error::domain("need at least two outer points and two shell samples"));
    }
    let k = profiles.len();
    let alpha = alpha_exponent(d, k).to_f64();
    if 2.0 * alpha + 1.0 <= 0.0 {
        return Err(Error::domain("the right side diverges for alpha(k) <= -1/2"));
    }
    let w = wave_sharp_constant(d, k)?;
    let df = d as f64;
    let sampler = ShellSampler::new(d, k)?;
    // sum_j Re(a_j)|eta_j| + Re(b_j).eta_j <= -min_j(-Re a_j - |Re b_j|) tau
    let rate = 2.0 * profiles.iter().map(|p| -p.a.re - p.re_b_norm()).fold(f64::INFINITY, f64::min);
    let shape = 4.0 * alpha + df + 1.0;
    let tau_dist = Gamma::new(shape, 1.0 / rate).map_err(|e| Error::Sampling(e.to_string()))?;
    let w_dist = Beta::new(df / 2.0, 2.0 * alpha + 1.0).map_err(|e| Error::Sampling(e.to_string()))?;
    let ln_area = sphere_area(d).ln();
    // Itilde_k = I_k ((tau^2 - |xi|^2)/2)^alpha
    let ln_rest = ln_cone_constant(d, k) - alpha * 2f64.ln();
    let ln_lhs_pre = (-(df + 1.0) - 2.0 * (df * (k as f64 - 1.0) - 1.0)) * (2.0 * PI).ln();
    let m = cfg.n_shell;
    let moments = mc::run(cfg.n_outer, cfg.seed, |rng| {
        let tau: f64 = tau_dist.sample(rng);
        let wv: f64 = w_dist.sample(rng);
        let om = unit_vector(rng, d);
        let xi: Vec<f64> = om.iter().map(|o| tau * wv.sqrt() * o).collect();
        let one_minus = 1.0 - wv;
        if !(one_minus > 0.0) || !(tau > 0.0) {
            return [0.0, 0.0];
        }
        let ln_rho = 2.0 * tau.ln() + one_minus.ln();
        let ln_tau_pdf = shape * rate.ln() - ln_gamma(shape) + (shape - 1.0) * tau.ln() - rate * tau;
        let ln_y_pdf = 2f64.ln() + 2.0 * alpha * one_minus.ln() - ln_area - ln_beta(df / 2.0, 2.0 * alpha + 1.0);
        let ln_pdf = ln_tau_pdf + ln_y_pdf - df * tau.ln();
        let ln_it = alpha * ln_rho + ln_rest;
        let p = ConePoint::new(tau, xi);
        let mut etas = Vec::new();
        let mut sum = Complex64::default();
        let mut sum_sq = 0.0;
        for _ in 0..m {
            if sampler.sample(rng, &p, &mut etas).is_err() {
                return [0.0, 0.0];
            }
            let z: Complex64 = profiles.iter().zip(&etas).map(|(pr, e)| pr.log_weight(e)).sum::<Complex64>().exp();
            sum += z;
            sum_sq += z.norm_sqr();
        }
        let mf = m as f64;
        let u = (sum.norm_sqr() - sum_sq) / (mf * (mf - 1.0));
        let v = sum_sq / mf;
        let lhs = (ln_lhs_pre + 2.0 * ln_it - ln_pdf).exp() * u;
        let rhs = (ln_it + alpha * (ln_rho - 2f64.ln()) - ln_pdf).exp() * v;
        [lhs, rhs]
    });
    let lhs = moments.estimate(0, cfg.seed);
    let rhs = moments.estimate(1, cfg.seed);
    let ratio = moments.ratio(0, 1, cfg.seed);
    let meta = ReportMetadata {
        label: format!("{k}-linear wave estimate, d = {d}"),
        scale: Some(EstimateScale::new(d, k, Family::Wave)?),
        profiles: profiles.to_vec(),
        seeds: vec![cfg.seed],
        tolerance: 0.0,
        method: format!("shell-sampled Monte Carlo, {} outer x {} shell", cfg.n_outer, cfg.n_shell),
    };
    let mut report =
        QuotientReport::new(Valued::new(lhs.mean, lhs.stderr), Valued::new(rhs.mean, rhs.stderr), w.value, meta);
    report.ratio = ratio.mean / w.value;
    report.ratio_error = ratio.stderr / w.value;
    report.deficit = 1.0 - report.ratio;
    Ok(report)
}

/// `I` and `II` in `rhs = I - II` for the `alpha(k) = 1` cases, `f_1 = ... = f_k = f`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TermII {
    pub k: usize,
    pub i: f64,
    pub ii: f64,
    /// `int |f^(xi)|^2 |xi| xi dxi`.
    pub moment: Vec<f64>,
    pub error: f64,
}

/// `II = k(k-1)/2 (int |f^|^2 |xi|)^{k-2} |int |f^|^2 |xi| xi dxi|^2`; the vector integral
/// points along `Re b` and its length is a Gamma integral in the radius followed by a
/// polar quadrature.
pub fn term_ii(p: &ExtremalProfile) -> Result<TermII> {
    if p.family != Family::Wave {
        return Err(Error::domain("term II is defined for wave profiles"));
    }
    p.require_admissible()?;
    let d = p.d;
    let k = (2..=5)
        .find(|&k| alpha_exponent(d, k).to_f64() == 1.0)
        .ok_or_else(|| Error::Unsupported(format!("no k with alpha(k) = 1 in dimension {d}")))?;
    let df = d as f64;
    let lam = -p.a.re;
    let beta = p.re_b_norm();
    let rb = p.re_b();
    let dir: Vec<f64> = if beta > 0.0 {
        rb.iter().map(|x| x / beta).collect()
    } else {
        let mut e = vec![0.0; d];
        e[0] = 1.0;
        e
    };
    let f = |th: f64| th.cos() * th.sin().powi(d as i32 - 2) * (2.0 * lam - 2.0 * beta * th.cos()).powf(-df);
    // the integral vanishes when Re b = 0, so the tolerance needs an absolute floor
    let floor = 1e-15 * (2.0 * (lam - beta)).powf(-df);
    let j = integrate(f, 0.0, PI, Tolerance::new(floor, 1e-13).with_max_panels(20_000))?;
    let pre = (2.0 * p.c.re + ln_gamma(df)).exp() * sphere_area(d - 1);
    let len = pre * j.value;
    let moment: Vec<f64> = dir.iter().map(|x| x * len).collect();
    let two_pi_d = (2.0 * PI).powf(df);
    let h_half = sobolev_norm_sq(p, 0.5)?.finite()?;
    let h_one = sobolev_norm_sq(p, 1.0)?.finite()?;
    let pairs = (k * (k - 1) / 2) as f64;
    let others = (two_pi_d * h_half).powi(k as i32 - 2);
    let ii = pairs * others * len * len;
    let i = pairs * others * (two_pi_d * h_one).powi(2);
    Ok(TermII { k, i, ii, moment, error: pairs * others * 2.0 * len.abs() * pre * j.error })
}

/// A random admissible wave profile with `|Re b| < 0.6 |Re a|`.
pub fn random_wave_profile<R: Rng + ?Sized>(rng: &mut R, d: usize) -> Result<ExtremalProfile> {
    let a = Complex64::new(rng.random_range(-2.0..-0.5), rng.random_range(-1.0..1.0));
    let mag = rng.random_range(0.0..0.6) * -a.re;
    let b: Vec<Complex64> =
        unit_vector(rng, d).into_iter().map(|o| Complex64::new(mag * o, rng.random_range(-1.0..1.0))).collect();
    let c = Complex64::new(rng.random_range(-0.5..0.5), rng.random_range(-PI..PI));
    ExtremalProfile::wave(d, a, b, c)
}
