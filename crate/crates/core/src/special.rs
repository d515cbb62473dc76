//! Special functions evaluated to near machine precision.
//!
//! `ln_gamma` uses the Stirling series after an upward shift to `x >= 10`, which keeps
//! relative error below 1e-15 for positive arguments. Integer order Bessel functions
//! use the periodic trapezoid rule on the Bessel integral (exponentially convergent)
//! below `x = 25` and the Hankel expansion above.

use std::f64::consts::PI;

const STIRLING: [f64; 7] =
    [1.0 / 12.0, -1.0 / 360.0, 1.0 / 1260.0, -1.0 / 1680.0, 1.0 / 1188.0, -691.0 / 360360.0, 1.0 / 156.0];

/// Natural log of the Gamma function for `x > 0`.
pub fn ln_gamma(x: f64) -> f64 {
    assert!(x > 0.0, "ln_gamma requires a positive argument");
    let mut prod = 1.0;
    let mut y = x;
    while y < 10.0 {
        prod *= y;
        y += 1.0;
    }
    let shift = prod.ln();
    let inv = 1.0 / y;
    let inv2 = inv * inv;
    let mut series = 0.0;
    let mut p = inv;
    for c in STIRLING {
        series += c * p;
        p *= inv2;
    }
    (y - 0.5) * y.ln() - y + 0.5 * (2.0 * PI).ln() + series - shift
}

pub fn gamma(x: f64) -> f64 {
    ln_gamma(x).exp()
}

pub fn ln_beta(x: f64, y: f64) -> f64 {
    ln_gamma(x) + ln_gamma(y) - ln_gamma(x + y)
}

pub fn beta(x: f64, y: f64) -> f64 {
    ln_beta(x, y).exp()
}

/// Gamma at a positive integer or half-integer `n/2`, as a plain product.
pub fn gamma_half_integer(twice: u32) -> f64 {
    assert!(twice > 0);
    if twice.is_multiple_of(2) {
        (1..twice / 2).map(f64::from).product()
    } else {
        let mut g = PI.sqrt();
        let mut z = 0.5;
        while z + 0.25 < f64::from(twice) / 2.0 {
            g *= z;
            z += 1.0;
        }
        g
    }
}

/// Bessel function of the first kind of integer order.
pub fn bessel_j(n: i32, x: f64) -> f64 {
    if x < 0.0 {
        let v = bessel_j(n, -x);
        return if n % 2 == 0 { v } else { -v };
    }
    if n < 0 {
        let v = bessel_j(-n, x);
        return if n % 2 == 0 { v } else { -v };
    }
    let nf = f64::from(n);
    if x <= 25.0 + nf * nf / 4.0 {
        bessel_trapezoid(n, x)
    } else {
        bessel_hankel(nf, x)
    }
}

fn bessel_trapezoid(n: i32, x: f64) -> f64 {
    let nf = f64::from(n);
    // aliasing error is of order J_{m-n}(x); keep m - n well past the turning point
    let m = (nf + x + 10.0 * x.cbrt() + 40.0).ceil() as usize;
    let h = PI / m as f64;
    let mut s = 0.5 * (1.0 + (nf * PI).cos());
    for j in 1..m {
        let th = j as f64 * h;
        s += (nf * th - x * th.sin()).cos();
    }
    s / m as f64
}

fn bessel_hankel(nu: f64, x: f64) -> f64 {
    let mu = 4.0 * nu * nu;
    let z8 = 8.0 * x;
    let mut p = 1.0;
    let mut q = 0.0;
    let mut term = 1.0;
    let mut last = f64::INFINITY;
    for k in 1..60 {
        let odd = (2 * k - 1) as f64;
        term *= (mu - odd * odd) / (k as f64 * z8);
        if term.abs() > last {
            break;
        }
        last = term.abs();
        match k % 4 {
            1 => q += term,
            2 => p -= term,
            3 => q -= term,
            _ => p += term,
        }
        if term.abs() < 1e-17 {
            break;
        }
    }
    let chi = x - (0.5 * nu + 0.25) * PI;
    (2.0 / (PI * x)).sqrt() * (p * chi.cos() - q * chi.sin())
}

/// `Phi_d(s) = Gamma(d/2) (2/s)^nu J_nu(s)` with `nu = (d-2)/2`.
///
/// This is the Fourier transform of normalized surface measure on the unit sphere in
/// `R^d`, so `Phi_d(0) = 1` and `sigma_hat(s) = |S^{d-1}| Phi_d(s)`.
pub fn sphere_kernel(d: usize, s: f64) -> f64 {
    let s = s.abs();
    if s < 1.5 {
        return sphere_kernel_series(d, s);
    }
    match d {
        1 => s.cos(),
        3 => s.sin() / s,
        _ if d % 2 == 1 => {
            // (2n+1)!! s^{-n} j_n(s) with n = (d-3)/2
            let n = (d - 3) / 2;
            let (mut j0, mut j1) = (s.sin() / s, s.sin() / (s * s) - s.cos() / s);
            for l in 1..n {
                let j2 = (2 * l + 1) as f64 / s * j1 - j0;
                j0 = j1;
                j1 = j2;
            }
            let dfact: f64 = (1..=n).map(|l| (2 * l + 1) as f64).product();
            dfact * j1 / s.powi(n as i32)
        }
        _ => {
            let nu = (d as i32 - 2) / 2;
            let lg = ln_gamma(f64::from(nu) + 1.0);
            lg.exp() * (2.0 / s).powi(nu) * bessel_j(nu, s)
        }
    }
}

fn sphere_kernel_series(d: usize, s: f64) -> f64 {
    let h = d as f64 / 2.0;
    let x = -0.25 * s * s;
    let mut term = 1.0;
    let mut sum = 1.0;
    for k in 1..40 {
        let kf = k as f64;
        term *= x / (kf * (kf + h - 1.0));
        sum += term;
        if term.abs() < 1e-18 {
            break;
        }
    }
    sum
}

/// Surface area of the unit sphere `S^{n-1}` in `R^n`, with `|S^0| = 2`.
pub fn sphere_area(n: usize) -> f64 {
    assert!(n >= 1);
    let h = n as f64 / 2.0;
    2.0 * (h * PI.ln() - ln_gamma(h)).exp()
}

pub fn ln_sphere_area(n: usize) -> f64 {
    let h = n as f64 / 2.0;
    2f64.ln() + h * PI.ln() - ln_gamma(h)
}
