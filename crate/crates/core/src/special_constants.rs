//! Sharp constants, sphere areas and the exponents `alpha(k)`, `beta(k)`.
//!
//! Constants are summed in log space and exponentiated once. A second, independent
//! evaluation path multiplies exact Gamma products (integer and half-integer
//! arguments only) and is used to cross-check the catalog.

use std::f64::consts::PI;
use std::fmt;
use std::io::Write;

use num_rational::Rational64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::special::{gamma_half_integer, ln_beta, ln_sphere_area};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Family {
    Wave,
    Schrodinger,
}

impl Family {
    pub fn as_str(self) -> &'static str {
        match self {
            Family::Wave => "wave",
            Family::Schrodinger => "schrodinger",
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for Family {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "wave" => Ok(Family::Wave),
            "schrodinger" | "schroedinger" | "schro" => Ok(Family::Schrodinger),
            other => Err(Error::Parse(format!("unknown family `{other}`"))),
        }
    }
}

/// Dimension, multilinearity degree and equation of a sharp estimate.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct EstimateScale {
    pub d: usize,
    pub k: usize,
    pub family: Family,
}

impl EstimateScale {
    pub fn new(d: usize, k: usize, family: Family) -> Result<Self> {
        if k < 2 {
            return Err(Error::domain(format!("k must be at least 2, got {k}")));
        }
        let min_d = match family {
            Family::Wave => 2,
            Family::Schrodinger => 1,
        };
        if d < min_d {
            return Err(Error::domain(format!("{family} estimates need d >= {min_d}, got {d}")));
        }
        Ok(EstimateScale { d, k, family })
    }

    /// False only for the wave case `(2, 2)`, where the constant is not attained.
    pub fn is_attained(&self) -> bool {
        !(self.family == Family::Wave && self.d == 2 && self.k == 2)
    }

    pub fn exponent(&self) -> Exponent {
        match self.family {
            Family::Wave => alpha_exponent(self.d, self.k),
            Family::Schrodinger => beta_exponent(self.d, self.k),
        }
    }
}

/// An exact rational exponent.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Exponent(pub Rational64);

impl Exponent {
    pub fn to_f64(self) -> f64 {
        *self.0.numer() as f64 / *self.0.denom() as f64
    }
}

impl fmt::Display for Exponent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// `alpha(k) = (d-1)(k-1)/2 - 1`.
pub fn alpha_exponent(d: usize, k: usize) -> Exponent {
    Exponent(Rational64::new(((d as i64) - 1) * ((k as i64) - 1), 2) - 1)
}

/// `beta(k) = d(k-1)/2 - 1`.
pub fn beta_exponent(d: usize, k: usize) -> Exponent {
    Exponent(Rational64::new((d as i64) * ((k as i64) - 1), 2) - 1)
}

pub fn sphere_area(d: usize) -> Result<f64> {
    if d == 0 {
        return Err(Error::domain("sphere_area needs d >= 1"));
    }
    Ok(crate::special::sphere_area(d))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SharpConstant {
    pub scale: EstimateScale,
    pub value: f64,
    pub ln_value: f64,
    pub attained: bool,
}

fn ln_two_pi() -> f64 {
    (2.0 * PI).ln()
}

/// `ln I_k`, the log of the constant weighted cone convolution.
pub fn ln_cone_constant(d: usize, k: usize) -> f64 {
    let df = d as f64;
    let ls = ln_sphere_area(d);
    if k == 2 {
        return -(df - 1.0) / 2.0 * 2f64.ln() + ls;
    }
    let kf = k as f64;
    let mut acc = -(df - 1.0) * (kf - 1.0) / 2.0 * 2f64.ln() + (kf - 1.0) * ls;
    for j in 2..k {
        acc += ln_beta(df - 1.0, alpha_exponent(d, j).to_f64() + 1.0);
    }
    acc
}

pub fn wave_sharp_constant(d: usize, k: usize) -> Result<SharpConstant> {
    let scale = EstimateScale::new(d, k, Family::Wave)?;
    let ln_value = -(d as f64 * (2.0 * k as f64 - 1.0) - 1.0) * ln_two_pi() + ln_cone_constant(d, k);
    Ok(SharpConstant { scale, value: ln_value.exp(), ln_value, attained: scale.is_attained() })
}

pub fn schrodinger_sharp_constant(d: usize, k: usize) -> Result<SharpConstant> {
    let scale = EstimateScale::new(d, k, Family::Schrodinger)?;
    let (df, kf) = (d as f64, k as f64);
    let ln_value = if k == 2 {
        -df * 2f64.ln() - (3.0 * df - 1.0) * ln_two_pi() + ln_sphere_area(d)
    } else {
        PI.ln() - df * (2.0 * kf - 1.0) * ln_two_pi() + (1.0 - df * kf / 2.0) * kf.ln() + ln_sphere_area((k - 1) * d)
    };
    Ok(SharpConstant { scale, value: ln_value.exp(), ln_value, attained: true })
}

/// The general-k Schrödinger formula, evaluated even at `k = 2`.
pub fn schrodinger_general_formula(d: usize, k: usize) -> f64 {
    let (df, kf) = (d as f64, k as f64);
    (PI.ln() - df * (2.0 * kf - 1.0) * ln_two_pi() + (1.0 - df * kf / 2.0) * kf.ln() + ln_sphere_area((k - 1) * d))
        .exp()
}

/// The general-k wave formula, evaluated even at `k = 2` (empty Beta product).
pub fn wave_general_formula(d: usize, k: usize) -> f64 {
    let (df, kf) = (d as f64, k as f64);
    let mut acc = -(df * (2.0 * kf - 1.0) - 1.0) * ln_two_pi() - (df - 1.0) * (kf - 1.0) / 2.0 * 2f64.ln()
        + (kf - 1.0) * ln_sphere_area(d);
    for j in 2..k {
        acc += ln_beta(df - 1.0, alpha_exponent(d, j).to_f64() + 1.0);
    }
    acc.exp()
}

pub fn sharp_constant(scale: EstimateScale) -> Result<SharpConstant> {
    match scale.family {
        Family::Wave => wave_sharp_constant(scale.d, scale.k),
        Family::Schrodinger => schrodinger_sharp_constant(scale.d, scale.k),
    }
}

/// Independent evaluation by exact Gamma products; avoids `ln_gamma` entirely.
pub mod direct {
    use super::*;

    pub fn sphere_area(n: usize) -> f64 {
        2.0 * PI.powf(n as f64 / 2.0) / gamma_half_integer(n as u32)
    }

    /// Beta at arguments that are positive multiples of 1/2, given doubled.
    pub fn beta_halves(x2: u32, y2: u32) -> f64 {
        gamma_half_integer(x2) * gamma_half_integer(y2) / gamma_half_integer(x2 + y2)
    }

    pub fn wave(d: usize, k: usize) -> f64 {
        let two_pi = 2.0 * PI;
        let s = sphere_area(d);
        let expo = d * (2 * k - 1) - 1;
        if k == 2 {
            return 2f64.powf(-(d as f64 - 1.0) / 2.0) / two_pi.powi(expo as i32) * s;
        }
        let mut v = 2f64.powf(-(((d - 1) * (k - 1)) as f64) / 2.0) / two_pi.powi(expo as i32) * s.powi(k as i32 - 1);
        for j in 2..k {
            // alpha(j) + 1 = (d-1)(j-1)/2
            v *= beta_halves(2 * (d as u32 - 1), ((d - 1) * (j - 1)) as u32);
        }
        v
    }

    pub fn schrodinger(d: usize, k: usize) -> f64 {
        let two_pi = 2.0 * PI;
        if k == 2 {
            return sphere_area(d) / 2f64.powi(d as i32) / two_pi.powi(3 * d as i32 - 1);
        }
        PI / two_pi.powi((d * (2 * k - 1)) as i32)
            * (k as f64).powf(1.0 - (d * k) as f64 / 2.0)
            * sphere_area((k - 1) * d)
    }
}

/// Every constant for the given dimensions and degrees, wave rows first.
pub fn constants_table(dims: &[usize], ks: &[usize]) -> Vec<SharpConstant> {
    let mut rows = Vec::new();
    for family in [Family::Wave, Family::Schrodinger] {
        for &d in dims {
            for &k in ks {
                if let Ok(c) = sharp_constant(EstimateScale { d, k, family }) {
                    rows.push(c);
                }
            }
        }
    }
    rows
}

/// Format with 15 significant digits.
pub fn sig15(x: f64) -> String {
    format!("{x:.14e}")
}

pub fn write_csv<W: Write>(rows: &[SharpConstant], mut w: W) -> Result<()> {
    writeln!(w, "family,d,k,exponent,constant,log10_constant")?;
    for r in rows {
        writeln!(
            w,
            "{},{},{},{},{},{}",
            r.scale.family,
            r.scale.d,
            r.scale.k,
            sig15(r.scale.exponent().to_f64()),
            sig15(r.value),
            sig15(r.ln_value / std::f64::consts::LN_10)
        )?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadrature::{integrate, Tolerance};
    use approx::assert_relative_eq;

    fn two_pi() -> f64 {
        2.0 * PI
    }

    #[test]
    fn exponent_catalog() {
        let r = |n, d| Exponent(Rational64::new(n, d));
        assert_eq!(alpha_exponent(3, 2), r(0, 1));
        assert_eq!(alpha_exponent(2, 3), r(0, 1));
        assert_eq!(alpha_exponent(5, 2), r(1, 1));
        assert_eq!(alpha_exponent(3, 3), r(1, 1));
        assert_eq!(alpha_exponent(2, 5), r(1, 1));
        assert_eq!(alpha_exponent(2, 2), r(-1, 2));
        assert_eq!(beta_exponent(2, 2), r(0, 1));
        assert_eq!(beta_exponent(1, 2), r(-1, 2));
        assert_eq!(beta_exponent(4, 2), r(1, 1));
    }

    #[test]
    fn sphere_area_examples() {
        assert_relative_eq!(sphere_area(2).unwrap(), 2.0 * PI, max_relative = 1e-14);
        assert_relative_eq!(sphere_area(3).unwrap(), 4.0 * PI, max_relative = 1e-14);
        assert_relative_eq!(sphere_area(5).unwrap(), 8.0 * PI * PI / 3.0, max_relative = 1e-13);
        assert!(sphere_area(0).is_err());
    }

    #[test]
    fn wave_examples() {
        assert_relative_eq!(wave_sharp_constant(3, 2).unwrap().value, two_pi().powi(-7), max_relative = 1e-13);
        assert_relative_eq!(wave_sharp_constant(2, 3).unwrap().value, two_pi().powi(-7), max_relative = 1e-13);
        let w52 = 0.25 * two_pi().powi(-14) * 8.0 * PI * PI / 3.0;
        assert_relative_eq!(wave_sharp_constant(5, 2).unwrap().value, w52, max_relative = 1e-13);
        assert!(!wave_sharp_constant(2, 2).unwrap().attained);
        assert!(wave_sharp_constant(3, 2).unwrap().attained);
        assert!(wave_sharp_constant(1, 2).is_err());
    }

    #[test]
    fn schrodinger_examples() {
        assert_relative_eq!(schrodinger_sharp_constant(1, 2).unwrap().value, two_pi().powi(-2), max_relative = 1e-14);
        assert_relative_eq!(
            schrodinger_sharp_constant(2, 2).unwrap().value,
            1.0 / (64.0 * PI.powi(4)),
            max_relative = 1e-13
        );
        let s42 = two_pi().powi(-11) / 16.0 * 2.0 * PI * PI;
        assert_relative_eq!(schrodinger_sharp_constant(4, 2).unwrap().value, s42, max_relative = 1e-13);
        // twice the constant of the d = 1 identity
        let identity_constant = 1.0 / (2.0 * two_pi().powi(2));
        assert_relative_eq!(
            schrodinger_sharp_constant(1, 2).unwrap().value,
            2.0 * identity_constant,
            max_relative = 1e-14
        );
    }

    #[test]
    fn general_formulas_agree_at_k2() {
        for d in 2..=12 {
            assert_relative_eq!(
                wave_general_formula(d, 2),
                wave_sharp_constant(d, 2).unwrap().value,
                max_relative = 1e-12
            );
        }
        for d in 1..=12 {
            assert_relative_eq!(
                schrodinger_general_formula(d, 2),
                schrodinger_sharp_constant(d, 2).unwrap().value,
                max_relative = 1e-12
            );
        }
    }

    #[test]
    fn beta_against_quadrature() {
        let grid = [0.5, 1.0, 1.5, 2.5, 4.0, 6.0];
        for &x in &grid {
            for &y in &grid {
                // s = sin^2(phi) removes endpoint singularities for x, y >= 1/2
                let f = |phi: f64| 2.0 * phi.sin().powf(2.0 * x - 1.0) * phi.cos().powf(2.0 * y - 1.0);
                let q = integrate(f, 0.0, PI / 2.0, Tolerance::new(0.0, 1e-13)).unwrap();
                assert_relative_eq!(crate::special::beta(x, y), q.value, max_relative = 1e-9);
            }
        }
    }

    #[test]
    fn csv_has_header_and_rows() {
        let rows = constants_table(&[3], &[2]);
        let mut out = Vec::new();
        write_csv(&rows, &mut out).unwrap();
        let s = String::from_utf8(out).unwrap();
        assert!(s.starts_with("family,d,k,exponent,constant,log10_constant\n"));
        assert_eq!(s.lines().count(), 3);
        assert!(s.contains("wave,3,2,0.00000000000000e0,"));
    }
}
