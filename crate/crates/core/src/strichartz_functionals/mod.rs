//! Both sides of the sharp inequalities: space-time norms, multilinear right-hand sides,
//! quotients against the sharp constants, and the structural identities behind them.

mod corollary;
mod fourier;
mod functional_eq;
mod multilinear;
mod schrodinger;
mod spacetime;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::extremal_profiles::ExtremalProfile;
use crate::special_constants::EstimateScale;

pub use corollary::{
    cross_term_gap, energy_quotient, one_sided_constant, one_sided_quotient, one_sided_quotient_radial,
    orthogonal_split_check, remark_profiles, CrossTermGap, SplitCheck,
};
pub use fourier::{radial_sobolev_sq, schro_l4_fourier, wave_l4_fourier, FourierGrid, RadialProfile};
pub use functional_eq::{functional_eq_residual, DEFAULT_SAMPLES as FUNCTIONAL_EQ_SAMPLES};
pub use multilinear::{bilinear_quotient, multilinear_rhs, random_wave_profile, term_ii, BilinearConfig, TermII};
pub use schrodinger::{
    carneiro_quotient, carneiro_quotient_radial, schro_identity_1d, schro_l4_gaussian, smooth_bump, IdentityCheck,
};
pub use spacetime::{lp_norm_radial, spacetime_integral, LpNorm, QuadratureField, SpaceTimeField, WaveField};

/// A computed quantity with its error estimate.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Valued {
    pub value: f64,
    pub error: f64,
}

impl Valued {
    pub fn new(value: f64, error: f64) -> Self {
        Valued { value, error: error.abs() }
    }

    pub fn exact(value: f64) -> Self {
        Valued { value, error: 0.0 }
    }

    pub fn rel_error(&self) -> f64 {
        if self.value == 0.0 {
            f64::INFINITY
        } else {
            (self.error / self.value).abs()
        }
    }

    /// `self^e` with first-order error propagation.
    pub fn powf(self, e: f64) -> Self {
        let v = self.value.powf(e);
        Valued::new(v, (e * self.rel_error() * v).abs())
    }
}

impl std::ops::Mul for Valued {
    type Output = Valued;

    fn mul(self, o: Valued) -> Valued {
        let v = self.value * o.value;
        Valued::new(v, (self.error * o.value).abs() + (o.error * self.value).abs())
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct ReportMetadata {
    pub label: String,
    pub scale: Option<EstimateScale>,
    pub profiles: Vec<ExtremalProfile>,
    pub seeds: Vec<u64>,
    pub tolerance: f64,
    pub method: String,
}

/// `lhs <= sharp_constant * rhs`, with `ratio = lhs/(sharp_constant * rhs)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct QuotientReport {
    pub lhs: Valued,
    pub rhs: Valued,
    pub sharp_constant: f64,
    pub ratio: f64,
    /// Combined error of `ratio`: propagated quadrature error or Monte Carlo stderr.
    pub ratio_error: f64,
    pub deficit: f64,
    pub metadata: ReportMetadata,
}

impl QuotientReport {
    pub fn new(lhs: Valued, rhs: Valued, sharp_constant: f64, metadata: ReportMetadata) -> Self {
        let ratio = lhs.value / (sharp_constant * rhs.value);
        let ratio_error = ratio.abs() * (lhs.rel_error() + rhs.rel_error());
        QuotientReport { lhs, rhs, sharp_constant, ratio, ratio_error, deficit: 1.0 - ratio, metadata }
    }

    /// Deficit resolved beyond `factor` times the combined error.
    pub fn deficit_exceeds(&self, factor: f64) -> bool {
        self.deficit > factor * self.ratio_error
    }

    /// The inequality holds up to `factor` combined errors.
    pub fn within_bound(&self, factor: f64) -> bool {
        self.ratio <= 1.0 + factor * self.ratio_error
    }

    pub fn to_json(&self) -> String {
        json_line(self)
    }
}

/// Round to 15 significant digits.
pub fn round15(x: f64) -> f64 {
    if x.is_finite() && x != 0.0 {
        format!("{x:.14e}").parse().unwrap_or(x)
    } else {
        x
    }
}

fn round_value(v: &mut Value) {
    match v {
        Value::Number(n) => {
            if n.is_f64() {
                if let Some(x) = n.as_f64() {
                    if let Some(m) = serde_json::Number::from_f64(round15(x)) {
                        *n = m;
                    }
                }
            }
        }
        Value::Array(a) => a.iter_mut().for_each(round_value),
        Value::Object(o) => o.values_mut().for_each(round_value),
        _ => {}
    }
}

/// Serialize as one JSON line with every float rounded to 15 significant digits.
pub fn json_line<T: Serialize>(x: &T) -> String {
    let mut v = serde_json::to_value(x).unwrap_or(Value::Null);
    round_value(&mut v);
    v.to_string()
}
