//! Numerical verification of sharp Strichartz estimates for the wave and
//! Schrödinger equations.

// `!(x > 0.0)` is used on purpose: it also rejects NaN
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod extremal_profiles;
pub mod extremizer_search;
pub mod mc;
pub mod minkowski_geometry;
pub mod nelder_mead;
pub mod propagators;
pub mod quadrature;
pub mod shell_convolutions;
pub mod special;
pub mod special_constants;
pub mod strichartz_functionals;

pub use error::{Error, Result};
pub use special_constants::Family;
