//! Special functions needed by the closed-form solutions: Kummer's confluent
//! hypergeometric function `1F1`, associated Laguerre functions of real degree,
//! the modified Bessel functions `I0` and `I1`, and the Gamma function backing
//! the Laguerre normalisation.
//!
//! Every routine returns a [`SpecialValue`] carrying a conservative absolute
//! error estimate built from the size of the truncated terms. The Tricomi
//! function `U` is deliberately absent: the bound-state constructions discard it.

mod bessel;
mod ddouble;
mod gamma;
mod kummer;
mod laguerre;

pub use bessel::{bessel_i, bessel_i_scaled, BESSEL_ABS_MAX, BESSEL_SERIES_CROSSOVER};
pub use gamma::{gamma, recip_gamma};
pub use kummer::{kummer_m, KUMMER_DIRECT_NEGATIVE_MAX, KUMMER_Z_MAX};
pub use laguerre::{assoc_laguerre, assoc_laguerre_deriv, laguerre_binomial};

/// A function value together with a conservative absolute error bound.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpecialValue {
    pub value: f64,
    pub est_abs_error: f64,
}

impl SpecialValue {
    pub(crate) fn new(value: f64, est_abs_error: f64) -> Self {
        Self {
            value,
            est_abs_error: est_abs_error.abs(),
        }
    }

    /// Multiplies value and error bound by a finite constant.
    pub fn scaled(self, factor: f64) -> Self {
        Self::new(self.value * factor, self.est_abs_error * factor.abs())
    }
}

pub(crate) fn is_nonpositive_integer(x: f64) -> bool {
    x <= 0.0 && x == x.round()
}
