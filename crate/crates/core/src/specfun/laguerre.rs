use super::gamma::{gamma, recip_gamma};
use super::{is_nonpositive_integer, kummer_m, SpecialValue};
use crate::error::{Error, Result};

/// Generalised binomial `C(degree + alpha, degree)` normalising `L_degree^alpha`.
///
/// Integer degrees use an exact product; real degrees go through Gamma ratios.
pub fn laguerre_binomial(degree: f64, alpha: f64) -> Result<f64> {
    if degree >= 0.0 && degree == degree.round() && degree <= 170.0 {
        let n = degree as usize;
        let mut acc = 1.0;
        for j in 1..=n {
            acc *= (alpha + j as f64) / j as f64;
        }
        return Ok(acc);
    }
    let top = degree + alpha + 1.0;
    if is_nonpositive_integer(top) {
        if is_nonpositive_integer(degree + 1.0) {
            // 0/0 limit of Γ ratios; not needed by any construction here
            return Err(Error::Domain(format!(
                "laguerre_binomial: indeterminate for degree {degree}, alpha {alpha}"
            )));
        }
        return Err(Error::Domain(format!(
            "laguerre_binomial: pole at degree + alpha + 1 = {top}"
        )));
    }
    Ok(gamma(top) * recip_gamma(degree + 1.0) * recip_gamma(alpha + 1.0))
}

fn check_alpha(alpha: f64) -> Result<()> {
    if is_nonpositive_integer(alpha + 1.0) {
        Err(Error::Domain(format!(
            "assoc_laguerre: alpha + 1 = {} is a nonpositive integer",
            alpha + 1.0
        )))
    } else {
        Ok(())
    }
}

/// Associated Laguerre function `L_degree^alpha(z)` for real degree,
/// `C(degree+alpha, degree) · 1F1(-degree; alpha+1; z)`.
pub fn assoc_laguerre(degree: f64, alpha: f64, z: f64) -> Result<SpecialValue> {
    check_alpha(alpha)?;
    let binom = laguerre_binomial(degree, alpha)?;
    let m = kummer_m(-degree, alpha + 1.0, z)?;
    Ok(m.scaled(binom))
}

/// `d/dz L_degree^alpha(z) = -L_{degree-1}^{alpha+1}(z)`, written through `1F1`
/// so that integer degree zero needs no special casing.
pub fn assoc_laguerre_deriv(degree: f64, alpha: f64, z: f64) -> Result<SpecialValue> {
    check_alpha(alpha)?;
    if degree == 0.0 {
        return Ok(SpecialValue::new(0.0, 0.0));
    }
    let binom = laguerre_binomial(degree, alpha)?;
    let m = kummer_m(1.0 - degree, alpha + 2.0, z)?;
    Ok(m.scaled(-binom * degree / (alpha + 1.0)))
}
