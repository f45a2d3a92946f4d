use super::SpecialValue;
use crate::error::{Error, Result};
use std::f64::consts::PI;

/// Below this |z| the power series is used, above it the asymptotic expansion.
/// The asymptotic remainder is of order `e^{-2|z|}`, far below double precision here.
pub const BESSEL_SERIES_CROSSOVER: f64 = 20.0;

/// Largest |z| accepted (the unscaled functions overflow shortly after).
pub const BESSEL_ABS_MAX: f64 = 700.0;

fn check(order: u32, z: f64) -> Result<()> {
    if order > 1 {
        return Err(Error::Domain(format!(
            "bessel_i: order {order} unsupported (only 0 and 1)"
        )));
    }
    if !z.is_finite() || z.abs() > BESSEL_ABS_MAX {
        return Err(Error::Domain(format!("bessel_i: argument {z} out of range")));
    }
    Ok(())
}

fn series(order: u32, z: f64) -> SpecialValue {
    let q = 0.25 * z * z;
    let mut term = if order == 0 { 1.0 } else { 0.5 * z };
    let mut sum = term;
    let n = order as f64;
    let mut k = 0.0;
    loop {
        k += 1.0;
        term *= q / (k * (k + n));
        sum += term;
        if term.abs() <= 1e-17 * sum.abs() {
            break;
        }
    }
    SpecialValue::new(sum, 2.0 * term.abs() + 4.0 * f64::EPSILON * sum.abs())
}

// e^{-|z|} I_n(|z|) for large |z|.
fn asymptotic_scaled(order: u32, az: f64) -> SpecialValue {
    let mu = 4.0 * (order as f64).powi(2);
    let mut term: f64 = 1.0;
    let mut sum: f64 = 1.0;
    let mut k: f64 = 0.0;
    loop {
        k += 1.0;
        let next = -term * (mu - (2.0 * k - 1.0).powi(2)) / (k * 8.0 * az);
        if next.abs() >= term.abs() || next.abs() <= 1e-17 * sum.abs() {
            term = next;
            break;
        }
        term = next;
        sum += term;
    }
    let pre = 1.0 / (2.0 * PI * az).sqrt();
    SpecialValue::new(
        pre * sum,
        pre * (term.abs() + 4.0 * f64::EPSILON * sum.abs()),
    )
}

/// Modified Bessel function of the first kind, orders 0 and 1.
pub fn bessel_i(order: u32, z: f64) -> Result<SpecialValue> {
    check(order, z)?;
    let az = z.abs();
    let sign = if order == 1 && z < 0.0 { -1.0 } else { 1.0 };
    if az <= BESSEL_SERIES_CROSSOVER {
        return Ok(series(order, z));
    }
    Ok(asymptotic_scaled(order, az).scaled(sign * az.exp()))
}

/// `e^{-|z|} I_n(z)`, usable where the unscaled value would overflow.
pub fn bessel_i_scaled(order: u32, z: f64) -> Result<SpecialValue> {
    check(order, z)?;
    let az = z.abs();
    let sign = if order == 1 && z < 0.0 { -1.0 } else { 1.0 };
    if az <= BESSEL_SERIES_CROSSOVER {
        return Ok(series(order, z).scaled((-az).exp()));
    }
    Ok(asymptotic_scaled(order, az).scaled(sign))
}
