use super::ddouble::DDouble;
use super::{is_nonpositive_integer, SpecialValue};
use crate::error::{Error, Result};

/// Largest |z| accepted by [`kummer_m`] unless the series terminates.
pub const KUMMER_Z_MAX: f64 = 50.0;

/// For `-KUMMER_DIRECT_NEGATIVE_MAX <= z < 0` the alternating series is summed
/// directly in double-double arithmetic; below that Kummer's transformation
/// `M(a,b,z) = e^z M(b-a,b,-z)` is applied first.
pub const KUMMER_DIRECT_NEGATIVE_MAX: f64 = 20.0;

const MAX_TERMS: usize = 4000;
const DD_EPS: f64 = 4.93e-32;

/// Kummer's confluent hypergeometric function `1F1(a; b; z)`.
///
/// When `a` is a nonpositive integer `-n` the series terminates and the
/// degree-`n` polynomial is evaluated by Horner's rule.
pub fn kummer_m(a: f64, b: f64, z: f64) -> Result<SpecialValue> {
    if !(a.is_finite() && b.is_finite() && z.is_finite()) {
        return Err(Error::Domain(format!(
            "kummer_m: non-finite argument (a={a}, b={b}, z={z})"
        )));
    }
    if is_nonpositive_integer(b) {
        return Err(Error::Domain(format!(
            "kummer_m: b = {b} is a nonpositive integer"
        )));
    }
    // a terminating series is exact at any argument
    if is_nonpositive_integer(a) {
        return Ok(polynomial(a, b, z));
    }
    if z.abs() > KUMMER_Z_MAX {
        return Err(Error::Domain(format!(
            "kummer_m: |z| = {} exceeds supported range {KUMMER_Z_MAX}",
            z.abs()
        )));
    }
    if z == 0.0 {
        return Ok(SpecialValue::new(1.0, 0.0));
    }
    if z > 0.0 || -z <= KUMMER_DIRECT_NEGATIVE_MAX {
        return series(a, b, z);
    }
    // Large negative argument: transform to a positive one.
    let c = b - a;
    let inner = if is_nonpositive_integer(c) {
        polynomial(c, b, -z)
    } else {
        series(c, b, -z)?
    };
    let e = z.exp();
    Ok(SpecialValue::new(
        e * inner.value,
        e * inner.est_abs_error + f64::EPSILON * (e * inner.value).abs(),
    ))
}

/// Terminating series for `a = -n`, Horner evaluation in double-double.
fn polynomial(a: f64, b: f64, z: f64) -> SpecialValue {
    let n = (-a).round() as usize;
    let mut coef = Vec::with_capacity(n + 1);
    let mut c = DDouble::ONE;
    coef.push(c);
    for k in 0..n {
        let kf = k as f64;
        c = c
            .mul(DDouble::sum_of(a, kf))
            .div(DDouble::sum_of(b, kf).mul_f64(kf + 1.0));
        coef.push(c);
    }
    let mut acc = DDouble::ZERO;
    let mut abs_acc = 0.0;
    for c in coef.iter().rev() {
        acc = acc.mul_f64(z).add(*c);
        abs_acc = abs_acc * z.abs() + c.abs();
    }
    let value = acc.to_f64();
    let err = abs_acc * (n as f64 + 1.0) * DD_EPS + f64::EPSILON * value.abs();
    SpecialValue::new(value, err)
}

/// Direct power series in double-double arithmetic.
fn series(a: f64, b: f64, z: f64) -> Result<SpecialValue> {
    let mut term = DDouble::ONE;
    let mut sum = DDouble::ONE;
    let mut max_term: f64 = 1.0;
    let mut small_streak = 0;
    // past this index every ratio (a+k) z / ((b+k)(k+1)) has modulus < 1
    let settle = (a.abs() + b.abs() + 2.0 * z.abs()) as usize + 2;
    for k in 0..MAX_TERMS {
        let kf = k as f64;
        term = term
            .mul(DDouble::sum_of(a, kf))
            .mul_f64(z)
            .div(DDouble::sum_of(b, kf).mul_f64(kf + 1.0));
        sum = sum.add(term);
        let t = term.abs();
        max_term = max_term.max(t);
        if k > settle && t <= 1e-18 * sum.abs() {
            small_streak += 1;
            if small_streak >= 2 {
                let value = sum.to_f64();
                let err = t * 2.0 + max_term * (k as f64) * DD_EPS + f64::EPSILON * value.abs();
                return Ok(SpecialValue::new(value, err));
            }
        } else {
            small_streak = 0;
        }
    }
    Err(Error::Accuracy {
        estimate: sum.to_f64(),
        est_abs_error: term.abs(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    // (a, b, z, 1F1) from 40-digit mpmath
    const TABLE: [(f64, f64, f64, f64); 10] = [
        (0.25, 1.5, 2.0, 1.607_986_750_491_046_2),
        (0.25, 1.5, -2.0, 0.781_452_361_316_630_5),
        (-0.75, 2.0, 9.0, -11.212_100_315_664_144),
        (1.25, 4.0, -9.0, 0.186_797_661_987_711_92),
        (0.5, 1.0, 30.0, 1_110_319_701_860.145_5),
        (-2.3, 3.1, -40.0, 302.109_737_414_168_13),
        (3.5, 1.5, 12.0, 9_016_615.444_612_817),
        (-7.5, 2.5, 16.0, 18.101_711_077_603_593),
        (1.0, 4.0, 45.0, 2_300_198_917_365_273.7),
        (2.0, 0.5, -50.0, 0.000_333_589_855_204_529_47),
    ];

    #[test]
    fn matches_reference_table() {
        for (a, b, z, want) in TABLE {
            let got = kummer_m(a, b, z).unwrap();
            let rel = ((got.value - want) / want).abs();
            assert!(rel < 1e-13, "M({a},{b},{z}) = {}, want {want}", got.value);
            assert!(got.est_abs_error >= 0.0);
        }
    }

    #[test]
    fn unit_at_origin() {
        for &(a, b) in &[(0.3, 1.2), (-4.0, 2.0), (7.5, 0.5)] {
            assert_eq!(kummer_m(a, b, 0.0).unwrap().value, 1.0);
        }
    }

    #[test]
    fn truncating_case() {
        // 1F1(-1; 2; z) = 1 - z/2
        let v = kummer_m(-1.0, 2.0, 1.0).unwrap();
        assert!((v.value - 0.5).abs() < 1e-15);
    }

    #[test]
    fn rejects_bad_denominator_parameter() {
        assert!(matches!(kummer_m(0.5, -2.0, 1.0), Err(Error::Domain(_))));
        assert!(matches!(kummer_m(0.5, 0.0, 1.0), Err(Error::Domain(_))));
    }

    #[test]
    fn rejects_non_finite_and_out_of_range() {
        assert!(kummer_m(f64::NAN, 1.0, 1.0).is_err());
        assert!(kummer_m(0.5, 1.0, f64::INFINITY).is_err());
        assert!(kummer_m(0.5, 1.0, 60.0).is_err());
    }

    #[test]
    fn branch_seam_is_continuous() {
        let z = KUMMER_DIRECT_NEGATIVE_MAX;
        for &(a, b) in &[(0.3, 1.7), (-1.4, 2.2), (2.5, 0.5)] {
            let left = kummer_m(a, b, -z - 1e-9).unwrap().value;
            let right = kummer_m(a, b, -z + 1e-9).unwrap().value;
            assert!(((left - right) / right).abs() < 1e-8, "a={a} b={b}");
        }
    }
}
