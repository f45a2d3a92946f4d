//! Grids, finite-difference stencils and quadrature over the real line.

use crate::error::{check_finite, Error, Result};

/// Relative spatial step per derivative order (index 0 is order 1),
/// scaled by `max(1, |y|)`.
pub const DEFAULT_SPATIAL_STEP: [f64; 3] = [1e-3, 2e-3, 1e-2];

/// Relative step for derivatives with respect to a spectral parameter.
pub const DEFAULT_PARAMETER_STEP: f64 = 1e-5;

/// Step-size configuration shared by the residual checks.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Steps {
    pub spatial: [f64; 3],
    pub parameter: f64,
}

impl Default for Steps {
    fn default() -> Self {
        Self {
            spatial: DEFAULT_SPATIAL_STEP,
            parameter: DEFAULT_PARAMETER_STEP,
        }
    }
}

impl Steps {
    pub fn spatial_at(&self, order: usize, y: f64) -> f64 {
        self.spatial[order.clamp(1, 3) - 1] * y.abs().max(1.0)
    }

    pub fn parameter_at(&self, eps0: f64) -> f64 {
        self.parameter * eps0.abs().max(1.0)
    }
}

/// A function sampled on a strictly increasing grid, optionally with its derivative.
#[derive(Debug, Clone, PartialEq)]
pub struct GridFunction {
    nodes: Vec<f64>,
    values: Vec<f64>,
    deriv_values: Option<Vec<f64>>,
}

impl GridFunction {
    pub fn new(nodes: Vec<f64>, values: Vec<f64>, deriv_values: Option<Vec<f64>>) -> Result<Self> {
        if nodes.len() != values.len() || deriv_values.as_ref().is_some_and(|d| d.len() != nodes.len()) {
            return Err(Error::Contract("grid function arrays differ in length".into()));
        }
        if nodes.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::Contract("grid nodes must be strictly increasing".into()));
        }
        for (i, &x) in nodes.iter().enumerate() {
            check_finite(x, x, "node")?;
            check_finite(x, values[i], "value")?;
            if let Some(d) = &deriv_values {
                check_finite(x, d[i], "derivative")?;
            }
        }
        Ok(Self { nodes, values, deriv_values })
    }

    /// Samples `f` (and optionally `df`) at `nodes`.
    pub fn sample<F, D>(nodes: &[f64], f: F, df: Option<D>) -> Result<Self>
    where
        F: Fn(f64) -> Result<f64>,
        D: Fn(f64) -> Result<f64>,
    {
        let values = nodes.iter().map(|&x| f(x)).collect::<Result<Vec<_>>>()?;
        let deriv_values = match df {
            Some(df) => Some(nodes.iter().map(|&x| df(x)).collect::<Result<Vec<_>>>()?),
            None => None,
        };
        Self::new(nodes.to_vec(), values, deriv_values)
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn deriv_values(&self) -> Option<&[f64]> {
        self.deriv_values.as_deref()
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }
}

/// `count` equally spaced nodes from `lo` to `hi` inclusive.
pub fn uniform_grid(lo: f64, hi: f64, count: usize) -> Result<Vec<f64>> {
    if !(lo < hi) || count < 2 {
        return Err(Error::Contract(format!(
            "uniform grid needs lo < hi and count >= 2 (got {lo}, {hi}, {count})"
        )));
    }
    let step = (hi - lo) / (count - 1) as f64;
    Ok((0..count)
        .map(|i| if i + 1 == count { hi } else { lo + step * i as f64 })
        .collect())
}

fn sample<F: Fn(f64) -> f64>(f: &F, y: f64) -> Result<f64> {
    check_finite(y, f(y), "stencil sample")
}

fn stencil<F: Fn(f64) -> f64>(f: &F, y: f64, order: usize, h: f64) -> Result<f64> {
    Ok(match order {
        1 => (sample(f, y + h)? - sample(f, y - h)?) / (2.0 * h),
        2 => (sample(f, y + h)? - 2.0 * sample(f, y)? + sample(f, y - h)?) / (h * h),
        3 => {
            (sample(f, y + 2.0 * h)? - 2.0 * sample(f, y + h)? + 2.0 * sample(f, y - h)?
                - sample(f, y - 2.0 * h)?)
                / (2.0 * h * h * h)
        }
        _ => unreachable!(),
    })
}

/// Central-difference derivative of order 1 to 3 with one Richardson step
/// (`(4 D(h/2) - D(h)) / 3`), leaving an `O(h^4)` truncation error.
pub fn derivative<F: Fn(f64) -> f64>(f: F, y: f64, order: usize, h: f64) -> Result<f64> {
    if !(1..=3).contains(&order) {
        return Err(Error::Capability(format!("derivative order {order} (supported: 1..3)")));
    }
    if !(h > 0.0) || !h.is_finite() {
        return Err(Error::Contract(format!("step must be positive, got {h}")));
    }
    let coarse = stencil(&f, y, order, h)?;
    let fine = stencil(&f, y, order, 0.5 * h)?;
    Ok((4.0 * fine - coarse) / 3.0)
}

/// Derivative with the default step for `order` at `y`.
pub fn derivative_default<F: Fn(f64) -> f64>(f: F, y: f64, order: usize) -> Result<f64> {
    derivative(f, y, order, Steps::default().spatial_at(order, y))
}

/// `∂/∂ε family(ε, y)` at `ε0`: 4-point central difference followed by a
/// Richardson step, so the truncation error is `O(h^6)`.
pub fn parameter_derivative<F: Fn(f64, f64) -> f64>(family: F, eps0: f64, y: f64, h_eps: f64) -> Result<f64> {
    if !(h_eps > 0.0) || !h_eps.is_finite() {
        return Err(Error::Contract(format!("step must be positive, got {h_eps}")));
    }
    let g = |e: f64| check_finite(e, family(e, y), "parameter-family sample");
    let four_point = |h: f64| -> Result<f64> {
        Ok((8.0 * (g(eps0 + h)? - g(eps0 - h)?) - (g(eps0 + 2.0 * h)? - g(eps0 - 2.0 * h)?)) / (12.0 * h))
    };
    let coarse = four_point(h_eps)?;
    let fine = four_point(0.5 * h_eps)?;
    Ok((16.0 * fine - coarse) / 15.0)
}

/// Value of a quadrature together with its error estimate and evaluation count.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureResult {
    pub value: f64,
    pub est_abs_error: f64,
    pub n_evals: usize,
}

// 15-point Kronrod nodes (non-negative half) with the embedded 7-point Gauss rule.
const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

struct Panel {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

fn gauss_kronrod<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> Result<Panel> {
    let c = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = check_finite(c, f(c), "quadrature sample")?;
    let mut kron = fc * WGK[7];
    let mut gauss = fc * WG[3];
    for j in 0..7 {
        let dx = half * XGK[j];
        let f1 = check_finite(c - dx, f(c - dx), "quadrature sample")?;
        let f2 = check_finite(c + dx, f(c + dx), "quadrature sample")?;
        kron += WGK[j] * (f1 + f2);
        if j % 2 == 1 {
            gauss += WG[j / 2] * (f1 + f2);
        }
    }
    let value = kron * half;
    let error = ((kron - gauss) * half).abs();
    Ok(Panel { a, b, value, error })
}

const MAX_PANELS: usize = 4000;
/// Target relative accuracy of [`integrate_real_line`].
pub const QUAD_REL_TOL: f64 = 1e-11;
/// Accuracy below which a result is returned instead of an error.
pub const QUAD_ACCEPT_TOL: f64 = 1e-9;

/// Globally adaptive Gauss-Kronrod on `[a, b]` (finite), splitting the worst panel.
pub fn integrate_interval<F: Fn(f64) -> f64>(f: F, a: f64, b: f64) -> Result<QuadratureResult> {
    adaptive(&f, &[a, b], QUAD_REL_TOL)
}

/// As [`integrate_interval`] with a caller-chosen relative target, for integrands
/// that carry their own noise floor (e.g. finite-difference derivatives).
pub fn integrate_interval_tol<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, rel_tol: f64) -> Result<QuadratureResult> {
    if !(rel_tol > 0.0 && rel_tol < 1.0) {
        return Err(Error::Contract(format!("relative tolerance must lie in (0, 1), got {rel_tol}")));
    }
    adaptive(&f, &[a, b], rel_tol)
}

fn adaptive<F: Fn(f64) -> f64>(f: &F, breaks: &[f64], rel_tol: f64) -> Result<QuadratureResult> {
    let mut panels = Vec::new();
    for w in breaks.windows(2) {
        panels.push(gauss_kronrod(f, w[0], w[1])?);
    }
    let mut n_evals = 15 * panels.len();
    loop {
        let value: f64 = panels.iter().map(|p| p.value).sum();
        let error: f64 = panels.iter().map(|p| p.error).sum();
        let tol = rel_tol * value.abs().max(1.0);
        if error <= tol {
            return Ok(QuadratureResult { value, est_abs_error: error, n_evals });
        }
        if panels.len() >= MAX_PANELS {
            if error <= QUAD_ACCEPT_TOL.max(rel_tol) * value.abs().max(1.0) {
                return Ok(QuadratureResult { value, est_abs_error: error, n_evals });
            }
            return Err(Error::Accuracy { estimate: value, est_abs_error: error });
        }
        let (worst, _) = panels
            .iter()
            .enumerate()
            .fold((0, -1.0), |acc, (i, p)| if p.error > acc.1 { (i, p.error) } else { acc });
        let p = panels.swap_remove(worst);
        let mid = 0.5 * (p.a + p.b);
        if !(mid > p.a && mid < p.b) {
            // panel cannot be split further in floating point
            return Err(Error::Accuracy { estimate: value, est_abs_error: error });
        }
        panels.push(gauss_kronrod(f, p.a, mid)?);
        panels.push(gauss_kronrod(f, mid, p.b)?);
        n_evals += 30;
    }
}

/// `∫_ℝ f(x) dx` for integrands decaying like `exp(-x²/decay_scale²)`.
///
/// Each half-line is mapped to `[0, 1)` by `x = ±s·t/(1-t)` and integrated
/// adaptively; the split at `x = 0` keeps weight factors such as `|x|^{2ν}`
/// from straddling a panel.
pub fn integrate_real_line<F: Fn(f64) -> f64>(f: F, decay_scale: f64) -> Result<QuadratureResult> {
    if !(decay_scale > 0.0) || !decay_scale.is_finite() {
        return Err(Error::Contract(format!("decay scale must be positive, got {decay_scale}")));
    }
    let s = decay_scale;
    let mapped = |t: f64| {
        if t >= 1.0 {
            return 0.0;
        }
        let one_minus = 1.0 - t;
        let x = s * t / one_minus;
        let jac = s / (one_minus * one_minus);
        let sum = f(x) + f(-x);
        if jac.is_infinite() || (sum == 0.0) {
            0.0
        } else {
            sum * jac
        }
    };
    adaptive(&mapped, &[0.0, 0.25, 0.5, 0.75, 1.0], QUAD_REL_TOL)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn polynomial_first_derivative() {
        let d = derivative(|x| x * x, 3.0, 1, 1e-3).unwrap();
        assert!((d - 6.0).abs() < 1e-8);
    }

    #[test]
    fn sine_third_derivative() {
        let d = derivative(f64::sin, 0.0, 3, 1e-2).unwrap();
        assert!((d + 1.0).abs() < 1e-6, "{d}");
    }

    #[test]
    fn constant_has_zero_derivative() {
        for order in 1..=3 {
            for &h in &[1e-4, 1e-2, 0.5] {
                let d = derivative(|_| 4.2, -7.0, order, h).unwrap();
                assert!(d.abs() < 1e-12);
            }
        }
    }

    #[test]
    fn non_finite_sample_reports_node() {
        let err = derivative(|x| if x > 1.0 { f64::NAN } else { x }, 1.0, 1, 0.1).unwrap_err();
        assert!(matches!(err, Error::Evaluation { node, .. } if node > 1.0));
    }

    #[test]
    fn rejects_bad_order_and_step() {
        assert!(matches!(derivative(|x| x, 0.0, 4, 0.1), Err(Error::Capability(_))));
        assert!(matches!(derivative(|x| x, 0.0, 1, 0.0), Err(Error::Contract(_))));
    }

    #[test]
    fn parameter_derivative_examples() {
        let d = parameter_derivative(|e, y| e * y, 2.0, 5.0, 1e-5).unwrap();
        assert!((d - 5.0).abs() < 1e-10);
        let d = parameter_derivative(|e, y| (e * y).exp(), 0.0, 1.0, 1e-5).unwrap();
        assert!((d - 1.0).abs() < 1e-8);
        let d = parameter_derivative(|_, y| y.sin(), 0.3, 1.0, 1e-5).unwrap();
        assert!(d.abs() < 1e-12);
    }

    #[test]
    fn gaussian_integrals() {
        let r = integrate_real_line(|x| (-x * x).exp(), 1.0).unwrap();
        assert!((r.value - PI.sqrt()).abs() < 1e-9);
        assert!(r.est_abs_error <= 1e-9 * r.value.abs().max(1.0));
        assert!(r.n_evals > 0);
        let r = integrate_real_line(|x| x * (-x * x).exp(), 1.0).unwrap();
        assert!(r.value.abs() < 1e-10);
        let r = integrate_real_line(|x| 2.0 * x.abs().powi(3) * (-x * x).exp(), 1.0).unwrap();
        assert!((r.value - 2.0).abs() < 1e-8);
    }

    #[test]
    fn weak_power_singularity_at_origin() {
        // ∫ |x|^{-1/2} e^{-x²} dx = Γ(1/4)
        let r = integrate_real_line(|x| x.abs().powf(-0.5) * (-x * x).exp(), 1.0).unwrap();
        assert!((r.value - 3.625_609_908_221_908).abs() < 1e-8, "{}", r.value);
    }

    #[test]
    fn grid_validation() {
        assert!(GridFunction::new(vec![0.0, 1.0], vec![1.0], None).is_err());
        assert!(GridFunction::new(vec![1.0, 1.0], vec![1.0, 2.0], None).is_err());
        assert!(GridFunction::new(vec![0.0, 1.0], vec![1.0, f64::NAN], None).is_err());
        let g = uniform_grid(0.1, 4.0, 400).unwrap();
        assert_eq!(g.len(), 400);
        assert_eq!(g[399], 4.0);
        assert!(uniform_grid(1.0, 1.0, 10).is_err());
        assert!(uniform_grid(0.0, 1.0, 1).is_err());
    }
}
