//! Point transformation between the Dunkl form and a conventional
//! Schrödinger equation `Φ'' + (ε - U_E) Φ = 0` on the mapped coordinate `y`.

use std::sync::Arc;

use crate::error::{check_finite, Error, Result};
use crate::model::{DunklParams, EnergyPotential, MassProfile, ParityFunction, Residual};
use crate::numerics::{derivative, parameter_derivative, Steps};
use crate::{RealFn, RealFn2};

/// An invertible coordinate change `x = x(y)` with analytic derivatives.
#[derive(Clone)]
pub struct CoordinateChange {
    pub x_of_y: RealFn,
    pub d1: RealFn,
    pub d2: RealFn,
    pub d3: RealFn,
    pub y_of_x: RealFn,
    pub domain_y: (f64, f64),
    pub label: String,
}

impl std::fmt::Debug for CoordinateChange {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("CoordinateChange")
            .field("label", &self.label)
            .field("domain_y", &self.domain_y)
            .finish()
    }
}

impl CoordinateChange {
    /// `x = √y` on `y > 0`.
    pub fn sqrt() -> Self {
        Self {
            x_of_y: Arc::new(|y: f64| y.sqrt()),
            d1: Arc::new(|y: f64| 0.5 / y.sqrt()),
            d2: Arc::new(|y: f64| -0.25 / (y * y.sqrt())),
            d3: Arc::new(|y: f64| 0.375 / (y * y * y.sqrt())),
            y_of_x: Arc::new(|x| x * x),
            domain_y: (0.0, f64::INFINITY),
            label: "x = sqrt(y)".into(),
        }
    }

    /// `x = e^y` on the whole line.
    pub fn exp() -> Self {
        Self {
            x_of_y: Arc::new(f64::exp),
            d1: Arc::new(f64::exp),
            d2: Arc::new(f64::exp),
            d3: Arc::new(f64::exp),
            y_of_x: Arc::new(f64::ln),
            domain_y: (f64::NEG_INFINITY, f64::INFINITY),
            label: "x = exp(y)".into(),
        }
    }

    /// `x = y` on the positive half-line.
    pub fn identity() -> Self {
        Self {
            x_of_y: Arc::new(|y| y),
            d1: Arc::new(|_| 1.0),
            d2: Arc::new(|_| 0.0),
            d3: Arc::new(|_| 0.0),
            y_of_x: Arc::new(|x| x),
            domain_y: (0.0, f64::INFINITY),
            label: "x = y".into(),
        }
    }

    pub fn check(&self, y: f64) -> Result<()> {
        let (lo, hi) = self.domain_y;
        if !(y > lo && y < hi) {
            return Err(Error::Domain(format!("y = {y} outside ({lo}, {hi}) for {}", self.label)));
        }
        if (self.d1)(y) == 0.0 {
            return Err(Error::Domain(format!("coordinate change not invertible at y = {y}")));
        }
        Ok(())
    }

    /// Largest `|y(x(y)) - y|` over the samples.
    pub fn inverse_defect(&self, samples: &[f64]) -> f64 {
        samples
            .iter()
            .fold(0.0, |acc, &y| acc.max(((self.y_of_x)((self.x_of_y)(y)) - y).abs()))
    }
}

/// `U_E(y)` together with the spectral parameter of the mapped equation:
/// either the energy itself or a fixed constant ε.
#[derive(Clone)]
pub struct SchrodingerForm {
    pub u_e: RealFn2,
    pub epsilon: Option<f64>,
    pub label: String,
}

impl std::fmt::Debug for SchrodingerForm {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("SchrodingerForm")
            .field("label", &self.label)
            .field("epsilon", &self.epsilon)
            .finish()
    }
}

impl SchrodingerForm {
    pub fn potential(&self, e: f64, y: f64) -> f64 {
        (self.u_e)(e, y)
    }

    /// Spectral parameter of the mapped equation at energy `E`.
    pub fn spectral(&self, e: f64) -> f64 {
        self.epsilon.unwrap_or(e)
    }

    /// `Φ'' + (ε - U_E) Φ` with a stencil second derivative.
    pub fn residual<F: Fn(f64) -> f64>(&self, phi: F, e: f64, y: f64, steps: &Steps) -> Result<Residual> {
        let p2 = derivative(&phi, y, 2, steps.spatial_at(2, y))?;
        let p = phi(y);
        let k = (self.spectral(e) - self.potential(e, y)) * p;
        let value = check_finite(y, p2 + k, "Schrödinger residual")?;
        Ok(Residual { value, scale: p2.abs().max(k.abs()) })
    }

    /// As [`Self::residual`] for `phi` returning `(Φ, Φ')`: `Φ''` is a first-derivative
    /// stencil on `Φ'`, which keeps rounding down near nodes of `Φ`.
    pub fn residual_with_derivative<F: Fn(f64) -> (f64, f64)>(&self, phi: F, e: f64, y: f64, steps: &Steps) -> Result<Residual> {
        let p2 = derivative(|t| phi(t).1, y, 1, steps.spatial_at(1, y))?;
        let p = phi(y).0;
        let k = (self.spectral(e) - self.potential(e, y)) * p;
        let value = check_finite(y, p2 + k, "Schrödinger residual")?;
        Ok(Residual { value, scale: p2.abs().max(k.abs()) })
    }
}

/// Exponent of the power of `x` in the transformation prefactor.
pub fn transform_exponent(params: &DunklParams) -> f64 {
    let dn = params.delta_sign() * params.nu;
    params.nu - 0.5 * dn + 0.5 * dn / params.mu_sign()
}

/// `Φ(y) = g(y)·Ψ(x(y))` with `g = (m x')^{-1/2} x^κ`. Returns `(g, g'/g, x, x')`.
fn gauge(coord: &CoordinateChange, mass: &MassProfile, params: &DunklParams, y: f64) -> Result<(f64, f64, f64, f64)> {
    coord.check(y)?;
    let x = (coord.x_of_y)(y);
    if x <= 0.0 {
        return Err(Error::Domain(format!("x(y) = {x} is not on the positive branch at y = {y}")));
    }
    let x1 = (coord.d1)(y);
    let x2 = (coord.d2)(y);
    let m = (mass.m)(x);
    let radicand = 1.0 / (m * x1);
    if !(radicand > 0.0) || !radicand.is_finite() {
        return Err(Error::Domain(format!("1/(m x') = {radicand} is not positive at y = {y}")));
    }
    let kappa = transform_exponent(params);
    let g = radicand.sqrt() * x.powf(kappa);
    let log_deriv = -0.5 * (mass.m1)(x) * x1 / m - 0.5 * x2 / x1 + kappa * x1 / x;
    Ok((g, log_deriv, x, x1))
}

/// Transformed solution `Φ(y)`.
pub fn forward_map(psi: &ParityFunction, coord: &CoordinateChange, mass: &MassProfile, params: &DunklParams, y: f64) -> Result<f64> {
    let (g, _, x, _) = gauge(coord, mass, params, y)?;
    check_finite(y, g * psi.value(x), "forward map")
}

/// `(Φ(y), Φ'(y))`.
pub fn forward_map_with_derivative(
    psi: &ParityFunction,
    coord: &CoordinateChange,
    mass: &MassProfile,
    params: &DunklParams,
    y: f64,
) -> Result<(f64, f64)> {
    let (g, ld, x, x1) = gauge(coord, mass, params, y)?;
    let v = psi.value(x);
    let phi = check_finite(y, g * v, "forward map")?;
    let dphi = check_finite(y, g * (ld * v + psi.deriv(x) * x1), "forward map derivative")?;
    Ok((phi, dphi))
}

/// Reverse transformation `Ψ̂(x) = Φ̂(y(x)) / g(y(x))`.
pub fn inverse_map<F: Fn(f64) -> f64>(
    phi_hat: F,
    coord: &CoordinateChange,
    mass: &MassProfile,
    params: &DunklParams,
    x: f64,
) -> Result<f64> {
    if x <= 0.0 {
        return Err(Error::Domain(format!("inverse map evaluated off the positive branch at x = {x}")));
    }
    let y = (coord.y_of_x)(x);
    let (g, _, _, _) = gauge(coord, mass, params, y)?;
    check_finite(x, phi_hat(y) / g, "inverse map")
}

/// `(Ψ̂(x), Ψ̂'(x))` from `(Φ̂, Φ̂')` at `y(x)`.
pub fn inverse_map_with_derivative<F: Fn(f64) -> (f64, f64)>(
    phi_hat: F,
    coord: &CoordinateChange,
    mass: &MassProfile,
    params: &DunklParams,
    x: f64,
) -> Result<(f64, f64)> {
    if x <= 0.0 {
        return Err(Error::Domain(format!("inverse map evaluated off the positive branch at x = {x}")));
    }
    let y = (coord.y_of_x)(x);
    let (g, ld, _, x1) = gauge(coord, mass, params, y)?;
    let (p, dp) = phi_hat(y);
    let v = check_finite(x, p / g, "inverse map")?;
    let d = check_finite(x, (dp - ld * p) / (g * x1), "inverse map derivative")?;
    Ok((v, d))
}

/// Coefficients of `x'²/x²` and `m' x'²/(m x)` left over after the gauge
/// removes the first-derivative term.
fn centrifugal_coefficients(params: &DunklParams) -> (f64, f64) {
    let nu = params.nu;
    let d = params.delta_sign();
    let mu = params.mu_sign();
    let kappa = transform_exponent(params);
    let a0 = -nu + nu * d + nu * nu - nu * nu * d + nu * nu * d / mu - nu * nu / mu - kappa * kappa + kappa;
    let a1 = -nu + nu * d + kappa;
    (a0, a1)
}

/// `U_E(y)` such that the mapped `Φ` obeys `Φ'' + (E - U_E) Φ = 0`.
pub fn induced_potential(
    coord: &CoordinateChange,
    mass: &MassProfile,
    potential: &EnergyPotential,
    params: &DunklParams,
    e: f64,
    y: f64,
) -> Result<f64> {
    coord.check(y)?;
    let x = (coord.x_of_y)(y);
    if x == 0.0 {
        return Err(Error::Domain(format!("x(y) vanishes at y = {y}")));
    }
    let (x1, x2, x3) = ((coord.d1)(y), (coord.d2)(y), (coord.d3)(y));
    let (m, m1, m2) = ((mass.m)(x), (mass.m1)(x), (mass.m2)(x));
    if m == 0.0 {
        return Err(Error::Domain(format!("mass vanishes at x = {x}")));
    }
    let (a0, a1) = centrifugal_coefficients(params);
    let s = x1 * x1;
    let u = e - 2.0 * m * s * (e - potential.value(e, x)) - s * a0 / (x * x) - a1 * m1 * s / (m * x)
        + 0.75 * m1 * m1 * s / (m * m)
        - 0.5 * m2 * s / m
        - 0.5 * x3 / x1
        + 0.75 * x2 * x2 / s;
    check_finite(y, u, "induced potential")
}

/// The mapped problem as a [`SchrodingerForm`] with spectral parameter `E`.
pub fn general_form(
    coord: &CoordinateChange,
    mass: &MassProfile,
    potential: &EnergyPotential,
    params: &DunklParams,
) -> SchrodingerForm {
    let (c, m, v, p) = (coord.clone(), mass.clone(), potential.clone(), *params);
    SchrodingerForm {
        u_e: Arc::new(move |e, y| induced_potential(&c, &m, &v, &p, e, y).unwrap_or(f64::NAN)),
        epsilon: None,
        label: format!("U_E for {}, {}, {}", coord.label, mass.label, potential.label),
    }
}

/// For `m = p x^q` and `x = e^y`: the constant ε that takes over the role of
/// the spectral parameter; `(q+1)δν - ν²` for even masses, 0 for odd ones.
pub fn power_mass_epsilon(q: f64, params: &DunklParams) -> f64 {
    let (a0, a1) = centrifugal_coefficients(params);
    a0 + q * a1
}

/// `U_E(y) = (q+1)²/4 - 2p e^{(q+2)y} (E - V_E(e^y))` for `m = p x^q`, `x = e^y`.
pub fn power_mass_potential(p: f64, q: f64, potential: &EnergyPotential, e: f64, y: f64) -> f64 {
    0.25 * (q + 1.0) * (q + 1.0) - 2.0 * p * ((q + 2.0) * y).exp() * (e - potential.value(e, y.exp()))
}

/// The power-mass, exponential-coordinate problem with ε as spectral parameter.
pub fn power_mass_form(p: f64, q: f64, potential: &EnergyPotential, params: &DunklParams) -> SchrodingerForm {
    let v = potential.clone();
    SchrodingerForm {
        u_e: Arc::new(move |e, y| power_mass_potential(p, q, &v, e, y)),
        epsilon: Some(power_mass_epsilon(q, params)),
        label: format!("U_E for m = {p} x^{q}, x = exp(y), {}", potential.label),
    }
}

/// `[1 - ∂U_E/∂E] - 2 m x'² [1 - ∂V_E/∂E]`.
pub fn energy_relation_residual(
    coord: &CoordinateChange,
    mass: &MassProfile,
    potential: &EnergyPotential,
    params: &DunklParams,
    e: f64,
    y: f64,
) -> Result<f64> {
    let steps = Steps::default();
    // a failed evaluation surfaces as NaN in the stencil and is reported there
    let du = parameter_derivative(
        |ee, yy| induced_potential(coord, mass, potential, params, ee, yy).unwrap_or(f64::NAN),
        e,
        y,
        steps.parameter_at(e),
    )?;
    let x = (coord.x_of_y)(y);
    let x1 = (coord.d1)(y);
    let rhs = 2.0 * (mass.m)(x) * x1 * x1 * (1.0 - potential.energy_derivative(e, x));
    Ok(1.0 - du - rhs)
}
