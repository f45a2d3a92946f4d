//! The Dunkl-Schrödinger problem `D (1/2m) D Ψ + (E - V_E) Ψ = 0` with
//! `D = d/dx + ν/x - (ν/x) R`, restricted to parity eigenfunctions so that the
//! reflection `R` acts as the scalar δ.

use std::sync::Arc;

use crate::error::{check_finite, Error, Result};
use crate::numerics::{derivative_default, integrate_real_line, QuadratureResult};
use crate::{RealFn, RealFn2};

/// Eigenvalue of the reflection `x → -x`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Parity {
    Even,
    Odd,
}

impl Parity {
    pub fn from_sign(sign: i32) -> Result<Self> {
        match sign {
            1 => Ok(Parity::Even),
            -1 => Ok(Parity::Odd),
            other => Err(Error::Contract(format!("parity must be +1 or -1, got {other}"))),
        }
    }

    pub fn sign(self) -> f64 {
        match self {
            Parity::Even => 1.0,
            Parity::Odd => -1.0,
        }
    }

    pub fn as_i32(self) -> i32 {
        self.sign() as i32
    }

    pub fn flip(self) -> Self {
        self.times(Parity::Odd)
    }

    pub fn times(self, other: Parity) -> Self {
        if self == other {
            Parity::Even
        } else {
            Parity::Odd
        }
    }
}

/// Dunkl deformation ν, solution parity δ and mass parity μ.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DunklParams {
    pub nu: f64,
    pub delta: Parity,
    pub mu: Parity,
}

impl DunklParams {
    pub fn new(nu: f64, delta: i32, mu: i32) -> Result<Self> {
        if !nu.is_finite() {
            return Err(Error::Contract(format!("nu must be finite, got {nu}")));
        }
        Ok(Self {
            nu,
            delta: Parity::from_sign(delta)?,
            mu: Parity::from_sign(mu)?,
        })
    }

    pub fn delta_sign(&self) -> f64 {
        self.delta.sign()
    }

    pub fn mu_sign(&self) -> f64 {
        self.mu.sign()
    }

    /// `√(1 - 4δν + 4ν²) = |1 - 2δν|`, the root recurring in every closed form.
    pub fn root(&self) -> f64 {
        let dn = self.delta_sign() * self.nu;
        (1.0 - 4.0 * dn + 4.0 * self.nu * self.nu).max(0.0).sqrt()
    }
}

/// Position-dependent mass with its first two derivatives and parity.
#[derive(Clone)]
pub struct MassProfile {
    pub m: RealFn,
    pub m1: RealFn,
    pub m2: RealFn,
    pub parity: Parity,
    pub label: String,
}

impl std::fmt::Debug for MassProfile {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("MassProfile")
            .field("label", &self.label)
            .field("parity", &self.parity)
            .finish()
    }
}

impl MassProfile {
    pub fn constant(c: f64) -> Self {
        Self {
            m: Arc::new(move |_| c),
            m1: Arc::new(|_| 0.0),
            m2: Arc::new(|_| 0.0),
            parity: Parity::Even,
            label: format!("m = {c}"),
        }
    }

    /// `m(x) = p·exp(-q x²)`.
    pub fn gaussian(p: f64, q: f64) -> Self {
        Self {
            m: Arc::new(move |x| p * (-q * x * x).exp()),
            m1: Arc::new(move |x| -2.0 * q * x * p * (-q * x * x).exp()),
            m2: Arc::new(move |x| (4.0 * q * q * x * x - 2.0 * q) * p * (-q * x * x).exp()),
            parity: Parity::Even,
            label: format!("m = {p} exp(-{q} x^2)"),
        }
    }

    /// `m(x) = p·x^q` with integer `q`; parity follows the parity of `q`.
    pub fn power(p: f64, q: i32) -> Self {
        let qf = q as f64;
        Self {
            m: Arc::new(move |x| p * x.powi(q)),
            m1: Arc::new(move |x| p * qf * x.powi(q - 1)),
            m2: Arc::new(move |x| p * qf * (qf - 1.0) * x.powi(q - 2)),
            parity: if q % 2 == 0 { Parity::Even } else { Parity::Odd },
            label: format!("m = {p} x^{q}"),
        }
    }

    /// Largest `|m(-x) - μ m(x)|` relative to `|m(x)|` over the sample points.
    pub fn parity_defect(&self, samples: &[f64]) -> f64 {
        samples.iter().fold(0.0, |acc, &x| {
            let a = (self.m)(x);
            let b = (self.m)(-x);
            acc.max((b - self.parity.sign() * a).abs() / a.abs().max(1e-300))
        })
    }
}

/// Energy-dependent potential `V_E(x)` together with `∂V_E/∂E`.
#[derive(Clone)]
pub struct EnergyPotential {
    pub v: RealFn2,
    pub dv_de: RealFn2,
    pub energy_dependent: bool,
    pub label: String,
}

impl std::fmt::Debug for EnergyPotential {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("EnergyPotential").field("label", &self.label).finish()
    }
}

impl EnergyPotential {
    pub fn energy_independent(v: RealFn, label: &str) -> Self {
        Self {
            v: Arc::new(move |_, x| v(x)),
            dv_de: Arc::new(|_, _| 0.0),
            energy_dependent: false,
            label: label.to_string(),
        }
    }

    pub fn zero() -> Self {
        Self::energy_independent(Arc::new(|_| 0.0), "V = 0")
    }

    /// `V_E(x) = E - 2pE·e^{qx²} - (p/2)·e^{qx²}`, partner of the Gaussian mass.
    pub fn gaussian_mass_partner(p: f64, q: f64) -> Self {
        Self {
            v: Arc::new(move |e, x| {
                let g = (q * x * x).exp();
                e - 2.0 * p * e * g - 0.5 * p * g
            }),
            dv_de: Arc::new(move |_, x| 1.0 - 2.0 * p * (q * x * x).exp()),
            energy_dependent: true,
            label: format!("V_E = E - 2*{p}*E exp({q} x^2) - {p}/2 exp({q} x^2)"),
        }
    }

    /// `V_E(x) = x²/E`.
    pub fn harmonic_over_energy() -> Self {
        Self {
            v: Arc::new(|e, x| x * x / e),
            dv_de: Arc::new(|e, x| -x * x / (e * e)),
            energy_dependent: true,
            label: "V_E = x^2 / E".into(),
        }
    }

    /// `V_E(x) = E + 1/E - E/x² - 2/x⁴`, the position-dependent-mass twin of `x²/E`.
    pub fn pdm_partner() -> Self {
        Self {
            v: Arc::new(|e, x| {
                let x2 = x * x;
                e + 1.0 / e - e / x2 - 2.0 / (x2 * x2)
            }),
            dv_de: Arc::new(|e, x| 1.0 - 1.0 / (e * e) - 1.0 / (x * x)),
            energy_dependent: true,
            label: "V_E = E + 1/E - E/x^2 - 2/x^4".into(),
        }
    }

    pub fn value(&self, e: f64, x: f64) -> f64 {
        (self.v)(e, x)
    }

    pub fn energy_derivative(&self, e: f64, x: f64) -> f64 {
        (self.dv_de)(e, x)
    }

    /// Relative mismatch between `dv_de` and a finite-difference probe in `E`.
    pub fn energy_derivative_defect(&self, e: f64, x: f64) -> Result<f64> {
        let probe = crate::numerics::parameter_derivative(|ee, xx| (self.v)(ee, xx), e, x, 1e-4 * e.abs().max(1.0))?;
        let d = self.energy_derivative(e, x);
        Ok((probe - d).abs() / d.abs().max(1.0))
    }
}

/// A function of definite parity with analytic first (and optionally second) derivative.
#[derive(Clone)]
pub struct ParityFunction {
    pub f: RealFn,
    pub f1: RealFn,
    pub f2: Option<RealFn>,
    pub parity: Parity,
}

impl std::fmt::Debug for ParityFunction {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("ParityFunction").field("parity", &self.parity).finish()
    }
}

impl ParityFunction {
    pub fn new(f: RealFn, f1: RealFn, parity: Parity) -> Self {
        Self { f, f1, f2: None, parity }
    }

    pub fn with_second(mut self, f2: RealFn) -> Self {
        self.f2 = Some(f2);
        self
    }

    pub fn zero(parity: Parity) -> Self {
        Self::new(Arc::new(|_| 0.0), Arc::new(|_| 0.0), parity).with_second(Arc::new(|_| 0.0))
    }

    /// Builds the parity extension of a function given on `x > 0` with its
    /// derivatives: `f(-x) = p·f(x)`, `f'(-x) = -p·f'(x)`, `f''(-x) = p·f''(x)`.
    pub fn from_positive_half(f: RealFn, f1: RealFn, f2: RealFn, parity: Parity) -> Self {
        let p = parity.sign();
        Self {
            f: Arc::new(move |x| if x >= 0.0 { f(x) } else { p * f(-x) }),
            f1: Arc::new(move |x| if x >= 0.0 { f1(x) } else { -p * f1(-x) }),
            f2: Some(Arc::new(move |x| if x >= 0.0 { f2(x) } else { p * f2(-x) })),
            parity,
        }
    }

    /// Scales the function by a constant.
    pub fn scaled(&self, c: f64) -> Self {
        let (f, f1) = (self.f.clone(), self.f1.clone());
        let f2 = self.f2.clone();
        Self {
            f: Arc::new(move |x| c * f(x)),
            f1: Arc::new(move |x| c * f1(x)),
            f2: f2.map(|g| -> RealFn { Arc::new(move |x| c * g(x)) }),
            parity: self.parity,
        }
    }

    pub fn value(&self, x: f64) -> f64 {
        (self.f)(x)
    }

    pub fn deriv(&self, x: f64) -> f64 {
        (self.f1)(x)
    }

    /// Second derivative, analytic when available, otherwise a stencil on `f1`.
    pub fn second(&self, x: f64) -> Result<f64> {
        match &self.f2 {
            Some(g) => Ok(g(x)),
            None => derivative_default(|t| (self.f1)(t), x, 1),
        }
    }

    /// Largest `|f(-x) - p·f(x)|` over the samples, relative to `max(1, |f(x)|)`.
    pub fn parity_defect(&self, samples: &[f64]) -> f64 {
        samples.iter().fold(0.0, |acc, &x| {
            let a = self.value(x);
            let b = self.value(-x);
            acc.max((b - self.parity.sign() * a).abs() / a.abs().max(1e-300))
        })
    }
}

/// Where the system lives; the origin is always excluded.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Domain {
    PuncturedLine,
    Interval { lo: f64, hi: f64 },
}

impl Domain {
    pub fn check(&self, x: f64) -> Result<()> {
        if x == 0.0 || !x.is_finite() {
            return Err(Error::Domain(format!("x = {x} is excluded from the punctured domain")));
        }
        match *self {
            Domain::PuncturedLine => Ok(()),
            Domain::Interval { lo, hi } if x > lo && x < hi => Ok(()),
            Domain::Interval { lo, hi } => Err(Error::Domain(format!("x = {x} outside ({lo}, {hi})"))),
        }
    }
}

/// Mass profile, energy-dependent potential and Dunkl parameters.
#[derive(Debug, Clone)]
pub struct DunklSystem {
    pub params: DunklParams,
    pub mass: MassProfile,
    pub potential: EnergyPotential,
    pub domain: Domain,
}

impl DunklSystem {
    pub fn new(params: DunklParams, mass: MassProfile, potential: EnergyPotential, domain: Domain) -> Result<Self> {
        if mass.parity != params.mu {
            return Err(Error::Contract(format!(
                "mass parity {:?} disagrees with mu = {}",
                mass.parity,
                params.mu.as_i32()
            )));
        }
        Ok(Self { params, mass, potential, domain })
    }
}

/// Exponent of the Hilbert-space weight `|x|^{2ν - δν + δν/μ}`.
pub fn weight_exponent(params: &DunklParams) -> f64 {
    let dn = params.delta_sign() * params.nu;
    2.0 * params.nu - dn + dn / params.mu_sign()
}

/// Outcome of the weight-singularity test.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Admissibility {
    Ok,
    RequiresCaseAnalysis,
    Rejected,
}

/// For energy-independent potentials the weight must be integrable at the
/// origin (exponent > -1). With energy dependence `1 - ∂V/∂E` can add or
/// remove singularities, so no general verdict is possible.
pub fn admissible(params: &DunklParams, energy_dependent: bool) -> Admissibility {
    if energy_dependent {
        Admissibility::RequiresCaseAnalysis
    } else if weight_exponent(params) > -1.0 {
        Admissibility::Ok
    } else {
        Admissibility::Rejected
    }
}

/// `D_x f` for a parity eigenfunction: `f' + (ν/x)(1 - p) f`.
pub fn dunkl_apply(f: &ParityFunction, x: f64, params: &DunklParams) -> Result<f64> {
    if x == 0.0 {
        return Err(Error::Domain("Dunkl operator evaluated at x = 0".into()));
    }
    Ok(f.deriv(x) + params.nu / x * (1.0 - f.parity.sign()) * f.value(x))
}

/// Coefficients of `Ψ''`, `Ψ'` and `Ψ` in the expanded governing equation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExpandedCoefficients {
    pub second: f64,
    pub first: f64,
    pub zeroth: f64,
}

/// Expanded-form coefficients at `(E, x)` for solutions of parity δ.
pub fn expanded_coefficients(system: &DunklSystem, e: f64, x: f64) -> Result<ExpandedCoefficients> {
    system.domain.check(x)?;
    let nu = system.params.nu;
    let d = system.params.delta_sign();
    let mu = system.params.mu_sign();
    let m = (system.mass.m)(x);
    let m1 = (system.mass.m1)(x);
    if m == 0.0 {
        return Err(Error::Domain(format!("mass vanishes at x = {x}")));
    }
    let v = system.potential.value(e, x);
    let second = 1.0 / (2.0 * m);
    let first = -m1 / (2.0 * m * m) + nu / (m * x) - nu * d / (2.0 * m * x) + nu * d / (2.0 * mu * m * x);
    let x2 = x * x;
    let zeroth = -nu / (2.0 * m * x2) - nu * m1 / (2.0 * m * m * x)
        + nu * d / (2.0 * m * x2)
        + nu * d * m1 / (2.0 * m * m * x)
        + nu * nu / (2.0 * m * x2)
        - nu * nu * d / (2.0 * m * x2)
        + nu * nu * d / (2.0 * mu * m * x2)
        - nu * nu / (2.0 * mu * m * x2)
        + e
        - v;
    Ok(ExpandedCoefficients { second, first, zeroth })
}

/// Residual together with the magnitude of the largest term that produced it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Residual {
    pub value: f64,
    pub scale: f64,
}

impl Residual {
    pub fn relative(&self) -> f64 {
        if self.scale == 0.0 {
            self.value.abs()
        } else {
            self.value.abs() / self.scale
        }
    }
}

fn check_solution_parity(system: &DunklSystem, psi: &ParityFunction) -> Result<()> {
    if psi.parity != system.params.delta {
        return Err(Error::Contract(format!(
            "solution parity {:?} differs from delta = {}",
            psi.parity,
            system.params.delta.as_i32()
        )));
    }
    Ok(())
}

/// Left-hand side of the expanded Dunkl-Schrödinger equation at `x`.
pub fn dunkl_residual(system: &DunklSystem, psi: &ParityFunction, e: f64, x: f64) -> Result<f64> {
    Ok(dunkl_residual_scaled(system, psi, e, x)?.value)
}

/// As [`dunkl_residual`], also reporting the largest term magnitude.
pub fn dunkl_residual_scaled(system: &DunklSystem, psi: &ParityFunction, e: f64, x: f64) -> Result<Residual> {
    check_solution_parity(system, psi)?;
    let c = expanded_coefficients(system, e, x)?;
    let terms = [c.second * psi.second(x)?, c.first * psi.deriv(x), c.zeroth * psi.value(x)];
    let value = check_finite(x, terms.iter().sum(), "Dunkl residual")?;
    let scale = terms.iter().fold(0.0_f64, |m, t| m.max(t.abs()));
    Ok(Residual { value, scale })
}

/// The same residual assembled from two nested Dunkl applications,
/// `D [(1/2m) D Ψ] + (E - V) Ψ`.
///
/// `D Ψ` has parity `-δ`; dividing by the mass multiplies by μ, so the outer
/// operator acts on parity `-δμ`.
pub fn composed_residual(system: &DunklSystem, psi: &ParityFunction, e: f64, x: f64) -> Result<f64> {
    check_solution_parity(system, psi)?;
    system.domain.check(x)?;
    let nu = system.params.nu;
    let d = system.params.delta_sign();
    let m = (system.mass.m)(x);
    let m1 = (system.mass.m1)(x);
    let inner_parity = psi.parity.flip().times(system.mass.parity);
    // g = D Ψ and its derivative
    let g = dunkl_apply(psi, x, &system.params)?;
    let g1 = psi.second(x)? + nu * (1.0 - d) * (psi.deriv(x) / x - psi.value(x) / (x * x));
    let h = g / (2.0 * m);
    let h1 = g1 / (2.0 * m) - m1 * g / (2.0 * m * m);
    let outer = h1 + nu / x * (1.0 - inner_parity.sign()) * h;
    Ok(outer + (e - system.potential.value(e, x)) * psi.value(x))
}

/// Modified probability density `|Ψ|² |x|^w (1 - ∂V_E/∂E)`.
pub fn probability_density(system: &DunklSystem, psi: &ParityFunction, e: f64, x: f64) -> Result<f64> {
    system.domain.check(x)?;
    let amp = psi.value(x);
    let sq = amp * amp;
    if sq == 0.0 {
        return Ok(0.0);
    }
    let bracket = 1.0 - system.potential.energy_derivative(e, x);
    let w = x.abs().powf(weight_exponent(&system.params));
    check_finite(x, sq * w * bracket, "probability density")
}

/// `N(Ψ) = ∫_ℝ P_Ψ dx`.
pub fn modified_norm(system: &DunklSystem, psi: &ParityFunction, e: f64) -> Result<QuadratureResult> {
    modified_norm_with_scale(system, psi, e, 1.0)
}

/// [`modified_norm`] with an explicit decay length for the quadrature map.
pub fn modified_norm_with_scale(
    system: &DunklSystem,
    psi: &ParityFunction,
    e: f64,
    decay_scale: f64,
) -> Result<QuadratureResult> {
    let first_error = std::sync::Mutex::new(None);
    let integrand = |x: f64| {
        if x == 0.0 {
            return 0.0;
        }
        match probability_density(system, psi, e, x) {
            Ok(v) => v,
            Err(err) => {
                first_error.lock().unwrap().get_or_insert(err);
                f64::NAN
            }
        }
    };
    let result = integrate_real_line(integrand, decay_scale);
    if let Some(err) = first_error.into_inner().unwrap() {
        if !matches!(err, Error::Domain(_)) {
            return Err(err);
        }
    }
    result
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params(nu: f64, d: i32, mu: i32) -> DunklParams {
        DunklParams::new(nu, d, mu).unwrap()
    }

    #[test]
    fn weight_exponent_examples() {
        for &nu in &[0.0, 0.3, 2.5] {
            for d in [-1, 1] {
                assert!((weight_exponent(&params(nu, d, 1)) - 2.0 * nu).abs() < 1e-15);
            }
        }
        assert_eq!(weight_exponent(&params(0.5, -1, 1)), 1.0);
        assert_eq!(weight_exponent(&params(1.0, -1, -1)), 4.0);
    }

    #[test]
    fn admissibility_examples() {
        assert_eq!(admissible(&params(0.0, 1, -1), false), Admissibility::Ok);
        assert_eq!(admissible(&params(-0.6, 1, 1), false), Admissibility::Rejected);
        assert_eq!(admissible(&params(-0.6, 1, 1), true), Admissibility::RequiresCaseAnalysis);
        assert_eq!(admissible(&params(3.0, -1, -1), true), Admissibility::RequiresCaseAnalysis);
    }

    #[test]
    fn dunkl_apply_examples() {
        let sq = ParityFunction::new(Arc::new(|x| x * x), Arc::new(|x| 2.0 * x), Parity::Even);
        assert_eq!(dunkl_apply(&sq, 3.0, &params(0.7, 1, 1)).unwrap(), 6.0);
        let lin = ParityFunction::new(Arc::new(|x| x), Arc::new(|_| 1.0), Parity::Odd);
        assert_eq!(dunkl_apply(&lin, 2.0, &params(0.5, -1, 1)).unwrap(), 2.0);
        let one = ParityFunction::new(Arc::new(|_| 1.0), Arc::new(|_| 0.0), Parity::Even);
        assert_eq!(dunkl_apply(&one, -1.3, &params(4.0, 1, 1)).unwrap(), 0.0);
        assert!(matches!(dunkl_apply(&one, 0.0, &params(4.0, 1, 1)), Err(Error::Domain(_))));
    }

    #[test]
    fn parity_constructor_rejects_zero() {
        assert!(DunklParams::new(0.5, 0, 1).is_err());
        assert!(DunklParams::new(f64::NAN, 1, 1).is_err());
    }

    #[test]
    fn system_rejects_mass_parity_mismatch() {
        let err = DunklSystem::new(params(0.5, 1, -1), MassProfile::constant(0.5), EnergyPotential::zero(), Domain::PuncturedLine);
        assert!(matches!(err, Err(Error::Contract(_))));
    }

    #[test]
    fn residual_rejects_wrong_solution_parity() {
        let sys = DunklSystem::new(params(0.5, 1, 1), MassProfile::constant(0.5), EnergyPotential::zero(), Domain::PuncturedLine).unwrap();
        let odd = ParityFunction::zero(Parity::Odd);
        assert!(matches!(dunkl_residual(&sys, &odd, 1.0, 0.5), Err(Error::Contract(_))));
        let even = ParityFunction::zero(Parity::Even);
        assert_eq!(dunkl_residual(&sys, &even, 1.0, 0.5).unwrap(), 0.0);
        assert!(matches!(dunkl_residual(&sys, &even, 1.0, 0.0), Err(Error::Domain(_))));
    }

    #[test]
    fn constant_mass_negative_control() {
        let sys = DunklSystem::new(
            params(0.5, 1, 1),
            MassProfile::constant(0.5),
            EnergyPotential::harmonic_over_energy(),
            Domain::PuncturedLine,
        )
        .unwrap();
        let g = ParityFunction::from_positive_half(
            Arc::new(|x| (-x * x).exp()),
            Arc::new(|x| -2.0 * x * (-x * x).exp()),
            Arc::new(|x| (4.0 * x * x - 2.0) * (-x * x).exp()),
            Parity::Even,
        );
        let r = dunkl_residual(&sys, &g, 2.3, 0.8).unwrap();
        assert!(r.abs() > 1e-3);
    }

    #[test]
    fn density_reduces_without_energy_dependence() {
        let sys = DunklSystem::new(params(0.75, -1, 1), MassProfile::constant(0.5), EnergyPotential::zero(), Domain::PuncturedLine).unwrap();
        let f = ParityFunction::new(Arc::new(|x| x * (-x * x).exp()), Arc::new(|_| 0.0), Parity::Odd);
        let x: f64 = 0.9;
        let want = (x * (-x * x).exp()).powi(2) * x.powf(1.5);
        assert!((probability_density(&sys, &f, 1.0, x).unwrap() - want).abs() < 1e-15);
        let z = ParityFunction::zero(Parity::Odd);
        assert_eq!(probability_density(&sys, &z, 1.0, x).unwrap(), 0.0);
        assert_eq!(modified_norm(&sys, &z, 1.0).unwrap().value, 0.0);
    }
}
