use std::sync::Arc;

use approx::assert_relative_eq;
use dunkl_darboux::darboux::{ChainKind, DarbouxChain, TransformationFunction};
use dunkl_darboux::model::*;
use dunkl_darboux::pointmap::*;
use dunkl_darboux::scenarios::*;
use dunkl_darboux::specfun::{assoc_laguerre, bessel_i, kummer_m};
use proptest::prelude::*;

fn sign() -> impl Strategy<Value = i32> {
    prop_oneof![Just(-1), Just(1)]
}

fn params(nu: f64, d: i32, mu: i32) -> DunklParams {
    DunklParams::new(nu, d, mu).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn kummer_transformation(a in -5.0..5.0_f64, b in 0.5..6.0_f64, z in -15.0..15.0_f64) {
        let l = kummer_m(a, b, z).unwrap();
        let r = kummer_m(b - a, b, -z).unwrap();
        let rv = z.exp() * r.value;
        let tol = 1e-10 * l.value.abs().max(rv.abs()) + 10.0 * (l.est_abs_error + z.exp() * r.est_abs_error);
        prop_assert!((l.value - rv).abs() <= tol, "M({a},{b},{z}) = {} vs {}", l.value, rv);
    }

    #[test]
    fn kummer_truncates_to_a_polynomial(n in 0u32..9, b in 0.5..5.0_f64, z in -10.0..10.0_f64) {
        let mut term = 1.0;
        let mut sum = 1.0;
        let mut mag = 1.0_f64;
        for k in 0..n {
            let k = k as f64;
            term *= (k - n as f64) * z / ((b + k) * (k + 1.0));
            sum += term;
            mag += term.abs();
        }
        let m = kummer_m(-(n as f64), b, z).unwrap().value;
        prop_assert!((m - sum).abs() <= 1e-12 * mag);
    }

    #[test]
    fn laguerre_three_term_recurrence(n in 1.0..6.0_f64, alpha in 0.0..4.0_f64, z in 0.0..10.0_f64) {
        let l = |k: f64| assoc_laguerre(k, alpha, z).unwrap().value;
        let (lm, l0, lp) = (l(n - 1.0), l(n), l(n + 1.0));
        let lhs = (n + 1.0) * lp;
        let rhs = (2.0 * n + 1.0 + alpha - z) * l0 - (n + alpha) * lm;
        let scale = lhs.abs() + ((2.0 * n + 1.0 + alpha - z) * l0).abs() + ((n + alpha) * lm).abs();
        prop_assert!((lhs - rhs).abs() <= 1e-11 * scale.max(1.0));
    }

    #[test]
    fn bessel_recurrence_in_the_argument(z in 0.05..40.0_f64) {
        // I0'(z) = I1(z) checked by a central difference
        let h = 1e-5 * z.max(1.0);
        let d = (bessel_i(0, z + h).unwrap().value - bessel_i(0, z - h).unwrap().value) / (2.0 * h);
        let i1 = bessel_i(1, z).unwrap().value;
        prop_assert!((d - i1).abs() <= 1e-7 * i1.abs().max(1.0));
    }

    #[test]
    fn composed_matches_expanded(
        nu in 0.0..3.0_f64,
        d in sign(),
        mu in sign(),
        c in prop::collection::vec(-2.0..2.0_f64, 3),
        x in prop_oneof![-3.0..-0.2_f64, 0.2..3.0_f64],
        e in 0.2..5.0_f64,
    ) {
        let p = params(nu, d, mu);
        let parity = p.delta;
        // odd coefficients for odd states, even for even
        let coeffs: Vec<f64> = match parity {
            Parity::Even => vec![c[0], 0.0, c[1], 0.0, c[2]],
            Parity::Odd => vec![0.0, c[0], 0.0, c[1], 0.0, c[2]],
        };
        let mass = if mu == 1 { GaussianMass::default().mass() } else { MassProfile::power(0.7, 1) };
        let v = EnergyPotential::harmonic_over_energy();
        let sys = DunklSystem::new(p, mass, v, Domain::PuncturedLine).unwrap();
        let f = gaussian_times_polynomial(&coeffs, parity);
        let a = dunkl_residual_scaled(&sys, &f, e, x).unwrap();
        let b = composed_residual(&sys, &f, e, x).unwrap();
        prop_assert!((a.value - b).abs() <= 1e-10 * a.scale.max(1e-300), "{a:?} vs {b}");
    }

    #[test]
    fn weight_exponent_specialises(nu in -0.4..4.0_f64, d in sign()) {
        assert_relative_eq!(weight_exponent(&params(nu, d, 1)), 2.0 * nu, max_relative = 1e-14);
        let odd = weight_exponent(&params(nu, d, -1));
        prop_assert!((odd - (2.0 * nu - 2.0 * d as f64 * nu)).abs() <= 1e-14 * nu.abs().max(1.0));
    }

    #[test]
    fn densities_are_nonnegative(
        n in 0usize..6,
        x in prop_oneof![-5.0..-0.01_f64, 0.01..5.0_f64],
    ) {
        let st = &printed_bound_states()[n];
        let sys = GaussianMass::default().system(st.params).unwrap();
        prop_assert!(probability_density(&sys, &st.psi, st.energy(), x).unwrap() >= 0.0);
    }

    #[test]
    fn inverse_undoes_forward(
        nu in 0.0..3.0_f64,
        d in sign(),
        y in -2.0..1.5_f64,
        e in 1.0..8.0_f64,
    ) {
        let p = params(nu, d, 1);
        let psi = harmonic_initial_function(&p, e).unwrap();
        let coord = CoordinateChange::exp();
        let mass = MassProfile::constant(0.5);
        let x = (coord.x_of_y)(y);
        let back = inverse_map(|t| forward_map(&psi, &coord, &mass, &p, t).unwrap(), &coord, &mass, &p, x).unwrap();
        assert_relative_eq!(back, psi.value(x), max_relative = 1e-12);
    }

    #[test]
    fn power_mass_form_is_the_general_form(
        pm in 0.2..3.0_f64,
        q in -2i32..4,
        nu in 0.0..3.0_f64,
        d in sign(),
        e in 0.5..6.0_f64,
        y in -1.5..1.0_f64,
    ) {
        let mass = MassProfile::power(pm, q);
        let mu = mass.parity.as_i32();
        let p = params(nu, d, mu);
        let v = EnergyPotential::harmonic_over_energy();
        let general = induced_potential(&CoordinateChange::exp(), &mass, &v, &p, e, y).unwrap();
        let form = power_mass_form(pm, q as f64, &v, &p);
        // Φ'' + (E - U_general) Φ = Φ'' + (ε - U_E) Φ
        let special = form.potential(e, y) + e - form.spectral(e);
        prop_assert!((general - special).abs() <= 1e-10 * general.abs().max(1.0), "{general} vs {special}");
    }

    #[test]
    fn energy_relation_for_power_masses(
        pm in 0.2..3.0_f64,
        q in 0i32..3,
        e in 1.0..6.0_f64,
        y in -1.5..1.0_f64,
    ) {
        let mass = MassProfile::power(pm, q);
        let p = params(1.5, -1, mass.parity.as_i32());
        let r = energy_relation_residual(&CoordinateChange::exp(), &mass, &EnergyPotential::harmonic_over_energy(), &p, e, y).unwrap();
        prop_assert!(r.abs() <= 1e-6);
    }

    #[test]
    fn redefined_nu_matches_the_constant_term(nb in 0.0..6.0_f64, db in sign(), d in sign()) {
        let nu = pdm_equivalence_nu(nb, db, d);
        let lhs = 3.0 * d as f64 * nu - nu * nu - 0.25;
        let rhs = db as f64 * nb - nb * nb - 0.25;
        prop_assert!((lhs - rhs).abs() <= 1e-12 * rhs.abs().max(1.0));
    }
}

fn chain_of(e: f64, eps: &[f64]) -> DarbouxChain {
    let funcs = eps.iter().map(|&s| harmonic_seed(e, s)).collect();
    DarbouxChain::unchecked(ChainKind::Standard, funcs, harmonic_background(e)).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn swapping_members_flips_the_wronskian(e in 2.0..8.0_f64, y in -1.5..0.8_f64) {
        let a = chain_of(e, &[0.25, -0.75]).wronskian(y, None).unwrap();
        let b = chain_of(e, &[-0.75, 0.25]).wronskian(y, None).unwrap();
        prop_assert!((a + b).abs() <= 1e-12 * a.abs().max(1e-300));
    }

    #[test]
    fn scaling_a_member_leaves_the_potential(e in 2.0..8.0_f64, y in -1.5..0.8_f64, c in 0.1..10.0_f64) {
        let base = chain_of(e, &[0.25, -0.75]);
        let s1 = harmonic_seed(e, 0.25);
        let (u, du) = (s1.u.clone(), s1.du.clone());
        let scaled = TransformationFunction::new(Arc::new(move |t| c * u(t)), Arc::new(move |t| c * du(t)), 0.25);
        let other = DarbouxChain::unchecked(
            ChainKind::Standard,
            vec![scaled, harmonic_seed(e, -0.75)],
            harmonic_background(e),
        )
        .unwrap();
        let (ua, ub) = (base.transformed_potential(y).unwrap(), other.transformed_potential(y).unwrap());
        prop_assert!((ua - ub).abs() <= 1e-10 * ua.abs().max(1.0));
        let (wa, wb) = (base.wronskian(y, None).unwrap(), other.wronskian(y, None).unwrap());
        prop_assert!((wb - c * wa).abs() <= 1e-12 * wb.abs());
    }

    #[test]
    fn abel_identity_on_the_jet(e in 2.0..8.0_f64, y in -1.5..0.8_f64) {
        let chain = chain_of(e, &[0.25, -0.75]);
        let j = chain.wronskian_jet(y).unwrap();
        let (u1, u2) = (&chain.funcs[0], &chain.funcs[1]);
        let want = (u1.eps - u2.eps) * (u1.u)(y) * (u2.u)(y);
        prop_assert!((j.w1 - want).abs() <= 1e-10 * want.abs().max(j.hadamard));
    }

    #[test]
    fn standard_chain_intertwines(e in 2.0..8.0_f64, y in -1.5..0.8_f64, nu in 0.5..4.0_f64, d in sign()) {
        let chain = chain_of(e, &[0.25, -0.75]);
        let seed = harmonic_seed(e, harmonic_spectral(&params(nu, d, 1)));
        let r = chain.intertwining_residual(&seed, y).unwrap();
        prop_assert!(r.relative() <= 1e-6, "{r:?}");
    }

    #[test]
    fn transformed_densities_are_nonnegative(n in 0u32..3, x in 0.02..8.9_f64) {
        let p = params(2.5, -1, 1);
        let e = bound_state_energy(n, &p, EnergyRule::Ene1);
        let pl = HarmonicPipeline::new(p, e, ChainChoice::standard_order2()).unwrap();
        prop_assert!(pl.density(x, DensityBracket::Initial).unwrap() >= 0.0);
        prop_assert!(pl.density(-x, DensityBracket::Initial).unwrap() >= 0.0);
    }
}

#[test]
fn transformed_norms_are_finite_and_positive() {
    for p in [params(2.5, -1, 1), params(3.5, 1, 1)] {
        for n in 0..3 {
            let e = bound_state_energy(n, &p, EnergyRule::Ene1);
            let q = HarmonicPipeline::new(p, e, ChainChoice::standard_order2()).unwrap().norm(DensityBracket::Initial).unwrap();
            assert!(q.value.is_finite() && q.value > 0.0, "n={n}: {q:?}");
        }
    }
}

#[test]
fn gaussian_solution_is_proportional_to_the_printed_states() {
    for st in printed_bound_states() {
        let e = st.energy();
        let r: Vec<f64> = (1..40)
            .map(|k| 0.1 * k as f64)
            .map(|x| gaussian_solution(&st.params, e, x).unwrap() / st.psi.value(x))
            .filter(|r| r.is_finite())
            .collect();
        let mean = r.iter().sum::<f64>() / r.len() as f64;
        assert!(r.iter().all(|v| (v - mean).abs() <= 1e-9 * mean.abs()), "{}", st.label);
    }
}
