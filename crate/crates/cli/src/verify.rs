//! The `verify` residual suite.

use anyhow::Result;
use dunkl_darboux::darboux::ChainKind;
use dunkl_darboux::model::{composed_residual, dunkl_residual_scaled, modified_norm, ParityFunction};
use dunkl_darboux::numerics::{uniform_grid, Steps};
use dunkl_darboux::pointmap::{energy_relation_residual, forward_map, forward_map_with_derivative, general_form, inverse_map};
use dunkl_darboux::scenarios::{
    harmonic_form, harmonic_reference_params, harmonic_seed, pdm_form, ChainChoice, DensityBracket, MassRoute,
    ScenarioName,
};

use crate::report::VerificationReport;
use crate::setup::{describe_chain, Setup};

/// Default Dunkl-side grid.
pub const X_GRID: (f64, f64, usize) = (0.1, 4.0, 400);

/// Default tolerances, before the environment multiplier.
pub mod tol {
    /// Expanded equation with analytic derivatives.
    pub const DUNKL: f64 = 1e-10;
    /// Expanded equation when derivatives come from stencils.
    pub const DUNKL_STENCIL: f64 = 1e-6;
    pub const COMPOSED: f64 = 1e-8;
    pub const PARITY: f64 = 1e-12;
    pub const POINT_MAP: f64 = 1e-7;
    pub const ROUND_TRIP: f64 = 1e-10;
    pub const ENERGY_RELATION: f64 = 1e-6;
    pub const QUADRATURE: f64 = 1e-8;
    pub const EQUIVALENCE: f64 = 1e-10;
    pub const INTERTWINING: f64 = 1e-6;
    pub const INTERTWINING_CONFLUENT: f64 = 1e-4;
    /// Transformed equation; `Ψ̂''` is a stencil on the analytic `Ψ̂'`.
    pub const TRANSFORMED_DUNKL: f64 = 1e-7;
    /// As above, on top of the ε-stencil of the confluent member.
    pub const TRANSFORMED_DUNKL_CONFLUENT: f64 = 1e-4;
    pub const DENSITY_SIGN: f64 = 1e-12;
}

fn max_over<F: FnMut(f64) -> dunkl_darboux::Result<f64>>(nodes: &[f64], mut f: F) -> dunkl_darboux::Result<f64> {
    let mut worst = 0.0_f64;
    for &t in nodes {
        let v = f(t)?;
        // NaN must not be swallowed by max
        if v.is_nan() {
            return Ok(f64::NAN);
        }
        worst = worst.max(v);
    }
    Ok(worst)
}

pub fn run(setup: &Setup, xs: (f64, f64, usize), choice: &ChainChoice, mult: f64) -> Result<VerificationReport> {
    let mut rep = VerificationReport::new(setup.name.as_str());
    for (k, v) in setup.describe() {
        if k != "scenario" {
            rep.param(&k, v);
        }
    }
    rep.param("chain", describe_chain(choice));
    rep.param("tolerance_multiplier", mult);
    let xs = uniform_grid(xs.0, xs.1, xs.2)?;
    let system = setup.system()?;
    let psi = setup.solution()?;
    let (e, p) = (setup.energy, setup.params);
    let coord = setup.coordinate();
    let mass = setup.mass();
    let pot = setup.potential();
    let stencil_psi = setup.name == ScenarioName::HarmonicEnergyPdm;

    let dunkl_tol = if stencil_psi { tol::DUNKL_STENCIL } else { tol::DUNKL };
    rep.check_result(
        "dunkl_residual",
        max_over(&xs, |x| Ok(dunkl_residual_scaled(&system, &psi, e, x)?.relative())),
        dunkl_tol * mult,
    );
    rep.check_result(
        "composed_vs_expanded",
        max_over(&xs, |x| {
            let r = dunkl_residual_scaled(&system, &psi, e, x)?;
            let c = composed_residual(&system, &psi, e, x)?;
            Ok((c - r.value).abs() / r.scale.max(f64::MIN_POSITIVE))
        }),
        if stencil_psi { tol::DUNKL_STENCIL } else { tol::COMPOSED } * mult,
    );
    let sym: Vec<f64> = xs.iter().flat_map(|&x| [x, -x]).collect();
    rep.check("solution_parity", psi.parity_defect(&xs), tol::PARITY * mult);
    rep.check("mass_parity", mass.parity_defect(&sym), tol::PARITY * mult);

    // mapped side: y = y(x) over the same nodes
    let ys: Vec<f64> = xs.iter().map(|&x| (coord.y_of_x)(x)).collect();
    let form = general_form(&coord, &mass, &pot, &p);
    let gaussian = setup.name == ScenarioName::GaussianMass;
    rep.check_result(
        "point_map_residual",
        max_over(&ys, |y| {
            let mut steps = Steps::default();
            if gaussian {
                // x = √y branches at y = 0
                steps.spatial[0] = steps.spatial[0].min(1e-2 * y);
            }
            let r = form.residual_with_derivative(
                |t| forward_map_with_derivative(&psi, &coord, &mass, &p, t).unwrap_or((f64::NAN, f64::NAN)),
                e,
                y,
                &steps,
            )?;
            Ok(r.relative())
        }),
        tol::POINT_MAP * mult,
    );
    rep.check_result(
        "round_trip",
        max_over(&xs, |x| {
            let back = inverse_map(|t| forward_map(&psi, &coord, &mass, &p, t).unwrap_or(f64::NAN), &coord, &mass, &p, x)?;
            let v = psi.value(x);
            Ok((back - v).abs() / v.abs().max(f64::MIN_POSITIVE))
        }),
        tol::ROUND_TRIP * mult,
    );
    rep.check_result(
        "energy_relation",
        max_over(&ys, |y| Ok(energy_relation_residual(&coord, &mass, &pot, &p, e, y)?.abs())),
        tol::ENERGY_RELATION * mult,
    );

    if let Some(route) = setup.route() {
        check_equivalence(&mut rep, route, setup, &ys, mult);
    }

    // bound states only: the norm is finite when the energy is quantised
    if setup.n.is_some() {
        match modified_norm(&system, &psi, e) {
            Ok(q) => {
                let ok = q.value.is_finite() && q.value > 0.0;
                let rel = q.est_abs_error / q.value.abs();
                rep.push("norm", rel, tol::QUADRATURE * mult, ok && rel <= tol::QUADRATURE * mult, Some(format!("N = {}", q.value)));
                rep.param("norm", q.value);
            }
            Err(err) => rep.push("norm", f64::INFINITY, tol::QUADRATURE * mult, false, Some(err.to_string())),
        }
    }

    if *choice != ChainChoice::None {
        check_chain(&mut rep, setup, choice, &xs, mult)?;
    }
    Ok(rep)
}

// the position-dependent-mass route must land on the same mapped equation as
// its constant-mass reference
fn check_equivalence(rep: &mut VerificationReport, route: MassRoute, setup: &Setup, ys: &[f64], mult: f64) {
    if route != MassRoute::Pdm {
        return;
    }
    let e = setup.energy;
    let r = harmonic_reference_params(route, &setup.params).map(|reference| {
        let (a, b) = (harmonic_form(&reference), pdm_form(&setup.params));
        let mut worst = (a.spectral(e) - b.spectral(e)).abs() / a.spectral(e).abs().max(1.0);
        for &y in ys {
            let (ua, ub) = (a.potential(e, y), b.potential(e, y));
            worst = worst.max((ua - ub).abs() / ua.abs().max(1.0));
        }
        worst
    });
    rep.check_result("constant_mass_equivalence", r, tol::EQUIVALENCE * mult);
}

fn check_chain(rep: &mut VerificationReport, setup: &Setup, choice: &ChainChoice, xs: &[f64], mult: f64) -> Result<()> {
    let pl = match setup.pipeline(choice.clone()) {
        Ok(pl) => pl,
        Err(err) => {
            rep.push("chain_construction", f64::INFINITY, 0.0, false, Some(err.to_string()));
            return Ok(());
        }
    };
    let ys: Vec<f64> = xs.iter().map(|x| x.ln()).collect();
    let seed = harmonic_seed(setup.energy, pl.spectral());
    match pl.chain.apply(&seed, &ys) {
        Ok(out) => rep.push(
            "wronskian_floor",
            0.0,
            0.0,
            out.wronskian_floor > 0.0,
            Some(format!("min |W| = {:e}", out.wronskian_floor)),
        ),
        Err(err) => rep.push("wronskian_floor", f64::INFINITY, 0.0, false, Some(err.to_string())),
    }
    let (t, td) = match pl.chain.kind {
        ChainKind::Standard => (tol::INTERTWINING, tol::TRANSFORMED_DUNKL),
        ChainKind::Confluent => (tol::INTERTWINING_CONFLUENT, tol::TRANSFORMED_DUNKL_CONFLUENT),
    };
    rep.check_result(
        "intertwining",
        max_over(&ys, |y| Ok(pl.chain.intertwining_residual(&seed, y)?.relative())),
        t * mult,
    );
    let psi: ParityFunction = pl.psi_hat_function();
    let system = pl.transformed_system()?;
    rep.check_result(
        "transformed_dunkl_residual",
        max_over(xs, |x| Ok(dunkl_residual_scaled(&system, &psi, setup.energy, x)?.relative())),
        td * mult,
    );
    let dens: dunkl_darboux::Result<Vec<f64>> = xs.iter().map(|&x| pl.density(x, DensityBracket::Initial)).collect();
    rep.check_result(
        "transformed_density_sign",
        dens.map(|d| {
            let top = d.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
            let low = d.iter().fold(0.0_f64, |m, &v| m.min(v));
            if top > 0.0 { -low / top } else { 0.0 }
        }),
        tol::DENSITY_SIGN * mult,
    );
    Ok(())
}
