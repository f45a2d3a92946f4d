//! Data series behind the figures, indexed 0–7 in the order they appear.
//!
//! | n | content |
//! |---|---------|
//! | 0 | odd Gaussian-mass bound states, ν = 1/2, levels 0–2 |
//! | 1 | even Gaussian-mass bound states, ν = 1/2, levels 0–2 |
//! | 2 | their odd-state probability densities, normalised to unit integral |
//! | 3 | `V_E = x²/E` at `E_0` and `V̂` of the standard (ε = 1/4, −3/4) chain at `E_0..E_2` |
//! | 4 | normalised transformed densities, δ = −1, ν = 5/2, levels 0–2 |
//! | 5 | normalised transformed solutions, δ = −1, ν = 5/2 |
//! | 6 | normalised transformed solutions, δ = +1, ν = 7/2 |
//! | 7 | as 3, for the confluent chain at ε = −2 |

use anyhow::{bail, Result};
use dunkl_darboux::model::{modified_norm, probability_density, DunklParams, ParityFunction};
use dunkl_darboux::numerics::uniform_grid;
use dunkl_darboux::scenarios::{
    bound_state_energy, printed_bound_states, ChainChoice, DensityBracket, EnergyRule, GaussianMass, HarmonicPipeline,
};
use serde_json::json;

use crate::output::Table;

pub const COUNT: u32 = 8;

/// Default grid per figure; 400 nodes on a symmetric interval keep `x = 0` off the grid.
pub fn default_grid(n: u32) -> (f64, f64, usize) {
    match n {
        0..=2 => (-3.0, 3.0, 400),
        _ => (-4.0, 4.0, 400),
    }
}

pub fn describe(n: u32) -> &'static str {
    match n {
        0 => "odd Gaussian-mass bound states (nu = 1/2, delta = -1), n = 0, 1, 2",
        1 => "even Gaussian-mass bound states (nu = 1/2, delta = +1), n = 0, 1, 2",
        2 => "normalised probability densities of the odd Gaussian-mass bound states",
        3 => "initial potential x^2/E_0 and standard-chain transformed potentials at E_0, E_1, E_2 (nu = 5/2, delta = -1)",
        4 => "normalised transformed probability densities, standard chain (nu = 5/2, delta = -1)",
        5 => "normalised transformed solutions, standard chain (nu = 5/2, delta = -1)",
        6 => "normalised transformed solutions, standard chain (nu = 7/2, delta = +1)",
        7 => "initial potential x^2/E_0 and confluent-chain transformed potentials at E_0, E_1, E_2 (nu = 5/2, delta = -1)",
        _ => "unknown",
    }
}

fn params(nu: f64, delta: i32) -> Result<DunklParams> {
    Ok(DunklParams::new(nu, delta, 1)?)
}

fn levels(p: &DunklParams) -> [f64; 3] {
    [0, 1, 2].map(|n| bound_state_energy(n, p, EnergyRule::Ene1))
}

fn gaussian_states(odd: bool) -> Vec<(DunklParams, ParityFunction, f64)> {
    let states = printed_bound_states();
    let range = if odd { 0..3 } else { 3..6 };
    states[range].iter().map(|s| (s.params, s.psi.clone(), s.energy())).collect()
}

pub fn build(n: u32, grid: (f64, f64, usize)) -> Result<Table> {
    let xs = uniform_grid(grid.0, grid.1, grid.2)?;
    let cols = |prefix: &str| -> Vec<String> {
        std::iter::once("x".to_string()).chain((0..3).map(|k| format!("{prefix}_n{k}"))).collect()
    };
    let mut table = match n {
        0 | 1 => {
            let states = gaussian_states(n == 0);
            let mut t = Table::new(cols("psi"));
            for &x in &xs {
                let mut row = vec![x];
                row.extend(states.iter().map(|(_, psi, _)| psi.value(x)));
                t.push(row);
            }
            t
        }
        2 => {
            let states = gaussian_states(true);
            let mut norms = Vec::new();
            let mut systems = Vec::new();
            for (p, psi, e) in &states {
                let sys = GaussianMass::default().system(*p)?;
                norms.push(modified_norm(&sys, psi, *e)?.value);
                systems.push(sys);
            }
            let mut t = Table::new(cols("density"));
            for &x in &xs {
                let mut row = vec![x];
                for (k, (_, psi, e)) in states.iter().enumerate() {
                    row.push(if x == 0.0 { 0.0 } else { probability_density(&systems[k], psi, *e, x)? / norms[k] });
                }
                t.push(row);
            }
            t.with_meta("norms", json!(norms))
        }
        3 | 7 => {
            let p = params(2.5, -1)?;
            let es = levels(&p);
            let choice = if n == 3 { ChainChoice::standard_order2() } else { ChainChoice::confluent() };
            let pls = es.map(|e| HarmonicPipeline::new(p, e, choice.clone()));
            let mut columns = vec!["x".to_string(), "V_initial".to_string()];
            columns.extend((0..3).map(|k| format!("V_hat_n{k}")));
            let mut t = Table::new(columns);
            for &x in &xs {
                let mut row = vec![x, x * x / es[0]];
                for pl in &pls {
                    row.push(pl.as_ref().map_err(Clone::clone)?.v_hat(x)?);
                }
                t.push(row);
            }
            t.with_meta("energies", json!(es))
        }
        4..=6 => {
            let p = if n == 6 { params(3.5, 1)? } else { params(2.5, -1)? };
            let es = levels(&p);
            let mut pls = Vec::new();
            let mut norms = Vec::new();
            for e in es {
                let pl = HarmonicPipeline::new(p, e, ChainChoice::standard_order2())?;
                norms.push(pl.norm(DensityBracket::Initial)?.value);
                pls.push(pl);
            }
            let density = n == 4;
            let mut t = Table::new(cols(if density { "density" } else { "psi_hat" }));
            for &x in &xs {
                let mut row = vec![x];
                for (pl, nn) in pls.iter().zip(&norms) {
                    row.push(if density {
                        pl.density(x, DensityBracket::Initial)? / nn
                    } else {
                        pl.psi_hat(x)? / nn.sqrt()
                    });
                }
                t.push(row);
            }
            t.with_meta("energies", json!(es)).with_meta("norms", json!(norms))
        }
        _ => bail!("no figure {n}; figures are numbered 0 to {}", COUNT - 1),
    };
    table.meta.insert("figure".into(), json!(n));
    table.meta.insert("description".into(), json!(describe(n)));
    if let Some((col, row)) = table.first_non_finite() {
        bail!("figure {n}: non-finite value in column {col} at x = {}", table.rows[row][0]);
    }
    Ok(table)
}
