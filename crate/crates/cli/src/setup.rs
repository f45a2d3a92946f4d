//! Resolves a [`RunConfig`] into a concrete scenario: parameters, energy,
//! Dunkl system and its closed-form solution.

use anyhow::{bail, Result};
use dunkl_darboux::model::{DunklParams, DunklSystem, EnergyPotential, MassProfile, ParityFunction};
use dunkl_darboux::pointmap::CoordinateChange;
use dunkl_darboux::scenarios::{
    bound_state_energy, gaussian_admissible, gaussian_solution_function, harmonic_bound_state_energy,
    harmonic_initial_function, ChainChoice, EnergyRule, GaussianMass, HarmonicPipeline, MassRoute, ScenarioName,
};
use serde_json::{json, Map, Value};

use crate::config::RunConfig;

#[derive(Debug, Clone)]
pub struct Setup {
    pub name: ScenarioName,
    pub params: DunklParams,
    pub energy: f64,
    /// Level index when the energy came from a quantisation rule.
    pub n: Option<u32>,
}

impl Setup {
    pub fn resolve(cfg: &RunConfig) -> Result<Self> {
        let name = cfg.scenario()?;
        let params = cfg.params()?;
        let rule = cfg.params.rule.map(EnergyRule::from);
        let native = match name {
            ScenarioName::GaussianMass => EnergyRule::Ene0,
            _ => EnergyRule::Ene1,
        };
        if let Some(r) = rule {
            if r != native {
                bail!("scenario {name} quantises with {native:?}; rule {r:?} does not apply");
            }
        }
        if name == ScenarioName::GaussianMass {
            gaussian_admissible(&params)?;
        }
        let (energy, n) = match (cfg.params.energy, cfg.params.n) {
            (Some(_), Some(_)) => bail!("give either an energy or a level n, not both"),
            (Some(e), None) => (e, None),
            (None, n) => {
                let n = n.unwrap_or(0);
                let e = match name {
                    ScenarioName::GaussianMass => bound_state_energy(n, &params, EnergyRule::Ene0),
                    ScenarioName::HarmonicEnergy => bound_state_energy(n, &params, EnergyRule::Ene1),
                    ScenarioName::HarmonicEnergyPdm => harmonic_bound_state_energy(n, MassRoute::Pdm, &params)?,
                };
                (e, Some(n))
            }
        };
        if !energy.is_finite() {
            bail!("energy is not finite for these parameters");
        }
        Ok(Self { name, params, energy, n })
    }

    pub fn route(&self) -> Option<MassRoute> {
        match self.name {
            ScenarioName::GaussianMass => None,
            ScenarioName::HarmonicEnergy => Some(MassRoute::Constant),
            ScenarioName::HarmonicEnergyPdm => Some(MassRoute::Pdm),
        }
    }

    pub fn mass(&self) -> MassProfile {
        self.route().map_or_else(|| GaussianMass::default().mass(), MassRoute::mass)
    }

    pub fn potential(&self) -> EnergyPotential {
        self.route().map_or_else(|| GaussianMass::default().potential(), MassRoute::potential)
    }

    pub fn coordinate(&self) -> CoordinateChange {
        match self.route() {
            None => GaussianMass::default().coordinate(),
            Some(_) => CoordinateChange::exp(),
        }
    }

    pub fn system(&self) -> Result<DunklSystem> {
        Ok(match self.route() {
            None => GaussianMass::default().system(self.params)?,
            Some(r) => r.system(self.params)?,
        })
    }

    /// Solution of the initial (untransformed) system.
    pub fn solution(&self) -> Result<ParityFunction> {
        Ok(match self.name {
            ScenarioName::GaussianMass => gaussian_solution_function(&self.params, self.energy)?,
            ScenarioName::HarmonicEnergy => harmonic_initial_function(&self.params, self.energy)?,
            ScenarioName::HarmonicEnergyPdm => self.pipeline(ChainChoice::None)?.psi_hat_function(),
        })
    }

    pub fn pipeline(&self, choice: ChainChoice) -> Result<HarmonicPipeline> {
        match self.route() {
            None => bail!("scenario {} has no Darboux pipeline; use harmonic-energy or harmonic-energy-pdm", self.name),
            Some(r) => Ok(HarmonicPipeline::with_route(self.params, self.energy, r, choice)?),
        }
    }

    pub fn describe(&self) -> Map<String, Value> {
        let mut m = Map::new();
        m.insert("scenario".into(), json!(self.name.as_str()));
        m.insert("nu".into(), json!(self.params.nu));
        m.insert("delta".into(), json!(self.params.delta.as_i32()));
        m.insert("energy".into(), json!(self.energy));
        if let Some(n) = self.n {
            m.insert("n".into(), json!(n));
        }
        m
    }
}

pub fn describe_chain(choice: &ChainChoice) -> Value {
    match choice {
        ChainChoice::None => json!({ "kind": "none" }),
        ChainChoice::Standard(eps) => json!({ "kind": "standard", "order": eps.len(), "eps": eps }),
        ChainChoice::Confluent(e) => json!({ "kind": "confluent", "order": 2, "eps": [e] }),
    }
}
