//! Run configuration: a JSON file whose fields mirror [`RunConfig`], with
//! command-line flags layered on top.

use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use dunkl_darboux::model::DunklParams;
use dunkl_darboux::scenarios::{ChainChoice, EnergyRule, ScenarioName, CONFLUENT_EPS, STANDARD_EPS};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default)]
    pub scenario: Option<String>,
    #[serde(default)]
    pub params: ParamsConfig,
    #[serde(default)]
    pub grid: GridConfig,
    #[serde(default)]
    pub chain: ChainConfig,
    #[serde(default)]
    pub output: OutputConfig,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ParamsConfig {
    pub nu: Option<f64>,
    pub delta: Option<i32>,
    pub energy: Option<f64>,
    pub n: Option<u32>,
    pub rule: Option<RuleName>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum RuleName {
    Ene0,
    Ene1,
}

impl From<RuleName> for EnergyRule {
    fn from(r: RuleName) -> Self {
        match r {
            RuleName::Ene0 => EnergyRule::Ene0,
            RuleName::Ene1 => EnergyRule::Ene1,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridConfig {
    pub lo: Option<f64>,
    pub hi: Option<f64>,
    pub count: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum ChainKindName {
    None,
    Standard,
    Confluent,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChainConfig {
    pub kind: Option<ChainKindName>,
    pub order: Option<usize>,
    pub eps: Option<Vec<f64>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Csv,
    Json,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    pub format: Option<Format>,
    pub path: Option<PathBuf>,
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading config {}", path.display()))?;
        serde_json::from_str(&text).with_context(|| format!("parsing config {}", path.display()))
    }

    /// Fills every field of `self` that `other` sets.
    pub fn overlay(&mut self, other: RunConfig) {
        fn set<T>(dst: &mut Option<T>, src: Option<T>) {
            if src.is_some() {
                *dst = src;
            }
        }
        set(&mut self.scenario, other.scenario);
        set(&mut self.params.nu, other.params.nu);
        set(&mut self.params.delta, other.params.delta);
        set(&mut self.params.energy, other.params.energy);
        set(&mut self.params.n, other.params.n);
        set(&mut self.params.rule, other.params.rule);
        set(&mut self.grid.lo, other.grid.lo);
        set(&mut self.grid.hi, other.grid.hi);
        set(&mut self.grid.count, other.grid.count);
        set(&mut self.chain.kind, other.chain.kind);
        set(&mut self.chain.order, other.chain.order);
        set(&mut self.chain.eps, other.chain.eps);
        set(&mut self.output.format, other.output.format);
        set(&mut self.output.path, other.output.path);
    }

    pub fn scenario(&self) -> Result<ScenarioName> {
        match &self.scenario {
            Some(s) => s.parse().map_err(|_| {
                anyhow::anyhow!(
                    "unknown scenario '{s}' (expected one of: {})",
                    ScenarioName::ALL.map(|n| n.as_str()).join(", ")
                )
            }),
            None => bail!("no scenario given (use --scenario or the config's \"scenario\" field)"),
        }
    }

    pub fn params(&self) -> Result<DunklParams> {
        let nu = self.params.nu.context("missing parameter nu")?;
        let delta = self.params.delta.context("missing parameter delta")?;
        DunklParams::new(nu, delta, 1).map_err(Into::into)
    }

    /// The grid, with `default` filling unset fields.
    pub fn grid(&self, default: (f64, f64, usize)) -> Result<(f64, f64, usize)> {
        let lo = self.grid.lo.unwrap_or(default.0);
        let hi = self.grid.hi.unwrap_or(default.1);
        let count = self.grid.count.unwrap_or(default.2);
        if !(lo.is_finite() && hi.is_finite() && lo < hi) {
            bail!("grid needs finite lo < hi, got lo = {lo}, hi = {hi}");
        }
        if count < 2 {
            bail!("grid count must be at least 2, got {count}");
        }
        Ok((lo, hi, count))
    }

    pub fn chain(&self) -> Result<ChainChoice> {
        let c = &self.chain;
        let kind = c.kind.unwrap_or(if c.eps.is_some() || c.order.is_some() {
            ChainKindName::Standard
        } else {
            ChainKindName::None
        });
        Ok(match kind {
            ChainKindName::None => {
                if c.eps.as_ref().is_some_and(|e| !e.is_empty()) || c.order.is_some_and(|o| o > 0) {
                    bail!("chain kind 'none' takes no order or eps");
                }
                ChainChoice::None
            }
            ChainKindName::Standard => {
                let eps = match (&c.eps, c.order) {
                    (Some(eps), Some(o)) if eps.len() != o => {
                        bail!("chain order {o} does not match {} eps values", eps.len())
                    }
                    (Some(eps), _) => eps.clone(),
                    (None, Some(o)) if (1..=STANDARD_EPS.len()).contains(&o) => STANDARD_EPS[..o].to_vec(),
                    (None, Some(o)) => bail!("built-in standard chains have order 1 or 2, got {o}; pass eps explicitly"),
                    (None, None) => STANDARD_EPS.to_vec(),
                };
                if eps.is_empty() {
                    bail!("a standard chain needs at least one eps value");
                }
                ChainChoice::Standard(eps)
            }
            ChainKindName::Confluent => {
                if c.order.is_some_and(|o| o != 2) {
                    bail!("confluent chains have order 2");
                }
                let eps = match c.eps.as_deref() {
                    None => CONFLUENT_EPS,
                    Some([e]) => *e,
                    Some(v) => bail!("a confluent chain takes a single eps, got {}", v.len()),
                };
                ChainChoice::Confluent(eps)
            }
        })
    }

    pub fn format(&self) -> Format {
        self.output.format.unwrap_or_default()
    }
}
