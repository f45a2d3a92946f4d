//! `dunkl-darboux`: build, transform and verify Dunkl-Schrödinger systems.

mod config;
mod figures;
mod output;
mod report;
mod setup;
mod verify;

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use dunkl_darboux::model::{modified_norm, probability_density};
use dunkl_darboux::numerics::uniform_grid;
use dunkl_darboux::scenarios::{
    bound_state_energy, harmonic_bound_state_energy, harmonic_seed, ChainChoice, DensityBracket, EnergyRule,
    MassRoute, ScenarioName,
};
use serde_json::json;

use config::{ChainKindName, Format, RuleName, RunConfig};
use output::{emit, json_bytes, Table};
use setup::{describe_chain, Setup};

const EXIT_USAGE: u8 = 1;
const EXIT_VERIFY: u8 = 2;

#[derive(Parser, Debug)]
#[command(name = "dunkl-darboux", version, about = "Exactly solvable Dunkl-Schrödinger systems: build, transform, verify")]
#[command(after_help = "Exit status: 0 success, 1 usage or configuration error, 2 verification failure.\n\
    DUNKL_DARBOUX_TOL=<m> multiplies every verification tolerance by m.")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Residual, parity, point-map and norm checks for a scenario
    Verify(Common),
    /// Bound-state energy table
    Spectrum {
        /// Highest level to list
        #[arg(long, default_value_t = 5)]
        n_max: u32,
        #[command(flatten)]
        common: Common,
    },
    /// Probability density on a grid, with the modified norm
    Density(Common),
    /// Run a Darboux chain and emit Û(y), V̂(x), Φ̂(y), Ψ̂(x)
    Darboux(Common),
    /// Data series of figure N (0-7)
    Figure {
        number: u32,
        #[command(flatten)]
        common: Common,
    },
}

#[derive(Args, Debug, Clone, Default)]
struct Common {
    /// JSON run configuration; flags override its fields
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long, value_parser = ["gaussian-mass", "harmonic-energy", "harmonic-energy-pdm"])]
    scenario: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    nu: Option<f64>,
    /// Parity of the solution, -1 or 1
    #[arg(long, allow_hyphen_values = true)]
    delta: Option<i32>,
    /// Stationary energy (instead of a level)
    #[arg(long)]
    energy: Option<f64>,
    /// Bound-state level; the energy follows from the scenario's rule
    #[arg(long)]
    n: Option<u32>,
    #[arg(long, value_enum)]
    rule: Option<RuleName>,
    #[arg(long, allow_hyphen_values = true)]
    grid_lo: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    grid_hi: Option<f64>,
    #[arg(long)]
    grid_count: Option<usize>,
    #[arg(long, value_enum)]
    chain: Option<ChainKindName>,
    #[arg(long)]
    chain_order: Option<usize>,
    /// Comma-separated transformation-function parameters
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    eps: Option<Vec<f64>>,
    #[arg(long, value_enum)]
    format: Option<Format>,
    /// Output file (stdout when absent)
    #[arg(long)]
    out: Option<PathBuf>,
}

impl Common {
    fn resolve(&self) -> Result<RunConfig> {
        let mut cfg = match &self.config {
            Some(p) => RunConfig::load(p)?,
            None => RunConfig::default(),
        };
        let mut flags = RunConfig { scenario: self.scenario.clone(), ..Default::default() };
        flags.params.nu = self.nu;
        flags.params.delta = self.delta;
        flags.params.energy = self.energy;
        flags.params.n = self.n;
        flags.params.rule = self.rule;
        flags.grid.lo = self.grid_lo;
        flags.grid.hi = self.grid_hi;
        flags.grid.count = self.grid_count;
        flags.chain.kind = self.chain;
        flags.chain.order = self.chain_order;
        flags.chain.eps = self.eps.clone();
        flags.output.format = self.format;
        flags.output.path = self.out.clone();
        cfg.overlay(flags);
        Ok(cfg)
    }
}

enum Outcome {
    Ok,
    VerificationFailed,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(EXIT_USAGE) } else { ExitCode::SUCCESS };
        }
    };
    match run(cli.command) {
        Ok(Outcome::Ok) => ExitCode::SUCCESS,
        Ok(Outcome::VerificationFailed) => ExitCode::from(EXIT_VERIFY),
        Err(e) => {
            eprintln!("error: {e:#}");
            eprintln!("run 'dunkl-darboux --help' for usage");
            ExitCode::from(EXIT_USAGE)
        }
    }
}

fn run(command: Command) -> Result<Outcome> {
    match command {
        Command::Verify(c) => cmd_verify(&c.resolve()?),
        Command::Spectrum { n_max, common } => cmd_spectrum(&common.resolve()?, n_max),
        Command::Density(c) => cmd_density(&c.resolve()?),
        Command::Darboux(c) => cmd_darboux(&c.resolve()?),
        Command::Figure { number, common } => cmd_figure(&common.resolve()?, number),
    }
}

fn write_table(cfg: &RunConfig, table: &Table) -> Result<()> {
    emit(&table.render(cfg.format())?, cfg.output.path.as_deref())
}

fn cmd_verify(cfg: &RunConfig) -> Result<Outcome> {
    let setup = Setup::resolve(cfg)?;
    let choice = cfg.chain()?;
    let mult = report::tolerance_multiplier()?;
    let rep = verify::run(&setup, cfg.grid(verify::X_GRID)?, &choice, mult)?;
    match (&cfg.output.path, cfg.format()) {
        (Some(path), fmt) => {
            let bytes = match fmt {
                Format::Json => json_bytes(&serde_json::to_value(&rep)?)?,
                Format::Csv => rep.csv()?,
            };
            emit(&bytes, Some(path))?;
            print!("{}", rep.text());
        }
        (None, Format::Json) => emit(&json_bytes(&serde_json::to_value(&rep)?)?, None)?,
        (None, Format::Csv) => print!("{}", rep.text()),
    }
    Ok(if rep.pass { Outcome::Ok } else { Outcome::VerificationFailed })
}

fn cmd_spectrum(cfg: &RunConfig, n_max: u32) -> Result<Outcome> {
    let params = cfg.params()?;
    let scenario = cfg.scenario.as_ref().map(|_| cfg.scenario()).transpose()?;
    let mut table = Table::new(["n", "energy"]).integer_column(0);
    if scenario == Some(ScenarioName::HarmonicEnergyPdm) {
        if cfg.params.rule.is_some_and(|r| r != RuleName::Ene1) {
            bail!("harmonic-energy-pdm levels follow the ene1 rule of its constant-mass reference");
        }
        for n in 0..=n_max {
            table.push(vec![n as f64, harmonic_bound_state_energy(n, MassRoute::Pdm, &params)?]);
        }
        table = table.with_meta("rule", json!("ene1 (constant-mass reference)"));
    } else {
        let rule = match (cfg.params.rule, scenario) {
            (Some(r), _) => EnergyRule::from(r),
            (None, Some(ScenarioName::GaussianMass)) => EnergyRule::Ene0,
            (None, Some(_)) => EnergyRule::Ene1,
            (None, None) => bail!("spectrum needs --rule (ene0 or ene1) or --scenario"),
        };
        for n in 0..=n_max {
            table.push(vec![n as f64, bound_state_energy(n, &params, rule)]);
        }
        table = table.with_meta("rule", json!(format!("{rule:?}").to_lowercase()));
    }
    let table = table.with_meta("nu", json!(params.nu)).with_meta("delta", json!(params.delta.as_i32()));
    write_table(cfg, &table)?;
    Ok(Outcome::Ok)
}

fn cmd_density(cfg: &RunConfig) -> Result<Outcome> {
    let setup = Setup::resolve(cfg)?;
    let choice = cfg.chain()?;
    let (lo, hi, count) = cfg.grid((-4.0, 4.0, 400))?;
    let xs = uniform_grid(lo, hi, count)?;
    let mut table = Table::new(["x", "psi", "density"]);
    let norm = if choice == ChainChoice::None {
        let system = setup.system()?;
        let psi = setup.solution()?;
        for &x in &xs {
            table.push(vec![x, psi.value(x), probability_density(&system, &psi, setup.energy, x)?]);
        }
        modified_norm(&system, &psi, setup.energy)?
    } else {
        let pl = setup.pipeline(choice.clone())?;
        for &x in &xs {
            table.push(vec![x, pl.psi_hat(x)?, pl.density(x, DensityBracket::Initial)?]);
        }
        pl.norm(DensityBracket::Initial)?
    };
    let mut table = table.with_meta("norm", json!(norm.value)).with_meta("norm_error_estimate", json!(norm.est_abs_error));
    table.meta.extend(setup.describe());
    table.meta.insert("chain".into(), describe_chain(&choice));
    write_table(cfg, &table)?;
    if cfg.format() == Format::Csv {
        eprintln!("norm,{}", output::format_number(norm.value));
    }
    Ok(Outcome::Ok)
}

fn cmd_darboux(cfg: &RunConfig) -> Result<Outcome> {
    let setup = Setup::resolve(cfg)?;
    let choice = match cfg.chain()? {
        ChainChoice::None if cfg.chain.kind.is_none() => ChainChoice::standard_order2(),
        c => c,
    };
    let pl = setup.pipeline(choice.clone())?;
    let (lo, hi, count) = cfg.grid(verify::X_GRID)?;
    if lo <= 0.0 {
        bail!("darboux samples the positive half-line; grid lo must be > 0, got {lo}");
    }
    let xs = uniform_grid(lo, hi, count)?;
    let ys: Vec<f64> = xs.iter().map(|x| x.ln()).collect();
    let out = pl
        .chain
        .apply(&harmonic_seed(setup.energy, pl.spectral()), &ys)
        .context("applying the Darboux chain")?;
    let mut table = Table::new(["x", "y", "U_hat", "V_hat", "Phi_hat", "Psi_hat"]);
    for (k, &x) in xs.iter().enumerate() {
        table.push(vec![x, ys[k], out.u_hat[k], pl.v_hat(x)?, out.phi_hat[k], pl.psi_hat(x)?]);
    }
    let mut table = table.with_meta("wronskian_floor", json!(out.wronskian_floor));
    table.meta.extend(setup.describe());
    table.meta.insert("chain".into(), describe_chain(&choice));
    write_table(cfg, &table)?;
    Ok(Outcome::Ok)
}

fn cmd_figure(cfg: &RunConfig, number: u32) -> Result<Outcome> {
    if number >= figures::COUNT {
        bail!("no figure {number}; figures are numbered 0 to {}", figures::COUNT - 1);
    }
    let table = figures::build(number, cfg.grid(figures::default_grid(number))?)?;
    write_table(cfg, &table)?;
    Ok(Outcome::Ok)
}
