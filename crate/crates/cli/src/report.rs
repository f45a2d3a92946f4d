//! Verification reports: one record per check, overall pass iff every record passes.

use serde::Serialize;
use serde_json::Value;

use crate::output::format_number;

/// Environment variable holding a positive multiplier applied to every tolerance.
pub const TOL_ENV: &str = "DUNKL_DARBOUX_TOL";

pub fn tolerance_multiplier() -> anyhow::Result<f64> {
    match std::env::var(TOL_ENV) {
        Err(std::env::VarError::NotPresent) => Ok(1.0),
        Err(e) => anyhow::bail!("{TOL_ENV}: {e}"),
        Ok(s) => match s.trim().parse::<f64>() {
            Ok(m) if m.is_finite() && m > 0.0 => Ok(m),
            _ => anyhow::bail!("{TOL_ENV} must be a positive number, got '{s}'"),
        },
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckRecord {
    pub name: String,
    pub max_residual: f64,
    pub tolerance: f64,
    pub pass: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

#[derive(Debug, Clone, Default, Serialize)]
pub struct VerificationReport {
    pub scenario: String,
    pub parameters: serde_json::Map<String, Value>,
    pub checks: Vec<CheckRecord>,
    pub pass: bool,
}

impl VerificationReport {
    pub fn new(scenario: &str) -> Self {
        // an empty report passes vacuously
        Self { scenario: scenario.into(), pass: true, ..Default::default() }
    }

    pub fn param(&mut self, key: &str, value: impl Into<Value>) {
        self.parameters.insert(key.into(), value.into());
    }

    /// `max_residual <= tolerance`; a NaN residual fails.
    pub fn check(&mut self, name: &str, max_residual: f64, tolerance: f64) {
        self.push(name, max_residual, tolerance, max_residual <= tolerance, None);
    }

    /// A failed evaluation is recorded as an infinite residual with the error attached.
    pub fn check_result(&mut self, name: &str, r: dunkl_darboux::Result<f64>, tolerance: f64) {
        match r {
            Ok(v) => self.check(name, v, tolerance),
            Err(e) => self.push(name, f64::INFINITY, tolerance, false, Some(e.to_string())),
        }
    }

    pub fn push(&mut self, name: &str, max_residual: f64, tolerance: f64, pass: bool, note: Option<String>) {
        self.checks.push(CheckRecord { name: name.into(), max_residual, tolerance, pass, note });
        self.pass = self.checks.iter().all(|c| c.pass);
    }

    pub fn text(&self) -> String {
        let mut s = format!("scenario {}\n", self.scenario);
        for (k, v) in &self.parameters {
            s.push_str(&format!("  {k} = {v}\n"));
        }
        let width = self.checks.iter().map(|c| c.name.len()).max().unwrap_or(0);
        for c in &self.checks {
            s.push_str(&format!(
                "{} {:<width$}  {:>10.3e} <= {:.1e}{}\n",
                if c.pass { "PASS" } else { "FAIL" },
                c.name,
                c.max_residual,
                c.tolerance,
                c.note.as_deref().map(|n| format!("  ({n})")).unwrap_or_default(),
            ));
        }
        s.push_str(if self.pass { "overall: PASS\n" } else { "overall: FAIL\n" });
        s
    }

    /// CSV with the check name as first column.
    pub fn csv(&self) -> anyhow::Result<Vec<u8>> {
        let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(Vec::new());
        w.write_record(["name", "max_residual", "tolerance", "pass"])?;
        for c in &self.checks {
            w.write_record([
                c.name.clone(),
                format_number(c.max_residual),
                format_number(c.tolerance),
                c.pass.to_string(),
            ])?;
        }
        Ok(w.into_inner()?)
    }
}
