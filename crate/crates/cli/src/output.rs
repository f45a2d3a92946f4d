//! Tabular output: CSV with a header row and 12 significant digits, or JSON.

use std::io::Write;
use std::path::Path;

use anyhow::{Context, Result};
use serde_json::{json, Map, Value};

use crate::config::Format;

/// Column-named numeric table with free-form metadata.
#[derive(Debug, Clone, Default)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
    pub meta: Map<String, Value>,
    /// Columns printed as integers.
    pub integer_columns: Vec<usize>,
}

impl Table {
    pub fn new<S: Into<String>>(columns: impl IntoIterator<Item = S>) -> Self {
        Self { columns: columns.into_iter().map(Into::into).collect(), ..Default::default() }
    }

    pub fn push(&mut self, row: Vec<f64>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn integer_column(mut self, j: usize) -> Self {
        self.integer_columns.push(j);
        self
    }

    pub fn with_meta(mut self, key: &str, value: Value) -> Self {
        self.meta.insert(key.into(), value);
        self
    }

    /// First non-finite entry as `(column, row)`.
    pub fn first_non_finite(&self) -> Option<(&str, usize)> {
        self.rows.iter().enumerate().find_map(|(i, r)| {
            r.iter().position(|v| !v.is_finite()).map(|j| (self.columns[j].as_str(), i))
        })
    }

    pub fn to_csv(&self) -> Result<Vec<u8>> {
        let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(Vec::new());
        w.write_record(&self.columns)?;
        for r in &self.rows {
            w.write_record(r.iter().enumerate().map(|(j, &v)| {
                if self.integer_columns.contains(&j) {
                    format!("{}", v as i64)
                } else {
                    format_number(v)
                }
            }))?;
        }
        w.into_inner().context("flushing CSV buffer")
    }

    pub fn to_json(&self) -> Value {
        json!({ "meta": self.meta, "columns": self.columns, "rows": self.rows })
    }

    pub fn render(&self, format: Format) -> Result<Vec<u8>> {
        match format {
            Format::Csv => self.to_csv(),
            Format::Json => json_bytes(&self.to_json()),
        }
    }
}

pub fn json_bytes(v: &Value) -> Result<Vec<u8>> {
    let mut out = serde_json::to_vec_pretty(v)?;
    out.push(b'\n');
    Ok(out)
}

/// Writes to `path`, or to stdout when no path is given.
pub fn emit(bytes: &[u8], path: Option<&Path>) -> Result<()> {
    match path {
        Some(p) => std::fs::write(p, bytes).with_context(|| format!("writing {}", p.display())),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(bytes)?;
            out.flush()?;
            Ok(())
        }
    }
}

/// 12 significant digits: positional for moderate magnitudes, scientific otherwise.
pub fn format_number(v: f64) -> String {
    if !v.is_finite() {
        return v.to_string();
    }
    if v == 0.0 {
        return "0".into();
    }
    let sci = format!("{v:.11e}");
    // the exponent after rounding, so 9.9999999999996 counts as 1e1
    let exp: i32 = sci[sci.find('e').expect("exponent") + 1..].parse().expect("integer exponent");
    if (-4..12).contains(&exp) {
        format!("{:.*}", (11 - exp).max(0) as usize, v)
    } else {
        sci
    }
}
