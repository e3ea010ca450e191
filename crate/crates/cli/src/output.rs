//! JSON and CSV rendering of command results.

use std::fs;
use std::io::Write;
use std::path::Path;

use clap::ValueEnum;
use serde::Serialize;
use vw_core::PuiseuxSeries;

use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
}

impl std::str::FromStr for Format {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        <Format as ValueEnum>::from_str(s, true)
    }
}

/// Flattened rows `section, name, exponent, coefficient`.
#[derive(Debug, Default)]
pub struct Rows {
    rows: Vec<[String; 4]>,
}

impl Rows {
    pub fn push(&mut self, section: &str, name: &str, exponent: String, coefficient: String) {
        self.rows.push([section.to_string(), name.to_string(), exponent, coefficient]);
    }

    pub fn series(&mut self, section: &str, name: &str, s: &PuiseuxSeries) {
        for (e, c) in s.terms() {
            self.push(section, name, e.to_string(), c.to_string());
        }
        self.push(section, name, format!("O({})", s.order()), String::new());
    }

    fn to_csv(&self) -> Result<Vec<u8>, CliError> {
        let mut w = csv::Writer::from_writer(Vec::new());
        let io = |e: csv::Error| CliError::Io(e.to_string());
        w.write_record(["section", "name", "exponent", "coefficient"]).map_err(io)?;
        for r in &self.rows {
            w.write_record(r).map_err(io)?;
        }
        w.into_inner().map_err(|e| CliError::Io(e.to_string()))
    }
}

/// Writes `value` as pretty JSON or `rows` as CSV to `path` or stdout.
pub fn emit<T: Serialize>(value: &T, rows: &Rows, format: Format, path: Option<&Path>) -> Result<(), CliError> {
    let mut bytes = match format {
        Format::Json => serde_json::to_vec_pretty(value).map_err(|e| CliError::Io(e.to_string()))?,
        Format::Csv => rows.to_csv()?,
    };
    if format == Format::Json {
        bytes.push(b'\n');
    }
    match path {
        Some(p) => fs::write(p, bytes).map_err(|e| CliError::Io(format!("{}: {e}", p.display()))),
        None => std::io::stdout().lock().write_all(&bytes).map_err(|e| CliError::Io(e.to_string())),
    }
}
