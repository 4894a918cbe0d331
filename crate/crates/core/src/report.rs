//! Versioned machine-readable reports.
//!
//! Every check the tools run ends up as one [`ReportEntry`]; exact values
//! are carried as `"a/b"` strings so nothing is lost to floating point.

use serde::{Serialize, Serializer};
use serde_json::Value;

use crate::error::Result;
use crate::hypercore::{fraction_string, Exact};

pub const SCHEMA_VERSION: u32 = 1;

pub(crate) fn ser_exact<S: Serializer>(x: &Exact, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&fraction_string(x))
}

/// JSON form of an exact rational.
pub fn exact_value(x: &Exact) -> Value {
    Value::String(fraction_string(x))
}

#[derive(Clone, Debug, Serialize)]
pub struct ReportEntry {
    pub name: String,
    pub value: Value,
    pub expected: Value,
    pub tolerance: Value,
    pub pass: bool,
}

impl ReportEntry {
    pub fn new(name: impl Into<String>, value: Value, expected: Value, tolerance: Value, pass: bool) -> Self {
        ReportEntry { name: name.into(), value, expected, tolerance, pass }
    }

    /// An exact equality check.
    pub fn equal(name: impl Into<String>, value: impl Serialize, expected: impl Serialize) -> Self {
        let value = serde_json::to_value(value).unwrap_or(Value::Null);
        let expected = serde_json::to_value(expected).unwrap_or(Value::Null);
        let pass = value == expected;
        Self::new(name, value, expected, Value::from(0), pass)
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Report {
    pub schema_version: u32,
    pub tool_version: String,
    pub config: Value,
    pub results: Vec<ReportEntry>,
}

impl Report {
    pub fn new(config: Value) -> Self {
        Report {
            schema_version: SCHEMA_VERSION,
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
            config,
            results: Vec::new(),
        }
    }

    pub fn push(&mut self, entry: ReportEntry) {
        self.results.push(entry);
    }

    pub fn all_pass(&self) -> bool {
        self.results.iter().all(|r| r.pass)
    }

    pub fn failures(&self) -> impl Iterator<Item = &ReportEntry> {
        self.results.iter().filter(|r| !r.pass)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report values are plain JSON")
    }

    /// One row per result: `name,value,expected,tolerance,pass`.
    pub fn to_csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(["name", "value", "expected", "tolerance", "pass"])
            .map_err(csv_err)?;
        for r in &self.results {
            w.write_record([
                r.name.as_str(),
                &cell(&r.value),
                &cell(&r.expected),
                &cell(&r.tolerance),
                if r.pass { "true" } else { "false" },
            ])
            .map_err(csv_err)?;
        }
        let bytes = w.into_inner().map_err(|e| csv_err(e.into_error()))?;
        Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
    }
}

fn cell(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        Value::Null => String::new(),
        other => other.to_string(),
    }
}

fn csv_err(e: impl std::fmt::Display) -> crate::Error {
    crate::Error::Io(std::io::Error::other(e.to_string()))
}
