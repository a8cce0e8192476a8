//! Machine-readable run artifacts: JSON reports, CSV tables, and run
//! manifests. Numbers in CSV use C-style `%.12g`; files are written to a
//! temporary sibling and renamed into place.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Schema version of the JSON report envelope.
pub const REPORT_VERSION: &str = "1";

/// A parameter value echoed into reports and manifests.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ParamValue {
    Int(i64),
    Num(f64),
    Text(String),
}

impl From<u64> for ParamValue {
    fn from(v: u64) -> Self {
        ParamValue::Int(v as i64)
    }
}

impl From<i64> for ParamValue {
    fn from(v: i64) -> Self {
        ParamValue::Int(v)
    }
}

impl From<f64> for ParamValue {
    fn from(v: f64) -> Self {
        ParamValue::Num(v)
    }
}

impl From<&str> for ParamValue {
    fn from(v: &str) -> Self {
        ParamValue::Text(v.to_string())
    }
}

/// A rectangular numeric table with named columns.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Table {
    pub name: String,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl Table {
    pub fn new(name: &str, columns: &[&str]) -> Self {
        Table {
            name: name.to_string(),
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<f64>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let idx = self.columns.iter().position(|c| c == name)?;
        Some(self.rows.iter().map(|r| r[idx]).collect())
    }

    pub fn to_csv(&self) -> String {
        let mut out = self.columns.join(",");
        out.push('\n');
        for row in &self.rows {
            let cells: Vec<String> = row.iter().map(|v| fmt_g12(*v)).collect();
            out.push_str(&cells.join(","));
            out.push('\n');
        }
        out
    }
}

/// One named pass/fail check with its measured value and allowance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub measured: f64,
    pub expected: f64,
    pub tolerance: f64,
}

/// The JSON report envelope shared by every subcommand.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub version: String,
    pub command: String,
    pub seed: Option<u64>,
    pub params: BTreeMap<String, ParamValue>,
    pub tables: Vec<Table>,
    pub checks: Vec<Check>,
    pub summary: String,
}

impl Report {
    pub fn new(command: &str, seed: Option<u64>) -> Self {
        Report {
            version: REPORT_VERSION.to_string(),
            command: command.to_string(),
            seed,
            params: BTreeMap::new(),
            tables: Vec::new(),
            checks: Vec::new(),
            summary: String::new(),
        }
    }

    pub fn set_param(&mut self, key: &str, value: impl Into<ParamValue>) {
        self.params.insert(key.to_string(), value.into());
    }

    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn table(&self, name: &str) -> Option<&Table> {
        self.tables.iter().find(|t| t.name == name)
    }

    pub fn load(path: &Path) -> Result<Report> {
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        serde_json::from_str(&text).map_err(|e| Error::MalformedReport {
            path: path.display().to_string(),
            message: e.to_string(),
        })
    }
}

/// Record of one CLI invocation: resolved configuration, artifact list,
/// timing, and version tag.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub command: String,
    pub argv: Vec<String>,
    pub params: BTreeMap<String, ParamValue>,
    pub seed: Option<u64>,
    pub artifacts: Vec<String>,
    pub duration_ms: u64,
    pub version: String,
}

/// Write bytes atomically: temp sibling then rename.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let tmp: PathBuf = path.with_extension("tmp~");
    fs::write(&tmp, bytes).map_err(|e| Error::io(&tmp, e))?;
    fs::rename(&tmp, path).map_err(|e| Error::io(path, e))
}

/// C-style `%.12g`: twelve significant digits, trailing zeros trimmed,
/// scientific notation outside [1e-4, 1e12).
pub fn fmt_g12(x: f64) -> String {
    fmt_g(x, 12)
}

pub fn fmt_g(x: f64, sig: usize) -> String {
    if x.is_nan() {
        return "nan".to_string();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf" } else { "-inf" }.to_string();
    }
    if x == 0.0 {
        return if x.is_sign_negative() { "-0" } else { "0" }.to_string();
    }
    let p = sig.max(1);
    // decimal exponent after rounding to p significant digits
    let sci = format!("{:.*e}", p - 1, x);
    let (mantissa, exp) = sci.split_once('e').expect("exponent form");
    let exp: i32 = exp.parse().expect("exponent value");
    if exp < -4 || exp >= p as i32 {
        let mantissa = trim_zeros(mantissa);
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{mantissa}e{sign}{:02}", exp.abs())
    } else {
        let decimals = (p as i32 - 1 - exp).max(0) as usize;
        trim_zeros(&format!("{x:.decimals$}"))
    }
}

fn trim_zeros(s: &str) -> String {
    if !s.contains('.') {
        return s.to_string();
    }
    let s = s.trim_end_matches('0');
    s.trim_end_matches('.').to_string()
}

/// Serialize a report deterministically (BTree maps, fixed field order).
pub fn report_json(report: &Report) -> String {
    serde_json::to_string_pretty(report).expect("report serialization")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn g_format_matches_c_conventions() {
        assert_eq!(fmt_g12(0.0), "0");
        assert_eq!(fmt_g12(1.0), "1");
        assert_eq!(fmt_g12(-1.5), "-1.5");
        assert_eq!(fmt_g12(8.0 / 3.0), "2.66666666667");
        assert_eq!(fmt_g12(0.0001), "0.0001");
        assert_eq!(fmt_g12(0.00001), "1e-05");
        assert_eq!(fmt_g12(1e12), "1e+12");
        assert_eq!(fmt_g12(999999999999.0), "999999999999");
        assert_eq!(fmt_g12(1.23456789e-7), "1.23456789e-07");
        assert_eq!(fmt_g12(250150.0), "250150");
    }

    #[test]
    fn table_round_trips_columns() {
        let mut t = Table::new("demo", &["k", "v"]);
        t.push(vec![0.0, 1.0]);
        t.push(vec![0.5, 2.0]);
        assert_eq!(t.column("v").unwrap(), vec![1.0, 2.0]);
        assert_eq!(t.to_csv(), "k,v\n0,1\n0.5,2\n");
    }

    #[test]
    fn report_serialization_is_stable() {
        let mut r = Report::new("demo", Some(42));
        r.set_param("N", 100u64);
        r.set_param("alpha", 5.0);
        let a = report_json(&r);
        let b = report_json(&r);
        assert_eq!(a, b);
        let parsed: Report = serde_json::from_str(&a).unwrap();
        assert_eq!(parsed, r);
    }
}
