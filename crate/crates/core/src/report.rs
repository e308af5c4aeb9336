//! Check entries and deterministic JSON reports.

use num_complex::Complex64;
use serde::Serialize;
use serde_json::{Map, Value};

/// One report entry: `{"check", "value": [re, im], "tolerance", "pass"}`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Check {
    pub check: String,
    pub value: [f64; 2],
    pub tolerance: f64,
    pub pass: bool,
    /// Distance compared against `tolerance`, for checks whose tolerance can be rescaled.
    #[serde(skip)]
    residual: Option<f64>,
}

impl Check {
    /// Passes iff `residual` is finite and `≤ tolerance`.
    pub fn at_most(name: impl Into<String>, residual: f64, tolerance: f64) -> Self {
        let pass = residual.is_finite() && residual <= tolerance;
        Self { check: name.into(), value: [residual, 0.0], tolerance, pass, residual: Some(residual) }
    }

    /// Passes iff `value` is finite and `> bound`; `tolerance` records the bound.
    pub fn above(name: impl Into<String>, value: f64, bound: f64) -> Self {
        Self { check: name.into(), value: [value, 0.0], tolerance: bound, pass: value.is_finite() && value > bound, residual: None }
    }

    /// Passes iff `|value − expected| ≤ tolerance`; reports `value`.
    pub fn close(name: impl Into<String>, value: Complex64, expected: Complex64, tolerance: f64) -> Self {
        let d = (value - expected).norm();
        Self { check: name.into(), value: [value.re, value.im], tolerance, pass: d.is_finite() && d <= tolerance, residual: Some(d) }
    }

    /// A check that is satisfied or not without a numeric residual.
    pub fn flag(name: impl Into<String>, pass: bool) -> Self {
        Self { check: name.into(), value: [if pass { 1.0 } else { 0.0 }, 0.0], tolerance: 0.0, pass, residual: None }
    }
}

/// Checks plus free-form result data for one command.
#[derive(Clone, Debug, PartialEq, Default)]
pub struct Report {
    pub command: String,
    pub data: Map<String, Value>,
    pub checks: Vec<Check>,
}

impl Report {
    pub fn new(command: impl Into<String>) -> Self {
        Self { command: command.into(), ..Self::default() }
    }

    pub fn push(&mut self, check: Check) {
        self.checks.push(check);
    }

    pub fn insert(&mut self, key: &str, value: impl Serialize) {
        let v = serde_json::to_value(value).unwrap_or(Value::Null);
        self.data.insert(key.to_string(), v);
    }

    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    pub fn failures(&self) -> Vec<&Check> {
        self.checks.iter().filter(|c| !c.pass).collect()
    }

    /// Multiply the tolerance of every residual-type check by `factor`.
    pub fn scale_tolerances(&mut self, factor: f64) {
        for c in &mut self.checks {
            if let Some(r) = c.residual {
                c.tolerance *= factor;
                c.pass = r.is_finite() && r <= c.tolerance;
            }
        }
    }

    /// Checks sorted by name, as a JSON value with `command`, the data keys and `checks`.
    pub fn to_value(&self) -> Value {
        let mut checks = self.checks.clone();
        checks.sort_by(|a, b| a.check.cmp(&b.check));
        let mut obj = self.data.clone();
        obj.insert("command".into(), Value::String(self.command.clone()));
        obj.insert("pass".into(), Value::Bool(self.passed()));
        obj.insert("checks".into(), serde_json::to_value(checks).unwrap_or(Value::Null));
        Value::Object(obj)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_value()).unwrap_or_default()
    }
}
