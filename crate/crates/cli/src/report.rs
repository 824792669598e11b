//! Reports and their text, JSON and CSV renderings.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use num_complex::Complex64;
use schwarzkit::check::Check;
use schwarzkit::expr::format_complex;
use serde_json::{json, Value};

use crate::args::Format;

/// The outcome of one command. `values` and `inputs` are ordered maps so that
/// every rendering is byte-for-byte reproducible.
#[derive(Debug, Clone)]
pub struct Report {
    pub command: String,
    pub inputs: BTreeMap<String, Value>,
    pub values: BTreeMap<String, Value>,
    pub checks: Vec<Check>,
    /// First line (or block) of the text rendering.
    pub headline: String,
    /// Tabular reports: replaces both the text and the key/value CSV rendering.
    pub csv: Option<String>,
    /// Whether the text rendering lists passing checks as well as failing ones.
    pub list_checks: bool,
}

impl Report {
    pub fn new(command: &str) -> Self {
        Report {
            command: command.to_string(),
            inputs: BTreeMap::new(),
            values: BTreeMap::new(),
            checks: Vec::new(),
            headline: String::new(),
            csv: None,
            list_checks: true,
        }
    }

    pub fn input(&mut self, key: &str, value: impl Into<Value>) -> &mut Self {
        self.inputs.insert(key.to_string(), value.into());
        self
    }

    pub fn value(&mut self, key: &str, value: impl Into<Value>) -> &mut Self {
        self.values.insert(key.to_string(), value.into());
        self
    }

    /// Store any serializable core record as a value.
    pub fn record<T: serde::Serialize>(&mut self, key: &str, record: &T) -> &mut Self {
        let v = serde_json::to_value(record).unwrap_or_else(|e| Value::String(format!("unserializable: {e}")));
        self.value(key, v)
    }

    pub fn check(&mut self, check: Check) -> &mut Self {
        self.checks.push(check);
        self
    }

    pub fn headline(&mut self, line: impl Into<String>) -> &mut Self {
        self.headline = line.into();
        self
    }

    pub fn pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Text => self.render_text(),
            Format::Json => self.render_json(),
            Format::Csv => self.render_csv(),
        }
    }

    fn render_text(&self) -> String {
        if let Some(csv) = &self.csv {
            return csv.clone();
        }
        let mut out = String::new();
        if !self.headline.is_empty() {
            out.push_str(&self.headline);
            if !self.headline.ends_with('\n') {
                out.push('\n');
            }
        }
        for (k, v) in &self.values {
            let _ = writeln!(out, "  {k} = {}", compact(v));
        }
        for c in &self.checks {
            if self.list_checks || !c.pass {
                let _ = writeln!(out, "{}", check_line(c));
            }
        }
        out
    }

    fn render_json(&self) -> String {
        let doc = json!({
            "command": self.command,
            "inputs": self.inputs,
            "values": self.values,
            "checks": self.checks,
        });
        let mut s = serde_json::to_string_pretty(&doc).expect("report values are plain JSON");
        s.push('\n');
        s
    }

    fn render_csv(&self) -> String {
        if let Some(csv) = &self.csv {
            return csv.clone();
        }
        let mut out = String::from("key,value\n");
        for (k, v) in &self.values {
            let _ = writeln!(out, "{},{}", csv_field(k), csv_field(&compact(v)));
        }
        for c in &self.checks {
            let status = if c.pass { "PASS" } else { "FAIL" };
            let _ = writeln!(out, "{},{}", csv_field(&format!("check:{}", c.name)), status);
        }
        out
    }
}

pub fn check_line(c: &Check) -> String {
    let status = if c.pass { "PASS" } else { "FAIL" };
    format!(
        "[{status}] {}: measured {} against {} (tolerance {})",
        c.name,
        number(c.measured),
        number(c.bound),
        number(c.tolerance)
    )
}

/// Shortest round-trip form, switching to exponent notation for tiny magnitudes.
fn number(x: f64) -> String {
    if x != 0.0 && x.abs() < 1e-4 {
        format!("{x:e}")
    } else {
        x.to_string()
    }
}

fn compact(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

/// Complex numbers appear in reports in the expression grammar's literal form.
pub fn cx(z: Complex64) -> Value {
    Value::String(format_complex(z))
}

pub fn cx_list(zs: &[Complex64]) -> Value {
    Value::Array(zs.iter().map(|&z| cx(z)).collect())
}
