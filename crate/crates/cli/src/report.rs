use std::collections::BTreeMap;
use std::fmt::Write as _;

use num_bigint::BigUint;
use num_rational::BigRational;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
}

/// One comparison; both sides are kept so a failure can be read off the report.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub status: Status,
    pub lhs: Value,
    pub rhs: Value,
    pub tolerance: Option<f64>,
}

impl Check {
    /// Exact comparison of two values.
    pub fn exact(name: impl Into<String>, lhs: Value, rhs: Value) -> Self {
        let status = if lhs == rhs { Status::Pass } else { Status::Fail };
        Self {
            name: name.into(),
            status,
            lhs,
            rhs,
            tolerance: None,
        }
    }

    /// `|lhs - rhs| <= tolerance`.
    pub fn close(name: impl Into<String>, lhs: f64, rhs: f64, tolerance: f64) -> Self {
        let ok = (lhs - rhs).abs() <= tolerance;
        Self {
            name: name.into(),
            status: if ok { Status::Pass } else { Status::Fail },
            lhs: num(lhs),
            rhs: num(rhs),
            tolerance: Some(tolerance),
        }
    }

    /// A check whose outcome was decided by the caller.
    pub fn with_status(
        name: impl Into<String>,
        ok: bool,
        lhs: Value,
        rhs: Value,
        tolerance: Option<f64>,
    ) -> Self {
        Self {
            name: name.into(),
            status: if ok { Status::Pass } else { Status::Fail },
            lhs,
            rhs,
            tolerance,
        }
    }

    pub fn passed(&self) -> bool {
        self.status == Status::Pass
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub command: String,
    pub inputs: BTreeMap<String, Value>,
    pub outputs: BTreeMap<String, Value>,
    pub checks: Vec<Check>,
    pub seed: Option<u64>,
    pub elapsed_ms: u64,
}

impl Report {
    pub fn new(command: impl Into<String>) -> Self {
        Self {
            command: command.into(),
            inputs: BTreeMap::new(),
            outputs: BTreeMap::new(),
            checks: Vec::new(),
            seed: None,
            elapsed_ms: 0,
        }
    }

    pub fn input(&mut self, key: &str, value: impl Into<Value>) -> &mut Self {
        self.inputs.insert(key.to_string(), value.into());
        self
    }

    pub fn output(&mut self, key: &str, value: impl Into<Value>) -> &mut Self {
        self.outputs.insert(key.to_string(), value.into());
        self
    }

    pub fn check(&mut self, check: Check) -> &mut Self {
        self.checks.push(check);
        self
    }

    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(Check::passed)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("reports always serialize")
    }

    /// CSV-style rendering: scalar outputs as `key,value` lines, arrays of
    /// rows as their own blocks, then the checks.
    pub fn to_table(&self) -> String {
        let mut out = String::new();
        writeln!(out, "# {}", self.command).unwrap();
        for (k, v) in &self.inputs {
            writeln!(out, "# {k} = {}", cell(v)).unwrap();
        }
        if let Some(seed) = self.seed {
            writeln!(out, "# seed = {seed}").unwrap();
        }
        let mut blocks = Vec::new();
        let mut scalars = Vec::new();
        for (k, v) in &self.outputs {
            match v {
                Value::Array(rows) if rows.iter().any(|r| r.is_array() || r.is_object()) => {
                    blocks.push((k, rows))
                }
                _ => scalars.push((k, v)),
            }
        }
        if !scalars.is_empty() {
            writeln!(out, "key,value").unwrap();
            for (k, v) in scalars {
                writeln!(out, "{k},{}", cell(v)).unwrap();
            }
        }
        for (k, rows) in blocks {
            writeln!(out, "\n# {k}").unwrap();
            if let Some(Value::Object(first)) = rows.first() {
                if !first.contains_key("num") {
                    let header: Vec<&String> = first.keys().collect();
                    writeln!(out, "{}", header.iter().map(|h| h.as_str()).collect::<Vec<_>>().join(","))
                        .unwrap();
                    for row in rows {
                        let line: Vec<String> = header.iter().map(|h| cell(&row[h.as_str()])).collect();
                        writeln!(out, "{}", line.join(",")).unwrap();
                    }
                    continue;
                }
            }
            for row in rows {
                match row {
                    Value::Array(cells) => {
                        let line: Vec<String> = cells.iter().map(cell).collect();
                        writeln!(out, "{}", line.join(",")).unwrap();
                    }
                    other => writeln!(out, "{}", cell(other)).unwrap(),
                }
            }
        }
        if !self.checks.is_empty() {
            writeln!(out, "\ncheck,status,lhs,rhs,tolerance").unwrap();
            for c in &self.checks {
                let status = if c.passed() { "pass" } else { "FAIL" };
                let tol = c.tolerance.map(|t| format!("{t:e}")).unwrap_or_default();
                writeln!(out, "{},{status},{},{},{tol}", quote(&c.name), cell(&c.lhs), cell(&c.rhs))
                    .unwrap();
            }
        }
        writeln!(out, "# elapsed_ms = {}", self.elapsed_ms).unwrap();
        out
    }
}

fn quote(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

fn cell(v: &Value) -> String {
    match v {
        Value::String(s) => quote(s),
        Value::Object(o) if o.contains_key("num") && o.contains_key("den") => {
            let (n, d) = (&o["num"], &o["den"]);
            match (n.as_str(), d.as_str()) {
                (Some(n), Some("1")) => n.to_string(),
                (Some(n), Some(d)) => format!("{n}/{d}"),
                _ => quote(&v.to_string()),
            }
        }
        Value::Array(items) => quote(&items.iter().map(cell).collect::<Vec<_>>().join(" ")),
        other => quote(&other.to_string()),
    }
}

/// Arbitrary-precision integers are emitted as decimal strings.
pub fn nat(x: &BigUint) -> Value {
    Value::String(x.to_string())
}

/// Exact rationals are emitted as `{"num": "...", "den": "..."}`.
pub fn rat(x: &BigRational) -> Value {
    json!({ "num": x.numer().to_string(), "den": x.denom().to_string() })
}

/// Floats; non-finite values become strings, which JSON cannot hold as numbers.
pub fn num(x: f64) -> Value {
    serde_json::Number::from_f64(x)
        .map(Value::Number)
        .unwrap_or_else(|| Value::String(x.to_string()))
}
