use std::fmt::Write as _;

use serde::Serialize;
use serde_json::{json, Map, Value};

/// One contracted tolerance, evaluated.
#[derive(Clone, Debug, Serialize)]
pub struct Check {
    pub name: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub value: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub target: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tolerance: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
    pub pass: bool,
}

/// Collects checks with every tolerance multiplied by `scale`.
#[derive(Debug)]
pub struct Checks {
    scale: f64,
    list: Vec<Check>,
}

impl Checks {
    pub fn new(scale: f64) -> Self {
        Self { scale, list: Vec::new() }
    }

    /// `|value - target| <= tol`.
    pub fn close(&mut self, name: impl Into<String>, value: f64, target: f64, tol: f64) {
        let tol = tol * self.scale;
        self.list.push(Check {
            name: name.into(),
            value: Some(value),
            target: Some(target),
            tolerance: Some(tol),
            detail: None,
            pass: (value - target).abs() <= tol,
        });
    }

    /// `value <= limit`.
    pub fn at_most(&mut self, name: impl Into<String>, value: f64, limit: f64) {
        let limit = limit * self.scale;
        self.list.push(Check {
            name: name.into(),
            value: Some(value),
            target: None,
            tolerance: Some(limit),
            detail: None,
            pass: value <= limit,
        });
    }

    /// `lo <= value <= hi`, unscaled.
    pub fn within(&mut self, name: impl Into<String>, value: f64, lo: f64, hi: f64) {
        self.list.push(Check {
            name: name.into(),
            value: Some(value),
            target: None,
            tolerance: None,
            detail: Some(format!("expected in [{lo}, {hi}]")),
            pass: (lo..=hi).contains(&value),
        });
    }

    pub fn flag(&mut self, name: impl Into<String>, pass: bool, detail: impl Into<String>) {
        self.list.push(Check {
            name: name.into(),
            value: None,
            target: None,
            tolerance: None,
            detail: Some(detail.into()),
            pass,
        });
    }

    pub fn failures(&self) -> Vec<String> {
        self.list.iter().filter(|c| !c.pass).map(|c| c.name.clone()).collect()
    }

    pub fn into_vec(self) -> Vec<Check> {
        self.list
    }
}

pub struct Outcome {
    pub command: &'static str,
    pub config: Value,
    pub report: Value,
    pub checks: Checks,
}

impl Outcome {
    pub fn into_value(self) -> Value {
        let failures = self.checks.failures();
        json!({
            "command": self.command,
            "config": self.config,
            "report": self.report,
            "checks": self.checks.into_vec(),
            "status": if failures.is_empty() { "pass" } else { "fail" },
            "failures": failures,
        })
    }
}

/// Round to 12 significant digits so output does not depend on the last bits.
pub fn round_sig(x: f64) -> f64 {
    if x == 0.0 || !x.is_finite() {
        return x;
    }
    format!("{x:.11e}").parse().unwrap_or(x)
}

pub fn rounded(v: &Value) -> Value {
    match v {
        Value::Number(n) if !(n.is_i64() || n.is_u64()) => n
            .as_f64()
            .and_then(|x| serde_json::Number::from_f64(round_sig(x)))
            .map_or(Value::Null, Value::Number),
        Value::Array(xs) => Value::Array(xs.iter().map(rounded).collect()),
        Value::Object(m) => Value::Object(m.iter().map(|(k, x)| (k.clone(), rounded(x))).collect::<Map<_, _>>()),
        other => other.clone(),
    }
}

pub fn render_json(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(&rounded(v)).expect("json values serialize");
    s.push('\n');
    s
}

fn flatten(prefix: &str, v: &Value, out: &mut Vec<(String, String)>) {
    let join = |k: &str| if prefix.is_empty() { k.to_string() } else { format!("{prefix}.{k}") };
    match v {
        Value::Object(m) => m.iter().for_each(|(k, x)| flatten(&join(k), x, out)),
        Value::Array(xs) => xs.iter().enumerate().for_each(|(i, x)| flatten(&join(&i.to_string()), x, out)),
        Value::String(s) => out.push((prefix.to_string(), s.clone())),
        Value::Null => out.push((prefix.to_string(), String::new())),
        other => out.push((prefix.to_string(), other.to_string())),
    }
}

/// `key,value` rows of every leaf, numbers at full round-trip precision.
pub fn render_csv(v: &Value) -> String {
    let mut rows = Vec::new();
    flatten("", v, &mut rows);
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["key", "value"]).expect("in-memory write");
    for (k, x) in rows {
        w.write_record([k, x]).expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8 input")
}

pub fn failure_summary(v: &Value) -> String {
    let mut s = String::new();
    if let Some(Value::Array(fs)) = v.get("failures") {
        for f in fs {
            let _ = writeln!(s, "FAIL {}", f.as_str().unwrap_or_default());
        }
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rounding_keeps_twelve_digits() {
        assert_eq!(round_sig(0.1 + 0.2), 0.3);
        assert_eq!(round_sig(1.234567890123456), 1.23456789012);
        assert_eq!(round_sig(-2.5e-300), -2.5e-300);
        assert_eq!(round_sig(0.0), 0.0);
    }

    #[test]
    fn tolerance_scale_applies() {
        let mut c = Checks::new(10.0);
        c.close("x", 1.05, 1.0, 0.01);
        c.at_most("y", 0.5, 0.01);
        assert_eq!(c.failures(), vec!["y".to_string()]);
    }

    #[test]
    fn csv_flattens_nested_values() {
        let v = json!({"a": {"b": [1, 2.5]}, "s": "x,y"});
        assert_eq!(render_csv(&v), "key,value\na.b.0,1\na.b.1,2.5\ns,\"x,y\"\n");
    }
}
