use std::fmt::Write as _;

use serde::Serialize;
use serde_json::Value;

/// One verdict with the residual and the tolerance it was held to.
#[derive(Debug, Clone, Serialize)]
pub struct Check {
    pub name: String,
    pub residual: f64,
    pub tolerance: f64,
    pub pass: bool,
}

impl Check {
    /// Passes when `residual ≤ tolerance`; NaN fails.
    pub fn at_most(name: &str, residual: f64, tolerance: f64) -> Check {
        Check {
            name: name.to_string(),
            residual,
            tolerance,
            pass: residual <= tolerance,
        }
    }

    /// Passes when `residual > tolerance`.
    pub fn above(name: &str, residual: f64, tolerance: f64) -> Check {
        Check {
            name: name.to_string(),
            residual,
            tolerance,
            pass: residual > tolerance,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Report {
    pub command: String,
    pub arguments: Vec<String>,
    pub engine: String,
    pub input_sha256: String,
    pub seed: u64,
    pub checks: Vec<Check>,
    pub result: Value,
    pub pass: bool,
}

impl Report {
    /// Pretty JSON; floats use the shortest round-trip representation.
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report is plain data");
        s.push('\n');
        s
    }
}

/// 12 significant digits in scientific notation.
pub fn format_sig12(x: f64) -> String {
    if x.is_nan() {
        "nan".into()
    } else if x.is_infinite() {
        if x > 0.0 { "inf" } else { "-inf" }.into()
    } else {
        format!("{x:.11e}")
    }
}

fn scalar(v: &Value) -> Option<String> {
    match v {
        Value::Null => Some("null".into()),
        Value::Bool(b) => Some(b.to_string()),
        Value::String(s) => Some(s.clone()),
        Value::Number(n) => Some(match (n.as_u64(), n.as_i64(), n.as_f64()) {
            (Some(u), _, _) => u.to_string(),
            (_, Some(i), _) => i.to_string(),
            (_, _, Some(f)) => format_sig12(f),
            _ => n.to_string(),
        }),
        _ => None,
    }
}

fn inline(v: &Value) -> Option<String> {
    if let Some(s) = scalar(v) {
        return Some(s);
    }
    match v {
        Value::Array(items) if items.iter().all(|x| scalar(x).is_some()) => {
            Some(format!("[{}]", items.iter().map(|x| scalar(x).unwrap()).collect::<Vec<_>>().join(", ")))
        }
        _ => None,
    }
}

fn render(v: &Value, indent: usize, out: &mut String) {
    let pad = " ".repeat(indent);
    match v {
        Value::Object(map) => {
            for (k, x) in map {
                match inline(x) {
                    Some(s) => {
                        let _ = writeln!(out, "{pad}{k}: {s}");
                    }
                    None => {
                        let _ = writeln!(out, "{pad}{k}:");
                        render(x, indent + 2, out);
                    }
                }
            }
        }
        Value::Array(items) => {
            for x in items {
                match inline(x) {
                    Some(s) => {
                        let _ = writeln!(out, "{pad}- {s}");
                    }
                    None => {
                        let _ = writeln!(out, "{pad}-");
                        render(x, indent + 2, out);
                    }
                }
            }
        }
        other => {
            let _ = writeln!(out, "{pad}{}", scalar(other).unwrap_or_default());
        }
    }
}

pub fn render_text(r: &Report, wall_seconds: f64) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "{} {}", r.engine, r.arguments.join(" "));
    let _ = writeln!(out, "input sha256: {}", r.input_sha256);
    let _ = writeln!(out, "seed: {}", r.seed);
    if !r.checks.is_empty() {
        let width = r.checks.iter().map(|c| c.name.len()).max().unwrap_or(0);
        let _ = writeln!(out, "checks:");
        for c in &r.checks {
            let _ = writeln!(
                out,
                "  {:<width$}  {:>18}  tol {:>18}  {}",
                c.name,
                format_sig12(c.residual),
                format_sig12(c.tolerance),
                if c.pass { "pass" } else { "FAIL" }
            );
        }
    }
    let _ = writeln!(out, "result:");
    render(&r.result, 2, &mut out);
    let _ = writeln!(out, "verdict: {}", if r.pass { "PASS" } else { "FAIL" });
    let _ = writeln!(out, "wall time: {wall_seconds:.3} s");
    out
}
