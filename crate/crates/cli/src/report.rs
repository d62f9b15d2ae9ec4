//! Output encoding. Every float is written with 17 significant digits.

use std::io;

use eigenbc_core::ComplexMatrix;
use num_complex::Complex64;
use serde_json::ser::Formatter;
use serde_json::{json, Map, Value};

/// Compact JSON with floats as `{:.16e}`.
#[derive(Debug, Clone, Copy, Default)]
pub struct SciFormatter;

impl Formatter for SciFormatter {
    fn write_f64<W: ?Sized + io::Write>(&mut self, writer: &mut W, value: f64) -> io::Result<()> {
        write!(writer, "{}", sci(value))
    }

    fn write_f32<W: ?Sized + io::Write>(&mut self, writer: &mut W, value: f32) -> io::Result<()> {
        self.write_f64(writer, value as f64)
    }
}

pub fn sci(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn cx(z: Complex64) -> Value {
    json!([z.re, z.im])
}

pub fn cvec(v: &[Complex64]) -> Value {
    Value::Array(v.iter().map(|&z| cx(z)).collect())
}

pub fn mat(m: &ComplexMatrix) -> Value {
    Value::Array((0..m.rows()).map(|i| cvec(m.row(i))).collect())
}

pub fn to_json(v: &Value) -> String {
    crate::format::to_json_string(v)
}

fn complex_pair(v: &Value) -> Option<(f64, f64)> {
    match v.as_array().map(Vec::as_slice) {
        Some([Value::Number(a), Value::Number(b)]) => Some((a.as_f64()?, b.as_f64()?)),
        _ => None,
    }
}

fn scalar(v: &Value) -> Option<String> {
    match v {
        Value::Null => Some("null".into()),
        Value::Bool(b) => Some(b.to_string()),
        Value::Number(n) => Some(match n.as_f64() {
            Some(x) if n.is_f64() => sci(x),
            _ => n.to_string(),
        }),
        Value::String(s) => Some(s.clone()),
        _ => None,
    }
}

fn inline(v: &Value) -> Option<String> {
    if let Some(s) = scalar(v) {
        return Some(s);
    }
    if let Some((re, im)) = complex_pair(v) {
        return Some(format!("({}, {})", sci(re), sci(im)));
    }
    let items = v.as_array()?;
    let parts: Option<Vec<String>> = items
        .iter()
        .map(|x| scalar(x).or_else(|| complex_pair(x).map(|(re, im)| format!("({}, {})", sci(re), sci(im)))))
        .collect();
    Some(format!("[{}]", parts?.join(", ")))
}

fn render(v: &Value, depth: usize, out: &mut String) {
    let pad = "  ".repeat(depth);
    match v {
        Value::Object(map) => render_object(map, depth, out),
        Value::Array(items) => {
            for item in items {
                match inline(item) {
                    Some(s) => out.push_str(&format!("{pad}{s}\n")),
                    None => {
                        out.push_str(&format!("{pad}-\n"));
                        render(item, depth + 1, out);
                    }
                }
            }
        }
        other => out.push_str(&format!("{pad}{}\n", inline(other).unwrap_or_default())),
    }
}

fn render_object(map: &Map<String, Value>, depth: usize, out: &mut String) {
    let pad = "  ".repeat(depth);
    for (k, v) in map {
        match inline(v) {
            Some(s) => out.push_str(&format!("{pad}{k}: {s}\n")),
            None => {
                out.push_str(&format!("{pad}{k}:\n"));
                render(v, depth + 1, out);
            }
        }
    }
}

/// Indented plain-text report of a JSON value.
pub fn to_text(v: &Value) -> String {
    let mut out = String::new();
    render(v, 0, &mut out);
    out
}
