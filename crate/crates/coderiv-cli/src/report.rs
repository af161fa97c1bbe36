//! Deterministic report serialization.
//!
//! JSON is the canonical format; CSV is a per-command flat projection.
//! Floating-point values are rendered with 17 significant digits, so a
//! value round-trips exactly and identical runs produce byte-identical
//! reports. Object keys keep insertion order.

use std::fmt::Write as _;

/// Render a float with 17 significant digits. Negative zero is folded to
/// zero so reports do not depend on the sign of a vanished rounding error.
pub fn fmt_f64(v: f64) -> String {
    let v = if v == 0.0 { 0.0 } else { v };
    format!("{v:.16e}")
}

#[derive(Debug, Clone)]
pub enum Value {
    Num(f64),
    Int(i64),
    Bool(bool),
    Str(String),
    Arr(Vec<Value>),
    Obj(Obj),
    Null,
}

impl Value {
    pub fn str(s: impl Into<String>) -> Value {
        Value::Str(s.into())
    }

    pub fn nums(vals: impl IntoIterator<Item = f64>) -> Value {
        Value::Arr(vals.into_iter().map(Value::Num).collect())
    }
}

/// An object with stable field order.
#[derive(Debug, Clone, Default)]
pub struct Obj {
    fields: Vec<(String, Value)>,
}

impl Obj {
    pub fn new() -> Obj {
        Obj::default()
    }

    pub fn push(mut self, key: impl Into<String>, value: Value) -> Obj {
        self.fields.push((key.into(), value));
        self
    }
}

fn escape_into(out: &mut String, s: &str) {
    out.push('"');
    for c in s.chars() {
        match c {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            '\r' => out.push_str("\\r"),
            '\t' => out.push_str("\\t"),
            c if (c as u32) < 0x20 => {
                let _ = write!(out, "\\u{:04x}", c as u32);
            }
            c => out.push(c),
        }
    }
    out.push('"');
}

fn write_value(out: &mut String, value: &Value, indent: usize) {
    match value {
        Value::Num(v) => out.push_str(&fmt_f64(*v)),
        Value::Int(v) => {
            let _ = write!(out, "{v}");
        }
        Value::Bool(b) => {
            let _ = write!(out, "{b}");
        }
        Value::Str(s) => escape_into(out, s),
        Value::Null => out.push_str("null"),
        Value::Arr(items) => {
            if items.is_empty() {
                out.push_str("[]");
                return;
            }
            out.push('[');
            for (i, item) in items.iter().enumerate() {
                if i > 0 {
                    out.push(',');
                }
                out.push('\n');
                out.push_str(&"  ".repeat(indent + 1));
                write_value(out, item, indent + 1);
            }
            out.push('\n');
            out.push_str(&"  ".repeat(indent));
            out.push(']');
        }
        Value::Obj(obj) => {
            if obj.fields.is_empty() {
                out.push_str("{}");
                return;
            }
            out.push('{');
            for (i, (key, item)) in obj.fields.iter().enumerate() {
                if i > 0 {
                    out.push(',');
                }
                out.push('\n');
                out.push_str(&"  ".repeat(indent + 1));
                escape_into(out, key);
                out.push_str(": ");
                write_value(out, item, indent + 1);
            }
            out.push('\n');
            out.push_str(&"  ".repeat(indent));
            out.push('}');
        }
    }
}

/// Pretty JSON with two-space indentation and a trailing newline.
pub fn to_json(value: &Value) -> String {
    let mut out = String::new();
    write_value(&mut out, value, 0);
    out.push('\n');
    out
}

/// One compact JSON object per line (used by the sweep report).
pub fn to_json_lines<'a>(objects: impl IntoIterator<Item = &'a Value>) -> String {
    let mut out = String::new();
    for obj in objects {
        let mut line = String::new();
        write_compact(&mut line, obj);
        out.push_str(&line);
        out.push('\n');
    }
    out
}

fn write_compact(out: &mut String, value: &Value) {
    match value {
        Value::Arr(items) => {
            out.push('[');
            for (i, item) in items.iter().enumerate() {
                if i > 0 {
                    out.push(',');
                }
                write_compact(out, item);
            }
            out.push(']');
        }
        Value::Obj(obj) => {
            out.push('{');
            for (i, (key, item)) in obj.fields.iter().enumerate() {
                if i > 0 {
                    out.push(',');
                }
                escape_into(out, key);
                out.push(':');
                write_compact(out, item);
            }
            out.push('}');
        }
        other => write_value(out, other, 0),
    }
}

/// CSV projection: a header row plus data rows, comma-separated. Cells are
/// scalars rendered exactly like the JSON values; cells containing commas
/// or quotes are quoted.
pub fn to_csv(header: &[&str], rows: &[Vec<String>]) -> String {
    let mut out = String::new();
    let escape_cell = |cell: &str| -> String {
        if cell.contains(',') || cell.contains('"') || cell.contains('\n') {
            format!("\"{}\"", cell.replace('"', "\"\""))
        } else {
            cell.to_string()
        }
    };
    out.push_str(&header.join(","));
    out.push('\n');
    for row in rows {
        let cells: Vec<String> = row.iter().map(|c| escape_cell(c)).collect();
        out.push_str(&cells.join(","));
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn floats_have_17_significant_digits() {
        assert_eq!(fmt_f64(1.0), "1.0000000000000000e0");
        assert_eq!(fmt_f64(-0.25), "-2.5000000000000000e-1");
        assert_eq!(fmt_f64(0.0), "0.0000000000000000e0");
        assert_eq!(fmt_f64(-0.0), "0.0000000000000000e0");
        let v = 0.1 + 0.2;
        let parsed: f64 = fmt_f64(v).parse().unwrap();
        assert_eq!(parsed, v);
    }

    #[test]
    fn json_is_stable_and_escaped() {
        let obj = Value::Obj(
            Obj::new()
                .push("name", Value::str("a\"b"))
                .push("vals", Value::nums([1.0, 0.5]))
                .push("ok", Value::Bool(true)),
        );
        let a = to_json(&obj);
        let b = to_json(&obj);
        assert_eq!(a, b);
        assert!(a.contains("\\\""));
        assert!(a.contains("5.0000000000000000e-1"));
    }

    #[test]
    fn csv_quotes_awkward_cells() {
        let csv = to_csv(
            &["a", "b"],
            &[vec!["plain".into(), "with,comma".into()]],
        );
        assert_eq!(csv, "a,b\nplain,\"with,comma\"\n");
    }
}
