//! Deterministic rendering of floats, CSV tables and JSON documents.

use std::fmt::Write as _;

use iet_core::{Scalar, SCHEMA_VERSION};
use serde_json::{Map, Value};

/// C-style `%.12g`.
pub fn g12(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    if !x.is_finite() {
        return if x.is_nan() {
            "nan".into()
        } else if x > 0.0 {
            "inf".into()
        } else {
            "-inf".into()
        };
    }
    const P: i32 = 12;
    let sci = format!("{:.*e}", (P - 1) as usize, x);
    let (mantissa, exp) = sci.split_once('e').expect("exponent");
    let exp: i32 = exp.parse().expect("integer exponent");
    if !(-4..P).contains(&exp) {
        let m = strip_zeros(mantissa);
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{m}e{sign}{:02}", exp.abs())
    } else {
        let decimals = (P - 1 - exp).max(0) as usize;
        strip_zeros(&format!("{x:.decimals$}")).to_string()
    }
}

fn strip_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

/// A float rounded to 12 significant digits, for JSON output.
pub fn num(x: f64) -> Value {
    let rounded: f64 = g12(x).parse().unwrap_or(x);
    serde_json::Number::from_f64(rounded).map_or(Value::Null, Value::Number)
}

pub fn scalar(x: &Scalar) -> Value {
    Value::String(x.to_string())
}

/// A JSON document that starts with `schema_version`.
pub fn document(command: &str, fields: Vec<(&str, Value)>) -> String {
    let mut map = Map::new();
    map.insert("schema_version".into(), Value::from(SCHEMA_VERSION));
    map.insert("command".into(), Value::from(command));
    for (k, v) in fields {
        map.insert(k.into(), v);
    }
    let mut out = serde_json::to_string_pretty(&Value::Object(map)).expect("serializable");
    out.push('\n');
    out
}

/// CSV with a leading `# schema_version: N` comment line.
pub fn table(header: &[&str], rows: Vec<Vec<String>>) -> String {
    let mut w = csv::WriterBuilder::new().from_writer(Vec::new());
    w.write_record(header).expect("in-memory write");
    for row in rows {
        w.write_record(&row).expect("in-memory write");
    }
    let body = String::from_utf8(w.into_inner().expect("flush")).expect("utf-8");
    let mut out = String::new();
    let _ = writeln!(out, "# schema_version: {SCHEMA_VERSION}");
    out.push_str(&body);
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn percent_g_formatting() {
        assert_eq!(g12(0.5), "0.5");
        assert_eq!(g12(1.0), "1");
        assert_eq!(g12(1.0 / 3.0), "0.333333333333");
        assert_eq!(g12(123456789012345.0), "1.23456789012e+14");
        assert_eq!(g12(0.0001), "0.0001");
        assert_eq!(g12(0.00001234), "1.234e-05");
        assert_eq!(g12(-2.5), "-2.5");
        assert_eq!(g12(999999999999.9), "1e+12");
        assert_eq!(g12(0.0), "0");
    }

    #[test]
    fn csv_has_version_line() {
        let t = table(&["a", "b"], vec![vec!["1".into(), "x".into()]]);
        assert_eq!(t, "# schema_version: 1\na,b\n1,x\n");
    }
}
