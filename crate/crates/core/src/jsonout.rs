//! Deterministic JSON rendering for CLI output and reports.
//!
//! serde_json's default map ordering would alphabetize keys; output here
//! must follow index order and print floats canonically (12 significant
//! digits, `"inf"` for infinities), so a small writer is used instead.

use crate::ext::{ExtNat, ExtReal};
use crate::lattice::{BoundedNat, Value};
use crate::util::fmt_sig;

/// A JSON value with insertion-ordered objects.
#[derive(Clone, Debug)]
pub enum Json {
    Null,
    Bool(bool),
    Num(f64),
    Int(u64),
    Str(String),
    Arr(Vec<Json>),
    Obj(Vec<(String, Json)>),
}

impl Json {
    pub fn render(&self) -> String {
        let mut out = String::new();
        self.write(&mut out);
        out
    }

    fn write(&self, out: &mut String) {
        match self {
            Json::Null => out.push_str("null"),
            Json::Bool(b) => out.push_str(if *b { "true" } else { "false" }),
            Json::Num(x) => out.push_str(&fmt_sig(*x)),
            Json::Int(n) => out.push_str(&n.to_string()),
            Json::Str(s) => write_escaped(s, out),
            Json::Arr(items) => {
                out.push('[');
                for (i, item) in items.iter().enumerate() {
                    if i > 0 {
                        out.push_str(", ");
                    }
                    item.write(out);
                }
                out.push(']');
            }
            Json::Obj(fields) => {
                out.push('{');
                for (i, (k, v)) in fields.iter().enumerate() {
                    if i > 0 {
                        out.push_str(", ");
                    }
                    write_escaped(k, out);
                    out.push_str(": ");
                    v.write(out);
                }
                out.push('}');
            }
        }
    }
}

fn write_escaped(s: &str, out: &mut String) {
    out.push('"');
    for c in s.chars() {
        match c {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            '\r' => out.push_str("\\r"),
            '\t' => out.push_str("\\t"),
            c if (c as u32) < 0x20 => out.push_str(&format!("\\u{:04x}", c as u32)),
            c => out.push(c),
        }
    }
    out.push('"');
}

pub fn ext_real(x: &ExtReal) -> Json {
    match x {
        ExtReal::Finite(v) => Json::Num(*v),
        ExtReal::Infinity => Json::Str("inf".into()),
    }
}

pub fn ext_nat(x: &ExtNat) -> Json {
    match x {
        ExtNat::Finite(n) => Json::Int(*n),
        ExtNat::Infinity => Json::Str("inf".into()),
    }
}

/// Renders one lattice element.
pub fn value(v: &Value) -> Json {
    match v {
        Value::Bool(b) => Json::Bool(*b),
        Value::Unit(x) => Json::Num(*x),
        Value::Ext(x) => ext_real(x),
        Value::Nat(n) => ext_nat(n),
        Value::Res(BoundedNat::Bottom) => Json::Null,
        Value::Res(BoundedNat::Level(n)) => Json::Int(u64::from(*n)),
        Value::Pair(a, b) => Json::Arr(vec![value(a), value(b)]),
        Value::Front(f) => Json::Arr(
            f.points()
                .iter()
                .map(|pt| Json::Arr(vec![Json::Num(pt.p), ext_real(&pt.r)]))
                .collect(),
        ),
    }
}

/// Renders a valuation as an object keyed by index labels, in index order.
pub fn valuation(v: &crate::valuation::Valuation) -> Json {
    Json::Obj(
        v.iter()
            .map(|(label, val)| (label.to_string(), value(val)))
            .collect(),
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn renders_floats_and_infinity() {
        let j = Json::Obj(vec![
            ("s".into(), Json::Num(2.0)),
            ("t".into(), ext_real(&ExtReal::Infinity)),
        ]);
        assert_eq!(j.render(), r#"{"s": 2.0, "t": "inf"}"#);
    }

    #[test]
    fn escapes_strings() {
        assert_eq!(Json::Str("a\"b".into()).render(), r#""a\"b""#);
    }
}
