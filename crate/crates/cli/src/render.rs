//! JSON values for reports and traces, and their plain-text rendering.

use crforge_core::classify::ClassReport;
use crforge_core::frames::{eval_at_origin, TangentFrameField};
use crforge_core::normalize::{Condition, NormalFormReport, NormalizationTrace};
use crforge_core::{Biholomorphism, Scalar, TruncatedSeries};
use serde_json::{json, Map, Value};

use crate::document::{coeff_parts, emit, Coeff};

fn coeff(c: Coeff) -> Value {
    match c {
        Coeff::Text(s) => Value::String(s),
        Coeff::Number(x) => Value::Number(x),
    }
}

pub fn scalar(v: &Scalar) -> Value {
    let (re, im) = coeff_parts(v);
    json!({ "re": coeff(re), "im": coeff(im) })
}

/// Terms of `s` with the exponent vector split into named blocks.
pub fn series(s: &TruncatedSeries, blocks: &[(&str, usize)]) -> Value {
    let nvars: usize = blocks.iter().map(|(_, k)| k).sum();
    let terms: Vec<Value> = s
        .terms()
        .map(|(k, v)| {
            let e = k.exponents(nvars);
            let mut obj = Map::new();
            let mut at = 0;
            for (name, len) in blocks {
                obj.insert(name.to_string(), json!(e[at..at + len]));
                at += len;
            }
            let (re, im) = coeff_parts(v);
            obj.insert("re".into(), coeff(re));
            obj.insert("im".into(), coeff(im));
            Value::Object(obj)
        })
        .collect();
    json!({ "order": s.order(), "terms": terms })
}

pub fn condition(c: &Condition) -> Value {
    json!({ "key": c.key(), "message": c.to_string() })
}

pub fn class_report(r: &ClassReport) -> Value {
    let ranks: Vec<Value> = r.ranks.iter().map(|e| json!({ "fields": e.fields, "rank": e.rank })).collect();
    let determinant = r.determinant.as_ref().map(|d| {
        json!({ "name": d.name, "reliable_order": d.reliable_order, "first_nonzero_degree": d.first_nonzero })
    });
    let samples: Vec<Value> = r
        .samples
        .iter()
        .map(|s| {
            json!({
                "z": s.z.iter().map(scalar).collect::<Vec<_>>(),
                "u": s.u.iter().map(scalar).collect::<Vec<_>>(),
                "failed": s.failed.iter().map(condition).collect::<Vec<_>>(),
            })
        })
        .collect();
    json!({
        "class": r.class.map(|t| t.name()),
        "n": r.n,
        "c": r.c,
        "order_used": r.order_used,
        "ranks": ranks,
        "levi_rank": r.levi_rank,
        "freeman_value": r.freeman_value.as_ref().map(scalar),
        "determinant": determinant,
        "failed": r.failed.iter().map(condition).collect::<Vec<_>>(),
        "samples": samples,
        "note": r.note,
    })
}

pub fn biholomorphism(h: &Biholomorphism) -> Value {
    let blocks = [("z", h.n()), ("w", h.c())];
    Value::Array(h.maps().iter().map(|s| series(s, &blocks)).collect())
}

pub fn trace(t: &NormalizationTrace) -> Value {
    let steps: Vec<Value> =
        t.steps.iter().map(|s| json!({ "description": s.description, "map": biholomorphism(&s.map) })).collect();
    json!({ "class": t.class.name(), "steps": steps })
}

pub fn normal_form(r: &NormalFormReport) -> Value {
    let witnesses: Vec<Value> = r.witnesses.iter().map(|(k, v)| json!({ "name": k, "value": scalar(v) })).collect();
    json!({
        "class": r.class.name(),
        "satisfied": r.satisfied,
        "order": r.order,
        "witnesses": witnesses,
        "violations": r.violations,
    })
}

/// Basis direction names `dz1.., dzbar1.., du1..`.
fn directions(n: usize, c: usize) -> Vec<String> {
    let one = |p: &str, k: usize, len: usize| if len == 1 { p.to_string() } else { format!("{p}{}", k + 1) };
    (0..n)
        .map(|k| one("dz", k, n))
        .chain((0..n).map(|k| one("dzbar", k, n)))
        .chain((0..c).map(|l| one("du", l, c)))
        .collect()
}

pub fn field(name: &str, x: &TangentFrameField) -> Value {
    let (n, c) = (x.n(), x.c());
    let blocks = [("z", n), ("zbar", n), ("u", c)];
    let coefficients: Map<String, Value> =
        directions(n, c).into_iter().zip(x.coeffs()).map(|(d, s)| (d, series(s, &blocks))).collect();
    json!({
        "name": name,
        "origin": eval_at_origin(x).iter().map(scalar).collect::<Vec<_>>(),
        "coefficients": coefficients,
    })
}

pub fn equations(m: &crforge_core::DefiningEquations) -> Value {
    serde_json::to_value(emit(m)).expect("documents serialize")
}

/// Indented `key: value` lines; scalars print as `re + im i`.
pub fn text(v: &Value) -> String {
    let mut out = String::new();
    write_text(v, 0, &mut out);
    out
}

fn inline(v: &Value) -> Option<String> {
    match v {
        Value::Null => Some("-".into()),
        Value::Bool(b) => Some(b.to_string()),
        Value::Number(x) => Some(x.to_string()),
        Value::String(s) => Some(s.clone()),
        Value::Array(a) if a.iter().all(|x| x.is_number() || x.is_string()) => {
            Some(format!("[{}]", a.iter().map(|x| inline(x).unwrap_or_default()).collect::<Vec<_>>().join(", ")))
        }
        Value::Array(a) if a.iter().all(is_scalar) => {
            Some(format!("[{}]", a.iter().map(|x| inline(x).unwrap_or_default()).collect::<Vec<_>>().join(", ")))
        }
        Value::Object(o) if is_scalar(v) => {
            let part = |k: &str| inline(&o[k]).unwrap_or_default();
            Some(format!("{} + {} i", part("re"), part("im")))
        }
        _ => None,
    }
}

fn is_scalar(v: &Value) -> bool {
    matches!(v, Value::Object(o) if o.len() == 2 && o.contains_key("re") && o.contains_key("im"))
}

fn write_text(v: &Value, depth: usize, out: &mut String) {
    let pad = "  ".repeat(depth);
    match v {
        Value::Object(o) => {
            for (k, x) in o {
                match inline(x) {
                    Some(s) => out.push_str(&format!("{pad}{k}: {s}\n")),
                    None => {
                        out.push_str(&format!("{pad}{k}:\n"));
                        write_text(x, depth + 1, out);
                    }
                }
            }
        }
        Value::Array(a) => {
            for x in a {
                match inline(x) {
                    Some(s) => out.push_str(&format!("{pad}- {s}\n")),
                    None => {
                        out.push_str(&format!("{pad}-\n"));
                        write_text(x, depth + 1, out);
                    }
                }
            }
        }
        other => out.push_str(&format!("{pad}{}\n", inline(other).unwrap_or_default())),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crforge_core::Mode;

    #[test]
    fn exact_scalars_are_strings() {
        assert_eq!(scalar(&Scalar::ratio(-1, 3, Mode::Exact)), json!({ "re": "-1/3", "im": "0" }));
        assert_eq!(scalar(&Scalar::float(0.5, -2.0)), json!({ "re": 0.5, "im": -2.0 }));
    }

    #[test]
    fn text_inlines_scalars() {
        let v = json!({ "class": "I", "value": { "re": "1", "im": "0" }, "failed": [] });
        assert_eq!(text(&v), "class: I\nvalue: 1 + 0 i\nfailed: []\n");
    }
}
