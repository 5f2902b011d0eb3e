//! The JSON germ document: parsing with located errors and canonical emission.
//!
//! Canonical documents list every term with both `re` and `im`, in graded
//! order (total degree, then exponent vectors `(z, zbar, u)` ascending).
//! Exact coefficients are `"p"` or `"p/q"` strings, float ones are numbers.

use std::collections::BTreeSet;
use std::fmt;

use crforge_core::manifold::ManifoldError;
use crforge_core::normalize::default_order;
use crforge_core::scalar::{parse_rational, rational_string};
use crforge_core::series::MultiIndex;
use crforge_core::{DefiningEquations, Mode, Scalar, Signature, TruncatedSeries};
use serde::{Deserialize, Serialize};
use serde_json::Number;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum ModeName {
    Exact,
    Float,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Document {
    pub n: usize,
    pub c: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub order: Option<i32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mode: Option<ModeName>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tolerance: Option<f64>,
    pub phi: Vec<Component>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Component {
    pub terms: Vec<Term>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Term {
    pub z: Vec<u32>,
    pub zbar: Vec<u32>,
    pub u: Vec<u32>,
    pub re: Coeff,
    #[serde(default = "Coeff::zero")]
    pub im: Coeff,
}

/// A coefficient part: a decimal or `p/q` string, or a JSON number.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Coeff {
    Text(String),
    Number(Number),
}

impl Coeff {
    fn zero() -> Coeff {
        Coeff::Number(Number::from(0))
    }
}

/// Command-line and environment settings that override the document.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Overrides {
    pub order: Option<i32>,
    pub mode: Option<ModeName>,
    pub tol: Option<f64>,
    /// Order used when neither the flag nor the document gives one.
    pub default_order: Option<i32>,
}

/// A parse or validation failure at a document location.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DocumentError {
    pub location: String,
    pub message: String,
}

impl DocumentError {
    fn at(location: impl Into<String>, message: impl Into<String>) -> DocumentError {
        DocumentError { location: location.into(), message: message.into() }
    }
}

impl fmt::Display for DocumentError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.location, self.message)
    }
}

impl std::error::Error for DocumentError {}

/// Parses and validates a document, including the reality symmetry.
pub fn parse(text: &str, ov: &Overrides) -> Result<DefiningEquations, DocumentError> {
    parse_with(text, ov, true)
}

/// As [`parse`], optionally leaving reality unchecked.
pub fn parse_with(text: &str, ov: &Overrides, require_reality: bool) -> Result<DefiningEquations, DocumentError> {
    let doc: Document = serde_json::from_str(text)
        .map_err(|e| DocumentError::at(format!("line {} column {}", e.line(), e.column()), e.to_string()))?;
    to_equations(&doc, ov, require_reality)
}

pub fn to_equations(doc: &Document, ov: &Overrides, require_reality: bool) -> Result<DefiningEquations, DocumentError> {
    let (n, c) = (doc.n, doc.c);
    if n == 0 || c == 0 || 2 * n + c > 5 {
        return Err(DocumentError::at("n, c", format!("(n, c) = ({n}, {c}) violates 2n + c <= 5 with n, c >= 1")));
    }
    if doc.phi.len() != c {
        return Err(DocumentError::at("phi", format!("expected {c} components, got {}", doc.phi.len())));
    }
    let order = ov.order.or(doc.order).or(ov.default_order).unwrap_or_else(|| default_order(n, c));
    if order < 2 {
        return Err(DocumentError::at("order", format!("order {order} is below 2")));
    }
    let mode = match ov.mode.or(doc.mode).unwrap_or(ModeName::Exact) {
        ModeName::Exact => Mode::Exact,
        ModeName::Float => {
            let tol = ov.tol.or(doc.tolerance).unwrap_or(crforge_core::scalar::DEFAULT_TOL);
            if !(tol > 0.0 && tol.is_finite()) {
                return Err(DocumentError::at("tolerance", format!("tolerance {tol} is not a positive number")));
            }
            Mode::Float { tol }
        }
    };
    let sig = Signature::real(n, c);
    let mut phi = Vec::with_capacity(c);
    for (j, comp) in doc.phi.iter().enumerate() {
        let mut seen = BTreeSet::new();
        let mut terms = Vec::with_capacity(comp.terms.len());
        for (t, term) in comp.terms.iter().enumerate() {
            let loc = |field: &str| format!("phi[{j}].terms[{t}].{field}");
            for (field, v, len) in [("z", &term.z, n), ("zbar", &term.zbar, n), ("u", &term.u, c)] {
                if v.len() != len {
                    return Err(DocumentError::at(loc(field), format!("length {} but expected {len}", v.len())));
                }
            }
            let exps: Vec<u32> = term.z.iter().chain(&term.zbar).chain(&term.u).copied().collect();
            if !seen.insert(exps.clone()) {
                return Err(DocumentError::at(loc("z"), "repeated monomial"));
            }
            let re = coeff_value(&term.re, mode).map_err(|m| DocumentError::at(loc("re"), m))?;
            let im = coeff_value(&term.im, mode).map_err(|m| DocumentError::at(loc("im"), m))?;
            let value = &re + &(&Scalar::i(mode) * &im);
            terms.push((MultiIndex::new(&exps), value));
        }
        phi.push(TruncatedSeries::from_terms(sig.clone(), order, mode, terms));
    }
    let built = if require_reality { DefiningEquations::new(n, c, phi) } else { DefiningEquations::from_raw(n, c, phi) };
    built.map_err(|e| match e {
        ManifoldError::ConstantTerm { j } => DocumentError::at(format!("phi[{j}]"), "nonzero constant term"),
        ManifoldError::Reality { j, exponents } => DocumentError::at(
            format!("phi[{j}]"),
            format!(
                "not real: the coefficient of {} is not the conjugate of its barred partner",
                monomial(&exponents, n, c)
            ),
        ),
        other => DocumentError::at("phi", other.to_string()),
    })
}

/// `z=[..] zbar=[..] u=[..]` for an exponent vector over `(z, z̄, u)`.
pub fn monomial(e: &[u32], n: usize, c: usize) -> String {
    format!("z={:?} zbar={:?} u={:?}", &e[..n], &e[n..2 * n], &e[2 * n..2 * n + c])
}

fn coeff_value(v: &Coeff, mode: Mode) -> Result<Scalar, String> {
    let text = match v {
        Coeff::Text(s) => s.clone(),
        Coeff::Number(x) => x.to_string(),
    };
    // Float parts go through `f64` parsing so emitted numbers read back bit-exactly.
    if let (Mode::Float { .. }, Ok(x)) = (mode, text.trim().parse::<f64>()) {
        return if x.is_finite() { Ok(Scalar::float(x, 0.0)) } else { Err(format!("{text:?} is not finite")) };
    }
    match parse_rational(&text) {
        Some(q) => Ok(Scalar::from_rational(q).to_mode(mode)),
        None if mode.is_exact() && text.trim().parse::<f64>().is_ok() => {
            Err(format!("{text:?} is not a decimal or p/q rational; exact mode needs one"))
        }
        None => Err(format!("{text:?} is not a number")),
    }
}

/// Canonical document of `m`.
pub fn emit(m: &DefiningEquations) -> Document {
    let (n, c) = (m.n(), m.c());
    let mode = m.mode();
    let phi = m
        .phi()
        .iter()
        .map(|s| Component {
            terms: s
                .terms()
                .map(|(k, v)| {
                    let e = k.exponents(2 * n + c);
                    let (re, im) = coeff_parts(v);
                    Term { z: e[..n].to_vec(), zbar: e[n..2 * n].to_vec(), u: e[2 * n..].to_vec(), re, im }
                })
                .collect(),
        })
        .collect();
    Document {
        n,
        c,
        order: Some(m.order()),
        mode: Some(if mode.is_exact() { ModeName::Exact } else { ModeName::Float }),
        tolerance: if mode.is_exact() { None } else { Some(mode.tol()) },
        phi,
    }
}

/// Exact parts as strings, float parts as numbers.
pub fn coeff_parts(v: &Scalar) -> (Coeff, Coeff) {
    match (v.exact_re(), v.exact_im()) {
        (Some(re), Some(im)) => (Coeff::Text(rational_string(re)), Coeff::Text(rational_string(im))),
        _ => {
            let z = v.to_complex64();
            let num = |x: f64| Number::from_f64(x).map_or_else(|| Coeff::Text(x.to_string()), Coeff::Number);
            (num(z.re), num(z.im))
        }
    }
}

pub fn to_json(doc: &Document) -> String {
    let mut s = serde_json::to_string_pretty(doc).expect("documents serialize");
    s.push('\n');
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    const QUADRIC: &str = r#"{"n": 1, "c": 1, "phi": [{"terms": [{"z": [1], "zbar": [1], "u": [0], "re": "1/3"}]}]}"#;

    #[test]
    fn exact_rational_is_kept() {
        let m = parse(QUADRIC, &Overrides::default()).unwrap();
        assert_eq!(m.order(), 6);
        assert_eq!(m.phi()[0].coeff_of(&[1, 1, 0]), Scalar::ratio(1, 3, Mode::Exact));
    }

    #[test]
    fn overrides_take_precedence() {
        let ov = Overrides { order: Some(4), mode: Some(ModeName::Float), tol: Some(1e-6), default_order: Some(9) };
        let m = parse(QUADRIC, &ov).unwrap();
        assert_eq!((m.order(), m.mode()), (4, Mode::Float { tol: 1e-6 }));
        let m = parse(QUADRIC, &Overrides { default_order: Some(9), ..Overrides::default() }).unwrap();
        assert_eq!(m.order(), 9);
    }

    #[test]
    fn decimal_numbers_are_exact() {
        let doc = r#"{"n": 1, "c": 1, "phi": [{"terms": [{"z": [1], "zbar": [1], "u": [0], "re": 0.25, "im": 0}]}]}"#;
        let m = parse(doc, &Overrides::default()).unwrap();
        assert_eq!(m.phi()[0].coeff_of(&[1, 1, 0]), Scalar::ratio(1, 4, Mode::Exact));
    }

    #[test]
    fn errors_are_located() {
        let bad_len = r#"{"n": 1, "c": 1, "phi": [{"terms": [{"z": [1, 0], "zbar": [1], "u": [0], "re": "1"}]}]}"#;
        assert_eq!(parse(bad_len, &Overrides::default()).unwrap_err().location, "phi[0].terms[0].z");
        let unreal = r#"{"n": 1, "c": 1, "phi": [{"terms": [{"z": [2], "zbar": [0], "u": [0], "re": "1"}]}]}"#;
        let e = parse(unreal, &Overrides::default()).unwrap_err();
        assert_eq!(e.location, "phi[0]");
        assert!(e.message.contains("z=[2] zbar=[0] u=[0]") || e.message.contains("z=[0] zbar=[2] u=[0]"), "{e}");
        assert!(parse_with(unreal, &Overrides::default(), false).is_ok());
        let bound = r#"{"n": 2, "c": 2, "phi": [{"terms": []}, {"terms": []}]}"#;
        assert_eq!(parse(bound, &Overrides::default()).unwrap_err().location, "n, c");
        let garbage = "{\"n\": 1,\n \"c\": }";
        assert!(parse(garbage, &Overrides::default()).unwrap_err().location.starts_with("line 2"));
    }

    #[test]
    fn emission_is_byte_stable() {
        let m = parse(QUADRIC, &Overrides::default()).unwrap();
        let once = to_json(&emit(&m));
        let twice = to_json(&emit(&parse(&once, &Overrides::default()).unwrap()));
        assert_eq!(once, twice);
        let f = parse(QUADRIC, &Overrides { mode: Some(ModeName::Float), ..Overrides::default() }).unwrap();
        let once = to_json(&emit(&f));
        assert_eq!(once, to_json(&emit(&parse(&once, &Overrides::default()).unwrap())));
    }
}
