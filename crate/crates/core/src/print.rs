//! Plain, LaTeX and JSON renderings of expressions.
//!
//! The plain form re-parses to the same [`Expression`]. The JSON form is
//!
//! ```text
//! { "terms": [ { "scalar": {"const": "p/q", "unknowns": {"k": "p/q", ...}},
//!                "correlators": [ {"genus": g, "insertions": [{"label": "...", "psi": n}, ...]} ] } ] }
//! ```

use std::collections::BTreeMap;
use std::fmt::Write;

use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::expr::Expression;
use crate::scalar::{parse_rational, Rational, Scalar, Unknown};
use crate::term::{Correlator, Insertion, InvalidTerm, Label, Term};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    #[default]
    Plain,
    Latex,
    Json,
}

pub fn print(e: &Expression, format: Format) -> String {
    match format {
        Format::Plain => plain(e),
        Format::Latex => latex(e),
        Format::Json => json(e),
    }
}

/// Sign-aware joining shared by the plain and LaTeX renderers.
trait Style {
    fn rational(q: &Rational) -> String;
    fn unknown(k: Unknown) -> String;
    fn coefficient_times_unknown(q: &Rational, k: Unknown) -> String;
    fn wrap_form(inner: &str) -> String;
    fn times(scalar: &str) -> String;
    fn term(t: &Term) -> String;
}

struct Plain;
struct Latex;

impl Style for Plain {
    fn rational(q: &Rational) -> String {
        q.to_string()
    }

    fn unknown(k: Unknown) -> String {
        k.to_string()
    }

    fn coefficient_times_unknown(q: &Rational, k: Unknown) -> String {
        format!("{q}*{k}")
    }

    fn wrap_form(inner: &str) -> String {
        format!("({inner})")
    }

    fn times(scalar: &str) -> String {
        format!("{scalar}*")
    }

    fn term(t: &Term) -> String {
        t.to_string()
    }
}

impl Style for Latex {
    fn rational(q: &Rational) -> String {
        if q.denom().is_one() {
            q.numer().to_string()
        } else {
            format!("\\frac{{{}}}{{{}}}", q.numer(), q.denom())
        }
    }

    fn unknown(k: Unknown) -> String {
        format!("c_{{{}}}", k.index())
    }

    fn coefficient_times_unknown(q: &Rational, k: Unknown) -> String {
        format!("{} {}", Self::rational(q), Self::unknown(k))
    }

    fn wrap_form(inner: &str) -> String {
        format!("\\left({inner}\\right)")
    }

    fn times(scalar: &str) -> String {
        format!("{scalar} ")
    }

    fn term(t: &Term) -> String {
        latex_term(t)
    }
}

/// Unsigned rendering of `|q|·c_k` (or `|q|` when `k` is absent).
fn magnitude<S: Style>(q: &Rational, k: Option<Unknown>) -> String {
    let abs = q.abs();
    match k {
        None => S::rational(&abs),
        Some(k) if abs.is_one() => S::unknown(k),
        Some(k) => S::coefficient_times_unknown(&abs, k),
    }
}

fn form<S: Style>(s: &Scalar) -> String {
    let items = (!s.constant().is_zero())
        .then(|| (s.constant(), None))
        .into_iter()
        .chain(s.unknowns().iter().map(|(k, q)| (q, Some(*k))));
    let mut out = String::new();
    for (n, (q, k)) in items.enumerate() {
        match (n, q.is_negative()) {
            (0, true) => out.push('-'),
            (0, false) => {}
            (_, true) => out.push_str(" - "),
            (_, false) => out.push_str(" + "),
        }
        out.push_str(&magnitude::<S>(q, k));
    }
    if out.is_empty() {
        out.push('0');
    }
    out
}

fn render<S: Style>(e: &Expression) -> String {
    if e.is_zero() {
        return "0".to_string();
    }
    let mut out = String::new();
    for (n, (t, s)) in e.iter().enumerate() {
        let single = match (s.as_rational(), s.unknowns().iter().next()) {
            (Some(q), _) => Some((q.clone(), None)),
            (None, Some((k, q))) if s.unknowns().len() == 1 && s.constant().is_zero() => {
                (q.abs().is_one()).then(|| (q.clone(), Some(*k)))
            }
            _ => None,
        };
        match single {
            Some((q, k)) => {
                let negative = q.is_negative();
                match (n, negative) {
                    (0, true) => out.push('-'),
                    (0, false) => {}
                    (_, true) => out.push_str(" - "),
                    (_, false) => out.push_str(" + "),
                }
                if k.is_some() || !q.abs().is_one() {
                    out.push_str(&S::times(&magnitude::<S>(&q, k)));
                }
            }
            None => {
                if n > 0 {
                    out.push_str(" + ");
                }
                out.push_str(&S::times(&S::wrap_form(&form::<S>(s))));
            }
        }
        out.push_str(&S::term(t));
    }
    out
}

pub fn plain(e: &Expression) -> String {
    render::<Plain>(e)
}

pub fn latex(e: &Expression) -> String {
    render::<Latex>(e)
}

/// A linear form in plain text, e.g. `c2 + c4` or `-1/80*c3 - c8`.
pub fn plain_scalar(s: &Scalar) -> String {
    form::<Plain>(s)
}

pub fn latex_scalar(s: &Scalar) -> String {
    form::<Latex>(s)
}

fn latex_script(n: u32) -> String {
    if n < 10 {
        n.to_string()
    } else {
        format!("{{{n}}}")
    }
}

pub fn latex_term(t: &Term) -> String {
    let mut out = String::new();
    for (n, c) in t.correlators().iter().enumerate() {
        if n > 0 {
            out.push(' ');
        }
        out.push_str("\\<");
        for ins in &c.insertions {
            match &ins.label {
                Label::Dummy(name) => write!(out, " \\partial^{{{}}}", name.as_str()),
                label => write!(out, " \\partial^{label}"),
            }
            .expect("writing to a String");
            if ins.psi > 0 {
                write!(out, "_{}", latex_script(ins.psi)).expect("writing to a String");
            }
        }
        out.push_str(" \\>");
        if c.genus > 0 {
            write!(out, "_{}", latex_script(c.genus)).expect("writing to a String");
        }
    }
    out
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct JsonScalar {
    #[serde(rename = "const")]
    pub constant: String,
    #[serde(default)]
    pub unknowns: BTreeMap<u32, String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct JsonInsertion {
    pub label: String,
    pub psi: u32,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct JsonCorrelator {
    pub genus: u32,
    pub insertions: Vec<JsonInsertion>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct JsonTerm {
    pub scalar: JsonScalar,
    pub correlators: Vec<JsonCorrelator>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct JsonExpression {
    pub terms: Vec<JsonTerm>,
}

#[derive(Debug, Error)]
pub enum JsonError {
    #[error("malformed JSON: {0}")]
    Syntax(#[from] serde_json::Error),
    #[error("malformed rational {0:?}")]
    Rational(String),
    #[error("unknown c{0} is outside c1..c30")]
    Unknown(u32),
    #[error("malformed label {0:?}")]
    Label(String),
    #[error(transparent)]
    Term(#[from] InvalidTerm),
}

impl From<&Scalar> for JsonScalar {
    fn from(s: &Scalar) -> JsonScalar {
        JsonScalar {
            constant: s.constant().to_string(),
            unknowns: s
                .unknowns()
                .iter()
                .map(|(k, q)| (k.index(), q.to_string()))
                .collect(),
        }
    }
}

impl TryFrom<&JsonScalar> for Scalar {
    type Error = JsonError;

    fn try_from(j: &JsonScalar) -> Result<Scalar, JsonError> {
        let rat = |s: &String| parse_rational(s).ok_or_else(|| JsonError::Rational(s.clone()));
        let mut out = Scalar::from(rat(&j.constant)?);
        for (k, q) in &j.unknowns {
            out.add_unknown(Unknown::new(*k).ok_or(JsonError::Unknown(*k))?, rat(q)?);
        }
        Ok(out)
    }
}

impl From<&Term> for Vec<JsonCorrelator> {
    fn from(t: &Term) -> Self {
        t.correlators()
            .iter()
            .map(|c| JsonCorrelator {
                genus: c.genus,
                insertions: c
                    .insertions
                    .iter()
                    .map(|ins| JsonInsertion {
                        label: ins.label.to_string(),
                        psi: ins.psi,
                    })
                    .collect(),
            })
            .collect()
    }
}

fn label_from_json(text: &str) -> Result<Label, JsonError> {
    let mut chars = text.chars();
    let well_formed = chars.next().is_some_and(|c| c.is_ascii_lowercase())
        && chars.all(|c| c.is_ascii_lowercase() || c.is_ascii_digit());
    if !well_formed {
        return Err(JsonError::Label(text.to_string()));
    }
    Ok(match text {
        "x" => Label::External,
        "i" => Label::HalfEdgeI,
        "j" => Label::HalfEdgeJ,
        _ => Label::dummy(text),
    })
}

/// Builds a validated (not canonicalized) term from its JSON brackets.
pub fn term_from_json(correlators: &[JsonCorrelator]) -> Result<Term, JsonError> {
    let mut out = Vec::with_capacity(correlators.len());
    for c in correlators {
        let insertions = c
            .insertions
            .iter()
            .map(|ins| Ok(Insertion::new(label_from_json(&ins.label)?, ins.psi)))
            .collect::<Result<Vec<_>, JsonError>>()?;
        out.push(Correlator::new(c.genus, insertions));
    }
    let t = Term::new(out);
    t.check()?;
    Ok(t)
}

pub fn to_json_value(e: &Expression) -> JsonExpression {
    JsonExpression {
        terms: e
            .iter()
            .map(|(t, s)| JsonTerm {
                scalar: s.into(),
                correlators: t.into(),
            })
            .collect(),
    }
}

pub fn json(e: &Expression) -> String {
    serde_json::to_string_pretty(&to_json_value(e)).expect("serializable")
}

pub fn from_json(text: &str) -> Result<Expression, JsonError> {
    let j: JsonExpression = serde_json::from_str(text)?;
    let mut out = Expression::zero();
    for term in &j.terms {
        let scalar = Scalar::try_from(&term.scalar)?;
        out.add_term(scalar, &term_from_json(&term.correlators)?)?;
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parse::parse_expression;

    fn roundtrip(src: &str) -> String {
        let e = parse_expression(src).unwrap();
        let out = plain(&e);
        assert_eq!(parse_expression(&out).unwrap(), e, "{out}");
        out
    }

    #[test]
    fn plain_top_stratum() {
        assert_eq!(roundtrip("<x^3>_3"), "<x^3>_3");
    }

    #[test]
    fn plain_signs_and_forms() {
        assert_eq!(roundtrip("-<x>_3"), "-<x>_3");
        assert_eq!(
            roundtrip("-5/72*<x>_3 - <x a a>"),
            "-<x d1 d1> - 5/72*<x>_3"
        );
        assert_eq!(
            roundtrip("(c2 - 1/24*c6)*<x a a> - c3*<x>_1 + (2*c4)*<x^1>"),
            "(2*c4)*<x^1> + (c2 - 1/24*c6)*<x d1 d1> - c3*<x>_1"
        );
        assert_eq!(roundtrip("(1/2 - c1)*<x>"), "(1/2 - c1)*<x>");
        assert_eq!(roundtrip("0"), "0");
    }

    #[test]
    fn latex_stratum_five() {
        let e = parse_expression("<x mu nu><mu^1 nu>_2").unwrap();
        assert_eq!(
            latex(&e),
            "\\< \\partial^x \\partial^{d1} \\partial^{d2} \\> \\< \\partial^{d1} \\partial^{d2}_1 \\>_2"
        );
    }

    #[test]
    fn latex_coefficients() {
        let e = parse_expression("5/72*<x^3>_3 - (c2 + 3*c4)*<x>_12").unwrap();
        assert_eq!(
            latex(&e),
            "\\frac{5}{72} \\< \\partial^x_3 \\>_3 + \\left(-c_{2} - 3 c_{4}\\right) \\< \\partial^x \\>_{12}"
        );
    }

    #[test]
    fn json_schema_shape() {
        let e = parse_expression("(1/2 + c10 - c2)*<x i^1>_1").unwrap();
        let v: serde_json::Value = serde_json::from_str(&json(&e)).unwrap();
        assert_eq!(
            v,
            serde_json::json!({"terms": [{
                "scalar": {"const": "1/2", "unknowns": {"2": "-1", "10": "1"}},
                "correlators": [{"genus": 1, "insertions": [
                    {"label": "x", "psi": 0}, {"label": "i", "psi": 1}
                ]}]
            }]})
        );
        assert_eq!(from_json(&json(&e)).unwrap(), e);
    }

    #[test]
    fn json_rejects_bad_data() {
        let bad_label = r#"{"terms":[{"scalar":{"const":"1"},"correlators":[{"genus":0,"insertions":[{"label":"Mu","psi":0}]}]}]}"#;
        assert!(matches!(from_json(bad_label), Err(JsonError::Label(_))));
        let free = r#"{"terms":[{"scalar":{"const":"1"},"correlators":[{"genus":0,"insertions":[{"label":"mu","psi":0}]}]}]}"#;
        assert!(matches!(from_json(free), Err(JsonError::Term(_))));
        let bad_q = r#"{"terms":[{"scalar":{"const":"1/0"},"correlators":[]}]}"#;
        assert!(matches!(from_json(bad_q), Err(JsonError::Rational(_))));
    }
}
