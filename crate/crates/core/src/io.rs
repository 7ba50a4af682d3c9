//! JSON formats for polynomials and matrix-coefficient polynomials.
//!
//! Polynomials:
//!
//! ```json
//! {"d": 2, "basis": "monomial", "terms": [{"word": [1, 2], "re": "3/2", "im": "0"}]}
//! ```
//!
//! Exact coefficients are rational strings (`"3/2"`, `"-4"`), float
//! coefficients are JSON numbers; one file never mixes the two. A file with
//! no terms is read as the exact zero polynomial. Output is canonical: terms
//! in length-then-lexicographic order, rationals in lowest terms, floats in
//! shortest round-trip form.
//!
//! Matrix-coefficient polynomials:
//!
//! ```json
//! {"d": 2, "n": 1, "k": 1, "terms": [{"word": [1], "matrix": [[{"re": 1.0, "im": 0.0}]]}]}
//! ```

use std::path::Path;
use std::str::FromStr;

use num_complex::Complex64;
use num_rational::BigRational;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::chebyshev::{cheb_to_mono, mono_to_cheb, ChebVector};
use crate::error::{Error, Result};
use crate::ncpoly::NcPoly;
use crate::numerics::DenseMatrix;
use crate::opval::MatPoly;
use crate::scalar::{CoeffKind, Exact, Float, Scalar};
use crate::word::Word;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Basis {
    Monomial,
    Chebyshev,
}

impl FromStr for Basis {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "mono" | "monomial" => Ok(Basis::Monomial),
            "cheb" | "chebyshev" => Ok(Basis::Chebyshev),
            _ => Err(Error::invalid(format!("unknown basis {s:?}"))),
        }
    }
}

/// A polynomial in one of the two bases.
#[derive(Clone, Debug, PartialEq)]
pub enum Element<C: Scalar> {
    Mono(NcPoly<C>),
    Cheb(ChebVector<C>),
}

impl<C: Scalar> Element<C> {
    pub fn basis(&self) -> Basis {
        match self {
            Element::Mono(_) => Basis::Monomial,
            Element::Cheb(_) => Basis::Chebyshev,
        }
    }

    pub fn d(&self) -> usize {
        match self {
            Element::Mono(p) => p.d(),
            Element::Cheb(v) => v.d(),
        }
    }

    pub fn to_cheb(&self) -> ChebVector<C> {
        match self {
            Element::Mono(p) => mono_to_cheb(p),
            Element::Cheb(v) => v.clone(),
        }
    }

    pub fn to_mono(&self) -> NcPoly<C> {
        match self {
            Element::Mono(p) => p.clone(),
            Element::Cheb(v) => cheb_to_mono(v),
        }
    }

    pub fn convert(&self, to: Basis) -> Element<C> {
        match to {
            Basis::Monomial => Element::Mono(self.to_mono()),
            Basis::Chebyshev => Element::Cheb(self.to_cheb()),
        }
    }

    fn terms(&self) -> Vec<(&Word, &C)> {
        match self {
            Element::Mono(p) => p.terms().collect(),
            Element::Cheb(v) => v.terms().collect(),
        }
    }
}

/// A polynomial of either coefficient kind.
#[derive(Clone, Debug, PartialEq)]
pub enum AnyElement {
    Exact(Element<Exact>),
    Float(Element<Float>),
}

impl AnyElement {
    pub fn kind(&self) -> CoeffKind {
        match self {
            AnyElement::Exact(_) => CoeffKind::Exact,
            AnyElement::Float(_) => CoeffKind::Float,
        }
    }

    pub fn basis(&self) -> Basis {
        match self {
            AnyElement::Exact(e) => e.basis(),
            AnyElement::Float(e) => e.basis(),
        }
    }

    pub fn convert(&self, to: Basis) -> AnyElement {
        match self {
            AnyElement::Exact(e) => AnyElement::Exact(e.convert(to)),
            AnyElement::Float(e) => AnyElement::Float(e.convert(to)),
        }
    }

    /// The polynomial in the Chebyshev basis, with float coefficients.
    pub fn to_float_cheb(&self) -> ChebVector<Float> {
        match self {
            AnyElement::Exact(e) => {
                let v = e.to_cheb();
                ChebVector::from_terms(v.d(), v.terms().map(|(w, c)| (w.clone(), c.to_c64())))
                    .expect("same d and words")
            }
            AnyElement::Float(e) => e.to_cheb(),
        }
    }

    pub fn to_json(&self) -> String {
        match self {
            AnyElement::Exact(e) => element_to_json(e),
            AnyElement::Float(e) => element_to_json(e),
        }
    }
}

/// Coefficient kinds that have a JSON representation.
pub trait JsonCoeff: Scalar {
    fn json_parts(&self) -> (Value, Value);
}

impl JsonCoeff for Exact {
    fn json_parts(&self) -> (Value, Value) {
        (Value::String(self.re.to_string()), Value::String(self.im.to_string()))
    }
}

impl JsonCoeff for Float {
    fn json_parts(&self) -> (Value, Value) {
        (float_value(self.re), float_value(self.im))
    }
}

fn float_value(x: f64) -> Value {
    serde_json::Number::from_f64(x).map_or(Value::Null, Value::Number)
}

/// Canonical JSON text, one term per line.
pub fn element_to_json<C: JsonCoeff>(e: &Element<C>) -> String {
    let basis = match e.basis() {
        Basis::Monomial => "monomial",
        Basis::Chebyshev => "chebyshev",
    };
    let terms: Vec<String> = e
        .terms()
        .into_iter()
        .map(|(w, c)| {
            let (re, im) = c.json_parts();
            format!(
                "    {{\"word\": {}, \"re\": {}, \"im\": {}}}",
                serde_json::to_string(w).expect("word serializes"),
                re,
                im
            )
        })
        .collect();
    if terms.is_empty() {
        format!("{{\n  \"d\": {},\n  \"basis\": \"{basis}\",\n  \"terms\": []\n}}\n", e.d())
    } else {
        format!(
            "{{\n  \"d\": {},\n  \"basis\": \"{basis}\",\n  \"terms\": [\n{}\n  ]\n}}\n",
            e.d(),
            terms.join(",\n")
        )
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawPoly {
    d: usize,
    basis: Basis,
    terms: Vec<RawTerm>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawTerm {
    word: Vec<u32>,
    re: RawNumber,
    #[serde(default)]
    im: Option<RawNumber>,
}

#[derive(Deserialize)]
#[serde(untagged)]
enum RawNumber {
    Rational(String),
    Float(f64),
}

impl RawNumber {
    fn kind(&self) -> CoeffKind {
        match self {
            RawNumber::Rational(_) => CoeffKind::Exact,
            RawNumber::Float(_) => CoeffKind::Float,
        }
    }
}

fn parse_rational(s: &str) -> Result<BigRational> {
    let t = s.trim();
    if t.is_empty() || t.contains(['.', 'e', 'E']) {
        return Err(Error::invalid(format!(
            "exact coefficient {s:?} must be an integer or a fraction p/q"
        )));
    }
    BigRational::from_str(t).map_err(|e| Error::invalid(format!("bad rational {s:?}: {e}")))
}

/// Parses a polynomial file.
pub fn parse_element(text: &str) -> Result<AnyElement> {
    let raw: RawPoly = serde_json::from_str(text)?;
    let kind = raw
        .terms
        .first()
        .map_or(CoeffKind::Exact, |t| t.re.kind());
    for (n, t) in raw.terms.iter().enumerate() {
        let im_kind = t.im.as_ref().map_or(kind, RawNumber::kind);
        if t.re.kind() != kind || im_kind != kind {
            return Err(Error::invalid(format!(
                "term {n} mixes exact (string) and float (number) coefficients"
            )));
        }
    }
    let words = raw
        .terms
        .iter()
        .map(|t| Word::checked(raw.d, t.word.clone()))
        .collect::<Result<Vec<_>>>()?;
    match kind {
        CoeffKind::Exact => {
            let coeffs = raw
                .terms
                .iter()
                .map(|t| {
                    let part = |r: &RawNumber| match r {
                        RawNumber::Rational(s) => parse_rational(s),
                        RawNumber::Float(_) => unreachable!("kind checked"),
                    };
                    let re = part(&t.re)?;
                    let im = match &t.im {
                        Some(r) => part(r)?,
                        None => num_traits::Zero::zero(),
                    };
                    Ok(Exact::new(re, im))
                })
                .collect::<Result<Vec<_>>>()?;
            Ok(AnyElement::Exact(build(raw.d, raw.basis, words.into_iter().zip(coeffs))?))
        }
        CoeffKind::Float => {
            let coeffs = raw.terms.iter().map(|t| {
                let part = |r: &RawNumber| match r {
                    RawNumber::Float(x) => *x,
                    RawNumber::Rational(_) => unreachable!("kind checked"),
                };
                Float::new(part(&t.re), t.im.as_ref().map_or(0.0, part))
            });
            Ok(AnyElement::Float(build(raw.d, raw.basis, words.into_iter().zip(coeffs))?))
        }
    }
}

fn build<C: Scalar>(d: usize, basis: Basis, terms: impl Iterator<Item = (Word, C)>) -> Result<Element<C>> {
    Ok(match basis {
        Basis::Monomial => Element::Mono(NcPoly::from_terms(d, terms)?),
        Basis::Chebyshev => Element::Cheb(ChebVector::from_terms(d, terms)?),
    })
}

pub fn read_element(path: &Path) -> Result<AnyElement> {
    parse_element(&read_text(path)?)
}

fn read_text(path: &Path) -> Result<String> {
    std::fs::read_to_string(path)
        .map_err(|e| Error::invalid(format!("cannot read {}: {e}", path.display())))
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawEntry {
    re: f64,
    #[serde(default)]
    im: f64,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawMatTerm {
    word: Vec<u32>,
    matrix: Vec<Vec<RawEntry>>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawMatPoly {
    d: usize,
    n: usize,
    k: usize,
    terms: Vec<RawMatTerm>,
}

pub fn parse_matpoly(text: &str) -> Result<MatPoly> {
    let raw: RawMatPoly = serde_json::from_str(text)?;
    let terms = raw
        .terms
        .into_iter()
        .map(|t| {
            let word = Word::checked(raw.d, t.word)?;
            if t.matrix.len() != raw.k || t.matrix.iter().any(|r| r.len() != raw.k) {
                return Err(Error::invalid(format!("coefficient of {word} is not {0}x{0}", raw.k)));
            }
            let rows = t
                .matrix
                .into_iter()
                .map(|r| r.into_iter().map(|e| Complex64::new(e.re, e.im)).collect())
                .collect();
            Ok((word, DenseMatrix::from_rows(rows)?))
        })
        .collect::<Result<Vec<_>>>()?;
    MatPoly::new(raw.d, raw.n, raw.k, terms)
}

pub fn read_matpoly(path: &Path) -> Result<MatPoly> {
    parse_matpoly(&read_text(path)?)
}

pub fn matpoly_to_json(p: &MatPoly) -> String {
    let raw = RawMatPoly {
        d: p.d(),
        n: p.degree(),
        k: p.k(),
        terms: p
            .coeffs()
            .iter()
            .map(|(w, m)| RawMatTerm {
                word: w.letters().to_vec(),
                matrix: (0..m.rows())
                    .map(|r| {
                        (0..m.cols())
                            .map(|c| RawEntry {
                                re: m.get(r, c).re,
                                im: m.get(r, c).im,
                            })
                            .collect()
                    })
                    .collect(),
            })
            .collect(),
    };
    let mut s = serde_json::to_string_pretty(&raw).expect("matrix polynomial serializes");
    s.push('\n');
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::exact_ratio;

    #[test]
    fn exact_round_trip_is_canonical() {
        let text = r#"{"d": 2, "basis": "monomial", "terms": [
            {"word": [2], "re": "6/4", "im": "0"},
            {"word": [1, 2], "re": "3/2", "im": "-1"},
            {"word": [], "re": "7"}
        ]}"#;
        let e = parse_element(text).unwrap();
        assert_eq!(e.kind(), CoeffKind::Exact);
        let out = e.to_json();
        let expected = "{\n  \"d\": 2,\n  \"basis\": \"monomial\",\n  \"terms\": [\n    {\"word\": [], \"re\": \"7\", \"im\": \"0\"},\n    {\"word\": [2], \"re\": \"3/2\", \"im\": \"0\"},\n    {\"word\": [1,2], \"re\": \"3/2\", \"im\": \"-1\"}\n  ]\n}\n";
        assert_eq!(out, expected);
        assert_eq!(parse_element(&out).unwrap().to_json(), out);
        let AnyElement::Exact(Element::Mono(p)) = &e else { panic!() };
        assert_eq!(p.coeff(&Word::new(vec![2])), Some(&exact_ratio(3, 2)));
    }

    #[test]
    fn conversion_round_trip() {
        let text = r#"{"d": 2, "basis": "monomial", "terms": [
            {"word": [1, 1, 2], "re": "1/3", "im": "2"},
            {"word": [2, 1], "re": "-5", "im": "0"}
        ]}"#;
        let e = parse_element(text).unwrap();
        let there = parse_element(&e.convert(Basis::Chebyshev).to_json()).unwrap();
        assert_eq!(there.basis(), Basis::Chebyshev);
        let back = there.convert(Basis::Monomial);
        assert_eq!(back.to_json(), e.to_json());
    }

    #[test]
    fn float_round_trip_is_bit_exact() {
        let vals = [0.1f64, 1.0 / 3.0, -2.5e-300, 123456.789, 5e-324];
        let terms: Vec<String> = vals
            .iter()
            .enumerate()
            .map(|(i, v)| format!("{{\"word\": [{}], \"re\": {v:e}, \"im\": {}}}", (i % 2) + 1, -v))
            .collect();
        let text = format!("{{\"d\": 2, \"basis\": \"chebyshev\", \"terms\": [{}]}}", terms[..2].join(","));
        let e = parse_element(&text).unwrap();
        assert_eq!(e.kind(), CoeffKind::Float);
        let out = e.to_json();
        let again = parse_element(&out).unwrap();
        assert_eq!(again, e);
        assert_eq!(again.to_json(), out);
    }

    #[test]
    fn empty_terms_are_exact_zero() {
        let e = parse_element(r#"{"d": 3, "basis": "chebyshev", "terms": []}"#).unwrap();
        assert_eq!(e.kind(), CoeffKind::Exact);
        let AnyElement::Exact(Element::Cheb(v)) = &e else { panic!() };
        assert!(v.is_zero() && v.d() == 3);
        assert_eq!(parse_element(&e.to_json()).unwrap(), e);
    }

    #[test]
    fn rejects_malformed_input() {
        let err = parse_element("{\"d\": 2,\n \"basis\": \"monomial\", \"terms\": [}").unwrap_err();
        assert!(matches!(err, Error::Json { line: 2, .. }), "{err:?}");
        for bad in [
            r#"{"d": 2, "basis": "monomial", "terms": [{"word": [3], "re": "1"}]}"#,
            r#"{"d": 2, "basis": "monomial", "terms": [{"word": [1], "re": "1", "im": 0.5}]}"#,
            r#"{"d": 2, "basis": "monomial", "terms": [{"word": [1], "re": "1"}, {"word": [2], "re": 1.0}]}"#,
            r#"{"d": 2, "basis": "monomial", "terms": [{"word": [1], "re": "1.5"}]}"#,
            r#"{"d": 2, "basis": "monomial", "terms": [{"word": [1], "re": "1/0"}]}"#,
            r#"{"d": 0, "basis": "monomial", "terms": []}"#,
        ] {
            assert!(matches!(parse_element(bad), Err(Error::InvalidArgument(_))), "{bad}");
        }
        assert!(matches!(
            parse_element(r#"{"d": 2, "basis": "hermite", "terms": []}"#),
            Err(Error::Json { .. })
        ));
        assert!(matches!(
            parse_element(r#"{"d": 2, "basis": "monomial", "terms": [], "extra": 1}"#),
            Err(Error::Json { .. })
        ));
    }

    #[test]
    fn matpoly_round_trip() {
        let text = r#"{"d": 2, "n": 2, "k": 2, "terms": [
            {"word": [1, 2], "matrix": [[{"re": 1.0, "im": 0.5}, {"re": 0.0}], [{"re": -2.0}, {"re": 0.25, "im": -1.0}]]}
        ]}"#;
        let p = parse_matpoly(text).unwrap();
        assert_eq!((p.d(), p.degree(), p.k()), (2, 2, 2));
        let again = parse_matpoly(&matpoly_to_json(&p)).unwrap();
        assert_eq!(again, p);
        let bad = r#"{"d": 2, "n": 1, "k": 2, "terms": [{"word": [1], "matrix": [[{"re": 1.0}]]}]}"#;
        assert!(matches!(parse_matpoly(bad), Err(Error::InvalidArgument(_))));
    }
}
