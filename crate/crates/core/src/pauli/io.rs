//! Pauli-sum text and JSON formats.
//!
//! Text: one `<coefficient> <string>` term per line, `#` starts a comment.
//! Comments of the form `# key: value` are kept as metadata (electron count,
//! spin layout, provenance).
//!
//! JSON: an array of `{"coeff": <real>, "paulis": "<string>"}`.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use super::{PauliString, PauliSum};
use crate::error::{Error, Result};

/// Imaginary parts below this are treated as formatting noise.
const IMAG_TOL: f64 = 1e-12;

/// A parsed Pauli sum together with its `# key: value` metadata.
#[derive(Debug, Clone, PartialEq)]
pub struct PauliDocument {
    pub sum: PauliSum,
    pub metadata: BTreeMap<String, String>,
}

impl PauliDocument {
    pub fn new(sum: PauliSum) -> Self {
        PauliDocument {
            sum,
            metadata: BTreeMap::new(),
        }
    }

    pub fn electrons(&self) -> Option<usize> {
        self.metadata.get("electrons").and_then(|v| v.parse().ok())
    }
}

fn parse_coefficient(tok: &str, line: usize) -> Result<f64> {
    if let Ok(v) = tok.parse::<f64>() {
        return Ok(v);
    }
    // Accept `a+bj` / `a-bj` only to reject nonzero imaginary parts explicitly.
    let body = tok
        .strip_suffix('j')
        .or_else(|| tok.strip_suffix('i'))
        .ok_or_else(|| Error::Parse {
            line,
            msg: format!("bad coefficient {tok:?}"),
        })?;
    let split = body
        .char_indices()
        .skip(1)
        .filter(|&(i, c)| (c == '+' || c == '-') && !matches!(body.as_bytes()[i - 1], b'e' | b'E'))
        .map(|(i, _)| i)
        .last();
    let (re, im) = match split {
        Some(i) => (&body[..i], &body[i..]),
        None => ("0", body),
    };
    let bad = || Error::Parse {
        line,
        msg: format!("bad coefficient {tok:?}"),
    };
    let re: f64 = re.parse().map_err(|_| bad())?;
    let im: f64 = match im {
        "+" | "" => 1.0,
        "-" => -1.0,
        s => s.parse().map_err(|_| bad())?,
    };
    if im.abs() > IMAG_TOL {
        return Err(Error::ComplexCoefficient { re, im });
    }
    Ok(re)
}

/// Parses the text format.
pub fn parse_text(src: &str) -> Result<PauliDocument> {
    let mut metadata = BTreeMap::new();
    let mut terms = Vec::new();
    let mut n_qubits = None;
    for (idx, raw) in src.lines().enumerate() {
        let line = idx + 1;
        let (body, comment) = match raw.find('#') {
            Some(i) => (&raw[..i], Some(&raw[i + 1..])),
            None => (raw, None),
        };
        if let Some(c) = comment {
            if let Some((k, v)) = c.split_once(':') {
                let key = k.trim();
                if !key.is_empty() && !key.contains(' ') {
                    metadata.insert(key.to_string(), v.trim().to_string());
                }
            }
        }
        let mut toks = body.split_whitespace();
        let Some(coeff) = toks.next() else { continue };
        let label = toks.next().ok_or_else(|| Error::Parse {
            line,
            msg: "expected `<coefficient> <pauli string>`".into(),
        })?;
        if toks.next().is_some() {
            return Err(Error::Parse {
                line,
                msg: "trailing fields".into(),
            });
        }
        let c = parse_coefficient(coeff, line)?;
        let p: PauliString = label.parse().map_err(|e: Error| Error::Parse {
            line,
            msg: e.to_string(),
        })?;
        match n_qubits {
            None => n_qubits = Some(p.n_qubits()),
            Some(n) if n != p.n_qubits() => {
                return Err(Error::Parse {
                    line,
                    msg: format!("string {label} has {} qubits, expected {n}", p.n_qubits()),
                })
            }
            _ => {}
        }
        terms.push((c, p));
    }
    let n = match n_qubits {
        Some(n) => n,
        None => metadata
            .get("qubits")
            .and_then(|v| v.parse().ok())
            .ok_or_else(|| Error::Format("no terms and no `# qubits:` header".into()))?,
    };
    Ok(PauliDocument {
        sum: PauliSum::new(n, terms)?,
        metadata,
    })
}

/// Writes the text format. Coefficients use Rust's shortest round-trip
/// representation so the output re-parses to the identical sum.
pub fn to_text(doc: &PauliDocument) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "# qubits: {}", doc.sum.n_qubits());
    for (k, v) in doc.metadata.iter().filter(|(k, _)| k.as_str() != "qubits") {
        let _ = writeln!(out, "# {k}: {v}");
    }
    for (c, p) in doc.sum.iter() {
        let _ = writeln!(out, "{c:?} {p}");
    }
    out
}

#[derive(Serialize, Deserialize)]
struct JsonTerm {
    coeff: Value,
    paulis: String,
}

/// Parses the JSON array format.
pub fn parse_json(src: &str) -> Result<PauliSum> {
    let raw: Vec<JsonTerm> = serde_json::from_str(src)?;
    let mut terms = Vec::with_capacity(raw.len());
    let mut n_qubits = None;
    for (i, t) in raw.into_iter().enumerate() {
        let entry = i + 1;
        let c = match &t.coeff {
            Value::Number(n) => n.as_f64().unwrap_or(f64::NAN),
            Value::Array(parts) if parts.len() == 2 => {
                let re = parts[0].as_f64().unwrap_or(f64::NAN);
                let im = parts[1].as_f64().unwrap_or(f64::NAN);
                if im.abs() > IMAG_TOL {
                    return Err(Error::ComplexCoefficient { re, im });
                }
                re
            }
            other => {
                return Err(Error::Parse {
                    line: entry,
                    msg: format!("bad coeff {other}"),
                })
            }
        };
        if !c.is_finite() {
            return Err(Error::Parse {
                line: entry,
                msg: "non-finite coefficient".into(),
            });
        }
        let p: PauliString = t.paulis.parse()?;
        match n_qubits {
            None => n_qubits = Some(p.n_qubits()),
            Some(n) if n != p.n_qubits() => {
                return Err(Error::QubitMismatch {
                    expected: n,
                    found: p.n_qubits(),
                })
            }
            _ => {}
        }
        terms.push((c, p));
    }
    let n = n_qubits.ok_or(Error::ZeroOperator)?;
    PauliSum::new(n, terms)
}

pub fn to_json(sum: &PauliSum) -> String {
    let raw: Vec<JsonTerm> = sum
        .iter()
        .map(|(c, p)| JsonTerm {
            coeff: Value::from(*c),
            paulis: p.to_string(),
        })
        .collect();
    serde_json::to_string_pretty(&raw).expect("serializing plain values")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn text_with_comments_and_metadata() {
        let src = "# molecule: H2\n# electrons: 2\n-0.8105 IIZZ\n0.17 ZIII # trailing\n\n0.5 IIZZ\n";
        let doc = parse_text(src).unwrap();
        assert_eq!(doc.sum.n_qubits(), 4);
        assert_eq!(doc.sum.len(), 2);
        assert_eq!(doc.electrons(), Some(2));
        assert_eq!(doc.metadata["molecule"], "H2");
        let zz = doc.sum.iter().find(|(_, p)| p.to_string() == "IIZZ").unwrap();
        assert!((zz.0 + 0.3105).abs() < 1e-15);
    }

    #[test]
    fn text_errors_carry_line_numbers() {
        match parse_text("1.0 ZZ\n0.5 ZZZ\n") {
            Err(Error::Parse { line: 2, .. }) => {}
            other => panic!("unexpected {other:?}"),
        }
        match parse_text("1.0 ZQ\n") {
            Err(Error::Parse { line: 1, .. }) => {}
            other => panic!("unexpected {other:?}"),
        }
        match parse_text("abc ZZ\n") {
            Err(Error::Parse { line: 1, .. }) => {}
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn complex_coefficients_rejected() {
        assert!(matches!(
            parse_text("0.5+0.25j XX\n"),
            Err(Error::ComplexCoefficient { .. })
        ));
        assert_eq!(parse_text("0.5+0j XX\n").unwrap().sum.terms()[0].0, 0.5);
        assert!(matches!(
            parse_json(r#"[{"coeff": [0.5, 0.1], "paulis": "XX"}]"#),
            Err(Error::ComplexCoefficient { .. })
        ));
    }

    #[test]
    fn json_format() {
        let h = parse_json(r#"[{"coeff": -0.8105, "paulis": "IIZZ"}, {"coeff": 1.0, "paulis": "XXYY"}]"#)
            .unwrap();
        assert_eq!(h.len(), 2);
        let back = parse_json(&to_json(&h)).unwrap();
        assert_eq!(back, h);
    }
}
