//! The JSON curve document: germs and deformation families.
//!
//! ```json
//! {"coordinate_system": "plane", "branches": [{"x": [[1, 1, 3]], "y": [[1, 1, 10]]}]}
//! ```
//!
//! Each coordinate is a list of `[numerator, denominator, exponent]` terms.
//! A document with `params` is a family; its terms may also be objects
//! `{"exp": k, "coeff": {"1,0": [n, d]}}` whose coefficient maps parameter
//! exponent vectors to rationals. `trunc` sets the truncation order for the
//! whole document, and a branch may override it per coordinate with a
//! `"trunc": {"y": 129}` object.

use std::collections::{BTreeMap, BTreeSet};

use legendrian::germ::{
    AnyGerm, DeformationFamily, FakeGerm, FamilyKind, LegendrianGerm, PlaneGerm,
};
use legendrian::jet::{MPoly, Rational, TruncSeries};
use num_bigint::BigInt;
use num_traits::{One, Zero};
use serde_json::{Map, Number, Value};

use crate::CliError;

/// A parsed curve document.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Document {
    Germ(AnyGerm),
    Family {
        family: DeformationFamily,
        params: Vec<String>,
    },
}

fn kind_from_name(name: &str) -> Option<FamilyKind> {
    match name {
        "plane" => Some(FamilyKind::Plane),
        "legendrian" => Some(FamilyKind::Legendrian),
        "fake" => Some(FamilyKind::Fake),
        _ => None,
    }
}

fn invalid(at: &str, message: impl Into<String>) -> CliError {
    CliError::Document {
        location: if at.is_empty() { "/".into() } else { at.into() },
        message: message.into(),
    }
}

fn integer(v: &Value, at: &str) -> Result<BigInt, CliError> {
    let Value::Number(n) = v else {
        return Err(invalid(at, "expected an integer"));
    };
    let text = n.to_string();
    if text.contains(['.', 'e', 'E']) {
        return Err(invalid(at, format!("floats are not permitted: {text}")));
    }
    text.parse()
        .map_err(|_| invalid(at, format!("not an integer: {text}")))
}

fn small(v: &Value, at: &str) -> Result<u32, CliError> {
    let n = integer(v, at)?;
    u32::try_from(n).map_err(|_| invalid(at, "expected a non-negative integer below 2^32"))
}

fn rational(num: &Value, den: &Value, at: &str) -> Result<Rational, CliError> {
    let (n, d) = (integer(num, at)?, integer(den, at)?);
    if d.is_zero() {
        return Err(invalid(at, "zero denominator"));
    }
    Ok(Rational::new(n, d))
}

fn exponent_key(key: &str, arity: usize, at: &str) -> Result<Vec<u32>, CliError> {
    let parts: Vec<&str> = if key.is_empty() {
        Vec::new()
    } else {
        key.split(',').collect()
    };
    if parts.len() != arity {
        return Err(invalid(
            at,
            format!("exponent vector {key:?} needs {arity} entries"),
        ));
    }
    parts
        .iter()
        .map(|p| {
            p.trim()
                .parse::<u32>()
                .map_err(|_| invalid(at, format!("bad exponent vector {key:?}")))
        })
        .collect()
}

/// A `{"a,b,..": [n, d]}` polynomial in `arity` variables.
pub fn parse_poly(v: &Value, arity: usize, at: &str) -> Result<MPoly, CliError> {
    let Value::Object(map) = v else {
        return Err(invalid(
            at,
            "expected an object mapping exponent vectors to rationals",
        ));
    };
    let mut terms = Vec::new();
    for (key, c) in map {
        let here = format!("{at}/{key}");
        let e = exponent_key(key, arity, &here)?;
        match c.as_array().map(Vec::as_slice) {
            Some([n, d]) => terms.push((e, rational(n, d, &here)?)),
            _ => return Err(invalid(&here, "expected [numerator, denominator]")),
        }
    }
    Ok(MPoly::from_terms(arity, terms))
}

fn term(v: &Value, arity: usize, family: bool, at: &str) -> Result<(u32, MPoly), CliError> {
    let (exp, coeff) = match v {
        Value::Array(items) => match items.as_slice() {
            [n, d, e] => (
                small(e, &format!("{at}/2"))?,
                MPoly::constant(arity, rational(n, d, at)?),
            ),
            _ => return Err(invalid(at, "expected [numerator, denominator, exponent]")),
        },
        Value::Object(map) if family => {
            for key in map.keys() {
                if key != "exp" && key != "coeff" {
                    return Err(invalid(&format!("{at}/{key}"), "unknown key"));
                }
            }
            let exp = map
                .get("exp")
                .ok_or_else(|| invalid(at, "missing \"exp\""))?;
            let coeff = map
                .get("coeff")
                .ok_or_else(|| invalid(at, "missing \"coeff\""))?;
            (
                small(exp, &format!("{at}/exp"))?,
                parse_poly(coeff, arity, &format!("{at}/coeff"))?,
            )
        }
        Value::Object(_) => {
            return Err(invalid(at, "parameter terms need a \"params\" declaration"))
        }
        _ => return Err(invalid(at, "expected a term")),
    };
    if exp == 0 {
        return Err(invalid(
            at,
            "coordinate series must vanish at t = 0 (exponent 0)",
        ));
    }
    Ok((exp, coeff))
}

fn branch(
    v: &Value,
    kind: FamilyKind,
    arity: usize,
    family: bool,
    trunc: u32,
    at: &str,
) -> Result<Vec<TruncSeries>, CliError> {
    let Value::Object(map) = v else {
        return Err(invalid(at, "expected a branch object"));
    };
    let names = kind.coordinate_names();
    for key in map.keys() {
        if key != "trunc" && !names.contains(&key.as_str()) {
            return Err(invalid(
                &format!("{at}/{key}"),
                format!("unknown coordinate for a {kind} document"),
            ));
        }
    }
    let mut orders: BTreeMap<&str, u32> = names.iter().map(|n| (*n, trunc)).collect();
    if let Some(t) = map.get("trunc") {
        let Value::Object(t) = t else {
            return Err(invalid(
                &format!("{at}/trunc"),
                "expected an object of truncation orders",
            ));
        };
        for (name, n) in t {
            let here = format!("{at}/trunc/{name}");
            let slot = orders
                .get_mut(name.as_str())
                .ok_or_else(|| invalid(&here, "unknown coordinate"))?;
            *slot = small(n, &here)?;
        }
    }
    names
        .iter()
        .map(|name| {
            let here = format!("{at}/{name}");
            let terms = map
                .get(*name)
                .ok_or_else(|| invalid(at, format!("missing coordinate {name:?}")))?
                .as_array()
                .ok_or_else(|| invalid(&here, "expected a list of terms"))?
                .iter()
                .enumerate()
                .map(|(i, t)| term(t, arity, family, &format!("{here}/{i}")))
                .collect::<Result<Vec<_>, _>>()?;
            Ok(TruncSeries::from_terms(arity, orders[name], terms))
        })
        .collect()
}

fn pairs(mut b: Vec<TruncSeries>) -> (TruncSeries, TruncSeries) {
    let second = b.remove(1);
    (b.remove(0), second)
}

/// Parses a document; `default_trunc` applies when it sets no `trunc`.
pub fn parse_document(text: &str, default_trunc: u32) -> Result<Document, CliError> {
    let root: Value = serde_json::from_str(text).map_err(|e| CliError::Json {
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })?;
    let Value::Object(map) = &root else {
        return Err(invalid("", "expected a JSON object"));
    };
    for key in map.keys() {
        if !["coordinate_system", "branches", "params", "trunc"].contains(&key.as_str()) {
            return Err(invalid(&format!("/{key}"), "unknown key"));
        }
    }
    let kind = map
        .get("coordinate_system")
        .and_then(Value::as_str)
        .ok_or_else(|| {
            invalid(
                "/coordinate_system",
                "expected \"plane\", \"legendrian\" or \"fake\"",
            )
        })?;
    let kind = kind_from_name(kind).ok_or_else(|| {
        invalid(
            "/coordinate_system",
            format!("unknown coordinate system {kind:?}"),
        )
    })?;
    let trunc = match map.get("trunc") {
        Some(t) => small(t, "/trunc")?,
        None => default_trunc,
    };
    let params = match map.get("params") {
        None => None,
        Some(Value::Array(names)) => {
            let mut seen = BTreeSet::new();
            let mut out = Vec::new();
            for (i, n) in names.iter().enumerate() {
                let here = format!("/params/{i}");
                let name = n
                    .as_str()
                    .ok_or_else(|| invalid(&here, "expected a parameter name"))?;
                if name.is_empty() || !seen.insert(name) {
                    return Err(invalid(
                        &here,
                        format!("parameter names must be distinct and non-empty: {name:?}"),
                    ));
                }
                out.push(name.to_string());
            }
            Some(out)
        }
        Some(_) => return Err(invalid("/params", "expected a list of names")),
    };
    let arity = params.as_ref().map_or(0, Vec::len);
    let branches = map
        .get("branches")
        .and_then(Value::as_array)
        .ok_or_else(|| invalid("/branches", "expected a list of branches"))?;
    if branches.is_empty() {
        return Err(invalid("/branches", "a germ needs at least one branch"));
    }
    let series = branches
        .iter()
        .enumerate()
        .map(|(i, b)| {
            branch(
                b,
                kind,
                arity,
                params.is_some(),
                trunc,
                &format!("/branches/{i}"),
            )
        })
        .collect::<Result<Vec<_>, _>>()?;

    if let Some(params) = params {
        let family = DeformationFamily::new(kind, arity, series)
            .map_err(|e| CliError::Invariant(e.to_string()))?;
        return Ok(Document::Family { family, params });
    }
    if kind == FamilyKind::Plane {
        for (i, b) in series.iter().enumerate() {
            if b[1].is_zero() && b[0].order().finite().is_some_and(|m| m > 1) {
                return Err(CliError::Invariant(format!(
                    "branch {i}: y vanishes identically on a singular branch"
                )));
            }
        }
    }
    let germ = match kind {
        FamilyKind::Plane => {
            PlaneGerm::from_series(series.into_iter().map(pairs).collect()).map(AnyGerm::Plane)
        }
        FamilyKind::Fake => {
            FakeGerm::from_series(series.into_iter().map(pairs).collect()).map(AnyGerm::Fake)
        }
        FamilyKind::Legendrian => LegendrianGerm::from_series(
            series
                .into_iter()
                .map(|mut b| {
                    let p = b.remove(2);
                    let (x, y) = pairs(b);
                    (x, y, p)
                })
                .collect(),
        )
        .map(AnyGerm::Legendrian),
    };
    germ.map(Document::Germ)
        .map_err(|e| CliError::Invariant(e.to_string()))
}

fn number(n: &BigInt) -> Value {
    Value::Number(
        n.to_string()
            .parse::<Number>()
            .expect("integers are valid JSON numbers"),
    )
}

fn rational_json(q: &Rational) -> Value {
    Value::Array(vec![number(q.numer()), number(q.denom())])
}

/// `{"a,b,..": [n, d]}`.
pub fn poly_json(p: &MPoly) -> Value {
    let map: Map<String, Value> = p
        .terms()
        .map(|(e, c)| {
            let key = e.iter().map(u32::to_string).collect::<Vec<_>>().join(",");
            (key, rational_json(c))
        })
        .collect();
    Value::Object(map)
}

fn series_json(s: &TruncSeries) -> Value {
    Value::Array(
        s.terms()
            .map(|(k, c)| match c.as_constant() {
                Some(q) => Value::Array(vec![number(q.numer()), number(q.denom()), Value::from(k)]),
                None => {
                    let mut term = Map::new();
                    term.insert("exp".into(), Value::from(k));
                    term.insert("coeff".into(), poly_json(c));
                    Value::Object(term)
                }
            })
            .collect(),
    )
}

fn document_json(
    kind: FamilyKind,
    branches: &[Vec<TruncSeries>],
    params: Option<&[String]>,
) -> Value {
    let names = kind.coordinate_names();
    let top = branches
        .iter()
        .flatten()
        .map(TruncSeries::trunc_order)
        .max()
        .unwrap_or(0);
    let branches = branches
        .iter()
        .map(|b| {
            let mut obj = Map::new();
            let mut trunc = Map::new();
            for (name, s) in names.iter().zip(b) {
                obj.insert(name.to_string(), series_json(s));
                if s.trunc_order() != top {
                    trunc.insert(name.to_string(), Value::from(s.trunc_order()));
                }
            }
            if !trunc.is_empty() {
                obj.insert("trunc".into(), Value::Object(trunc));
            }
            Value::Object(obj)
        })
        .collect();
    let mut doc = Map::new();
    doc.insert("coordinate_system".into(), Value::from(kind.to_string()));
    if let Some(params) = params {
        doc.insert("params".into(), Value::from(params.to_vec()));
    }
    doc.insert("trunc".into(), Value::from(top));
    doc.insert("branches".into(), Value::Array(branches));
    Value::Object(doc)
}

/// Coordinate series of a germ, in document order.
pub fn germ_series(g: &AnyGerm) -> (FamilyKind, Vec<Vec<TruncSeries>>) {
    match g {
        AnyGerm::Plane(z) => (
            FamilyKind::Plane,
            z.branches()
                .iter()
                .map(|b| b.coords().map(Clone::clone).to_vec())
                .collect(),
        ),
        AnyGerm::Legendrian(l) => (
            FamilyKind::Legendrian,
            l.branches()
                .iter()
                .map(|b| b.coords().map(Clone::clone).to_vec())
                .collect(),
        ),
        AnyGerm::Fake(s) => (
            FamilyKind::Fake,
            s.branches()
                .iter()
                .map(|b| b.coords().map(Clone::clone).to_vec())
                .collect(),
        ),
    }
}

pub fn germ_json(g: &AnyGerm) -> Value {
    let (kind, branches) = germ_series(g);
    document_json(kind, &branches, None)
}

pub fn family_json(f: &DeformationFamily, params: &[String]) -> Value {
    document_json(f.kind(), f.branches(), Some(params))
}

pub fn document_to_json(d: &Document) -> Value {
    match d {
        Document::Germ(g) => germ_json(g),
        Document::Family { family, params } => family_json(family, params),
    }
}

/// Parses `"3"`, `"-1/2"`.
pub fn parse_rational(s: &str) -> Result<Rational, CliError> {
    let bad = || CliError::Usage(format!("not a rational number: {s:?}"));
    let (n, d) = match s.split_once('/') {
        Some((n, d)) => (
            n.parse::<BigInt>().map_err(|_| bad())?,
            d.parse::<BigInt>().map_err(|_| bad())?,
        ),
        None => (s.parse::<BigInt>().map_err(|_| bad())?, BigInt::one()),
    };
    if d.is_zero() {
        return Err(bad());
    }
    Ok(Rational::new(n, d))
}
