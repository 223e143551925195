//! JSON documents for instances, allocations and tie-break scripts.
//!
//! Instance: `{"agents": n, "goods": m, "valuations": [[dec, ...], ...]}` where
//! each entry is a JSON integer, a decimal string (`"0.98"`), or a fraction
//! string (`"1/3"`). JSON number literals with a fractional part are accepted
//! too and converted from their exact text.
//!
//! Allocation: `{"bundles": [[good, ...], ...]}`, one array per agent.
//!
//! Writers emit compact JSON followed by a newline, goods ascending, so equal
//! objects always produce identical bytes.

use serde_json::{Map, Value as Json};

use crate::algorithms::TieBreakPolicy;
use crate::error::{Error, Result};
use crate::instance::{Allocation, Bundle, Instance};
use crate::value::Value;

fn decode(text: &[u8]) -> Result<Json> {
    serde_json::from_slice(text).map_err(|e| {
        Error::parse(format!("line {} column {}", e.line(), e.column()), e.to_string())
    })
}

fn as_object<'a>(doc: &'a Json, what: &str) -> Result<&'a Map<String, Json>> {
    doc.as_object()
        .ok_or_else(|| Error::parse("$", format!("{what} document must be a JSON object")))
}

fn reject_unknown(obj: &Map<String, Json>, allowed: &[&str]) -> Result<()> {
    for key in obj.keys() {
        if !allowed.contains(&key.as_str()) {
            return Err(Error::parse(key.clone(), "unknown field"));
        }
    }
    Ok(())
}

fn field<'a>(obj: &'a Map<String, Json>, key: &str) -> Result<&'a Json> {
    obj.get(key)
        .ok_or_else(|| Error::parse(key, "missing required field"))
}

fn as_index(v: &Json, path: &str) -> Result<usize> {
    v.as_u64()
        .and_then(|x| usize::try_from(x).ok())
        .ok_or_else(|| Error::parse(path, "expected a nonnegative integer"))
}

fn as_array<'a>(v: &'a Json, path: &str) -> Result<&'a Vec<Json>> {
    v.as_array()
        .ok_or_else(|| Error::parse(path, "expected an array"))
}

fn as_value(v: &Json, path: &str) -> Result<Value> {
    let text = match v {
        Json::Number(n) => n.to_string(),
        Json::String(s) => s.clone(),
        _ => return Err(Error::parse(path, "expected a number or numeric string")),
    };
    Value::parse_literal(&text).map_err(|e| Error::parse(path, format!("{e}: {text:?}")))
}

/// Decodes an instance document.
pub fn parse_instance(text: &[u8]) -> Result<Instance> {
    let doc = decode(text)?;
    let obj = as_object(&doc, "instance")?;
    reject_unknown(obj, &["agents", "goods", "valuations"])?;
    let n = as_index(field(obj, "agents")?, "agents")?;
    let m = as_index(field(obj, "goods")?, "goods")?;
    if n == 0 {
        return Err(Error::parse("agents", "need at least one agent"));
    }
    let rows = as_array(field(obj, "valuations")?, "valuations")?;
    if rows.len() != n {
        return Err(Error::parse(
            "valuations",
            format!("expected {n} rows, found {}", rows.len()),
        ));
    }
    let mut valuations = Vec::with_capacity(n);
    for (i, row) in rows.iter().enumerate() {
        let path = format!("valuations[{i}]");
        let row = as_array(row, &path)?;
        if row.len() != m {
            return Err(Error::parse(
                path,
                format!("expected {m} entries, found {}", row.len()),
            ));
        }
        let parsed = row
            .iter()
            .enumerate()
            .map(|(g, v)| as_value(v, &format!("valuations[{i}][{g}]")))
            .collect::<Result<Vec<_>>>()?;
        valuations.push(parsed);
    }
    Instance::new(n, m, valuations)
}

/// Renders a value as a JSON integer, an exact decimal string, or `"p/q"`
/// when the expansion does not terminate.
fn value_json(v: &Value) -> Json {
    use num_bigint::BigInt;
    use num_traits::{One, ToPrimitive, Zero};

    if v.denom().is_one() {
        if let Some(x) = v.numer().to_u64() {
            return Json::from(x);
        }
        return Json::String(v.numer().to_string());
    }
    let mut d = v.denom().clone();
    let (mut twos, mut fives) = (0u32, 0u32);
    let two = BigInt::from(2u32);
    let five = BigInt::from(5u32);
    while (&d % &two).is_zero() {
        d /= &two;
        twos += 1;
    }
    while (&d % &five).is_zero() {
        d /= &five;
        fives += 1;
    }
    if !d.is_one() {
        return Json::String(v.to_ratio_string());
    }
    let places = twos.max(fives);
    let scaled = v.numer() * num_traits::Pow::pow(&BigInt::from(10u32), places) / v.denom();
    let mut digits = scaled.to_string();
    let places = places as usize;
    if digits.len() <= places {
        digits = format!("{}{}", "0".repeat(places + 1 - digits.len()), digits);
    }
    let split = digits.len() - places;
    Json::String(format!("{}.{}", &digits[..split], &digits[split..]))
}

/// Canonical instance document.
pub fn serialize_instance(instance: &Instance) -> Vec<u8> {
    let rows: Vec<Json> = instance
        .valuations()
        .iter()
        .map(|row| Json::Array(row.iter().map(value_json).collect()))
        .collect();
    let mut obj = Map::new();
    obj.insert("agents".into(), Json::from(instance.num_agents()));
    obj.insert("goods".into(), Json::from(instance.num_goods()));
    obj.insert("valuations".into(), Json::Array(rows));
    finish(Json::Object(obj))
}

/// Decodes an allocation document. Range checks against an instance are the
/// caller's job ([`Instance::check_allocation`]).
pub fn parse_allocation(text: &[u8]) -> Result<Allocation> {
    let doc = decode(text)?;
    let obj = as_object(&doc, "allocation")?;
    reject_unknown(obj, &["bundles"])?;
    let bundles = as_array(field(obj, "bundles")?, "bundles")?;
    let mut out = Vec::with_capacity(bundles.len());
    let mut owner = std::collections::HashMap::new();
    for (i, b) in bundles.iter().enumerate() {
        let path = format!("bundles[{i}]");
        let goods = as_array(b, &path)?
            .iter()
            .enumerate()
            .map(|(k, g)| as_index(g, &format!("bundles[{i}][{k}]")))
            .collect::<Result<Vec<_>>>()?;
        for &g in &goods {
            if let Some(prev) = owner.insert(g, i) {
                return Err(Error::parse(
                    path,
                    format!("good {g} already appears in bundles[{prev}]"),
                ));
            }
        }
        out.push(Bundle::new(goods).map_err(|e| Error::parse(path, e.to_string()))?);
    }
    Allocation::new(out)
}

/// Canonical allocation document: bundles in agent order, goods ascending.
pub fn serialize_allocation(allocation: &Allocation) -> Vec<u8> {
    let bundles: Vec<Json> = allocation
        .bundles()
        .iter()
        .map(|b| Json::Array(b.iter().map(Json::from).collect()))
        .collect();
    let mut obj = Map::new();
    obj.insert("bundles".into(), Json::Array(bundles));
    finish(Json::Object(obj))
}

/// Decodes `{"sources": [...], "goods": [...]}`. A missing key falls back to
/// the lowest-index rule for that choice.
pub fn parse_policy(text: &[u8]) -> Result<TieBreakPolicy> {
    let doc = decode(text)?;
    let obj = as_object(&doc, "policy")?;
    reject_unknown(obj, &["sources", "goods"])?;
    let list = |key: &str| -> Result<Option<Vec<usize>>> {
        match obj.get(key) {
            None | Some(Json::Null) => Ok(None),
            Some(v) => as_array(v, key)?
                .iter()
                .enumerate()
                .map(|(k, x)| as_index(x, &format!("{key}[{k}]")))
                .collect::<Result<Vec<_>>>()
                .map(Some),
        }
    };
    Ok(TieBreakPolicy::from_scripts(list("sources")?, list("goods")?))
}

pub fn serialize_policy(policy: &TieBreakPolicy) -> Vec<u8> {
    let mut obj = Map::new();
    if let Some(s) = policy.scripted_sources() {
        obj.insert("sources".into(), Json::from(s.to_vec()));
    }
    if let Some(g) = policy.scripted_goods() {
        obj.insert("goods".into(), Json::from(g.to_vec()));
    }
    finish(Json::Object(obj))
}

pub(crate) fn finish(doc: Json) -> Vec<u8> {
    let mut out = serde_json::to_vec(&doc).expect("in-memory JSON never fails");
    out.push(b'\n');
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_instance() {
        let inst = parse_instance(br#"{"agents": 2, "goods": 1, "valuations": [[1],[1]]}"#).unwrap();
        assert_eq!(inst, Instance::from_integers(&[vec![1], vec![1]]).unwrap());
    }

    #[test]
    fn decimal_strings_and_numbers_are_exact() {
        let inst = parse_instance(
            br#"{"agents": 1, "goods": 3, "valuations": [["0.98", 0.5, "1/3"]]}"#,
        )
        .unwrap();
        assert_eq!(inst.value(0, 0), &Value::from_ratio(49, 50));
        assert_eq!(inst.value(0, 1), &Value::from_ratio(1, 2));
        assert_eq!(inst.value(0, 2), &Value::from_ratio(1, 3));
    }

    #[test]
    fn dimension_mismatch_names_the_row() {
        let err = parse_instance(br#"{"agents": 2, "goods": 2, "valuations": [[1,2],[1]]}"#)
            .unwrap_err();
        match err {
            Error::Parse { location, .. } => assert_eq!(location, "valuations[1]"),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn negative_value_names_the_field() {
        let err = parse_instance(br#"{"agents": 1, "goods": 2, "valuations": [[1,-2]]}"#)
            .unwrap_err();
        match err {
            Error::Parse { location, message } => {
                assert_eq!(location, "valuations[0][1]");
                assert!(message.contains("nonnegative"));
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn syntax_error_names_the_line() {
        let err = parse_instance(b"{\n\"agents\": 1,\n oops }").unwrap_err();
        match err {
            Error::Parse { location, .. } => assert!(location.starts_with("line 3")),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn rejects_unknown_fields_and_zero_agents() {
        assert!(parse_instance(br#"{"agents": 1, "goods": 0, "valuations": [[]], "x": 1}"#).is_err());
        assert!(parse_instance(br#"{"agents": 0, "goods": 0, "valuations": []}"#).is_err());
    }

    #[test]
    fn allocation_round_trip_and_canonical_bytes() {
        let a = Allocation::from_lists(vec![vec![0], vec![1]]).unwrap();
        let bytes = serialize_allocation(&a);
        assert_eq!(bytes, b"{\"bundles\":[[0],[1]]}\n");
        assert_eq!(parse_allocation(&bytes).unwrap(), a);

        let with_empty = Allocation::from_lists(vec![vec![], vec![0, 1]]).unwrap();
        assert_eq!(parse_allocation(&serialize_allocation(&with_empty)).unwrap(), with_empty);

        let shuffled = parse_allocation(br#"{"bundles": [[2, 0], [1]]}"#).unwrap();
        let sorted = parse_allocation(br#"{"bundles": [[0, 2], [1]]}"#).unwrap();
        assert_eq!(serialize_allocation(&shuffled), serialize_allocation(&sorted));
    }

    #[test]
    fn allocation_with_shared_good_rejected() {
        let err = parse_allocation(br#"{"bundles": [[0, 1], [1]]}"#).unwrap_err();
        assert!(matches!(err, Error::Parse { ref location, .. } if location == "bundles[1]"));
    }

    #[test]
    fn instance_values_serialize_exactly() {
        let vals = vec![vec![
            Value::from_integer(3),
            Value::from_ratio(49, 50),
            Value::from_ratio(1, 3),
            Value::from_ratio(1, 40),
        ]];
        let inst = Instance::new(1, 4, vals).unwrap();
        let text = String::from_utf8(serialize_instance(&inst)).unwrap();
        assert_eq!(
            text,
            "{\"agents\":1,\"goods\":4,\"valuations\":[[3,\"0.98\",\"1/3\",\"0.025\"]]}\n"
        );
        assert_eq!(parse_instance(text.as_bytes()).unwrap(), inst);
    }

    #[test]
    fn policy_document() {
        let p = parse_policy(br#"{"sources": [0, 1], "goods": [3, 4]}"#).unwrap();
        assert_eq!(p.scripted_sources(), Some(&[0usize, 1][..]));
        assert_eq!(p.scripted_goods(), Some(&[3usize, 4][..]));
        let d = parse_policy(b"{}").unwrap();
        assert!(d.scripted_sources().is_none());
        assert_eq!(parse_policy(&serialize_policy(&p)).unwrap(), p);
    }
}
