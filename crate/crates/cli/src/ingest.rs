//! Parsing of set specs, ratios and colourings given on the command line.

use std::fs;
use std::path::Path;

use canvdw::{GroundSet, Ratio};
use serde_json::Value;

use crate::CliError;

/// Reads a set from `a..b` (inclusive), a comma list, or a file. Files hold
/// one integer per line (`#` starts a comment), a JSON array, or a JSON
/// object with a `subset`, `found` or `set` array. The result is sorted and
/// deduplicated, with ambient `n` equal to the largest element.
pub fn parse_set(spec: &str) -> Result<GroundSet, CliError> {
    let spec = spec.trim();
    let path = Path::new(spec);
    let elements = if path.is_file() {
        let text = fs::read_to_string(path)
            .map_err(|e| CliError::ingest(format!("cannot read {spec}: {e}")))?;
        parse_set_file(&text).map_err(|e| CliError::ingest(format!("{spec}: {e}")))?
    } else if let Some((a, b)) = spec.split_once("..") {
        let a = parse_int(a)?;
        let b = parse_int(b)?;
        if a > b {
            return Err(CliError::usage(format!("empty range {spec}")));
        }
        (a..=b).collect()
    } else if spec.is_empty() {
        Vec::new()
    } else {
        spec.split(',').map(parse_int).collect::<Result<_, _>>()?
    };
    GroundSet::from_elements(elements)
        .map_err(|e| CliError::usage(format!("invalid set {spec}: {e}")))
}

fn parse_int(s: &str) -> Result<u32, CliError> {
    s.trim()
        .parse()
        .map_err(|_| CliError::usage(format!("not a positive integer: {:?}", s.trim())))
}

fn parse_set_file(text: &str) -> Result<Vec<u32>, String> {
    let trimmed = text.trim_start();
    if trimmed.starts_with('[') || trimmed.starts_with('{') {
        let value: Value = serde_json::from_str(text).map_err(|e| e.to_string())?;
        let list = match &value {
            Value::Object(map) => ["subset", "found", "set"]
                .iter()
                .find_map(|key| map.get(*key).filter(|v| v.is_array()))
                .ok_or("object has no subset, found or set array")?,
            other => other,
        };
        return serde_json::from_value(list.clone()).map_err(|e| e.to_string());
    }
    text.lines()
        .map(|l| l.split('#').next().unwrap_or("").trim())
        .filter(|l| !l.is_empty())
        .map(|l| {
            l.parse::<u32>()
                .map_err(|_| format!("not an integer: {l:?}"))
        })
        .collect()
}

/// `a/b`, an integer, or a finite decimal such as `0.25`.
pub fn parse_ratio(s: &str) -> Result<Ratio, CliError> {
    let bad = || CliError::usage(format!("not a rational number: {s:?}"));
    let s = s.trim();
    if let Some((a, b)) = s.split_once('/') {
        let a: u64 = a.trim().parse().map_err(|_| bad())?;
        let b: u64 = b.trim().parse().map_err(|_| bad())?;
        if b == 0 {
            return Err(bad());
        }
        return Ok(Ratio::new(a, b));
    }
    if let Some((int, frac)) = s.split_once('.') {
        if frac.is_empty() || frac.len() > 18 || !frac.bytes().all(|c| c.is_ascii_digit()) {
            return Err(bad());
        }
        let int: u64 = if int.is_empty() {
            0
        } else {
            int.parse().map_err(|_| bad())?
        };
        let denom = 10u64.pow(frac.len() as u32);
        let frac: u64 = frac.parse().map_err(|_| bad())?;
        let numer = int
            .checked_mul(denom)
            .and_then(|v| v.checked_add(frac))
            .ok_or_else(bad)?;
        return Ok(Ratio::new(numer, denom));
    }
    Ok(Ratio::from_integer(s.parse().map_err(|_| bad())?))
}

/// A colouring given inline (`[0,0,1]`) or as a file holding either a JSON
/// array or a certificate object with a `colouring` array (and optionally
/// its `set`).
pub struct ColouringInput {
    pub assignment: Vec<u32>,
    pub set: Option<GroundSet>,
}

pub fn parse_colouring(spec: &str) -> Result<ColouringInput, CliError> {
    let path = Path::new(spec);
    let text = if path.is_file() {
        fs::read_to_string(path)
            .map_err(|e| CliError::ingest(format!("cannot read {spec}: {e}")))?
    } else {
        spec.to_string()
    };
    let value: Value = serde_json::from_str(&text)
        .map_err(|e| CliError::ingest(format!("colouring is not JSON: {e}")))?;
    let (list, set) = match &value {
        Value::Object(map) => {
            let list = map
                .get("colouring")
                .ok_or_else(|| CliError::ingest("certificate has no colouring array"))?;
            let set = match map.get("set") {
                Some(s) => {
                    let elems: Vec<u32> = serde_json::from_value(s.clone())
                        .map_err(|e| CliError::ingest(format!("certificate set: {e}")))?;
                    Some(
                        GroundSet::from_elements(elems)
                            .map_err(|e| CliError::ingest(e.to_string()))?,
                    )
                }
                None => None,
            };
            (list.clone(), set)
        }
        other => (other.clone(), None),
    };
    let assignment: Vec<u32> = serde_json::from_value(list)
        .map_err(|e| CliError::ingest(format!("colouring must be a list of colours: {e}")))?;
    Ok(ColouringInput { assignment, set })
}

/// Comma-separated list of values parsed with `FromStr`.
pub fn parse_list<T: std::str::FromStr>(s: &str, what: &str) -> Result<Vec<T>, CliError> {
    s.split(',')
        .map(|x| {
            x.trim()
                .parse()
                .map_err(|_| CliError::usage(format!("invalid {what}: {:?}", x.trim())))
        })
        .collect()
}
