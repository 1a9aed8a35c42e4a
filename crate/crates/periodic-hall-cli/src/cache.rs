//! JSON envelope for enumerated category tables.

use std::fs;
use std::path::{Path, PathBuf};

use periodic_hall::coeff::rational_string;
use periodic_hall::table::CategoryTable;
use serde_json::{json, Value};

use crate::CliError;

pub const CACHE_DIR_ENV: &str = "PERIODIC_HALL_CACHE_DIR";

/// Cache directory: the explicit flag, then the environment, then `.periodic-hall-cache`.
pub fn cache_dir(flag: Option<&Path>) -> PathBuf {
    if let Some(p) = flag {
        return p.to_path_buf();
    }
    match std::env::var_os(CACHE_DIR_ENV) {
        Some(v) if !v.is_empty() => PathBuf::from(v),
        _ => PathBuf::from(".periodic-hall-cache"),
    }
}

pub fn cache_path(dir: &Path, quiver: &str, q: u32, bound: usize) -> PathBuf {
    dir.join(format!("{}-q{}-b{}.json", quiver, q, bound))
}

fn rational_parts(text: &str) -> Result<(i64, i64), CliError> {
    let bad = || CliError::Resource(format!("rational {} does not fit the cache format", text));
    let (n, d) = text.split_once('/').ok_or_else(bad)?;
    Ok((n.parse().map_err(|_| bad())?, d.parse().map_err(|_| bad())?))
}

/// The table as a JSON value; maps are emitted in key order.
pub fn table_json(table: &CategoryTable) -> Result<Value, CliError> {
    let classes: Vec<Value> = table
        .classes
        .iter()
        .map(|c| {
            let mats: Vec<Value> = c
                .rep
                .mats
                .iter()
                .map(|m| {
                    let rows: Vec<Vec<u8>> = (0..m.rows).map(|i| (0..m.cols).map(|j| m.get(i, j)).collect()).collect();
                    json!(rows)
                })
                .collect();
            json!({"id": c.id, "dim": c.rep.dims, "mats": mats, "aut": c.aut})
        })
        .collect();
    let hall: Vec<Value> = table.hall.iter().map(|(&(c, a, b), &g)| json!({"c": c, "a": a, "b": b, "g": g})).collect();
    let mut gamma = Vec::new();
    for (&(m, n, a, b), g) in &table.gamma {
        let (num, den) = rational_parts(&rational_string(g))?;
        gamma.push(json!({"m": m, "n": n, "a": a, "b": b, "num": num, "den": den}));
    }
    Ok(json!({
        "quiver": {"n": table.quiver.n, "arrows": table.quiver.arrows},
        "q": table.q,
        "bound": table.bound,
        "classes": classes,
        "hom": table.hom,
        "ext1": table.ext1,
        "hall": hall,
        "gamma": gamma,
    }))
}

/// Paths at which two JSON values differ, at most `limit` of them.
pub fn json_diff(expected: &Value, found: &Value, limit: usize) -> Vec<String> {
    let mut out = Vec::new();
    diff_into("", expected, found, limit, &mut out);
    out
}

fn diff_into(path: &str, a: &Value, b: &Value, limit: usize, out: &mut Vec<String>) {
    if out.len() >= limit || a == b {
        return;
    }
    match (a, b) {
        (Value::Object(x), Value::Object(y)) => {
            for (k, v) in x {
                match y.get(k) {
                    Some(w) => diff_into(&format!("{}/{}", path, k), v, w, limit, out),
                    None => out.push(format!("{}/{}: missing", path, k)),
                }
            }
            for k in y.keys() {
                if !x.contains_key(k) && out.len() < limit {
                    out.push(format!("{}/{}: unexpected", path, k));
                }
            }
        }
        (Value::Array(x), Value::Array(y)) if x.len() == y.len() => {
            for (i, (v, w)) in x.iter().zip(y.iter()).enumerate() {
                diff_into(&format!("{}/{}", path, i), v, w, limit, out);
            }
        }
        _ => out.push(format!("{}: expected {} found {}", if path.is_empty() { "/" } else { path }, short(a), short(b))),
    }
}

fn short(v: &Value) -> String {
    let s = v.to_string();
    if s.chars().count() > 60 {
        let head: String = s.chars().take(57).collect();
        format!("{}...", head)
    } else {
        s
    }
}

/// Outcome of writing or re-verifying a cache file.
pub enum CacheStatus {
    Written,
    Unchanged,
    Differs(Vec<String>),
}

/// Write the cache, or compare an existing file against the freshly built table.
pub fn store_or_verify(path: &Path, table: &CategoryTable) -> Result<CacheStatus, CliError> {
    let fresh = table_json(table)?;
    if path.exists() {
        let text = fs::read_to_string(path).map_err(|e| CliError::Io(format!("{}: {}", path.display(), e)))?;
        let found: Value = match serde_json::from_str(&text) {
            Ok(v) => v,
            Err(e) => return Ok(CacheStatus::Differs(vec![format!("unreadable cache: {}", e)])),
        };
        let diffs = json_diff(&fresh, &found, 20);
        return Ok(if diffs.is_empty() { CacheStatus::Unchanged } else { CacheStatus::Differs(diffs) });
    }
    if let Some(parent) = path.parent() {
        fs::create_dir_all(parent).map_err(|e| CliError::Io(format!("{}: {}", parent.display(), e)))?;
    }
    let text = serde_json::to_string_pretty(&fresh).map_err(|e| CliError::Io(e.to_string()))?;
    fs::write(path, text + "\n").map_err(|e| CliError::Io(format!("{}: {}", path.display(), e)))?;
    Ok(CacheStatus::Written)
}
