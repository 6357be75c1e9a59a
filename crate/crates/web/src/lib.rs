//! WebAssembly bindings for a static demo page: stalk profiles, membership
//! and truncation of sheaf expressions on the built-in spaces.
//!
//! Each export returns a JSON string; the plain functions behind them are
//! ordinary Rust and are tested natively.

use std::collections::BTreeMap;
use std::sync::Arc;

use halfstep::cellspace::{builtin, parse_sheaf, SheafComplex, StratPoset};
use halfstep::dz::{CutParam, Flavor, Side};
use halfstep::intlin::FgAbGroup;
use halfstep::perv::{truncate, Profile, Structure};
use serde::Serialize;
use wasm_bindgen::prelude::*;

type Groups = BTreeMap<i64, String>;

fn space(name: &str) -> Result<Arc<StratPoset>, String> {
    builtin::by_name(name).map(|x| Arc::new(x.face_poset())).ok_or_else(|| format!("unknown space `{name}`"))
}

fn sheaf(space_name: &str, expr: &str) -> Result<SheafComplex, String> {
    parse_sheaf(&space(space_name)?, expr).map_err(|e| e.to_string())
}

fn cut(s: &str) -> Result<CutParam, String> {
    s.parse().map_err(|e: halfstep::dz::ParseCutError| e.to_string())
}

fn structure(s: &str) -> Result<Structure, String> {
    match s {
        "sd" => Ok(Structure::Sd),
        "ks" => Ok(Structure::Ks),
        _ => Err(format!("structure `{s}`: expected sd or ks")),
    }
}

fn groups(h: &BTreeMap<i64, FgAbGroup>) -> Groups {
    h.iter().map(|(&i, g)| (i, g.to_string())).collect()
}

#[derive(Serialize)]
struct CellRow {
    cell: String,
    dim: usize,
    stalk: Groups,
    costalk: Groups,
}

fn rows(k: &SheafComplex, p: &Profile) -> Vec<CellRow> {
    let base = k.base();
    (0..base.len())
        .filter(|&s| !p.stalks[s].is_empty() || !p.costalks[s].is_empty())
        .map(|s| CellRow { cell: base.id(s).to_string(), dim: base.dim(s), stalk: groups(&p.stalks[s]), costalk: groups(&p.costalks[s]) })
        .collect()
}

fn json<T: Serialize>(v: &T) -> String {
    serde_json::to_string(v).expect("serializable")
}

/// Stalk and costalk cohomology at every cell where either is nonzero.
pub fn profile_json(space_name: &str, expr: &str) -> Result<String, String> {
    let k = sheaf(space_name, expr)?;
    Ok(json(&rows(&k, &Profile::of(&k))))
}

#[derive(Serialize)]
struct Membership {
    le: Option<String>,
    ge: Option<String>,
}

/// `null` for a member, else the first failing cell and degree.
pub fn membership_json(space_name: &str, expr: &str, c: &str, st: &str) -> Result<String, String> {
    let k = sheaf(space_name, expr)?;
    let (c, st) = (cut(c)?, structure(st)?);
    let p = Profile::of(&k);
    let base = k.base();
    let witness = |side| p.failure(c, st, side, false).map(|f| format!("{} in degree {}", base.id(f.cell), f.degree));
    Ok(json(&Membership { le: witness(Side::Le), ge: witness(Side::Ge) }))
}

#[derive(Serialize)]
struct Truncation {
    triangle: bool,
    lower: Vec<CellRow>,
    upper: Vec<CellRow>,
}

/// The truncation triangle at `c`, flavor `le-gt` or `lt-ge`.
pub fn truncate_json(space_name: &str, expr: &str, c: &str, flavor: &str, st: &str) -> Result<String, String> {
    let k = sheaf(space_name, expr)?;
    let flavor = match flavor {
        "le-gt" => Flavor::LeGt,
        "lt-ge" => Flavor::LtGe,
        _ => return Err(format!("flavor `{flavor}`: expected le-gt or lt-ge")),
    };
    let t = truncate(&k, cut(c)?, flavor, structure(st)?);
    let lower = rows(&t.lower, &Profile::of(&t.lower));
    let upper = rows(&t.upper, &Profile::of(&t.upper));
    Ok(json(&Truncation { triangle: t.verify().is_ok(), lower, upper }))
}

#[wasm_bindgen]
pub fn profile(space: &str, sheaf: &str) -> Result<String, JsValue> {
    profile_json(space, sheaf).map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen]
pub fn membership(space: &str, sheaf: &str, cut: &str, structure: &str) -> Result<String, JsValue> {
    membership_json(space, sheaf, cut, structure).map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen]
pub fn truncation(space: &str, sheaf: &str, cut: &str, flavor: &str, structure: &str) -> Result<String, JsValue> {
    truncate_json(space, sheaf, cut, flavor, structure).map_err(|e| JsValue::from_str(&e))
}
