//! Short sheaf expressions, e.g. `constant`, `jshriek@c`,
//! `constant+sky@0:Z/2[1]`.
//!
//! A term is `NAME[@CELL][:COEF][[SHIFT]]` with `COEF` either `Z` or `Z/n`;
//! terms are joined by `+`. Names:
//! - `constant`: the constant sheaf;
//! - `sky@σ`: the skyscraper at `σ`;
//! - `closed@σ`: the constant sheaf on the closure of `σ`, extended by zero;
//! - `jshriek@σ`: extension by zero from the complement of the closure of `σ`;
//! - `jstar@σ`: derived push-forward from the complement of the closure of `σ`.

use std::sync::Arc;

use crate::cellspace::{
    closed_indicator, constant_sheaf, open_indicator, pushforward_open, restrict_open, skyscraper, Region, SheafComplex, StratPoset,
};
use crate::dz::FreeComplex;
use crate::Error;

const NAMES: &str = "constant, sky@CELL, closed@CELL, jshriek@CELL, jstar@CELL";

fn bad(term: &str, why: &str) -> Error {
    Error::Parse(format!("sheaf term `{term}`: {why}"))
}

fn coefficient(term: &str, s: &str) -> Result<FreeComplex, Error> {
    match s.strip_prefix("Z/") {
        None if s == "Z" => Ok(FreeComplex::z(0)),
        None => Err(bad(term, "coefficients are Z or Z/n")),
        Some(n) => match n.parse::<i64>() {
            Ok(n) if n >= 2 => Ok(FreeComplex::torsion_model(n, 0)),
            _ => Err(bad(term, "Z/n needs n ≥ 2")),
        },
    }
}

fn term(base: &Arc<StratPoset>, t: &str) -> Result<SheafComplex, Error> {
    let mut rest = t.trim();
    let mut shift = 0;
    if let Some(open) = rest.strip_suffix(']').and_then(|r| r.rfind('[').map(|k| (r, k))) {
        let (r, k) = open;
        shift = r[k + 1..].parse().map_err(|_| bad(t, "shift must be an integer"))?;
        rest = &r[..k];
    }
    let m = match rest.split_once(':') {
        Some((head, c)) => {
            rest = head;
            coefficient(t, c)?
        }
        None => FreeComplex::z(0),
    };
    let (name, cell) = match rest.split_once('@') {
        Some((n, c)) => (n, Some(base.cell(c).map_err(|e| bad(t, &e.to_string()))?)),
        None => (rest, None),
    };
    let need = || cell.ok_or_else(|| bad(t, "needs @CELL"));
    let complement = |s: usize| -> Vec<bool> { base.mask(&base.closure(s)).iter().map(|&z| !z).collect() };
    let k = match name {
        "constant" => constant_sheaf(base, &m),
        "sky" => skyscraper(base, need()?, &m),
        "closed" => {
            let s = need()?;
            closed_indicator(base, &base.mask(&base.closure(s))).expect("closures are closed").tensor_module(&m)
        }
        "jshriek" => open_indicator(base, &complement(need()?)).expect("complements of closures are open").tensor_module(&m),
        "jstar" => {
            let u = complement(need()?);
            if !u.iter().any(|&b| b) {
                return Err(bad(t, "the complement is empty"));
            }
            let reg = Region::open(base, u).expect("complements of closures are open");
            let g = restrict_open(&constant_sheaf(base, &m), &reg).expect("open");
            pushforward_open(&g, &reg, base).expect("open").complex
        }
        _ => return Err(bad(t, &format!("unknown name; expected one of {NAMES}"))),
    };
    Ok(k.shift(shift))
}

/// Parses a `+`-separated sum of terms into a sheaf complex on `base`.
pub fn parse_sheaf(base: &Arc<StratPoset>, expr: &str) -> Result<SheafComplex, Error> {
    let mut out: Option<SheafComplex> = None;
    for t in expr.split('+') {
        let k = term(base, t)?;
        out = Some(match out {
            None => k,
            Some(acc) => acc.direct_sum(&k),
        });
    }
    out.ok_or_else(|| bad(expr, "empty expression"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cellspace::builtin;

    #[test]
    fn terms() {
        let x = Arc::new(builtin::circle().face_poset());
        let k = parse_sheaf(&x, "constant+sky@0:Z/2[1]").unwrap();
        let h = k.stalk(0).cohomology_all();
        assert_eq!(h.len(), 2);
        assert!(h[&-1].is_torsion() && h[&0].is_torsion_free());
        let j = parse_sheaf(&x, "jshriek@0").unwrap();
        assert!(j.stalk(0).is_acyclic());
        for bad in ["", "sky", "sky@9", "constant:Q", "constant[x]", "blob"] {
            assert!(parse_sheaf(&x, bad).is_err(), "{bad}");
        }
    }
}
