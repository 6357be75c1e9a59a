//! The middle-perversity and self-dual t-structures on sheaf complexes over a cell poset.
//!
//! Both are tested cellwise: the `≤` side on stalks at `c − dim σ/2`, the `≥` side
//! on costalks at the same shifted cut.

mod example;
mod funct;
mod random;
mod verify;

use std::collections::BTreeMap;
use std::fmt;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use rayon::prelude::*;

use crate::cellspace::{costalk, top_down, Killing, SheafComplex, SheafMap, StratPoset};
use crate::dz::{cone, is_quasi_iso, minimal_model, split_at, ChainMap, CutParam, Flavor, FreeComplex, Half, Side};
use crate::intlin::{codim_support, FgAbGroup, IntMatrix};
use crate::tmod::member_half;

pub use example::{rp3_cone_battery, BatteryLine};
pub use funct::{check_funct, check_funct_with, FunctCheck, FunctMap, FunctReport};
pub use random::{random_module, random_sheaf};
pub use verify::{verify_tstructure, VerifyFailure, VerifyReport};

/// Which of the two t-structures.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, Serialize, Deserialize)]
pub enum Structure {
    /// Self-dual: half-integer levels with torsion at the half steps.
    Sd,
    /// Middle perversity: integer levels only.
    Ks,
}

/// `sup_σ (dim σ − codim H^i(K_σ))`, or `−∞`.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug, Serialize, Deserialize)]
pub enum PDim {
    NegInf,
    Finite(i64),
}

impl fmt::Display for PDim {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PDim::NegInf => write!(f, "-inf"),
            PDim::Finite(v) => write!(f, "{v}"),
        }
    }
}

pub fn pdim(k: &SheafComplex, i: i64) -> PDim {
    let base = k.base();
    (0..base.len())
        .filter_map(|s| codim_support(&k.stalk(s).cohomology(i)).value().map(|m| PDim::Finite(base.dim(s) as i64 - m)))
        .max()
        .unwrap_or(PDim::NegInf)
}

/// A cell whose stalk (`≤` side) or costalk (`≥` side) is out of range, and the
/// lowest offending degree.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CellFailure {
    pub cell: usize,
    pub degree: i64,
}

/// Membership of a single module complex at the shifted cut; returns the lowest bad degree.
fn bad_degree(h: &BTreeMap<i64, FgAbGroup>, c: CutParam, st: Structure, side: Side, strict: bool) -> Option<i64> {
    match st {
        Structure::Sd => {
            let s = match (side, strict) {
                (Side::Le, false) => c.canon_le(),
                (Side::Le, true) => c.strict_below(),
                (Side::Ge, false) => c.canon_ge(),
                (Side::Ge, true) => c.strict_above(),
            };
            h.iter().find(|(&i, g)| !member_half(&[(i, (*g).clone())].into_iter().collect(), s, side)).map(|(&i, _)| i)
        }
        Structure::Ks => {
            let ci = |i: i64| CutParam::int(i);
            h.keys().copied().find(|&i| match (side, strict) {
                (Side::Le, false) => ci(i) > c,
                (Side::Le, true) => ci(i) >= c,
                (Side::Ge, false) => ci(i) < c,
                (Side::Ge, true) => ci(i) <= c,
            })
        }
    }
}

/// The complex tested at `σ`: the stalk for `≤`, the costalk for `≥`.
pub fn probe(k: &SheafComplex, s: usize, side: Side) -> FreeComplex {
    match side {
        Side::Le => k.stalk(s),
        Side::Ge => costalk(k, s),
    }
}

/// Stalk and costalk cohomology at every cell, for repeated membership queries.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Profile {
    pub dims: Vec<usize>,
    pub stalks: Vec<BTreeMap<i64, FgAbGroup>>,
    pub costalks: Vec<BTreeMap<i64, FgAbGroup>>,
}

impl Profile {
    pub fn of(k: &SheafComplex) -> Profile {
        let base = k.base();
        let n = base.len();
        let stalks = (0..n).into_par_iter().map(|s| k.stalk(s).cohomology_all()).collect();
        let costalks = (0..n).into_par_iter().map(|s| costalk(k, s).cohomology_all()).collect();
        Profile { dims: (0..n).map(|s| base.dim(s)).collect(), stalks, costalks }
    }

    /// A complex on a point: stalk and costalk coincide.
    pub fn of_module(x: &FreeComplex) -> Profile {
        let h = x.cohomology_all();
        Profile { dims: vec![0], stalks: vec![h.clone()], costalks: vec![h] }
    }

    fn cell_failure(&self, s: usize, c: CutParam, st: Structure, side: Side, strict: bool) -> Option<CellFailure> {
        let h = match side {
            Side::Le => &self.stalks[s],
            Side::Ge => &self.costalks[s],
        };
        let cs = c.add_halves(-(self.dims[s] as i64));
        bad_degree(h, cs, st, side, strict).map(|degree| CellFailure { cell: s, degree })
    }

    pub fn failure(&self, c: CutParam, st: Structure, side: Side, strict: bool) -> Option<CellFailure> {
        (0..self.dims.len()).find_map(|s| self.cell_failure(s, c, st, side, strict))
    }

    /// Every failing cell with its lowest offending degree, in cell order.
    pub fn witnesses(&self, c: CutParam, st: Structure, side: Side, strict: bool) -> Vec<CellFailure> {
        (0..self.dims.len()).filter_map(|s| self.cell_failure(s, c, st, side, strict)).collect()
    }

    pub fn member(&self, c: CutParam, st: Structure, side: Side) -> bool {
        self.failure(c, st, side, false).is_none()
    }

    pub fn member_strict(&self, c: CutParam, st: Structure, side: Side) -> bool {
        self.failure(c, st, side, true).is_none()
    }

    pub fn is_zero(&self) -> bool {
        self.stalks.iter().all(|h| h.is_empty())
    }
}

/// First failing cell for `K ∈ ≤c` / `≥c`, or `<c` / `>c` when `strict`.
pub fn failure(k: &SheafComplex, c: CutParam, st: Structure, side: Side, strict: bool) -> Option<CellFailure> {
    let base = k.base();
    (0..base.len()).find_map(|s| {
        let cs = c.add_halves(-(base.dim(s) as i64));
        bad_degree(&probe(k, s, side).cohomology_all(), cs, st, side, strict).map(|degree| CellFailure { cell: s, degree })
    })
}

pub fn member_sd(k: &SheafComplex, c: CutParam, side: Side) -> bool {
    failure(k, c, Structure::Sd, side, false).is_none()
}

pub fn member_ks(k: &SheafComplex, c: CutParam, side: Side) -> bool {
    failure(k, c, Structure::Ks, side, false).is_none()
}

pub fn member_in(k: &SheafComplex, c: CutParam, st: Structure, side: Side) -> bool {
    failure(k, c, st, side, false).is_none()
}

/// `K ∈ <c` (side `Le`) or `K ∈ >c` (side `Ge`).
pub fn member_strict(k: &SheafComplex, c: CutParam, st: Structure, side: Side) -> bool {
    failure(k, c, st, side, true).is_none()
}

/// The two halves a flavor splits into: lower side is strict for `(<,≥)`, upper side for `(≤,>)`.
pub fn member_lower(k: &SheafComplex, c: CutParam, st: Structure, flavor: Flavor) -> bool {
    failure(k, c, st, Side::Le, flavor == Flavor::LtGe).is_none()
}

pub fn member_upper(k: &SheafComplex, c: CutParam, st: Structure, flavor: Flavor) -> bool {
    failure(k, c, st, Side::Ge, flavor == Flavor::LeGt).is_none()
}

/// Per-cell level `s` of a truncation: the split at `σ` is `(≤s, ≥s+½)`.
pub fn cell_level(c: CutParam, dim: usize, st: Structure, flavor: Flavor) -> Half {
    let cs = c.add_halves(-(dim as i64));
    match (st, flavor) {
        (Structure::Sd, f) => f.level(cs),
        (Structure::Ks, Flavor::LeGt) => Half::int(cs.floor()),
        (Structure::Ks, Flavor::LtGe) => Half::int(cs.ceil() - 1),
    }
}

/// Truncation triangle `lower → K → upper → lower[1]` of sheaf complexes.
#[derive(Clone, Debug)]
pub struct SheafTriangle {
    pub lower: SheafComplex,
    pub upper: SheafComplex,
    pub to_k: SheafMap,
    pub from_k: SheafMap,
    pub conn: SheafMap,
    /// `h_i: lower^i → upper^{i−1}` with `from_k ∘ to_k = d h + h d`.
    pub homotopy: BTreeMap<i64, IntMatrix>,
    /// The point-sheaf pieces `(σ, M_σ)` from which `lower` was assembled, in order.
    pub pieces: Vec<(usize, FreeComplex)>,
}

impl SheafTriangle {
    /// Chain-map checks, the homotopy identity, and at every cell that the map
    /// `cone(lower → K) → upper` built from the homotopy is a quasi-isomorphism.
    pub fn verify(&self) -> Result<(), String> {
        for (name, f) in [("lower → K", &self.to_k), ("K → upper", &self.from_k), ("upper → lower[1]", &self.conn)] {
            f.map.check().map_err(|e| format!("{name}: {e}"))?;
        }
        let (l, u) = (self.lower.complex(), self.upper.complex());
        let h = |i: i64| self.homotopy.get(&i).cloned().unwrap_or_else(|| IntMatrix::zeros(u.rank(i - 1), l.rank(i)));
        let comp = self.to_k.map.then(&self.from_k.map);
        for i in l.degrees() {
            let rhs = u.d(i - 1).mul(&h(i)).add(&h(i + 1).mul(&l.d(i)));
            if comp.mat(i) != rhs {
                return Err(format!("degree {i}: homotopy identity fails"));
            }
        }
        let base = self.lower.base();
        for s in 0..base.len() {
            let to = self.to_k.stalk(s);
            let from = self.from_k.stalk(s);
            let us = from.target().clone();
            let hs = |i: i64| h(i).select(&self.upper.stalk_indices(s, i - 1), &self.lower.stalk_indices(s, i));
            let c = cone(&to).complex;
            let phi = ChainMap::from_fn(c, us, |i| IntMatrix::hstack(&from.mat(i), &hs(i + 1)));
            debug_assert!(phi.check().is_ok());
            if phi.check().is_err() || !is_quasi_iso(&phi) {
                return Err(format!("cell {}: cone of lower → K differs from upper", base.id(s)));
            }
        }
        Ok(())
    }
}

/// The homotopy `[0; id]: Q^i → K^{i−1} ⊕ Q^i` witnessing `incl ∘ φ ≃ 0` for a cone.
pub(crate) fn cone_homotopy(q: &FreeComplex, k: &FreeComplex) -> BTreeMap<i64, IntMatrix> {
    q.degrees()
        .map(|i| (i, IntMatrix::vstack(&IntMatrix::zeros(k.rank(i - 1), q.rank(i)), &IntMatrix::identity(q.rank(i)))))
        .collect()
}

/// Kills the part of `C` below level `s`, as a minimal complex mapping into `C`.
pub(crate) fn lower_part(c: &FreeComplex, s: Half) -> Option<ChainMap> {
    if member_half(&c.cohomology_all(), s.plus_half(), Side::Ge) {
        return None;
    }
    let mm = minimal_model(c);
    let sp = split_at(&mm.complex, s);
    let m2 = minimal_model(&sp.lower);
    Some(m2.map.then(&sp.incl).then(&mm.map))
}

/// Truncation by attaching point sheaves cell by cell in `order`.
pub fn truncate_ordered(k: &SheafComplex, c: CutParam, flavor: Flavor, st: Structure, order: &[usize]) -> SheafTriangle {
    let base = k.base().clone();
    let mut kill = Killing::start(k);
    for &s in order {
        let lvl = cell_level(c, base.dim(s), st, flavor);
        kill.step(s, |cs| lower_part(cs, lvl));
    }
    let cone = kill.cone();
    SheafTriangle {
        homotopy: cone_homotopy(kill.lower.complex(), k.complex()),
        lower: kill.lower,
        upper: cone.complex,
        to_k: kill.to_k,
        from_k: cone.incl,
        conn: cone.proj,
        pieces: kill.pieces,
    }
}

pub fn truncate(k: &SheafComplex, c: CutParam, flavor: Flavor, st: Structure) -> SheafTriangle {
    truncate_ordered(k, c, flavor, st, &top_down(k.base()))
}

pub fn sd_truncate(k: &SheafComplex, c: CutParam, flavor: Flavor) -> SheafTriangle {
    truncate(k, c, flavor, Structure::Sd)
}

pub fn ks_truncate(k: &SheafComplex, c: CutParam, flavor: Flavor) -> SheafTriangle {
    truncate(k, c, flavor, Structure::Ks)
}

/// Top-dimension-first order with cells of equal dimension shuffled by `seed`.
pub fn shuffled_order(base: &StratPoset, seed: u64) -> Vec<usize> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(base.len());
    for d in (0..=base.max_dim()).rev() {
        let mut v = base.cells_of_dim(d);
        v.shuffle(&mut rng);
        out.extend(v);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cellspace::{builtin, constant_sheaf, skyscraper};
    use std::sync::Arc;

    fn q(n: i64, d: i64) -> CutParam {
        CutParam::new(n, d)
    }

    #[test]
    fn pdims() {
        let c = Arc::new(builtin::circle().face_poset());
        assert_eq!(pdim(&constant_sheaf(&c, &FreeComplex::z(0)), 0), PDim::Finite(1));
        assert_eq!(pdim(&constant_sheaf(&c, &FreeComplex::torsion_model(2, 0)), 0), PDim::Finite(0));
        assert_eq!(pdim(&skyscraper(&c, 0, &FreeComplex::torsion_model(2, 0)), 0), PDim::Finite(-1));
        assert_eq!(pdim(&SheafComplex::zero(c), 0), PDim::NegInf);
    }

    #[test]
    fn circle_heart() {
        let c = Arc::new(builtin::circle().face_poset());
        let k = constant_sheaf(&c, &FreeComplex::z(0));
        assert!(member_sd(&k, q(1, 2), Side::Le) && member_sd(&k, q(1, 2), Side::Ge));
        assert!(!member_sd(&k, q(1, 4), Side::Le));
        assert!(!member_sd(&k, q(3, 4), Side::Ge));
        assert!(member_ks(&k, q(1, 2), Side::Le) && member_ks(&k, q(1, 2), Side::Ge));
        let f = failure(&k, q(1, 4), Structure::Sd, Side::Le, false).unwrap();
        assert_eq!(c.dim(f.cell), 1);
    }

    #[test]
    fn torsion_skyscraper_hearts() {
        let p = Arc::new(builtin::point().face_poset());
        let k = skyscraper(&p, 0, &FreeComplex::torsion_model(2, 0));
        for side in [Side::Le, Side::Ge] {
            assert!(member_sd(&k, q(-1, 2), side));
            assert!(member_ks(&k, CutParam::int(0), side));
        }
        assert!(!member_sd(&k, CutParam::int(0), Side::Ge));
    }

    #[test]
    fn truncations_on_the_interval() {
        let x = Arc::new(builtin::interval().face_poset());
        let m = FreeComplex::z(0).direct_sum(&FreeComplex::torsion_model(2, 1));
        let k = skyscraper(&x, 0, &m).direct_sum(&constant_sheaf(&x, &FreeComplex::z(0)));
        for st in [Structure::Sd, Structure::Ks] {
            for flavor in [Flavor::LeGt, Flavor::LtGe] {
                for c in [q(-1, 2), q(0, 1), q(1, 2), q(1, 1)] {
                    let t = truncate(&k, c, flavor, st);
                    t.verify().unwrap();
                    assert!(member_lower(&t.lower, c, st, flavor), "{st:?} {flavor:?} {c}");
                    assert!(member_upper(&t.upper, c, st, flavor), "{st:?} {flavor:?} {c}");
                }
            }
        }
        let t = sd_truncate(&constant_sheaf(&x, &FreeComplex::z(0)), q(1, 2), Flavor::LeGt);
        assert!(t.upper.is_stalkwise_acyclic());
    }
}
