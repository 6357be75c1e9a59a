use std::sync::Arc;

use crate::cellspace::{costalk, extend_zero, point_resolution, Region, SheafComplex, SheafCone, SheafMap, StratPoset};
use crate::dz::{minimal_model, ChainMap, FreeComplex};
use crate::int::Int;
use crate::intlin::IntMatrix;
use crate::Error;

/// A map `φ: Q → K` built one cell at a time from point sheaves `R_σ ⊗ M_σ`,
/// each chosen to kill part of the costalk of `cone(φ)` at `σ`.
#[derive(Clone, Debug)]
pub struct Killing {
    pub lower: SheafComplex,
    pub to_k: SheafMap,
    /// The complexes `M_σ` attached so far, in order.
    pub pieces: Vec<(usize, FreeComplex)>,
}

impl Killing {
    pub fn start(k: &SheafComplex) -> Killing {
        let q = SheafComplex::zero(k.base().clone());
        Killing { to_k: SheafMap::zero(&q, k), lower: q, pieces: Vec::new() }
    }

    pub fn target(&self) -> &SheafComplex {
        &self.to_k.target
    }

    pub fn cone(&self) -> SheafCone {
        self.to_k.cone()
    }

    /// Attaches `R_σ ⊗ M` along `m: M → costalk(cone(φ), σ)`; `choose` sees the costalk
    /// and returns `m`, or `None` to leave the cell alone. Returns whether a piece was added.
    pub fn step(&mut self, s: usize, choose: impl FnOnce(&FreeComplex) -> Option<ChainMap>) -> bool {
        let b = self.cone().complex;
        let base = b.base().clone();
        let r = point_resolution(&base, s);
        let layout = r.hom_layout(&b);
        let c = layout.complex(r.complex(), b.complex());
        let Some(m) = choose(&c) else {
            return false;
        };
        let mm = m.source().clone();
        if mm.is_zero() {
            return false;
        }
        let e = r.tensor_module(&mm);
        let (rx, ex) = (r.complex(), e.complex());
        let (q, k) = (self.lower.complex(), self.target().complex());
        let offset = |n: i64, i: i64| -> usize { (rx.lo()..i).map(|t| rx.rank(t) * mm.rank(n - t)).sum() };
        // ψ^n = (ψ_K, ψ_Q): E^n → K^n ⊕ Q^{n+1}, the evaluation r ⊗ f ↦ (−1)^{|r||f|} f(r).
        let mut psi_k: std::collections::BTreeMap<i64, Vec<(usize, usize, Int)>> = Default::default();
        let mut psi_q: std::collections::BTreeMap<i64, Vec<(usize, usize, Int)>> = Default::default();
        for j in mm.degrees() {
            let Some(mat) = m.mat_ref(j) else { continue };
            for (p, col, x) in mat.entries() {
                let (i, g, a) = layout.basis[&j][p];
                let n = i + j;
                let idx = offset(n, i) + g * mm.rank(j) + col;
                let v = if (i * j).rem_euclid(2) == 0 { x.clone() } else { -x };
                if a < k.rank(n) {
                    psi_k.entry(n).or_default().push((a, idx, v));
                } else {
                    psi_q.entry(n).or_default().push((a - k.rank(n), idx, v));
                }
            }
        }
        let pk = |n: i64| IntMatrix::from_triplets(k.rank(n), ex.rank(n), psi_k.get(&n).cloned().unwrap_or_default());
        let pq = |n: i64| IntMatrix::from_triplets(q.rank(n + 1), ex.rank(n), psi_q.get(&n).cloned().unwrap_or_default());
        let (lo, hi) = span(q, ex);
        let q2 = FreeComplex::build(
            lo,
            hi,
            |n| q.rank(n) + ex.rank(n),
            |n| IntMatrix::block(&q.d(n), &pq(n).neg(), &IntMatrix::zeros(ex.rank(n + 1), q.rank(n)), &ex.d(n)),
        );
        let lower = self.lower.direct_sum(&e);
        debug_assert_eq!(lower.complex().ranks(), q2.ranks());
        let lower = SheafComplex::from_parts(base, q2.clone(), lower.all_cells().clone());
        let phi = ChainMap::from_fn(q2, k.clone(), |n| IntMatrix::hstack(&self.to_k.map.mat(n), &pk(n)));
        debug_assert!(phi.check().is_ok());
        self.to_k = SheafMap::from_parts(lower.clone(), self.target().clone(), phi);
        self.lower = lower;
        self.pieces.push((s, mm));
        true
    }
}

fn span(a: &FreeComplex, b: &FreeComplex) -> (i64, i64) {
    match (a.is_zero(), b.is_zero()) {
        (true, _) => (b.lo(), b.hi()),
        (_, true) => (a.lo(), a.hi()),
        _ => (a.lo().min(b.lo()), a.hi().max(b.hi())),
    }
}

/// Cells by decreasing dimension, ties by index.
pub fn top_down(base: &StratPoset) -> Vec<usize> {
    let mut v: Vec<usize> = (0..base.len()).collect();
    v.sort_by_key(|&s| (std::cmp::Reverse(base.dim(s)), s));
    v
}

/// Kills the whole costalk: `m` is a minimal model of it.
pub fn kill_all(c: &FreeComplex) -> Option<ChainMap> {
    if c.is_acyclic() {
        return None;
    }
    Some(minimal_model(c).map)
}

/// `Rj_* G` for `G` on an open region, with the unit `j_! G → Rj_* G`.
#[derive(Clone, Debug)]
pub struct Pushforward {
    pub complex: SheafComplex,
    pub unit: SheafMap,
    pub killing: Killing,
}

pub fn pushforward_open(g: &SheafComplex, region: &Region, base: &Arc<StratPoset>) -> Result<Pushforward, Error> {
    let k = extend_zero(g, region, base)?;
    let mut kill = Killing::start(&k);
    for s in top_down(base) {
        if !region.mask[s] {
            kill.step(s, kill_all);
        }
    }
    let c = kill.cone();
    Ok(Pushforward { complex: c.complex, unit: c.incl, killing: kill })
}

/// Whether the costalk of `k` at every cell outside the region vanishes.
pub fn costalks_vanish_off(k: &SheafComplex, mask: &[bool]) -> bool {
    (0..k.base().len()).all(|s| mask[s] || costalk(k, s).is_acyclic())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cellspace::{builtin, constant_sheaf, punctured_star, restrict_open, sections};
    use crate::intlin::FgAbGroup;
    use std::collections::BTreeMap;

    #[test]
    fn pushforward_from_open_edge() {
        let x = Arc::new(builtin::interval().face_poset());
        let e = x.cell("0-1").unwrap();
        let u = Region::open(&x, x.mask(&[e])).unwrap();
        let g = restrict_open(&constant_sheaf(&x, &FreeComplex::z(0)), &u).unwrap();
        let p = pushforward_open(&g, &u, &x).unwrap();
        p.complex.check().unwrap();
        p.unit.map.check().unwrap();
        assert!(costalks_vanish_off(&p.complex, &u.mask));
        let z: BTreeMap<i64, FgAbGroup> = [(0, FgAbGroup::free(1))].into_iter().collect();
        for s in 0..3 {
            assert_eq!(p.complex.stalk(s).cohomology_all(), z);
        }
    }

    #[test]
    fn pushforward_on_cone() {
        let x = Arc::new(builtin::rp3_cone().face_poset());
        let apex = x.cell("c").unwrap();
        let k = constant_sheaf(&x, &FreeComplex::z(0));
        let mut kill = Killing::start(&k);
        assert!(kill.step(apex, kill_all));
        let b = kill.cone().complex;
        b.check().unwrap();
        assert!(costalk(&b, apex).is_acyclic());
        let want: BTreeMap<i64, FgAbGroup> =
            [(0, FgAbGroup::free(1)), (2, FgAbGroup::cyclic(2)), (3, FgAbGroup::free(1))].into_iter().collect();
        assert_eq!(b.stalk(apex).cohomology_all(), want);
        let all = vec![true; x.len()];
        assert_eq!(sections(&b, &all).unwrap().cohomology_all(), sections(&k, &punctured_star(&x, apex)).unwrap().cohomology_all());
    }
}
