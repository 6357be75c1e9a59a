//! Solving for chain maps and homotopies as integer linear systems.

use std::collections::BTreeMap;

use crate::dz::{cone, ChainMap, FreeComplex, HomLayout};
use crate::int::Int;
use crate::intlin::snf::solve;
use crate::intlin::IntMatrix;

/// Restricts which elementary maps `X^i[b] → Y^j[a]` may appear; see [`HomLayout::new`].
pub type Mask<'a> = &'a dyn Fn(i64, usize, i64, usize) -> bool;

pub fn no_mask(_: i64, _: usize, _: i64, _: usize) -> bool {
    true
}

/// Matrix of `φ ↦ g ∘ φ` from `Hom^n(A, B)` to `Hom^n(A, X)` for `g: B → X`.
fn post_compose(n: i64, la: &HomLayout, lx: &HomLayout, g: &ChainMap) -> IntMatrix {
    let mut trip = Vec::new();
    let gt: BTreeMap<i64, IntMatrix> = g.mats().iter().map(|(&j, m)| (j, m.transpose())).collect();
    for (col, &(i, b, a)) in la.basis.get(&n).into_iter().flatten().enumerate() {
        if let Some(t) = gt.get(&(i + n)) {
            for (a2, v) in t.row_entries(a) {
                if let Some(row) = lx.position(n, i, b, *a2) {
                    trip.push((row, col, v.clone()));
                }
            }
        }
    }
    IntMatrix::from_triplets(lx.dim(n), la.dim(n), trip)
}

/// A chain map `φ: A → B` with `g ∘ φ` homotopic to `f`, for `f: A → X` and `g: B → X`.
pub fn lift_over_masked(f: &ChainMap, g: &ChainMap, mask_ab: Mask, mask_ax: Mask) -> Option<ChainMap> {
    let (a, b, x) = (f.source(), g.source(), f.target());
    let lab = HomLayout::new(a, b, mask_ab);
    let lax = HomLayout::new(a, x, mask_ax);
    let hab = lab.complex(a, b);
    let hax = lax.complex(a, x);
    let (n_phi, n_h) = (lab.dim(0), lax.dim(-1));
    let d1 = hab.d(0);
    let p = post_compose(0, &lab, &lax, g);
    let d2 = hax.d(-1);
    // [[d1, 0], [p, −d2]] · (φ, h) = (0, f)
    let top = IntMatrix::hstack(&d1, &IntMatrix::zeros(d1.rows(), n_h));
    let bottom = IntMatrix::hstack(&p, &d2.neg());
    let m = IntMatrix::vstack(&top, &bottom);
    let mut rhs = vec![Int::ZERO; d1.rows()];
    rhs.extend(lax.vector_of(0, |i| f.mat(i)));
    let sol = solve(&m, &rhs)?;
    let mats = lab.maps_of(0, &sol[..n_phi], a, b);
    Some(ChainMap::from_fn(a.clone(), b.clone(), |i| mats.get(&i).cloned().unwrap_or_else(|| IntMatrix::zeros(b.rank(i), a.rank(i)))))
}

pub fn lift_over(f: &ChainMap, g: &ChainMap) -> Option<ChainMap> {
    lift_over_masked(f, g, &no_mask, &no_mask)
}

/// A homotopy `h` with `k = d∘h + h∘d`, keyed by source degree (`h_i : L^i → U^{i−1}`).
pub fn null_homotopy_masked(k: &ChainMap, mask: Mask) -> Option<BTreeMap<i64, IntMatrix>> {
    let (l, u) = (k.source(), k.target());
    let lay = HomLayout::new(l, u, mask);
    let h = lay.complex(l, u);
    let v = lay.vector_of(0, |i| k.mat(i));
    if v.iter().all(Int::is_zero) {
        return Some(BTreeMap::new());
    }
    let sol = solve(&h.d(-1), &v)?;
    Some(lay.maps_of(-1, &sol, l, u))
}

/// For `ι: L → X` and `π: X → U` with `π ∘ ι ≃ 0`, the induced map `cone(ι) → U`.
pub fn induced_cone_map_masked(iota: &ChainMap, pi: &ChainMap, mask_lu: Mask) -> Option<ChainMap> {
    let (l, u) = (iota.source(), pi.target());
    let comp = iota.then(pi);
    let h = null_homotopy_masked(&comp, mask_lu)?;
    let c = cone(iota).complex;
    Some(ChainMap::from_fn(c, u.clone(), |i| {
        let hi = h.get(&(i + 1)).cloned().unwrap_or_else(|| IntMatrix::zeros(u.rank(i), l.rank(i + 1)));
        IntMatrix::hstack(&pi.mat(i), &hi)
    }))
}

pub fn induced_cone_map(iota: &ChainMap, pi: &ChainMap) -> Option<ChainMap> {
    induced_cone_map_masked(iota, pi, &no_mask)
}

/// Whether `X` and `Y` have isomorphic cohomology in every degree.
pub fn same_cohomology(x: &FreeComplex, y: &FreeComplex) -> bool {
    x.cohomology_all() == y.cohomology_all()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dz::{is_quasi_iso, minimal_model};

    #[test]
    fn lifts_model_maps() {
        let x = FreeComplex::two_term(0, IntMatrix::from_rows(2, 2, &[2, 1, 0, 3]));
        let m = minimal_model(&x);
        // Lift the identity of X through the model map: a quasi-inverse.
        let inv = lift_over(&ChainMap::identity(&x), &m.map).expect("lift exists");
        inv.check().unwrap();
        assert!(is_quasi_iso(&inv));
    }

    #[test]
    fn cone_comparison() {
        let z = FreeComplex::z(0);
        let two = ChainMap::from_fn(z.clone(), z.clone(), |_| IntMatrix::from_rows(1, 1, &[2]));
        let c = cone(&two);
        let phi = induced_cone_map(&two, &c.incl).expect("composite is null-homotopic");
        phi.check().unwrap();
        assert!(is_quasi_iso(&phi));
    }
}
