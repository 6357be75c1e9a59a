use std::collections::{BTreeMap, HashMap};
use std::sync::Arc;

use crate::cellspace::{point_resolution, resolve, SheafComplex, StratPoset, ValueSheaf};
use crate::dz::{dual, tensor_complex, ChainMap, FreeComplex};
use crate::int::Int;
use crate::intlin::{FgAbGroup, IntMatrix};
use crate::Error;

/// A subset of cells viewed as a space in its own right.
#[derive(Clone, Debug)]
pub struct Region {
    pub poset: Arc<StratPoset>,
    /// Index in the ambient poset of each cell of `poset`.
    pub cells: Vec<usize>,
    pub mask: Vec<bool>,
}

impl Region {
    pub fn new(base: &StratPoset, mask: Vec<bool>) -> Region {
        let (p, cells) = base.subposet(&mask);
        Region { poset: Arc::new(p), cells, mask }
    }

    pub fn open(base: &StratPoset, mask: Vec<bool>) -> Result<Region, Error> {
        if !base.is_up_set(&mask) {
            return Err(Error::NotOpen(describe(base, &mask)));
        }
        Ok(Region::new(base, mask))
    }

    pub fn closed(base: &StratPoset, mask: Vec<bool>) -> Result<Region, Error> {
        if !base.is_down_set(&mask) {
            return Err(Error::NotLocallyClosed(describe(base, &mask)));
        }
        Ok(Region::new(base, mask))
    }

    /// Locally closed: open inside its closure.
    pub fn locally_closed(base: &StratPoset, mask: Vec<bool>) -> Result<Region, Error> {
        let clo = down_closure(base, &mask);
        let ok = (0..base.len()).all(|s| {
            !mask[s] || base.cofaces(s).iter().all(|&t| !clo[t] || mask[t])
        });
        if !ok {
            return Err(Error::NotLocallyClosed(describe(base, &mask)));
        }
        Ok(Region::new(base, mask))
    }
}

fn describe(base: &StratPoset, mask: &[bool]) -> String {
    let ids: Vec<&str> = (0..base.len()).filter(|&s| mask[s]).map(|s| base.id(s)).collect();
    format!("{{{}}}", ids.join(", "))
}

pub(crate) fn down_closure(base: &StratPoset, mask: &[bool]) -> Vec<bool> {
    (0..base.len()).map(|r| (0..base.len()).any(|s| mask[s] && base.le(r, s))).collect()
}

/// Complement of the open star of `σ` minus `σ` itself: `U_σ ∖ {σ}`.
pub fn punctured_star(base: &StratPoset, s: usize) -> Vec<bool> {
    (0..base.len()).map(|t| t != s && base.le(s, t)).collect()
}

/// `i_σ^! K = RHom(ℤ_σ, K)`, computed against the point resolution.
pub fn costalk(k: &SheafComplex, s: usize) -> FreeComplex {
    point_resolution(k.base(), s).rhom(k)
}

/// Projective model of `j_! ℤ_U` for an open `U`.
pub fn open_indicator(base: &Arc<StratPoset>, u: &[bool]) -> Result<SheafComplex, Error> {
    if !base.is_up_set(u) {
        return Err(Error::NotOpen(describe(base, u)));
    }
    Ok(resolve(&ValueSheaf::indicator(base, u)).complex)
}

/// `RΓ(U; K) = RHom(j_! ℤ_U, K)`.
pub fn sections(k: &SheafComplex, u: &[bool]) -> Result<FreeComplex, Error> {
    Ok(open_indicator(k.base(), u)?.rhom(k))
}

/// Basis of the compactly supported cochains: `(degree of g, g, ρ)` per total degree.
type CcBasis = BTreeMap<i64, Vec<(i64, usize, usize)>>;

fn cochains_c(k: &SheafComplex, u: &[bool]) -> (FreeComplex, CcBasis) {
    let base = k.base();
    let cx = k.complex();
    let mut basis: CcBasis = BTreeMap::new();
    for i in cx.degrees() {
        for (b, &g) in k.cells(i).iter().enumerate() {
            for r in 0..base.len() {
                if u[r] && base.le(g, r) {
                    basis.entry(i + base.dim(r) as i64).or_default().push((i, b, r));
                }
            }
        }
    }
    for v in basis.values_mut() {
        v.sort();
    }
    let index: HashMap<(i64, usize, usize), usize> =
        basis.values().flat_map(|v| v.iter().enumerate().map(|(p, &e)| (e, p))).collect();
    let lo = basis.keys().next().copied().unwrap_or(0);
    let hi = basis.keys().last().copied().unwrap_or(-1);
    let dim = |n: i64| basis.get(&n).map_or(0, |v| v.len());
    let out = FreeComplex::build(lo, hi, dim, |n| {
        let mut trip = Vec::new();
        for (c, &(i, b, r)) in basis.get(&n).into_iter().flatten().enumerate() {
            if let Some(d) = cx.d_ref(i) {
                for row in 0..d.rows() {
                    let x = d.get(row, b);
                    if !x.is_zero() {
                        trip.push((index[&(i + 1, row, r)], c, x.clone()));
                    }
                }
            }
            let sign: i64 = if i.rem_euclid(2) == 0 { 1 } else { -1 };
            for &t in base.cofaces(r) {
                if u[t] {
                    trip.push((index[&(i, b, t)], c, Int::from(sign * base.incidence(t, r))));
                }
            }
        }
        IntMatrix::from_triplets(dim(n + 1), dim(n), trip)
    });
    (out, basis)
}

/// `RΓ_c(U; K)` as signed cellular cochains with values in `K`.
pub fn sections_c(k: &SheafComplex, u: &[bool]) -> Result<FreeComplex, Error> {
    if !k.base().is_up_set(u) {
        return Err(Error::NotOpen(describe(k.base(), u)));
    }
    Ok(cochains_c(k, u).0)
}

/// Verdier dual: the value on `U_σ` is the dual of `RΓ_c(U_σ; K)`.
pub fn verdier_dual(k: &SheafComplex) -> SheafComplex {
    let base = k.base().clone();
    let parts: Vec<(FreeComplex, CcBasis)> = (0..base.len()).map(|s| cochains_c(k, &base.mask(&base.star(s)))).collect();
    let values: Vec<FreeComplex> = parts.iter().map(|(c, _)| dual(c)).collect();
    let mut maps = HashMap::new();
    for t in 0..base.len() {
        for &(s, _) in base.faces(t) {
            let (bs, bt) = (&parts[s].1, &parts[t].1);
            let m = ChainMap::from_fn(values[s].clone(), values[t].clone(), |n| {
                let (src, dst) = (bs.get(&-n).cloned().unwrap_or_default(), bt.get(&-n).cloned().unwrap_or_default());
                let pos: HashMap<&(i64, usize, usize), usize> = src.iter().enumerate().map(|(p, e)| (e, p)).collect();
                let trip = dst.iter().enumerate().map(|(r, e)| (r, pos[e], Int::ONE));
                IntMatrix::from_triplets(dst.len(), src.len(), trip)
            });
            maps.insert((s, t), m);
        }
    }
    resolve(&ValueSheaf::from_parts(base, values, maps)).complex
}

/// `ω_X`, the Verdier dual of the constant sheaf.
pub fn dualizing_complex(base: &Arc<StratPoset>) -> SheafComplex {
    verdier_dual(&crate::cellspace::constant_sheaf(base, &FreeComplex::z(0)))
}

/// Internal `RHom(K, L)`; needs joins of cells sharing an upper bound.
pub fn sheaf_hom(k: &SheafComplex, l: &SheafComplex) -> Result<SheafComplex, Error> {
    let base = k.base().clone();
    if !Arc::ptr_eq(&base, l.base()) && *base != **l.base() {
        return Err(Error::BaseMismatch);
    }
    let n = base.len();
    let mut join = vec![vec![None; n]; n];
    for a in 0..n {
        for b in 0..n {
            let common = (0..n).any(|c| base.le(a, c) && base.le(b, c));
            if common {
                join[a][b] = Some(base.join(a, b).ok_or_else(|| {
                    Error::Unsupported(format!("cells `{}` and `{}` have no join", base.id(a), base.id(b)))
                })?);
            }
        }
    }
    let (kx, lx) = (k.complex(), l.complex());
    if kx.is_zero() || lx.is_zero() {
        return Ok(SheafComplex::zero(base));
    }
    let (lo, hi) = (lx.lo() - kx.hi(), lx.hi() - kx.lo());
    // Basis at σ in degree n: (i, b, a) with a a stalk generator of L at cell(b) ∨ σ.
    let basis_at = |s: usize, n: i64| -> Vec<(i64, usize, usize)> {
        let mut v = Vec::new();
        for i in kx.degrees() {
            for (b, &g) in k.cells(i).iter().enumerate() {
                if let Some(j) = join[g][s] {
                    v.extend(l.stalk_indices(j, i + n).into_iter().map(|a| (i, b, a)));
                }
            }
        }
        v
    };
    let lt: BTreeMap<i64, IntMatrix> = lx.degrees().filter_map(|j| lx.d_ref(j).map(|m| (j, m.transpose()))).collect();
    let mut bases: Vec<BTreeMap<i64, Vec<(i64, usize, usize)>>> = Vec::with_capacity(n);
    let mut values = Vec::with_capacity(n);
    for s in 0..n {
        let bs: BTreeMap<i64, Vec<(i64, usize, usize)>> = (lo..=hi).map(|d| (d, basis_at(s, d))).collect();
        let pos: HashMap<(i64, i64, usize, usize), usize> =
            bs.iter().flat_map(|(&d, v)| v.iter().enumerate().map(move |(p, &(i, b, a))| ((d, i, b, a), p))).collect();
        let dim = |d: i64| bs.get(&d).map_or(0, |v| v.len());
        let ranks: Vec<usize> = (lo..=hi).map(dim).collect();
        let diffs: Vec<IntMatrix> = (lo..hi)
            .map(|d| {
                let mut trip = Vec::new();
                let minus = d.rem_euclid(2) == 0;
                for (c, &(i, b, a)) in bs[&d].iter().enumerate() {
                    if let Some(dl) = lt.get(&(i + d)) {
                        for (a2, x) in dl.row_entries(a) {
                            if let Some(&r) = pos.get(&(d + 1, i, b, *a2)) {
                                trip.push((r, c, x.clone()));
                            }
                        }
                    }
                    // −(−1)^d f ∘ d_K: the component at (i−1, b') picks up d_K[b, b'].
                    if let Some(dk) = kx.d_ref(i - 1) {
                        for (b2, x) in dk.row_entries(b) {
                            if let Some(&r) = pos.get(&(d + 1, i - 1, *b2, a)) {
                                trip.push((r, c, if minus { -x } else { x.clone() }));
                            }
                        }
                    }
                }
                IntMatrix::from_triplets(dim(d + 1), dim(d), trip)
            })
            .collect();
        let cx = FreeComplex::new(lo, ranks, diffs).expect("hom differential squares to zero");
        values.push(cx);
        bases.push(bs);
    }
    let values: Vec<FreeComplex> = values.into_iter().map(FreeComplex::trimmed).collect();
    let mut maps = HashMap::new();
    for t in 0..n {
        for &(s, _) in base.faces(t) {
            let m = ChainMap::from_fn(values[s].clone(), values[t].clone(), |d| {
                let empty = Vec::new();
                let (src, dst) = (bases[s].get(&d).unwrap_or(&empty), bases[t].get(&d).unwrap_or(&empty));
                let pos: HashMap<(i64, usize), Vec<(usize, usize)>> = {
                    let mut h: HashMap<(i64, usize), Vec<(usize, usize)>> = HashMap::new();
                    for (p, &(i, b, a)) in src.iter().enumerate() {
                        h.entry((i, b)).or_default().push((a, p));
                    }
                    h
                };
                let mut trip = Vec::new();
                for (r, &(i, b, a)) in dst.iter().enumerate() {
                    if let Some(list) = pos.get(&(i, b)) {
                        if let Some(&(_, p)) = list.iter().find(|&&(a0, _)| a0 == a) {
                            trip.push((r, p, Int::ONE));
                        }
                    }
                }
                IntMatrix::from_triplets(dst.len(), src.len(), trip)
            });
            maps.insert((s, t), m);
        }
    }
    Ok(resolve(&ValueSheaf::from_parts(base, values, maps)).complex)
}

/// `Hom` in the derived category: `H^0 RHom(K, L)`.
pub fn global_hom(k: &SheafComplex, l: &SheafComplex) -> FgAbGroup {
    k.rhom(l).cohomology(0)
}

/// `K ⊠ L` on the product poset.
pub fn external_tensor(k: &SheafComplex, l: &SheafComplex) -> SheafComplex {
    let base = Arc::new(k.base().product(l.base()));
    external_tensor_on(&base, k, l)
}

/// `K ⊠ L` on a product poset built earlier by [`StratPoset::product`].
pub fn external_tensor_on(base: &Arc<StratPoset>, k: &SheafComplex, l: &SheafComplex) -> SheafComplex {
    let m = l.base().len();
    let (kx, lx) = (k.complex(), l.complex());
    let x = tensor_complex(kx, lx);
    let mut cells = BTreeMap::new();
    for n in x.degrees() {
        let mut v = Vec::new();
        for i in kx.degrees() {
            for &a in k.cells(i) {
                v.extend(l.cells(n - i).iter().map(|&b| a * m + b));
            }
        }
        cells.insert(n, v);
    }
    SheafComplex::from_parts(base.clone(), x, cells)
}

/// `i_* ℤ_Z` for a closed cell union: the cellular generators on `Z`.
pub fn closed_indicator(base: &Arc<StratPoset>, z: &[bool]) -> Result<SheafComplex, Error> {
    if !base.is_down_set(z) {
        return Err(Error::NotLocallyClosed(describe(base, z)));
    }
    let k = crate::cellspace::cellular_complex(base);
    let cx = k.complex();
    let keep = |i: i64| -> Vec<usize> { (0..cx.rank(i)).filter(|&b| z[k.cells(i)[b]]).collect() };
    let sub = FreeComplex::build(cx.lo(), cx.hi(), |i| keep(i).len(), |i| cx.d(i).select(&keep(i + 1), &keep(i)));
    let cells = sub.degrees().map(|i| (i, keep(i).iter().map(|&b| k.cells(i)[b]).collect())).collect();
    Ok(SheafComplex::from_parts(base.clone(), sub, cells))
}

/// `j_! K` for `K` on an open region.
pub fn extend_zero(k: &SheafComplex, region: &Region, base: &Arc<StratPoset>) -> Result<SheafComplex, Error> {
    if !base.is_up_set(&region.mask) {
        return Err(Error::NotOpen(describe(base, &region.mask)));
    }
    Ok(k.retag(base.clone(), &region.cells))
}

/// `i^{-1} K` for a closed region: the generators on the region.
pub fn restrict_closed(k: &SheafComplex, region: &Region) -> Result<SheafComplex, Error> {
    let base = k.base();
    if !base.is_down_set(&region.mask) {
        return Err(Error::NotLocallyClosed(describe(base, &region.mask)));
    }
    let mut new_of = vec![usize::MAX; base.len()];
    for (n, &o) in region.cells.iter().enumerate() {
        new_of[o] = n;
    }
    let cx = k.complex();
    let keep = |i: i64| -> Vec<usize> { (0..cx.rank(i)).filter(|&b| region.mask[k.cells(i)[b]]).collect() };
    let sub = FreeComplex::build(cx.lo(), cx.hi(), |i| keep(i).len(), |i| cx.d(i).select(&keep(i + 1), &keep(i)));
    let cells = sub.degrees().map(|i| (i, keep(i).iter().map(|&b| new_of[k.cells(i)[b]]).collect())).collect();
    Ok(SheafComplex::from_parts(region.poset.clone(), sub, cells))
}

/// `j^{-1} K` for an open region, re-resolved on the region.
pub fn restrict_open(k: &SheafComplex, region: &Region) -> Result<SheafComplex, Error> {
    if !k.base().is_up_set(&region.mask) {
        return Err(Error::NotOpen(describe(k.base(), &region.mask)));
    }
    let v = ValueSheaf::from_sheaf(k).restrict(&region.poset, &region.cells);
    Ok(resolve(&v).complex)
}

/// Restriction to a locally closed region: first to its closure, then to the open part.
pub fn restrict(k: &SheafComplex, region: &Region) -> Result<SheafComplex, Error> {
    let base = k.base();
    let clo_mask = down_closure(base, &region.mask);
    let clo = Region::closed(base, clo_mask)?;
    let on_clo = restrict_closed(k, &clo)?;
    let inner: Vec<bool> = clo.cells.iter().map(|&o| region.mask[o]).collect();
    let open = Region::open(&clo.poset, inner)?;
    let out = restrict_open(&on_clo, &open)?;
    Ok(SheafComplex::from_parts(region.poset.clone(), out.complex().clone(), out.all_cells().clone()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cellspace::{builtin, constant_sheaf};

    fn z() -> FreeComplex {
        FreeComplex::z(0)
    }

    fn groups(v: &[(i64, FgAbGroup)]) -> BTreeMap<i64, FgAbGroup> {
        v.iter().cloned().collect()
    }

    #[test]
    fn sections_examples() {
        let x = Arc::new(builtin::interval().face_poset());
        let k = constant_sheaf(&x, &z());
        let all = vec![true; 3];
        assert_eq!(sections(&k, &all).unwrap().cohomology_all(), groups(&[(0, FgAbGroup::free(1))]));
        assert_eq!(sections_c(&k, &all).unwrap().cohomology_all(), groups(&[(0, FgAbGroup::free(1))]));
        let e = x.cell("0-1").unwrap();
        let u = x.mask(&[e]);
        assert_eq!(sections_c(&k, &u).unwrap().cohomology_all(), groups(&[(1, FgAbGroup::free(1))]));
        assert!(sections(&k, &x.mask(&[0])).is_err());

        let c = Arc::new(builtin::circle().face_poset());
        let k = constant_sheaf(&c, &z());
        let h = sections(&k, &vec![true; 6]).unwrap().cohomology_all();
        assert_eq!(h, groups(&[(0, FgAbGroup::free(1)), (1, FgAbGroup::free(1))]));
        let v = c.cell("0").unwrap();
        assert_eq!(costalk(&k, v).cohomology_all(), groups(&[(1, FgAbGroup::free(1))]));
        let edge = c.cell("0-1").unwrap();
        assert_eq!(costalk(&k, edge).cohomology_all(), groups(&[(0, FgAbGroup::free(1))]));
    }

    #[test]
    fn duals() {
        let x = Arc::new(builtin::interval().face_poset());
        let d = dualizing_complex(&x);
        d.check().unwrap();
        let e = x.cell("0-1").unwrap();
        for s in 0..3 {
            let h = d.stalk(s).cohomology_all();
            if s == e {
                assert_eq!(h, groups(&[(-1, FgAbGroup::free(1))]));
            } else {
                assert!(h.is_empty());
            }
        }
        let c = Arc::new(builtin::circle().face_poset());
        let d = dualizing_complex(&c);
        for s in 0..6 {
            assert_eq!(d.stalk(s).cohomology_all(), groups(&[(-1, FgAbGroup::free(1))]));
        }
        let p = Arc::new(builtin::point().face_poset());
        let t = constant_sheaf(&p, &FreeComplex::torsion_model(2, 0));
        assert_eq!(verdier_dual(&t).stalk(0).cohomology_all(), groups(&[(1, FgAbGroup::cyclic(2))]));
    }

    #[test]
    fn hom_and_products() {
        let c = Arc::new(builtin::circle().face_poset());
        let k = constant_sheaf(&c, &z());
        let h = sheaf_hom(&k, &k).unwrap();
        h.check().unwrap();
        assert!(h.stalkwise_equal(&k));
        let sky = crate::cellspace::skyscraper(&c, 0, &FreeComplex::torsion_model(2, 0));
        assert!(global_hom(&sky, &k).is_zero());
        let t = external_tensor(&k, &k);
        t.check().unwrap();
        let all = vec![true; t.base().len()];
        let h = sections(&t, &all).unwrap().cohomology_all();
        assert_eq!(h, groups(&[(0, FgAbGroup::free(1)), (1, FgAbGroup::free(2)), (2, FgAbGroup::free(1))]));
    }

    #[test]
    fn restrictions() {
        let x = Arc::new(builtin::interval().face_poset());
        let k = constant_sheaf(&x, &z());
        let e = x.cell("0-1").unwrap();
        let u = Region::open(&x, x.mask(&[e])).unwrap();
        let ku = restrict_open(&k, &u).unwrap();
        let j = extend_zero(&ku, &u, &x).unwrap();
        assert!(j.stalk(0).is_acyclic());
        assert_eq!(j.stalk(e).cohomology_all(), groups(&[(0, FgAbGroup::free(1))]));
        assert_eq!(sections(&j, &vec![true; 3]).unwrap().cohomology_all(), groups(&[(1, FgAbGroup::free(1))]));
        let v = Region::closed(&x, x.mask(&[0])).unwrap();
        let kv = restrict_closed(&k, &v).unwrap();
        assert_eq!(kv.stalk(0).cohomology_all(), groups(&[(0, FgAbGroup::free(1))]));
        assert!(Region::closed(&x, x.mask(&[e])).is_err());
    }

    #[test]
    fn cone_link() {
        let x = Arc::new(builtin::rp3_cone().face_poset());
        let apex = x.cell("c").unwrap();
        let k = constant_sheaf(&x, &z());
        let h = sections(&k, &punctured_star(&x, apex)).unwrap().cohomology_all();
        let want = groups(&[(0, FgAbGroup::free(1)), (2, FgAbGroup::cyclic(2)), (3, FgAbGroup::free(1))]);
        assert_eq!(h, want);
        let h = costalk(&k, apex).cohomology_all();
        assert_eq!(h, groups(&[(3, FgAbGroup::cyclic(2)), (4, FgAbGroup::free(1))]));
    }
}
