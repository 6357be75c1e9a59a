use std::collections::{BTreeMap, HashMap};
use std::sync::Arc;

use crate::cellspace::{SheafComplex, StratPoset};
use crate::dz::{ChainMap, FreeComplex};
use crate::int::Int;
use crate::intlin::snf::{kernel, snf_with, solve_matrix, Track};
use crate::intlin::IntMatrix;
use crate::Error;

/// A sheaf given by its value complex on every open star and restriction maps
/// along covers `σ ⋖ τ`.
#[derive(Clone, Debug)]
pub struct ValueSheaf {
    base: Arc<StratPoset>,
    values: Vec<FreeComplex>,
    maps: HashMap<(usize, usize), ChainMap>,
}

/// A projective model `P` of a value sheaf with quasi-isomorphisms `P(σ) → V(σ)`.
#[derive(Clone, Debug)]
pub struct Resolution {
    pub complex: SheafComplex,
    pub aug: Vec<ChainMap>,
}

impl ValueSheaf {
    /// Missing cover maps are taken to be zero.
    pub fn new(
        base: Arc<StratPoset>,
        values: Vec<FreeComplex>,
        mut maps: HashMap<(usize, usize), ChainMap>,
    ) -> Result<Self, Error> {
        if values.len() != base.len() {
            return Err(Error::InvalidComplex(format!("{} values for {} cells", values.len(), base.len())));
        }
        for t in 0..base.len() {
            for &(s, _) in base.faces(t) {
                let m = maps.entry((s, t)).or_insert_with(|| ChainMap::zero(&values[s], &values[t]));
                if m.source() != &values[s] || m.target() != &values[t] {
                    return Err(Error::InvalidComplex(format!(
                        "restriction `{}` → `{}` has the wrong ends",
                        base.id(s),
                        base.id(t)
                    )));
                }
                m.check()?;
            }
        }
        let v = ValueSheaf { base, values, maps };
        v.check_squares()?;
        Ok(v)
    }

    pub(crate) fn from_parts(
        base: Arc<StratPoset>,
        values: Vec<FreeComplex>,
        maps: HashMap<(usize, usize), ChainMap>,
    ) -> Self {
        ValueSheaf { base, values, maps }
    }

    /// Both composites along every interval of length two agree.
    pub fn check_squares(&self) -> Result<(), Error> {
        let b = &self.base;
        for t in 0..b.len() {
            let mut via: BTreeMap<usize, ChainMap> = BTreeMap::new();
            for &(m, _) in b.faces(t) {
                for &(s, _) in b.faces(m) {
                    let f = self.maps[&(s, m)].then(&self.maps[&(m, t)]);
                    if let Some(g) = via.get(&s) {
                        if g.mats() != f.mats() && !g.sub(&f).is_zero() {
                            return Err(Error::InvalidComplex(format!(
                                "restrictions from `{}` to `{}` do not commute",
                                b.id(s),
                                b.id(t)
                            )));
                        }
                    } else {
                        via.insert(s, f);
                    }
                }
            }
        }
        Ok(())
    }

    pub fn base(&self) -> &Arc<StratPoset> {
        &self.base
    }

    pub fn value(&self, s: usize) -> &FreeComplex {
        &self.values[s]
    }

    pub fn restriction(&self, s: usize, t: usize) -> &ChainMap {
        &self.maps[&(s, t)]
    }

    /// Values are the stalks, restrictions the stalk inclusions.
    pub fn from_sheaf(k: &SheafComplex) -> ValueSheaf {
        let base = k.base().clone();
        let values: Vec<FreeComplex> = (0..base.len()).map(|s| k.stalk(s)).collect();
        let mut maps = HashMap::new();
        for t in 0..base.len() {
            for &(s, _) in base.faces(t) {
                let m = ChainMap::from_fn(values[s].clone(), values[t].clone(), |i| {
                    let (a, b) = (k.stalk_indices(s, i), k.stalk_indices(t, i));
                    inclusion(&a, &b)
                });
                maps.insert((s, t), m);
            }
        }
        ValueSheaf { base, values, maps }
    }

    /// `ℤ` on the cells of `u` (an up-set) with identity restrictions, zero elsewhere.
    pub fn indicator(base: &Arc<StratPoset>, u: &[bool]) -> ValueSheaf {
        let values: Vec<FreeComplex> =
            (0..base.len()).map(|s| if u[s] { FreeComplex::z(0) } else { FreeComplex::zero() }).collect();
        let mut maps = HashMap::new();
        for t in 0..base.len() {
            for &(s, _) in base.faces(t) {
                let m = if u[s] && u[t] {
                    ChainMap::identity(&values[s])
                } else {
                    ChainMap::zero(&values[s], &values[t])
                };
                maps.insert((s, t), m);
            }
        }
        ValueSheaf { base: base.clone(), values, maps }
    }

    /// Restriction to a subposet given by the old index of each new cell.
    pub fn restrict(&self, sub: &Arc<StratPoset>, old: &[usize]) -> ValueSheaf {
        let values = old.iter().map(|&o| self.values[o].clone()).collect();
        let mut maps = HashMap::new();
        for t in 0..sub.len() {
            for &(s, _) in sub.faces(t) {
                maps.insert((s, t), self.maps[&(old[s], old[t])].clone());
            }
        }
        ValueSheaf { base: sub.clone(), values, maps }
    }

    fn degree_range(&self) -> Option<(i64, i64)> {
        let nz: Vec<&FreeComplex> = self.values.iter().filter(|v| !v.is_zero()).collect();
        if nz.is_empty() {
            return None;
        }
        Some((nz.iter().map(|v| v.lo()).min().unwrap(), nz.iter().map(|v| v.hi()).max().unwrap()))
    }
}

/// 0/1 matrix embedding the sorted index list `a` into the sorted list `b`.
pub(crate) fn inclusion(a: &[usize], b: &[usize]) -> IntMatrix {
    let trip = a.iter().enumerate().map(|(c, x)| (b.binary_search(x).expect("sub-list"), c, Int::ONE));
    IntMatrix::from_triplets(b.len(), a.len(), trip)
}

struct Builder<'a> {
    v: &'a ValueSheaf,
    order: Vec<usize>,
    /// Cells of the generators per degree.
    gens: BTreeMap<i64, Vec<usize>>,
    /// `d_P` from degree `n` as triplets `(row, col, value)`.
    dp: BTreeMap<i64, Vec<(usize, usize, Int)>>,
    /// Augmentation in degree `n` at each cell, columns indexed by the stalk generators.
    aug: BTreeMap<i64, Vec<IntMatrix>>,
}

impl<'a> Builder<'a> {
    fn stalk(&self, n: i64, s: usize) -> Vec<usize> {
        let b = &self.v.base;
        self.gens.get(&n).map_or(Vec::new(), |g| (0..g.len()).filter(|&k| b.le(g[k], s)).collect())
    }

    fn aug_at(&self, n: i64, s: usize) -> IntMatrix {
        match self.aug.get(&n) {
            Some(a) => a[s].clone(),
            None => IntMatrix::zeros(self.v.values[s].rank(n), 0),
        }
    }

    fn dp_block(&self, n: i64, rows: &[usize], cols: &[usize]) -> IntMatrix {
        let mut m = IntMatrix::zeros(rows.len(), cols.len());
        if let Some(t) = self.dp.get(&n) {
            for (r, c, x) in t {
                if let (Ok(i), Ok(j)) = (rows.binary_search(r), cols.binary_search(c)) {
                    m.set(i, j, x.clone());
                }
            }
        }
        m
    }

    /// Adds the degree-`n` generators; returns whether any were added.
    fn stage(&mut self, n: i64) -> bool {
        let base = self.v.base.clone();
        let mut bases: Vec<Option<IntMatrix>> = vec![None; base.len()];
        let mut own: Vec<(usize, Vec<Int>, Vec<(usize, Int)>)> = Vec::new();
        for &s in &self.order.clone() {
            let val = &self.v.values[s];
            let vr = val.rank(n);
            let p1 = self.stalk(n + 1, s);
            let p2 = self.stalk(n + 2, s);
            let top = IntMatrix::hstack(&val.d(n), &self.aug_at(n + 1, s));
            let bottom = IntMatrix::hstack(&IntMatrix::zeros(p2.len(), vr), &self.dp_block(n + 1, &p2, &p1).neg());
            let del = IntMatrix::vstack(&top, &bottom);
            let z = kernel(&del);
            if z.cols() == 0 {
                continue;
            }
            let width = vr + p1.len();
            let mut image = IntMatrix::vstack(&val.d(n - 1), &IntMatrix::zeros(p1.len(), val.rank(n - 1)));
            for &(r, _) in base.faces(s) {
                let Some(br) = &bases[r] else { continue };
                let vr_r = self.v.values[r].rank(n);
                let p1r = self.stalk(n + 1, r);
                let mv = self.v.maps[&(r, s)].mat(n);
                let vpart = mv.mul(&br.select_rows(&(0..vr_r).collect::<Vec<_>>()));
                let ppart = inclusion(&p1r, &p1).mul(&br.select_rows(&(vr_r..vr_r + p1r.len()).collect::<Vec<_>>()));
                image = IntMatrix::hstack(&image, &IntMatrix::vstack(&vpart, &ppart));
            }
            let x = if image.cols() == 0 {
                IntMatrix::zeros(z.cols(), 0)
            } else {
                solve_matrix(&z, &image).expect("image lies in the cycles")
            };
            let snf = snf_with(&x, Track { u: false, u_inv: true, v: false });
            let r = snf.rank();
            let pick: Vec<usize> = (0..z.cols()).filter(|&j| j >= r || !snf.diag[j].is_unit()).collect();
            if !pick.is_empty() {
                let fresh = z.mul(&snf.u_inv.select_cols(&pick));
                for c in 0..fresh.cols() {
                    let col = fresh.column(c);
                    let vpart = col[..vr].to_vec();
                    let ppart: Vec<(usize, Int)> =
                        (0..p1.len()).filter(|&k| !col[vr + k].is_zero()).map(|k| (p1[k], -col[vr + k].clone())).collect();
                    own.push((s, vpart, ppart));
                }
            }
            debug_assert_eq!(z.rows(), width);
            bases[s] = Some(z);
        }
        if own.is_empty() {
            return false;
        }
        let cells: Vec<usize> = own.iter().map(|o| o.0).collect();
        let mut trip = Vec::new();
        for (g, (_, _, p)) in own.iter().enumerate() {
            for (row, x) in p {
                trip.push((*row, g, x.clone()));
            }
        }
        self.gens.insert(n, cells.clone());
        self.dp.insert(n, trip);
        // Augmentation columns, transported along covers.
        let mut aug: Vec<IntMatrix> = vec![IntMatrix::zeros(0, 0); base.len()];
        for &s in &self.order {
            let idx = self.stalk(n, s);
            let vr = self.v.values[s].rank(n);
            let mut m = IntMatrix::zeros(vr, idx.len());
            for (c, &g) in idx.iter().enumerate() {
                if cells[g] == s {
                    for (r, x) in own[g].1.iter().enumerate() {
                        if !x.is_zero() {
                            m.set(r, c, x.clone());
                        }
                    }
                } else {
                    let &(r, _) = base.faces(s).iter().find(|&&(r, _)| base.le(cells[g], r)).expect("graded poset");
                    let ridx = self.stalk(n, r);
                    let pos = ridx.binary_search(&g).unwrap();
                    let col = self.v.maps[&(r, s)].mat(n).mul(&aug[r].select_cols(&[pos]));
                    for (row, _, x) in col.entries() {
                        m.set(row, c, x.clone());
                    }
                }
            }
            aug[s] = m;
        }
        self.aug.insert(n, aug);
        true
    }
}

/// Projective model of a value sheaf, built degree by degree from the top: at each
/// cell the cycles of the partial mapping cone are covered by new generators.
pub fn resolve(v: &ValueSheaf) -> Resolution {
    let base = v.base.clone();
    let Some((lo, hi)) = v.degree_range() else {
        let zero = SheafComplex::zero(base.clone());
        let aug = (0..base.len()).map(|s| ChainMap::zero(&FreeComplex::zero(), &v.values[s])).collect();
        return Resolution { complex: zero, aug };
    };
    let mut b = Builder { v, order: base.order(), gens: BTreeMap::new(), dp: BTreeMap::new(), aug: BTreeMap::new() };
    let floor = lo - base.max_dim() as i64 - 3;
    let mut n = hi;
    loop {
        let added = b.stage(n);
        if !added && n < lo {
            break;
        }
        assert!(n > floor, "resolution does not terminate");
        n -= 1;
    }
    let plo = b.gens.keys().next().copied().unwrap_or(0);
    let phi = b.gens.keys().last().copied().unwrap_or(-1);
    let rank = |i: i64| b.gens.get(&i).map_or(0, |g| g.len());
    let cx = FreeComplex::build(plo, phi, rank, |i| {
        IntMatrix::from_triplets(rank(i + 1), rank(i), b.dp.get(&i).cloned().unwrap_or_default())
    });
    let complex = SheafComplex::from_parts(base.clone(), cx, b.gens.clone());
    let aug = (0..base.len())
        .map(|s| ChainMap::from_fn(complex.stalk(s), v.values[s].clone(), |i| b.aug_at(i, s)))
        .collect();
    Resolution { complex, aug }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cellspace::{builtin, constant_sheaf};
    use crate::dz::is_quasi_iso;

    fn check(v: &ValueSheaf) -> Resolution {
        let r = resolve(v);
        r.complex.check().unwrap();
        for (s, a) in r.aug.iter().enumerate() {
            a.check().unwrap();
            assert!(is_quasi_iso(a), "cell {s}");
        }
        r
    }

    #[test]
    fn resolves_stalk_sheaves() {
        for x in [builtin::interval(), builtin::circle(), builtin::simplex2()] {
            let base = Arc::new(x.face_poset());
            let k = constant_sheaf(&base, &FreeComplex::two_term(0, IntMatrix::from_rows(1, 1, &[2])));
            let r = check(&ValueSheaf::from_sheaf(&k));
            assert!(r.complex.stalkwise_equal(&k));
        }
    }

    #[test]
    fn resolves_open_indicator() {
        let base = Arc::new(builtin::interval().face_poset());
        let e = base.cell("0-1").unwrap();
        let u = base.mask(&[e]);
        let r = check(&ValueSheaf::indicator(&base, &u));
        assert_eq!(r.complex.complex().total_rank(), 1);
        let c = Arc::new(builtin::rp3_cone().face_poset());
        let apex = c.cell("c").unwrap();
        let u: Vec<bool> = (0..c.len()).map(|s| s != apex).collect();
        check(&ValueSheaf::indicator(&c, &u));
    }
}
