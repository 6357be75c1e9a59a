use std::collections::BTreeMap;
use std::sync::Arc;

use crate::cellspace::StratPoset;
use crate::dz::{cone, shift, shift_map, tensor_complex, ChainMap, FreeComplex, HomLayout};
use crate::int::Int;
use crate::intlin::{FgAbGroup, IntMatrix};
use crate::Error;

/// Bounded complex of sums of representables `ℤ_{U_σ!}` on a cell poset.
///
/// Each generator carries a cell; a differential entry from a generator at `τ`
/// to one at `σ` may be nonzero only if `σ ≤ τ`.
#[derive(Clone, Debug)]
pub struct SheafComplex {
    base: Arc<StratPoset>,
    cx: FreeComplex,
    cells: BTreeMap<i64, Vec<usize>>,
}

/// A chain map of sheaf complexes on the same base.
#[derive(Clone, Debug)]
pub struct SheafMap {
    pub source: SheafComplex,
    pub target: SheafComplex,
    pub map: ChainMap,
}

/// Cone of a sheaf map with its triangle maps.
#[derive(Clone, Debug)]
pub struct SheafCone {
    pub complex: SheafComplex,
    pub incl: SheafMap,
    pub proj: SheafMap,
}

fn same_base(a: &Arc<StratPoset>, b: &Arc<StratPoset>) -> bool {
    Arc::ptr_eq(a, b) || **a == **b
}

impl SheafComplex {
    pub fn new(base: Arc<StratPoset>, cx: FreeComplex, cells: BTreeMap<i64, Vec<usize>>) -> Result<Self, Error> {
        let k = SheafComplex::from_parts(base, cx, cells);
        k.check()?;
        Ok(k)
    }

    pub(crate) fn from_parts(base: Arc<StratPoset>, cx: FreeComplex, mut cells: BTreeMap<i64, Vec<usize>>) -> Self {
        cells.retain(|_, v| !v.is_empty());
        SheafComplex { base, cx, cells }
    }

    pub fn check(&self) -> Result<(), Error> {
        self.cx.check()?;
        for i in self.cx.degrees() {
            let c = self.cells(i);
            if c.len() != self.cx.rank(i) {
                return Err(Error::InvalidComplex(format!(
                    "degree {i}: {} cells for rank {}",
                    c.len(),
                    self.cx.rank(i)
                )));
            }
            if let Some(&bad) = c.iter().find(|&&s| s >= self.base.len()) {
                return Err(Error::UnknownCell(format!("#{bad}")));
            }
        }
        for (&i, c) in &self.cells {
            if self.cx.rank(i) != c.len() {
                return Err(Error::InvalidComplex(format!("degree {i}: cells listed outside the complex")));
            }
        }
        for i in self.cx.degrees() {
            if let Some(d) = self.cx.d_ref(i) {
                for (r, c, _) in d.entries() {
                    let (s, t) = (self.cells(i + 1)[r], self.cells(i)[c]);
                    if !self.base.le(s, t) {
                        return Err(Error::InvalidComplex(format!(
                            "degree {i}: entry from a generator at `{}` to one at `{}` violates the support condition",
                            self.base.id(t),
                            self.base.id(s)
                        )));
                    }
                }
            }
        }
        Ok(())
    }

    pub fn zero(base: Arc<StratPoset>) -> Self {
        SheafComplex { base, cx: FreeComplex::zero(), cells: BTreeMap::new() }
    }

    pub fn base(&self) -> &Arc<StratPoset> {
        &self.base
    }

    pub fn complex(&self) -> &FreeComplex {
        &self.cx
    }

    pub fn cells(&self, i: i64) -> &[usize] {
        self.cells.get(&i).map_or(&[], |v| v.as_slice())
    }

    pub fn all_cells(&self) -> &BTreeMap<i64, Vec<usize>> {
        &self.cells
    }

    pub fn is_zero(&self) -> bool {
        self.cx.is_zero()
    }

    /// Generators in degree `i` whose cell lies below `σ`.
    pub fn stalk_indices(&self, s: usize, i: i64) -> Vec<usize> {
        self.cells(i).iter().enumerate().filter(|(_, &c)| self.base.le(c, s)).map(|(k, _)| k).collect()
    }

    pub fn stalk(&self, s: usize) -> FreeComplex {
        let idx: BTreeMap<i64, Vec<usize>> = self.cx.degrees().map(|i| (i, self.stalk_indices(s, i))).collect();
        let get = |i: i64| idx.get(&i).cloned().unwrap_or_default();
        FreeComplex::build(self.cx.lo(), self.cx.hi(), |i| get(i).len(), |i| self.cx.d(i).select(&get(i + 1), &get(i)))
    }

    /// Cohomology of every stalk, indexed by cell.
    pub fn stalk_cohomology(&self) -> Vec<BTreeMap<i64, FgAbGroup>> {
        use rayon::prelude::*;
        (0..self.base.len()).into_par_iter().map(|s| self.stalk(s).cohomology_all()).collect()
    }

    pub fn shift(&self, n: i64) -> SheafComplex {
        let cells = self.cells.iter().map(|(&i, v)| (i - n, v.clone())).collect();
        SheafComplex::from_parts(self.base.clone(), shift(&self.cx, n), cells)
    }

    pub fn direct_sum(&self, other: &SheafComplex) -> SheafComplex {
        assert!(same_base(&self.base, &other.base), "direct sum over different bases");
        let x = self.cx.direct_sum(&other.cx);
        let mut cells = BTreeMap::new();
        for i in x.degrees() {
            let mut v = self.cells(i).to_vec();
            v.extend_from_slice(other.cells(i));
            cells.insert(i, v);
        }
        SheafComplex::from_parts(self.base.clone(), x, cells)
    }

    /// `K ⊗ M` for a complex of free abelian groups `M`.
    pub fn tensor_module(&self, m: &FreeComplex) -> SheafComplex {
        let x = tensor_complex(&self.cx, m);
        let mut cells = BTreeMap::new();
        for n in x.degrees() {
            let mut v = Vec::new();
            for i in self.cx.degrees() {
                for &c in self.cells(i) {
                    v.extend(std::iter::repeat(c).take(m.rank(n - i)));
                }
            }
            cells.insert(n, v);
        }
        SheafComplex::from_parts(self.base.clone(), x, cells)
    }

    /// Mask for `Hom(K, L)`: a generator at `γ` may map to one at `δ` only if `δ ≤ γ`.
    pub fn hom_layout(&self, other: &SheafComplex) -> HomLayout {
        assert!(same_base(&self.base, &other.base), "hom over different bases");
        let base = &self.base;
        HomLayout::new(&self.cx, &other.cx, |i, b, j, a| base.le(other.cells(j)[a], self.cells(i)[b]))
    }

    /// The derived global `Hom` complex `RHom(K, L)`.
    pub fn rhom(&self, other: &SheafComplex) -> FreeComplex {
        self.hom_layout(other).complex(&self.cx, &other.cx)
    }

    /// Retags generators along an injective cell map into a larger base.
    pub(crate) fn retag(&self, base: Arc<StratPoset>, map: &[usize]) -> SheafComplex {
        let cells = self.cells.iter().map(|(&i, v)| (i, v.iter().map(|&c| map[c]).collect())).collect();
        SheafComplex::from_parts(base, self.cx.clone(), cells)
    }

    /// Stalkwise cohomology agreement.
    pub fn stalkwise_equal(&self, other: &SheafComplex) -> bool {
        self.stalk_cohomology() == other.stalk_cohomology()
    }

    pub fn is_stalkwise_acyclic(&self) -> bool {
        (0..self.base.len()).all(|s| self.stalk(s).is_acyclic())
    }

    /// Cells whose stalk is not acyclic.
    pub fn support(&self) -> Vec<usize> {
        (0..self.base.len()).filter(|&s| !self.stalk(s).is_acyclic()).collect()
    }
}

impl SheafMap {
    pub fn new(source: SheafComplex, target: SheafComplex, map: ChainMap) -> Result<Self, Error> {
        if !same_base(&source.base, &target.base) {
            return Err(Error::BaseMismatch);
        }
        map.check()?;
        for (&i, m) in map.mats() {
            for (r, c, _) in m.entries() {
                if !source.base.le(target.cells(i)[r], source.cells(i)[c]) {
                    return Err(Error::InvalidComplex(format!("map in degree {i} violates the support condition")));
                }
            }
        }
        Ok(SheafMap { source, target, map })
    }

    pub(crate) fn from_parts(source: SheafComplex, target: SheafComplex, map: ChainMap) -> Self {
        SheafMap { source, target, map }
    }

    pub fn identity(k: &SheafComplex) -> Self {
        SheafMap { source: k.clone(), target: k.clone(), map: ChainMap::identity(&k.cx) }
    }

    pub fn zero(source: &SheafComplex, target: &SheafComplex) -> Self {
        SheafMap { source: source.clone(), target: target.clone(), map: ChainMap::zero(&source.cx, &target.cx) }
    }

    /// `g ∘ self`.
    pub fn then(&self, g: &SheafMap) -> SheafMap {
        SheafMap { source: self.source.clone(), target: g.target.clone(), map: self.map.then(&g.map) }
    }

    pub fn stalk(&self, s: usize) -> ChainMap {
        let (x, y) = (self.source.stalk(s), self.target.stalk(s));
        ChainMap::from_fn(x, y, |i| {
            self.map.mat(i).select(&self.target.stalk_indices(s, i), &self.source.stalk_indices(s, i))
        })
    }

    pub fn is_stalkwise_quasi_iso(&self) -> bool {
        (0..self.source.base.len()).all(|s| crate::dz::is_quasi_iso(&self.stalk(s)))
    }

    pub fn cone(&self) -> SheafCone {
        let c = cone(&self.map);
        let (x, y) = (&self.source, &self.target);
        let mut cells = BTreeMap::new();
        for i in c.complex.degrees() {
            let mut v = y.cells(i).to_vec();
            v.extend_from_slice(x.cells(i + 1));
            cells.insert(i, v);
        }
        let complex = SheafComplex::from_parts(y.base.clone(), c.complex, cells);
        let x1 = x.shift(1);
        SheafCone {
            incl: SheafMap::from_parts(y.clone(), complex.clone(), c.incl),
            proj: SheafMap::from_parts(complex.clone(), x1, c.proj),
            complex,
        }
    }

    /// `fiber(f) = cone(f)[−1]` with its map to the source.
    pub fn fiber(&self) -> (SheafComplex, SheafMap) {
        let c = self.cone();
        let fib = c.complex.shift(-1);
        let x = &self.source;
        let y = &self.target;
        let m = ChainMap::from_fn(fib.cx.clone(), x.cx.clone(), |i| {
            IntMatrix::hstack(&IntMatrix::zeros(x.cx.rank(i), y.cx.rank(i - 1)), &IntMatrix::identity(x.cx.rank(i)))
        });
        let to_x = SheafMap::from_parts(fib.clone(), x.clone(), m);
        (fib, to_x)
    }

    pub fn shift(&self, n: i64) -> SheafMap {
        SheafMap {
            source: self.source.shift(n),
            target: self.target.shift(n),
            map: shift_map(&self.map, n),
        }
    }
}

/// Cellular complex of `ℤ_X`: a generator at every cell `τ` in degree `−dim τ`.
pub fn cellular_complex(base: &Arc<StratPoset>) -> SheafComplex {
    relative_cellular(base, None)
}

/// Resolution `R_σ` of the point sheaf at `σ`: generators at every `τ ≥ σ`,
/// in degree `dim σ − dim τ`.
pub fn point_resolution(base: &Arc<StratPoset>, s: usize) -> SheafComplex {
    relative_cellular(base, Some(s))
}

fn relative_cellular(base: &Arc<StratPoset>, from: Option<usize>) -> SheafComplex {
    let keep = |t: usize| from.map_or(true, |s| base.le(s, t));
    let d0 = from.map_or(0, |s| base.dim(s)) as i64;
    let top = base.max_dim() as i64;
    let gens = |i: i64| -> Vec<usize> {
        let k = d0 - i;
        if k < 0 {
            return Vec::new();
        }
        base.cells_of_dim(k as usize).into_iter().filter(|&t| keep(t)).collect()
    };
    let per: BTreeMap<i64, Vec<usize>> = (d0 - top..=0).map(|i| (i, gens(i))).collect();
    let get = |i: i64| per.get(&i).cloned().unwrap_or_default();
    let cx = FreeComplex::build(
        d0 - top,
        0,
        |i| get(i).len(),
        |i| {
            let (src, dst) = (get(i), get(i + 1));
            let mut trip = Vec::new();
            for (c, &t) in src.iter().enumerate() {
                for &(f, sgn) in base.faces(t) {
                    if let Ok(r) = dst.binary_search(&f) {
                        trip.push((r, c, Int::from(sgn)));
                    }
                }
            }
            IntMatrix::from_triplets(dst.len(), src.len(), trip)
        },
    );
    SheafComplex::from_parts(base.clone(), cx, per)
}

/// Constant sheaf with coefficients in `M`.
pub fn constant_sheaf(base: &Arc<StratPoset>, m: &FreeComplex) -> SheafComplex {
    cellular_complex(base).tensor_module(m)
}

/// The point sheaf at `σ` with coefficients in `M`.
pub fn skyscraper(base: &Arc<StratPoset>, s: usize, m: &FreeComplex) -> SheafComplex {
    point_resolution(base, s).tensor_module(m)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cellspace::builtin;

    #[test]
    fn constant_and_point_sheaves() {
        let x = Arc::new(builtin::interval().face_poset());
        let k = constant_sheaf(&x, &FreeComplex::z(0));
        k.check().unwrap();
        assert_eq!(k.complex().ranks(), &[1, 2]);
        for s in 0..3 {
            assert_eq!(k.stalk(s).cohomology_all(), [(0, FgAbGroup::free(1))].into());
        }
        let e = x.cell("0-1").unwrap();
        let a = x.cell("0").unwrap();
        let r = point_resolution(&x, a);
        r.check().unwrap();
        assert!(r.stalk(e).is_acyclic());
        assert_eq!(r.stalk(a).cohomology_all(), [(0, FgAbGroup::free(1))].into());

        let c = Arc::new(builtin::rp3_cone().face_poset());
        let apex = c.cell("c").unwrap();
        let r = point_resolution(&c, apex);
        r.check().unwrap();
        for s in [apex, c.cell("0-c").unwrap(), c.cell("0-1-2-3-c").unwrap()] {
            let h = r.stalk(s).cohomology_all();
            assert_eq!(h.is_empty(), s != apex);
        }
    }

    #[test]
    fn cones_keep_tags() {
        let x = Arc::new(builtin::circle().face_poset());
        let k = constant_sheaf(&x, &FreeComplex::z(0));
        let c = SheafMap::identity(&k).cone();
        c.complex.check().unwrap();
        assert!(c.complex.is_stalkwise_acyclic());
        let (fib, to_x) = SheafMap::identity(&k).fiber();
        fib.check().unwrap();
        to_x.map.check().unwrap();
    }
}
