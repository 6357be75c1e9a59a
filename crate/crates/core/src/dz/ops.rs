use std::collections::BTreeMap;

use crate::dz::{ChainMap, FreeComplex};
use crate::int::Int;
use crate::intlin::snf::{snf_with, solve_with, Track};
use crate::intlin::IntMatrix;

fn sign(n: i64) -> Int {
    if n.rem_euclid(2) == 0 {
        Int::ONE
    } else {
        -Int::ONE
    }
}

/// `X[n]`: degree `i` holds `X^{i+n}`, differential multiplied by `(−1)^n`.
pub fn shift(x: &FreeComplex, n: i64) -> FreeComplex {
    if x.is_zero() {
        return FreeComplex::zero();
    }
    let s = sign(n);
    let diffs = x.diffs().iter().map(|d| d.scale(&s)).collect();
    FreeComplex::from_parts(x.lo() - n, x.ranks().to_vec(), diffs)
}

/// `f[n]`, same matrices reindexed.
pub fn shift_map(f: &ChainMap, n: i64) -> ChainMap {
    let mats = f.mats().iter().map(|(&i, m)| (i - n, m.clone())).collect();
    ChainMap::from_parts(shift(f.source(), n), shift(f.target(), n), mats)
}

/// Mapping cone `C = Y ⊕ X[1]` of `f: X → Y` with its triangle maps.
#[derive(Clone, Debug)]
pub struct Cone {
    pub complex: FreeComplex,
    /// `Y → C`.
    pub incl: ChainMap,
    /// `C → X[1]`.
    pub proj: ChainMap,
}

/// `C^i = Y^i ⊕ X^{i+1}` with `d = [[d_Y, f], [0, −d_X]]`.
pub fn cone(f: &ChainMap) -> Cone {
    let (x, y) = (f.source(), f.target());
    let lo = y.lo().min(x.lo() - 1);
    let hi = y.hi().max(x.hi() - 1);
    let c = if x.is_zero() && y.is_zero() {
        FreeComplex::zero()
    } else {
        FreeComplex::build(
            lo,
            hi,
            |i| y.rank(i) + x.rank(i + 1),
            |i| IntMatrix::block(&y.d(i), &f.mat(i + 1), &IntMatrix::zeros(x.rank(i + 2), y.rank(i)), &x.d(i + 1).neg()),
        )
    };
    let incl = ChainMap::from_fn(y.clone(), c.clone(), |i| {
        IntMatrix::vstack(&IntMatrix::identity(y.rank(i)), &IntMatrix::zeros(x.rank(i + 1), y.rank(i)))
    });
    let x1 = shift(x, 1);
    let proj = ChainMap::from_fn(c.clone(), x1.clone(), |i| {
        IntMatrix::hstack(&IntMatrix::zeros(x.rank(i + 1), y.rank(i)), &IntMatrix::identity(x.rank(i + 1)))
    });
    Cone { complex: c, incl, proj }
}

/// `fiber(f) = cone(f)[−1]` together with the map `fiber(f) → X`.
pub fn fiber(f: &ChainMap) -> (FreeComplex, ChainMap) {
    let c = cone(f);
    let fib = shift(&c.complex, -1);
    let x = f.source();
    let y = f.target();
    let to_x = ChainMap::from_fn(fib.clone(), x.clone(), |i| {
        IntMatrix::hstack(&IntMatrix::zeros(x.rank(i), y.rank(i - 1)), &IntMatrix::identity(x.rank(i)))
    });
    (fib, to_x)
}

/// Map of cones induced by a commutative square `b ∘ f = g ∘ a` with `f: X → Y`, `g: X' → Y'`,
/// `a: X → X'`, `b: Y → Y'`.
pub fn cone_map(f: &ChainMap, g: &ChainMap, a: &ChainMap, b: &ChainMap) -> ChainMap {
    let cf = cone(f).complex;
    let cg = cone(g).complex;
    ChainMap::from_fn(cf, cg, |i| {
        IntMatrix::block(
            &b.mat(i),
            &IntMatrix::zeros(g.target().rank(i), f.source().rank(i + 1)),
            &IntMatrix::zeros(g.source().rank(i + 1), f.target().rank(i)),
            &a.mat(i + 1),
        )
    })
}

/// Coordinates of `Hom^n(X, Y) = ⊕_i Hom(X^i, Y^{i+n})` restricted by a mask.
///
/// `allowed(i, b, j, a)` decides whether the elementary map sending generator `b` of
/// `X^i` to generator `a` of `Y^j` is part of the complex. The mask must be closed
/// under pre- and post-composition with the differentials.
pub struct HomLayout {
    pub lo: i64,
    pub hi: i64,
    /// Per degree `n`, the list of `(i, b, a)` basis elements.
    pub basis: BTreeMap<i64, Vec<(i64, usize, usize)>>,
    index: BTreeMap<i64, std::collections::HashMap<(i64, usize, usize), usize>>,
}

impl HomLayout {
    pub fn new(x: &FreeComplex, y: &FreeComplex, allowed: impl Fn(i64, usize, i64, usize) -> bool) -> Self {
        let mut basis = BTreeMap::new();
        let mut index = BTreeMap::new();
        if x.is_zero() || y.is_zero() {
            return HomLayout { lo: 0, hi: -1, basis, index };
        }
        let lo = y.lo() - x.hi();
        let hi = y.hi() - x.lo();
        for n in lo..=hi {
            let mut list = Vec::new();
            let mut idx = std::collections::HashMap::new();
            for i in x.degrees() {
                let j = i + n;
                for b in 0..x.rank(i) {
                    for a in 0..y.rank(j) {
                        if allowed(i, b, j, a) {
                            idx.insert((i, b, a), list.len());
                            list.push((i, b, a));
                        }
                    }
                }
            }
            basis.insert(n, list);
            index.insert(n, idx);
        }
        HomLayout { lo, hi, basis, index }
    }

    pub fn dim(&self, n: i64) -> usize {
        self.basis.get(&n).map_or(0, Vec::len)
    }

    pub fn position(&self, n: i64, i: i64, b: usize, a: usize) -> Option<usize> {
        self.index.get(&n)?.get(&(i, b, a)).copied()
    }

    /// Hom complex with `(Df)_i = d_Y f_i − (−1)^n f_{i+1} d_X^i`.
    pub fn complex(&self, x: &FreeComplex, y: &FreeComplex) -> FreeComplex {
        if self.hi < self.lo {
            return FreeComplex::zero();
        }
        let dy: BTreeMap<i64, IntMatrix> = y.degrees().filter_map(|j| y.d_ref(j).map(|m| (j, m.transpose()))).collect();
        FreeComplex::build(
            self.lo,
            self.hi,
            |n| self.dim(n),
            |n| {
                let mut trip = Vec::new();
                let eps = -sign(n);
                for (col, &(i, b, a)) in self.basis[&n].iter().enumerate() {
                    let j = i + n;
                    // d_Y ∘ E_{a,b}: column a of d_Y^j, i.e. row a of its transpose.
                    if let Some(t) = dy.get(&j) {
                        for (a2, v) in t.row_entries(a) {
                            if let Some(row) = self.position(n + 1, i, b, *a2) {
                                trip.push((row, col, v.clone()));
                            }
                        }
                    }
                    // −(−1)^n E_{a,b} ∘ d_X^{i−1}: row b of d_X^{i−1}.
                    if let Some(dx) = x.d_ref(i - 1) {
                        for (b2, v) in dx.row_entries(b) {
                            if let Some(row) = self.position(n + 1, i - 1, *b2, a) {
                                trip.push((row, col, v * &eps));
                            }
                        }
                    }
                }
                IntMatrix::from_triplets(self.dim(n + 1), self.dim(n), trip)
            },
        )
    }

    /// Matrices `f_i : X^i → Y^{i+n}` from coordinates in degree `n`, keyed by source degree.
    pub fn maps_of(&self, n: i64, coords: &[Int], x: &FreeComplex, y: &FreeComplex) -> BTreeMap<i64, IntMatrix> {
        let mut trip: BTreeMap<i64, Vec<(usize, usize, Int)>> = BTreeMap::new();
        for (k, &(i, b, a)) in self.basis.get(&n).into_iter().flatten().enumerate() {
            if !coords[k].is_zero() {
                trip.entry(i).or_default().push((a, b, coords[k].clone()));
            }
        }
        trip.into_iter().map(|(i, t)| (i, IntMatrix::from_triplets(y.rank(i + n), x.rank(i), t))).collect()
    }

    /// Coordinates of a degree-`n` family of matrices `f_i : X^i → Y^{i+n}`.
    pub fn vector_of(&self, n: i64, f: impl Fn(i64) -> IntMatrix) -> Vec<Int> {
        let mut v = vec![Int::ZERO; self.dim(n)];
        let mut cache: BTreeMap<i64, IntMatrix> = BTreeMap::new();
        for (k, &(i, b, a)) in self.basis.get(&n).into_iter().flatten().enumerate() {
            let m = cache.entry(i).or_insert_with(|| f(i));
            v[k] = m.get(a, b).clone();
        }
        v
    }
}

pub fn hom_complex(x: &FreeComplex, y: &FreeComplex) -> FreeComplex {
    HomLayout::new(x, y, |_, _, _, _| true).complex(x, y)
}

/// Total complex of `X ⊗ Y` with `d(x⊗y) = dx⊗y + (−1)^{|x|} x⊗dy`.
pub fn tensor_complex(x: &FreeComplex, y: &FreeComplex) -> FreeComplex {
    if x.is_zero() || y.is_zero() {
        return FreeComplex::zero();
    }
    let lo = x.lo() + y.lo();
    let hi = x.hi() + y.hi();
    let offset = |n: i64, i: i64| -> usize { (x.lo()..i).map(|k| x.rank(k) * y.rank(n - k)).sum() };
    let dim = |n: i64| -> usize { x.degrees().map(|i| x.rank(i) * y.rank(n - i)).sum() };
    FreeComplex::build(lo, hi, dim, |n| {
        let mut trip = Vec::new();
        for i in x.degrees() {
            let j = n - i;
            let (rx, ry) = (x.rank(i), y.rank(j));
            if rx == 0 || ry == 0 {
                continue;
            }
            let src = offset(n, i);
            if let Some(dx) = x.d_ref(i) {
                let dst = offset(n + 1, i + 1);
                for (b2, b, v) in dx.entries() {
                    for c in 0..ry {
                        trip.push((dst + b2 * ry + c, src + b * ry + c, v.clone()));
                    }
                }
            }
            if let Some(dy) = y.d_ref(j) {
                let dst = offset(n + 1, i);
                let s = sign(i);
                let ry2 = y.rank(j + 1);
                for (c2, c, v) in dy.entries() {
                    for b in 0..rx {
                        trip.push((dst + b * ry2 + c2, src + b * ry + c, v * &s));
                    }
                }
            }
        }
        IntMatrix::from_triplets(dim(n + 1), dim(n), trip)
    })
}

/// `f ⊗ g` on total complexes.
pub fn tensor_map(f: &ChainMap, g: &ChainMap) -> ChainMap {
    let src = tensor_complex(f.source(), g.source());
    let dst = tensor_complex(f.target(), g.target());
    let (xs, ys, xt, yt) = (f.source(), g.source(), f.target(), g.target());
    ChainMap::from_fn(src, dst, |n| {
        let rows: usize = xt.degrees().map(|i| xt.rank(i) * yt.rank(n - i)).sum();
        let cols: usize = xs.degrees().map(|i| xs.rank(i) * ys.rank(n - i)).sum();
        let mut m = IntMatrix::zeros(rows, cols);
        let mut col_off = 0;
        for i in xs.degrees() {
            let w = xs.rank(i) * ys.rank(n - i);
            if w > 0 {
                let row_off: usize = (xt.lo()..i).map(|k| xt.rank(k) * yt.rank(n - k)).sum();
                let block = IntMatrix::kron(&f.mat(i), &g.mat(n - i));
                if block.rows() > 0 {
                    m.paste(row_off, col_off, &block);
                }
            }
            col_off += w;
        }
        m
    })
}

pub fn dual(x: &FreeComplex) -> FreeComplex {
    hom_complex(x, &FreeComplex::z(0))
}

pub fn is_quasi_iso(f: &ChainMap) -> bool {
    cone(f).complex.is_acyclic()
}

/// Whether `f` is chain homotopic to zero, i.e. its class in `H⁰ Hom(X, Y)` vanishes.
pub fn is_null_homotopic(f: &ChainMap) -> bool {
    let (x, y) = (f.source(), f.target());
    let layout = HomLayout::new(x, y, |_, _, _, _| true);
    let h = layout.complex(x, y);
    let v = layout.vector_of(0, |i| f.mat(i));
    if v.iter().all(Int::is_zero) {
        return true;
    }
    let d = h.d(-1);
    let s = snf_with(&d, Track { u: true, u_inv: false, v: true });
    solve_with(&s, &v).is_some()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::intlin::FgAbGroup;

    fn z2() -> FreeComplex {
        FreeComplex::torsion_model(2, 0)
    }

    #[test]
    fn shifts() {
        let x = shift(&FreeComplex::z(0), 1);
        assert_eq!(x.lo(), -1);
        let y = FreeComplex::two_term(0, IntMatrix::from_rows(1, 1, &[2]));
        assert_eq!(shift(&shift(&y, 1), -1), y);
        assert_eq!(shift(&y, 0), y);
    }

    #[test]
    fn cones() {
        let z = FreeComplex::z(0);
        assert!(cone(&ChainMap::identity(&z)).complex.is_acyclic());
        let c = cone(&ChainMap::zero(&FreeComplex::zero(), &z)).complex;
        assert_eq!(c.cohomology(0), FgAbGroup::free(1));
        let two = ChainMap::from_fn(z.clone(), z.clone(), |_| IntMatrix::from_rows(1, 1, &[2]));
        let c = cone(&two);
        assert_eq!(c.complex.cohomology(0), FgAbGroup::cyclic(2));
        c.incl.check().unwrap();
        c.proj.check().unwrap();
    }

    #[test]
    fn hom_tensor_dual() {
        let z = FreeComplex::z(0);
        assert_eq!(hom_complex(&z, &z).cohomology_all(), [(0, FgAbGroup::free(1))].into());
        assert_eq!(hom_complex(&z2(), &z).cohomology_all(), [(1, FgAbGroup::cyclic(2))].into());
        let z3 = FreeComplex::torsion_model(3, 0);
        assert!(tensor_complex(&z2(), &z3).is_acyclic());
        let t = tensor_complex(&z2(), &z2());
        assert_eq!(t.cohomology_all(), [(-1, FgAbGroup::cyclic(2)), (0, FgAbGroup::cyclic(2))].into());
        assert_eq!(dual(&FreeComplex::z(3)).cohomology_all(), [(-3, FgAbGroup::free(1))].into());
        assert_eq!(dual(&z2()).cohomology_all(), [(1, FgAbGroup::cyclic(2))].into());
    }

    #[test]
    fn quasi_isos() {
        let z = FreeComplex::z(0);
        assert!(is_quasi_iso(&ChainMap::identity(&z2())));
        let two = ChainMap::from_fn(z.clone(), z.clone(), |_| IntMatrix::from_rows(1, 1, &[2]));
        assert!(!is_quasi_iso(&two));
        assert!(!is_null_homotopic(&two));
        let y = FreeComplex::two_term(-1, IntMatrix::from_rows(1, 1, &[1]));
        let f = ChainMap::from_fn(z.clone(), y, |_| IntMatrix::from_rows(1, 1, &[1]));
        f.check().unwrap();
        assert!(is_null_homotopic(&f));
    }
}
