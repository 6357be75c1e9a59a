use crate::dz::{ChainMap, FreeComplex};
use crate::int::Int;
use crate::intlin::snf::{kernel, snf_with, Track};
use crate::intlin::IntMatrix;

/// A minimal free complex with the same cohomology as `X`, and a quasi-isomorphism into `X`.
///
/// In each degree the generators are ordered: free part of `H^i`, torsion part of
/// `H^i`, then relation generators killing the torsion of `H^{i+1}`.
#[derive(Clone, Debug)]
pub struct MinimalModel {
    pub complex: FreeComplex,
    pub map: ChainMap,
}

struct DegreeData {
    /// Columns: representatives of free generators.
    free: IntMatrix,
    /// Columns: representatives of torsion generators.
    tors: IntMatrix,
    /// Invariant factors of the torsion generators.
    factors: Vec<Int>,
    /// Columns in degree `i − 1`: lifts `w` with `d w = factor · rep`.
    lifts: IntMatrix,
}

fn degree_data(x: &FreeComplex, i: i64) -> DegreeData {
    let n = x.rank(i);
    let din = x.d(i - 1);
    let s = snf_with(&din, Track::ALL);
    let r = s.rank();
    let tors_idx: Vec<usize> = (0..r).filter(|&k| !s.diag[k].is_one()).collect();
    let tors = s.u_inv.select_cols(&tors_idx);
    let lifts = if din.cols() > 0 { s.v.select_cols(&tors_idx) } else { IntMatrix::zeros(0, 0) };
    let factors = tors_idx.iter().map(|&k| s.diag[k].clone()).collect();
    let rest: Vec<usize> = (r..n).collect();
    let comp = s.u_inv.select_cols(&rest);
    let free = match x.d_ref(i) {
        Some(d) => comp.mul(&kernel(&d.mul(&comp))),
        None => comp,
    };
    DegreeData { free, tors, factors, lifts }
}

pub fn minimal_model(x: &FreeComplex) -> MinimalModel {
    if x.is_zero() {
        return MinimalModel { complex: FreeComplex::zero(), map: ChainMap::zero(&FreeComplex::zero(), x) };
    }
    let (lo, hi) = (x.lo(), x.hi());
    let data: Vec<DegreeData> = (lo..=hi + 1).map(|i| degree_data(x, i)).collect();
    let at = |i: i64| &data[(i - lo) as usize];
    let f = |i: i64| at(i).free.cols();
    let t = |i: i64| at(i).factors.len();
    let complex = FreeComplex::build(
        lo,
        hi,
        |i| f(i) + t(i) + t(i + 1),
        |i| {
            let mut m = IntMatrix::zeros(f(i + 1) + t(i + 1) + t(i + 2), f(i) + t(i) + t(i + 1));
            for (j, d) in at(i + 1).factors.iter().enumerate() {
                m.set(f(i + 1) + j, f(i) + t(i) + j, d.clone());
            }
            m
        },
    );
    let map = ChainMap::from_fn(complex.clone(), x.clone(), |i| {
        let n = x.rank(i);
        let lifts = if t(i + 1) > 0 { at(i + 1).lifts.clone() } else { IntMatrix::zeros(n, 0) };
        IntMatrix::hstack(&IntMatrix::hstack(&at(i).free, &at(i).tors), &lifts)
    });
    MinimalModel { complex, map }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dz::is_quasi_iso;

    #[test]
    fn models() {
        let x = FreeComplex::two_term(0, IntMatrix::from_rows(2, 2, &[2, 1, 0, 3]))
            .direct_sum(&FreeComplex::two_term(-1, IntMatrix::from_rows(2, 3, &[1, 1, 0, 0, 0, 4])));
        let m = minimal_model(&x);
        m.map.check().unwrap();
        assert!(is_quasi_iso(&m.map));
        assert_eq!(m.complex.cohomology_all(), x.cohomology_all());
        assert!(m.complex.total_rank() <= x.total_rank());
    }
}
