use crate::dz::{shift, ChainMap, FreeComplex, Half, Side};
use crate::intlin::snf::{kernel, saturated_image, snf_with, Track};
use crate::intlin::IntMatrix;

/// Degreewise split short exact sequence `lower ↪ X ↠ upper`.
///
/// Over free complexes the splitting is compatible with the differentials, so
/// the connecting map `upper → lower[1]` is zero.
#[derive(Clone, Debug)]
pub struct Split {
    pub lower: FreeComplex,
    pub incl: ChainMap,
    pub upper: FreeComplex,
    pub proj: ChainMap,
    pub conn: ChainMap,
}

/// Splits `X` at the half-integer level `s`: `lower ∈ ≤s`, `upper ∈ ≥s+½`.
///
/// At `s = n` the cut sublattice of `X^n` is `ker d^n`; at `s = n − ½` it is the
/// saturation of `im d^{n−1}`.
pub fn split_at(x: &FreeComplex, s: Half) -> Split {
    let m = s.ceil();
    if x.is_zero() || m > x.hi() {
        return trivial_split(x, true);
    }
    if m < x.lo() {
        return trivial_split(x, false);
    }
    let n = x.rank(m);
    let b = if s.is_integer() {
        match x.d_ref(m) {
            Some(d) => kernel(d),
            None => IntMatrix::identity(n),
        }
    } else {
        match x.d_ref(m - 1) {
            Some(d) => saturated_image(d),
            None => IntMatrix::zeros(n, 0),
        }
    };
    let k = b.cols();
    // Complete the saturated basis to a unimodular basis W = U⁻¹; coordinates are rows of U.
    let snf = snf_with(&b, Track { u: true, u_inv: true, v: false });
    debug_assert!(snf.diag.iter().all(|d| d.is_one()), "sublattice must be saturated");
    let first: Vec<usize> = (0..k).collect();
    let last: Vec<usize> = (k..n).collect();
    let basis_y = snf.u_inv.select_cols(&first);
    let basis_c = snf.u_inv.select_cols(&last);
    let coord_y = snf.u.select_rows(&first);
    let coord_c = snf.u.select_rows(&last);

    let lower = FreeComplex::build(
        x.lo(),
        m,
        |i| if i == m { k } else { x.rank(i) },
        |i| if i == m - 1 { coord_y.mul(&x.d(i)) } else { x.d(i) },
    );
    let upper = FreeComplex::build(
        m,
        x.hi(),
        |i| if i == m { n - k } else { x.rank(i) },
        |i| if i == m { x.d(i).mul(&basis_c) } else { x.d(i) },
    );
    let incl = ChainMap::from_fn(lower.clone(), x.clone(), |i| if i == m { basis_y.clone() } else { IntMatrix::identity(x.rank(i)) });
    let proj = ChainMap::from_fn(x.clone(), upper.clone(), |i| if i == m { coord_c.clone() } else { IntMatrix::identity(x.rank(i)) });
    let conn = ChainMap::zero(&upper, &shift(&lower, 1));
    Split { lower, incl, upper, proj, conn }
}

fn trivial_split(x: &FreeComplex, all_lower: bool) -> Split {
    let zero = FreeComplex::zero();
    let (lower, upper) = if all_lower { (x.clone(), zero) } else { (zero, x.clone()) };
    let incl = if all_lower { ChainMap::identity(x) } else { ChainMap::zero(&lower, x) };
    let proj = if all_lower { ChainMap::zero(x, &upper) } else { ChainMap::identity(x) };
    let conn = ChainMap::zero(&upper, &shift(&lower, 1));
    Split { lower, incl, upper, proj, conn }
}

/// Standard truncation `τ^{≤n}` or `τ^{≥n}`.
pub fn std_truncate(x: &FreeComplex, n: i64, side: Side) -> FreeComplex {
    match side {
        Side::Le => split_at(x, Half::int(n)).lower,
        Side::Ge => split_at(x, Half::int(n - 1)).upper,
    }
}

/// Truncation in the quasi-abelian category of finitely generated free groups,
/// where images are saturated and cokernels are taken modulo torsion.
pub fn qa_truncate(x: &FreeComplex, s: Half, side: Side) -> FreeComplex {
    match side {
        Side::Le => split_at(x, s).lower,
        Side::Ge => split_at(x, s.minus_half()).upper,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dz::is_quasi_iso;
    use crate::intlin::FgAbGroup;

    fn times2() -> FreeComplex {
        FreeComplex::two_term(0, IntMatrix::from_rows(1, 1, &[2]))
    }

    #[test]
    fn standard() {
        assert_eq!(std_truncate(&FreeComplex::z(0), 0, Side::Le), FreeComplex::z(0));
        assert!(std_truncate(&FreeComplex::torsion_model(2, 1), 0, Side::Le).is_acyclic());
        let t = std_truncate(&times2(), 1, Side::Ge);
        assert_eq!(t.cohomology_all(), [(1, FgAbGroup::cyclic(2))].into());
    }

    #[test]
    fn quasi_abelian() {
        let x = times2();
        assert_eq!(qa_truncate(&x, Half::from_twice(1), Side::Le), x);
        assert!(qa_truncate(&x, Half::int(0), Side::Le).is_zero());
        assert!(qa_truncate(&FreeComplex::z(0), Half::from_twice(1), Side::Ge).is_zero());
    }

    #[test]
    fn split_maps() {
        let x = FreeComplex::two_term(-1, IntMatrix::from_rows(2, 2, &[2, 0, 0, 0])).direct_sum(&FreeComplex::z(1));
        for k in -4..4 {
            let s = split_at(&x, Half::from_twice(k));
            s.incl.check().unwrap();
            s.proj.check().unwrap();
            assert!(s.incl.then(&s.proj).is_zero());
            let c = crate::dz::cone(&s.incl);
            let induced = ChainMap::from_fn(c.complex.clone(), s.upper.clone(), |i| {
                IntMatrix::hstack(&s.proj.mat(i), &IntMatrix::zeros(s.upper.rank(i), s.lower.rank(i + 1)))
            });
            induced.check().unwrap();
            assert!(is_quasi_iso(&induced));
        }
    }
}
