mod common;

use halfstep::dz::{dual, hom_complex, is_quasi_iso, minimal_model, CutParam, Flavor, FreeComplex, Half, Side};
use halfstep::intlin::{smith_normal_form, IntMatrix};
use halfstep::tmod::{member, member_codim, member_gt, member_lt, p_truncate};
use halfstep::Int;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn complex(seed: u64) -> FreeComplex {
    common::random_complex(&mut ChaCha8Rng::seed_from_u64(seed))
}

fn cut() -> impl Strategy<Value = CutParam> {
    (-16i64..=16).prop_map(|k| CutParam::new(k, 4))
}

fn matrix() -> impl Strategy<Value = IntMatrix> {
    (1usize..5, 1usize..5).prop_flat_map(|(r, c)| {
        prop::collection::vec(-9i64..=9, r * c).prop_map(move |v| IntMatrix::from_rows(r, c, &v))
    })
}

fn is_unit(m: &IntMatrix) -> bool {
    let d = m.determinant();
    d.is_unit()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn smith_form_is_a_unimodular_diagonalization(a in matrix()) {
        let (u, d, v) = smith_normal_form(&a);
        prop_assert_eq!(u.mul(&a).mul(&v), d.clone());
        prop_assert!(is_unit(&u) && is_unit(&v));
        let diag: Vec<Int> = (0..d.rows().min(d.cols())).map(|i| d.get(i, i).clone()).filter(|x| !x.is_zero()).collect();
        for w in diag.windows(2) {
            prop_assert!(w[1].is_multiple_of(&w[0]));
        }
        for (r, c, x) in d.entries() {
            prop_assert!(r == c || x.is_zero());
        }
    }

    #[test]
    fn minimal_model_is_a_quasi_iso(seed in any::<u64>()) {
        let x = complex(seed);
        let m = minimal_model(&x);
        prop_assert!(is_quasi_iso(&m.map));
        prop_assert_eq!(m.complex.cohomology_all(), x.cohomology_all());
    }

    #[test]
    fn duality_exchanges_sides(seed in any::<u64>(), c in cut()) {
        let x = complex(seed);
        let d = dual(&x);
        prop_assert_eq!(member(&x, c, Side::Le), member(&d, c.neg(), Side::Ge));
        prop_assert_eq!(member(&x, c, Side::Ge), member(&d, c.neg(), Side::Le));
        prop_assert_eq!(dual(&d).cohomology_all(), x.cohomology_all());
    }

    #[test]
    fn membership_routes_agree(seed in any::<u64>(), c in cut()) {
        let x = complex(seed);
        for side in [Side::Le, Side::Ge] {
            prop_assert_eq!(member(&x, c, side), member_codim(&x, c, side));
        }
    }

    #[test]
    fn truncations_are_orthogonal_and_idempotent(a in any::<u64>(), b in any::<u64>(), c in cut()) {
        let (x, y) = (complex(a), complex(b));
        for flavor in [Flavor::LeGt, Flavor::LtGe] {
            let tx = p_truncate(&x, c, flavor);
            let ty = p_truncate(&y, c, flavor);
            prop_assert!(tx.verify().is_ok());
            prop_assert!(hom_complex(&tx.lower, &ty.upper).cohomology(0).is_zero());
            let again = p_truncate(&tx.lower, c, flavor);
            prop_assert!(again.upper.is_acyclic());
            let again = p_truncate(&tx.upper, c, flavor);
            prop_assert!(again.lower.is_acyclic());
        }
        let t = p_truncate(&x, c, Flavor::LtGe);
        prop_assert!(member_lt(&t.lower, c) && member(&t.upper, c, Side::Ge));
        let t = p_truncate(&x, c, Flavor::LeGt);
        prop_assert!(member(&t.lower, c, Side::Le) && member_gt(&t.upper, c));
    }

    #[test]
    fn nested_truncations_compose(seed in any::<u64>(), a in -8i64..=8, b in -8i64..=8) {
        let x = complex(seed);
        let (a, b) = (Half::from_twice(a).cut(), Half::from_twice(b).cut());
        let inner = p_truncate(&x, b, Flavor::LeGt).lower;
        let both = p_truncate(&inner, a, Flavor::LeGt).lower;
        let direct = p_truncate(&x, a.min(b), Flavor::LeGt).lower;
        prop_assert_eq!(both.cohomology_all(), direct.cohomology_all());
        let lo_hi = p_truncate(&p_truncate(&x, a, Flavor::LeGt).lower, b, Flavor::LtGe).upper;
        let hi_lo = p_truncate(&p_truncate(&x, b, Flavor::LtGe).upper, a, Flavor::LeGt).lower;
        prop_assert_eq!(lo_hi.cohomology_all(), hi_lo.cohomology_all());
    }
}

#[test]
fn random_complexes_have_torsion_and_rank() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let xs: Vec<FreeComplex> = (0..200).map(|_| common::random_complex(&mut rng)).collect();
    let torsion = xs.iter().filter(|x| x.cohomology_all().values().any(|g| !g.is_torsion_free())).count();
    let free = xs.iter().filter(|x| x.cohomology_all().values().any(|g| !g.is_torsion())).count();
    assert!(torsion >= 20 && free >= 20, "torsion {torsion}, free {free}");
}
