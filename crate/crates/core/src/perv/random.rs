use std::sync::Arc;

use rand::Rng;

use crate::cellspace::{
    closed_indicator, constant_sheaf, open_indicator, pushforward_open, restrict_open, skyscraper, Region, SheafComplex,
    SheafMap, StratPoset,
};
use crate::dz::{ChainMap, FreeComplex};
use crate::int::Int;
use crate::intlin::snf::kernel;
use crate::intlin::IntMatrix;

/// A small complex of free groups: sums of `ℤ[k]`, `ℤ/n[k]` and contractible `[ℤ → ℤ]`.
pub fn random_module(rng: &mut impl Rng) -> FreeComplex {
    let mut x = FreeComplex::zero();
    for _ in 0..rng.gen_range(1..=2) {
        let k = rng.gen_range(-1..=1);
        let piece = match rng.gen_range(0..5) {
            0..=2 => FreeComplex::z(k),
            3 => FreeComplex::torsion_model(rng.gen_range(2..=4), k),
            _ => FreeComplex::two_term(k, IntMatrix::identity(1)),
        };
        x = x.direct_sum(&piece);
    }
    x
}

fn random_cell(base: &StratPoset, rng: &mut impl Rng) -> usize {
    rng.gen_range(0..base.len())
}

fn star_mask(base: &StratPoset, s: usize) -> Vec<bool> {
    base.mask(&base.star(s))
}

fn closure_mask(base: &StratPoset, s: usize) -> Vec<bool> {
    base.mask(&base.closure(s))
}

/// One indecomposable-looking building block.
fn random_piece(base: &Arc<StratPoset>, rng: &mut impl Rng) -> SheafComplex {
    let m = random_module(rng);
    let s = random_cell(base, rng);
    match rng.gen_range(0..5) {
        0 => skyscraper(base, s, &m),
        1 => constant_sheaf(base, &m),
        2 => open_indicator(base, &star_mask(base, s)).expect("stars are open").tensor_module(&m),
        3 => closed_indicator(base, &closure_mask(base, s)).expect("closures are closed").tensor_module(&m),
        _ => {
            // Rj_* of a constant sheaf off a closed cell union.
            let u: Vec<bool> = closure_mask(base, s).iter().map(|&z| !z).collect();
            if !u.iter().any(|&b| b) {
                return constant_sheaf(base, &m);
            }
            let reg = Region::open(base, u).expect("complement of a closure is open");
            let g = restrict_open(&constant_sheaf(base, &m), &reg).expect("open");
            pushforward_open(&g, &reg, base).expect("open").complex
        }
    }
}

/// A random degree-0 cocycle of `RHom(a, b)` as a sheaf map, or `None` if there is none.
fn random_map(a: &SheafComplex, b: &SheafComplex, rng: &mut impl Rng) -> Option<SheafMap> {
    let layout = a.hom_layout(b);
    let h = layout.complex(a.complex(), b.complex());
    let n = h.rank(0);
    if n == 0 {
        return None;
    }
    let z = kernel(&h.d(0));
    if z.cols() == 0 {
        return None;
    }
    let coef: Vec<Int> = (0..z.cols()).map(|_| Int::from(rng.gen_range(-2i64..=2))).collect();
    let v = z.mul_vec(&coef);
    let mats = layout.maps_of(0, &v, a.complex(), b.complex());
    let map = ChainMap::from_fn(a.complex().clone(), b.complex().clone(), |i| {
        mats.get(&i).cloned().unwrap_or_else(|| IntMatrix::zeros(b.complex().rank(i), a.complex().rank(i)))
    });
    debug_assert!(map.check().is_ok());
    SheafMap::new(a.clone(), b.clone(), map).ok()
}

/// A seeded random sheaf complex: sums of building blocks, sometimes glued along a
/// random map into a non-split extension, then shifted.
pub fn random_sheaf(base: &Arc<StratPoset>, rng: &mut impl Rng) -> SheafComplex {
    let mut k = random_piece(base, rng);
    if rng.gen_bool(0.5) {
        let b = random_piece(base, rng);
        k = match random_map(&k, &b, rng) {
            Some(f) if rng.gen_bool(0.7) => f.cone().complex,
            _ => k.direct_sum(&b),
        };
    }
    k.shift(rng.gen_range(-1..=1))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cellspace::builtin;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn samples_are_valid_and_reproducible() {
        let x = Arc::new(builtin::simplex2().face_poset());
        let mut a = ChaCha8Rng::seed_from_u64(7);
        let mut b = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..20 {
            let k = random_sheaf(&x, &mut a);
            k.check().unwrap();
            let k2 = random_sheaf(&x, &mut b);
            assert_eq!(k.complex(), k2.complex());
        }
    }
}
