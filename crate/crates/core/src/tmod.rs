//! The self-dual t-structure on `D^b(ℤ)` indexed by half-integers.
//!
//! At `s = n` membership in `≤s` means `H^i = 0` for `i > n`; at `s = n − ½` the
//! group `H^n` must in addition be torsion. Dually, `≥ n − ½` means `H^i = 0` for
//! `i < n`, and `≥ n` additionally asks `H^n` to be torsion-free.

use crate::dz::{
    cone, dual, fiber, induced_cone_map, is_quasi_iso, lift_over, shift, split_at, ChainMap, CutParam, Flavor, FreeComplex, Half,
    Side,
};
use crate::int::Int;
use crate::intlin::group::is_prime;
use crate::intlin::snf::{saturated_image, snf_with, Track};
use crate::intlin::{codim_support, local_cohomology_at_prime, FgAbGroup, IntMatrix};

/// Membership at a half-integer level, from cohomology groups.
pub fn member_half(h: &std::collections::BTreeMap<i64, FgAbGroup>, s: Half, side: Side) -> bool {
    let n = s.ceil();
    match side {
        Side::Le => h.iter().all(|(&i, g)| i < n || (i == n && (s.is_integer() || g.is_torsion()))),
        Side::Ge => h.iter().all(|(&i, g)| i > n || (i == n && (!s.is_integer() || g.is_torsion_free()))),
    }
}

/// `X ∈ ≤c` or `X ∈ ≥c`, via the canonical half-integer level of `c`.
pub fn member(x: &FreeComplex, c: CutParam, side: Side) -> bool {
    let s = match side {
        Side::Le => c.canon_le(),
        Side::Ge => c.canon_ge(),
    };
    member_half(&x.cohomology_all(), s, side)
}

/// `X ∈ <c`.
pub fn member_lt(x: &FreeComplex, c: CutParam) -> bool {
    member_half(&x.cohomology_all(), c.strict_below(), Side::Le)
}

/// `X ∈ >c`.
pub fn member_gt(x: &FreeComplex, c: CutParam) -> bool {
    member_half(&x.cohomology_all(), c.strict_above(), Side::Ge)
}

/// Second route: `codim H^i ≥ 2(i − c)` for all `i`; the `≥` side through the dual.
pub fn member_codim(x: &FreeComplex, c: CutParam, side: Side) -> bool {
    match side {
        Side::Le => x.cohomology_all().iter().all(|(&i, g)| match codim_support(g).value() {
            None => true,
            Some(k) => CutParam::int(k) >= CutParam::int(2 * i).sub(CutParam(c.value() * 2)),
        }),
        Side::Ge => member_codim(&dual(x), c.neg(), Side::Le),
    }
}

/// Standard t-structure membership at a real cut (`H^i = 0` for `i > c`, resp. `i < c`).
pub fn member_std(x: &FreeComplex, c: CutParam, side: Side) -> bool {
    let h = x.cohomology_all();
    match side {
        Side::Le => h.keys().all(|&i| CutParam::int(i) <= c),
        Side::Ge => h.keys().all(|&i| CutParam::int(i) >= c),
    }
}

/// Local-cohomology form of `X ∈ ≥c`: `H^i X = 0` for `i < c`, and for every prime
/// `p`, `H^i RΓ_{(p)} X = 0` for `i < c + ½`.
///
/// `H^i RΓ_{(p)} X` vanishes iff `H^i X` has no `p`-torsion and `H^{i−1} X` has rank
/// zero. Primes not dividing any torsion coefficient behave alike; one of them is
/// checked as a representative.
pub fn member_ge_local(x: &FreeComplex, c: CutParam) -> bool {
    let h = x.cohomology_all();
    if h.keys().any(|&i| c.gt_int(i)) {
        return false;
    }
    let mut primes: Vec<Int> = Vec::new();
    for g in h.values() {
        for p in g.torsion_primes() {
            if !primes.contains(&p) {
                primes.push(p);
            }
        }
    }
    primes.push(generic_prime(&primes));
    let bound = c.add_halves(1);
    let get = |i: i64| h.get(&i).cloned().unwrap_or_default();
    let lo = h.keys().next().copied().unwrap_or(0);
    let hi = h.keys().last().copied().unwrap_or(0) + 1;
    for p in &primes {
        for i in lo..=hi {
            if !bound.gt_int(i) {
                continue;
            }
            let (h0, _) = local_cohomology_at_prime(&get(i), p).expect("prime");
            let (_, h1) = local_cohomology_at_prime(&get(i - 1), p).expect("prime");
            if !h0.is_zero() || h1 {
                return false;
            }
        }
    }
    true
}

fn generic_prime(avoid: &[Int]) -> Int {
    let mut p = Int::from(2);
    while avoid.contains(&p) || !is_prime(&p) {
        p = &p + &Int::ONE;
    }
    p
}

/// Truncation triangle `lower → X → upper → lower[1]`.
#[derive(Clone, Debug)]
pub struct TruncTriangle {
    pub lower: FreeComplex,
    pub upper: FreeComplex,
    /// `lower → X`.
    pub to_x: ChainMap,
    /// `X → upper`.
    pub from_x: ChainMap,
    /// `upper → lower[1]`.
    pub conn: ChainMap,
}

impl TruncTriangle {
    /// Checks chain-map validity, `from_x ∘ to_x ≃ 0`, and that the induced map
    /// `cone(to_x) → upper` is a quasi-isomorphism.
    pub fn verify(&self) -> Result<(), String> {
        for (name, f) in [("lower → X", &self.to_x), ("X → upper", &self.from_x), ("upper → lower[1]", &self.conn)] {
            f.check().map_err(|e| format!("{name}: {e}"))?;
        }
        let phi = induced_cone_map(&self.to_x, &self.from_x).ok_or("composite lower → X → upper is not null-homotopic")?;
        if !is_quasi_iso(&phi) {
            return Err("cone(lower → X) is not quasi-isomorphic to upper".into());
        }
        Ok(())
    }
}

fn from_split(x: &FreeComplex, s: Half) -> TruncTriangle {
    let sp = split_at(x, s);
    TruncTriangle { lower: sp.lower, upper: sp.upper, to_x: sp.incl, from_x: sp.proj, conn: sp.conn }
}

/// Truncation triangle for the flavor `(≤c, >c)` or `(<c, ≥c)`.
pub fn p_truncate(x: &FreeComplex, c: CutParam, flavor: Flavor) -> TruncTriangle {
    from_split(x, flavor.level(c))
}

/// Truncation at level `s` through the torsion pair (torsion, torsion-free).
///
/// At `s = n` this is the standard truncation, built as the fiber of `X → τ^{≥n+1}X`.
/// At `s = n − ½` the lower part is the fiber of `τ^{≤n}X → (H^n X / torsion)[−n]`.
pub fn torsion_pair_truncate(x: &FreeComplex, s: Half) -> TruncTriangle {
    if s.is_integer() {
        return from_fiber(&split_at(x, s).proj);
    }
    let n = s.ceil();
    let std = split_at(x, Half::int(n));
    let tau = &std.lower;
    let r = tau.rank(n);
    let q = if r == 0 {
        IntMatrix::zeros(0, 0)
    } else {
        // Coordinates on Z^n / sat(B^n), with Z^n the degree-n term of τ^{≤n}X.
        let sat = match tau.d_ref(n - 1) {
            Some(d) => saturated_image(d),
            None => IntMatrix::zeros(r, 0),
        };
        let snf = snf_with(&sat, Track { u: true, u_inv: false, v: false });
        let last: Vec<usize> = (sat.cols()..r).collect();
        snf.u.select_rows(&last)
    };
    let free_rank = q.rows();
    let target = FreeComplex::free(free_rank, n);
    let g = ChainMap::from_fn(tau.clone(), target, |_| q.clone());
    debug_assert!(g.check().is_ok());
    let (fib, to_tau) = fiber(&g);
    let to_x = to_tau.then(&std.incl);
    let c = cone(&to_x);
    TruncTriangle { lower: fib, upper: c.complex.clone(), to_x, from_x: c.incl, conn: c.proj }
}

fn from_fiber(proj: &ChainMap) -> TruncTriangle {
    let (fib, to_x) = fiber(proj);
    let upper = proj.target().clone();
    // fib[1] is cone(proj); the connecting map includes the upper summand.
    let c = cone(proj);
    let conn = ChainMap::from_fn(upper.clone(), shift(&fib, 1), |i| c.incl.mat(i));
    TruncTriangle { lower: fib, upper, to_x, from_x: proj.clone(), conn }
}

/// Compares two truncation triangles of the same `X`: lifts `lower_a → X` through
/// `lower_b → X` and checks the lift is a quasi-isomorphism.
pub fn same_truncation(a: &TruncTriangle, b: &TruncTriangle) -> bool {
    match lift_over(&a.to_x, &b.to_x) {
        Some(phi) => is_quasi_iso(&phi),
        None => false,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn z2() -> FreeComplex {
        FreeComplex::torsion_model(2, 0)
    }

    #[test]
    fn membership_examples() {
        assert!(member(&z2(), CutParam::new(-1, 2), Side::Le));
        assert!(member(&FreeComplex::z(0), CutParam::int(0), Side::Ge));
        assert!(!member(&z2(), CutParam::int(0), Side::Ge));
        assert!(!member(&FreeComplex::z(0), CutParam::new(-1, 4), Side::Le));
    }

    #[test]
    fn truncation_examples() {
        let x = FreeComplex::z(0).direct_sum(&z2());
        let t = p_truncate(&x, CutParam::new(-1, 2), Flavor::LeGt);
        t.verify().unwrap();
        assert_eq!(t.lower.cohomology_all(), [(0, FgAbGroup::cyclic(2))].into());
        assert_eq!(t.upper.cohomology_all(), [(0, FgAbGroup::free(1))].into());
        let tp = torsion_pair_truncate(&x, Half::below(0));
        tp.verify().unwrap();
        assert!(same_truncation(&t, &tp));

        let y = FreeComplex::two_term(0, IntMatrix::from_rows(1, 1, &[2]));
        let t = p_truncate(&y, CutParam::new(1, 2), Flavor::LeGt);
        assert!(t.upper.is_acyclic());
        let t = p_truncate(&y, CutParam::int(0), Flavor::LeGt);
        assert!(t.lower.is_acyclic());
    }

    #[test]
    fn local_criterion() {
        assert!(member_ge_local(&FreeComplex::z(0), CutParam::int(0)));
        assert!(!member_ge_local(&FreeComplex::z(0), CutParam::new(1, 2)));
        assert!(!member_ge_local(&z2(), CutParam::int(0)));
        assert!(member_ge_local(&z2(), CutParam::new(-1, 2)));
    }
}
