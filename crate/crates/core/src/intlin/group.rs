use std::fmt;

use serde::{Deserialize, Serialize};

use crate::int::Int;
use crate::intlin::matrix::IntMatrix;
use crate::intlin::snf::invariant_factors;
use crate::Error;

/// A finitely generated abelian group `ℤ^rank ⊕ ℤ/d₁ ⊕ … ⊕ ℤ/d_k` with `d₁ | … | d_k`, `dᵢ ≥ 2`.
#[derive(Clone, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
pub struct FgAbGroup {
    pub rank: usize,
    pub torsion: Vec<Int>,
}

impl FgAbGroup {
    pub fn zero() -> Self {
        FgAbGroup::default()
    }

    pub fn free(rank: usize) -> Self {
        FgAbGroup { rank, torsion: Vec::new() }
    }

    pub fn cyclic(n: i64) -> Self {
        if n == 0 {
            return FgAbGroup::free(1);
        }
        FgAbGroup::from_factors(0, &[Int::from(n)])
    }

    /// Canonical form of `ℤ^rank ⊕ ⊕ ℤ/fᵢ` for arbitrary nonzero factors.
    pub fn from_factors(rank: usize, factors: &[Int]) -> Self {
        let rel = IntMatrix::diag(factors);
        let mut g = group_from_presentation(&rel);
        g.rank += rank;
        g
    }

    pub fn is_zero(&self) -> bool {
        self.rank == 0 && self.torsion.is_empty()
    }

    pub fn is_torsion(&self) -> bool {
        self.rank == 0
    }

    pub fn is_torsion_free(&self) -> bool {
        self.torsion.is_empty()
    }

    pub fn direct_sum(&self, other: &FgAbGroup) -> FgAbGroup {
        let factors: Vec<Int> = self.torsion.iter().chain(&other.torsion).cloned().collect();
        FgAbGroup::from_factors(self.rank + other.rank, &factors)
    }

    /// Order of the torsion subgroup.
    pub fn torsion_order(&self) -> Int {
        self.torsion.iter().fold(Int::ONE, |acc, d| &acc * d)
    }

    /// Primes dividing some torsion coefficient, ascending.
    pub fn torsion_primes(&self) -> Vec<Int> {
        let mut ps = Vec::new();
        for d in &self.torsion {
            for p in prime_factors(d) {
                if !ps.contains(&p) {
                    ps.push(p);
                }
            }
        }
        ps.sort();
        ps
    }

    /// The `p`-primary part of the torsion subgroup.
    pub fn p_primary(&self, p: &Int) -> FgAbGroup {
        let mut factors = Vec::new();
        for d in &self.torsion {
            let mut pk = Int::ONE;
            let mut rest = d.clone();
            while rest.is_multiple_of(p) {
                rest = rest.div_exact(p);
                pk = &pk * p;
            }
            if !pk.is_one() {
                factors.push(pk);
            }
        }
        FgAbGroup::from_factors(0, &factors)
    }
}

impl fmt::Display for FgAbGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut parts = Vec::new();
        match self.rank {
            0 => {}
            1 => parts.push("Z".to_string()),
            r => parts.push(format!("Z^{r}")),
        }
        for d in &self.torsion {
            parts.push(format!("Z/{d}"));
        }
        write!(f, "{}", parts.join(" + "))
    }
}

impl fmt::Debug for FgAbGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// Codimension of support in Spec ℤ.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug, Serialize, Deserialize)]
pub enum Codim {
    Zero,
    One,
    Infinite,
}

impl Codim {
    /// Finite value, or `None` for ∞.
    pub fn value(self) -> Option<i64> {
        match self {
            Codim::Zero => Some(0),
            Codim::One => Some(1),
            Codim::Infinite => None,
        }
    }
}

/// Cokernel of `relations: ℤ^cols → ℤ^rows`.
pub fn group_from_presentation(relations: &IntMatrix) -> FgAbGroup {
    let diag = invariant_factors(relations);
    let rank = relations.rows() - diag.len();
    let torsion = diag.into_iter().filter(|d| !d.is_one()).collect();
    FgAbGroup { rank, torsion }
}

pub fn codim_support(m: &FgAbGroup) -> Codim {
    if m.rank > 0 {
        Codim::Zero
    } else if !m.torsion.is_empty() {
        Codim::One
    } else {
        Codim::Infinite
    }
}

/// Torsion subgroup and free rank.
pub fn torsion_split(m: &FgAbGroup) -> (FgAbGroup, usize) {
    (FgAbGroup { rank: 0, torsion: m.torsion.clone() }, m.rank)
}

/// `RΓ_{V(p)} M = [M → M[1/p]]`: returns `H⁰` (the `p`-primary torsion) and whether `H¹ ≠ 0`.
pub fn local_cohomology_at_prime(m: &FgAbGroup, p: &Int) -> Result<(FgAbGroup, bool), Error> {
    if !is_prime(p) {
        return Err(Error::NotPrime(p.to_string()));
    }
    Ok((m.p_primary(p), m.rank > 0))
}

pub fn is_prime(p: &Int) -> bool {
    let Some(n) = p.to_i64() else {
        return false;
    };
    if n < 2 {
        return false;
    }
    let mut d = 2i64;
    while d.saturating_mul(d) <= n {
        if n % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

/// Distinct prime factors by trial division.
pub fn prime_factors(n: &Int) -> Vec<Int> {
    let mut n = n.abs();
    let mut out = Vec::new();
    let mut d = Int::from(2);
    while &d * &d <= n {
        if n.is_multiple_of(&d) {
            out.push(d.clone());
            while n.is_multiple_of(&d) {
                n = n.div_exact(&d);
            }
        }
        d = &d + &Int::ONE;
    }
    if n > Int::ONE {
        out.push(n);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn presentations() {
        let g = group_from_presentation(&IntMatrix::from_rows(1, 1, &[2]));
        assert_eq!(g, FgAbGroup::from_factors(0, &[Int::from(2)]));
        let g = group_from_presentation(&IntMatrix::zeros(1, 0));
        assert_eq!(g, FgAbGroup::free(1));
        let g = group_from_presentation(&IntMatrix::from_rows(2, 2, &[2, 0, 0, 3]));
        assert_eq!(g.torsion, vec![Int::from(6)]);
        assert_eq!(g.rank, 0);
    }

    #[test]
    fn codim_and_local() {
        assert_eq!(codim_support(&FgAbGroup::free(1)), Codim::Zero);
        assert_eq!(codim_support(&FgAbGroup::cyclic(6)), Codim::One);
        assert_eq!(codim_support(&FgAbGroup::zero()), Codim::Infinite);
        let two = Int::from(2);
        assert_eq!(local_cohomology_at_prime(&FgAbGroup::cyclic(4), &two).unwrap(), (FgAbGroup::cyclic(4), false));
        assert_eq!(local_cohomology_at_prime(&FgAbGroup::free(1), &two).unwrap(), (FgAbGroup::zero(), true));
        assert_eq!(local_cohomology_at_prime(&FgAbGroup::cyclic(3), &two).unwrap(), (FgAbGroup::zero(), false));
        assert!(local_cohomology_at_prime(&FgAbGroup::free(1), &Int::from(4)).is_err());
    }

    #[test]
    fn splitting() {
        let m = FgAbGroup::free(1).direct_sum(&FgAbGroup::cyclic(2));
        assert_eq!(torsion_split(&m), (FgAbGroup::cyclic(2), 1));
        assert_eq!(torsion_split(&FgAbGroup::cyclic(4)), (FgAbGroup::cyclic(4), 0));
        assert_eq!(torsion_split(&FgAbGroup::zero()), (FgAbGroup::zero(), 0));
    }
}
